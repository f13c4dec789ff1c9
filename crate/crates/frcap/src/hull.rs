//! Convex projections on the Bloch ball.
//!
//! The numeric capacity solver reduces Bloch-ball feasibility to a distance
//! query against the convex hull of the target set. Two hull shapes arise:
//! solid spherical caps (hull of a surface cap) and hulls of finite point
//! sets. Caps admit an exact three-case projection; finite hulls use Wolfe's
//! min-norm-point algorithm, which terminates finitely and reaches machine
//! precision on the small point sets used here.

use crate::space::{dot3, norm3};

/// Projection of `point` onto the solid cap
/// `{ x : |x| <= 1, <axis, x> >= height }` with unit `axis`, `height` in [-1, 1].
///
/// The projection onto the intersection of the ball and the halfspace is the
/// ball projection when that lands in the halfspace, the halfspace projection
/// when that lands in the ball, and otherwise the projection onto the rim
/// circle where both boundaries meet.
pub fn project_to_cap_hull(point: &[f64; 3], axis: &[f64; 3], height: f64) -> [f64; 3] {
    let h = dot3(axis, point);
    let norm = norm3(point);
    if norm <= 1.0 && h >= height {
        return *point;
    }

    let mut best: Option<([f64; 3], f64)> = None;
    let mut consider = |candidate: [f64; 3], feasible: bool| {
        if !feasible {
            return;
        }
        let d = norm3(&[
            candidate[0] - point[0],
            candidate[1] - point[1],
            candidate[2] - point[2],
        ]);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((candidate, d));
        }
    };

    // Onto the ball.
    if norm > 0.0 {
        let scaled = [point[0] / norm, point[1] / norm, point[2] / norm];
        consider(scaled, dot3(axis, &scaled) >= height - 1e-14);
    }

    // Onto the halfspace boundary plane (only relevant when below it).
    if h < height {
        let lifted = [
            point[0] + (height - h) * axis[0],
            point[1] + (height - h) * axis[1],
            point[2] + (height - h) * axis[2],
        ];
        consider(lifted, norm3(&lifted) <= 1.0 + 1e-14);
    }

    // Onto the rim circle at the cap boundary.
    let radial = [
        point[0] - h * axis[0],
        point[1] - h * axis[1],
        point[2] - h * axis[2],
    ];
    let rho = norm3(&radial);
    let rim_radius = (1.0 - height * height).max(0.0).sqrt();
    let rim = if rho > 1e-14 {
        [
            height * axis[0] + rim_radius * radial[0] / rho,
            height * axis[1] + rim_radius * radial[1] / rho,
            height * axis[2] + rim_radius * radial[2] / rho,
        ]
    } else {
        // The point sits on the axis; every rim point is equidistant.
        let seed = if axis[0].abs() < 0.9 {
            [1.0, 0.0, 0.0]
        } else {
            [0.0, 1.0, 0.0]
        };
        let mut tangent = [
            seed[0] - dot3(axis, &seed) * axis[0],
            seed[1] - dot3(axis, &seed) * axis[1],
            seed[2] - dot3(axis, &seed) * axis[2],
        ];
        let t_norm = norm3(&tangent);
        for coord in &mut tangent {
            *coord /= t_norm;
        }
        [
            height * axis[0] + rim_radius * tangent[0],
            height * axis[1] + rim_radius * tangent[1],
            height * axis[2] + rim_radius * tangent[2],
        ]
    };
    consider(rim, true);

    best.expect("the rim candidate is always feasible").0
}

/// Projection of `point` onto the convex hull of `points` via Wolfe's
/// min-norm-point algorithm. Returns the projection together with the hull
/// weights that realize it.
pub fn project_to_finite_hull(point: &[f64; 3], points: &[[f64; 3]]) -> ([f64; 3], Vec<f64>) {
    assert!(!points.is_empty(), "hull needs at least one point");
    let shifted: Vec<[f64; 3]> = points
        .iter()
        .map(|x| [x[0] - point[0], x[1] - point[1], x[2] - point[2]])
        .collect();

    // Corral: indices into `shifted` with strictly positive weights.
    let start = (0..shifted.len())
        .min_by(|&i, &j| norm3(&shifted[i]).total_cmp(&norm3(&shifted[j])))
        .unwrap();
    let mut corral = vec![start];
    let mut weights = vec![1.0f64];

    let scale = shifted.iter().map(norm3).fold(1.0f64, f64::max);
    let tol = 1e-13 * scale * scale;

    for _ in 0..200 {
        let z = combine(&corral, &weights, &shifted);
        let z_sq = dot3(&z, &z);

        // Linear minimization over all points.
        let entering = (0..shifted.len())
            .min_by(|&i, &j| dot3(&z, &shifted[i]).total_cmp(&dot3(&z, &shifted[j])))
            .unwrap();
        if dot3(&z, &shifted[entering]) >= z_sq - tol || corral.contains(&entering) {
            break;
        }
        corral.push(entering);
        weights.push(0.0);

        // Minor cycle: pull the affine minimizer back into the simplex.
        for _ in 0..50 {
            match affine_minimizer(&corral, &shifted) {
                Some(u) if u.iter().all(|&w| w > 1e-14) => {
                    weights = u;
                    break;
                }
                Some(u) => {
                    // Step toward u until the first weight hits zero, then drop it.
                    let mut theta = 1.0f64;
                    for (w, candidate) in weights.iter().zip(&u) {
                        if *candidate < 1e-14 && w - candidate > 1e-300 {
                            theta = theta.min(w / (w - candidate));
                        }
                    }
                    for (w, candidate) in weights.iter_mut().zip(&u) {
                        *w = (1.0 - theta) * *w + theta * candidate;
                    }
                    let keep: Vec<usize> =
                        (0..corral.len()).filter(|&i| weights[i] > 1e-14).collect();
                    if keep.len() == corral.len() {
                        // Numerical stall: drop the smallest weight outright.
                        let drop = (0..corral.len())
                            .min_by(|&i, &j| weights[i].total_cmp(&weights[j]))
                            .unwrap();
                        corral.remove(drop);
                        weights.remove(drop);
                    } else {
                        corral = keep.iter().map(|&i| corral[i]).collect();
                        weights = keep.iter().map(|&i| weights[i]).collect();
                    }
                    let total: f64 = weights.iter().sum();
                    for w in &mut weights {
                        *w /= total;
                    }
                }
                None => {
                    // Singular corral: drop the member with the smallest weight.
                    let drop = (0..corral.len())
                        .min_by(|&i, &j| weights[i].total_cmp(&weights[j]))
                        .unwrap();
                    corral.remove(drop);
                    weights.remove(drop);
                    let total: f64 = weights.iter().sum();
                    for w in &mut weights {
                        *w /= total;
                    }
                }
            }
        }
    }

    let z = combine(&corral, &weights, &shifted);
    let projection = [point[0] + z[0], point[1] + z[1], point[2] + z[2]];
    let mut full_weights = vec![0.0; points.len()];
    for (idx, w) in corral.iter().zip(&weights) {
        full_weights[*idx] += w;
    }
    (projection, full_weights)
}

fn combine(corral: &[usize], weights: &[f64], points: &[[f64; 3]]) -> [f64; 3] {
    let mut z = [0.0; 3];
    for (&idx, &w) in corral.iter().zip(weights) {
        z[0] += w * points[idx][0];
        z[1] += w * points[idx][1];
        z[2] += w * points[idx][2];
    }
    z
}

/// Minimizes `|sum_i u_i q_i|` over affine weights (`sum u = 1`, sign-free)
/// for the corral members; `None` when the corral Gram system is singular.
fn affine_minimizer(corral: &[usize], points: &[[f64; 3]]) -> Option<Vec<f64>> {
    let k = corral.len();
    // KKT system: [G 1; 1^T 0] [u; lambda] = [0; 1].
    let mut system = vec![vec![0.0; k + 2]; k + 1];
    for i in 0..k {
        for j in 0..k {
            system[i][j] = dot3(&points[corral[i]], &points[corral[j]]);
        }
        system[i][k] = 1.0;
        system[i][k + 1] = 0.0;
    }
    for j in 0..k {
        system[k][j] = 1.0;
    }
    system[k][k] = 0.0;
    system[k][k + 1] = 1.0;
    solve_linear_system(&mut system).map(|solution| solution[..k].to_vec())
}

/// Gaussian elimination with partial pivoting on an augmented system
/// (last column is the right-hand side). Returns `None` when singular.
pub(crate) fn solve_linear_system(system: &mut [Vec<f64>]) -> Option<Vec<f64>> {
    let n = system.len();
    let scale: f64 = system
        .iter()
        .flat_map(|row| row[..n].iter())
        .fold(0.0f64, |acc, &v| acc.max(v.abs()))
        .max(1.0);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| system[i][col].abs().total_cmp(&system[j][col].abs()))
            .unwrap();
        if system[pivot_row][col].abs() <= 1e-13 * scale {
            return None;
        }
        system.swap(col, pivot_row);
        for row in (col + 1)..n {
            let factor = system[row][col] / system[col][col];
            for j in col..=n {
                system[row][j] -= factor * system[col][j];
            }
        }
    }
    let mut solution = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = system[row][n];
        for j in (row + 1)..n {
            acc -= system[row][j] * solution[j];
        }
        solution[row] = acc / system[row][row];
    }
    Some(solution)
}
