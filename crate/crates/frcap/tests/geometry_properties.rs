//! Randomized invariants of the ensemble spaces and statistical variables:
//! mixtures stay inside their space, extreme points admit no nontrivial
//! decomposition, the Bloch ball and the two-level density matrices are the
//! same geometry, and affine evaluation is exactly affine.

use frcap::{
    convex_combine, sample_extreme_points, Ensemble, EnsembleSpace, ExtremeSet, Hermitian,
    SplitMix64, StatisticalVariable,
};
use proptest::prelude::*;

fn random_ensemble(rng: &mut SplitMix64, space: &EnsembleSpace) -> Ensemble {
    match space {
        EnsembleSpace::Simplex { outcomes } => {
            Ensemble::distribution(rng.distribution(*outcomes)).unwrap()
        }
        EnsembleSpace::BlochBall => {
            let mut r = rng.unit_vector();
            let radius = rng.uniform().powf(1.0 / 3.0);
            for coord in &mut r {
                *coord *= radius;
            }
            Ensemble::bloch(r).unwrap()
        }
        EnsembleSpace::DensityMatrix { dim } => {
            // Random mixture of a few pure states.
            let pures = sample_extreme_points(space, 4, rng.next_u64()).unwrap();
            let weights = rng.distribution(pures.len());
            let mut acc = Hermitian::zeros(*dim);
            for (w, pure) in weights.iter().zip(&pures) {
                acc.axpy_mut(*w, pure.as_density().unwrap()).unwrap();
            }
            Ensemble::density(acc).unwrap()
        }
    }
}

fn random_variable(rng: &mut SplitMix64, space: &EnsembleSpace) -> StatisticalVariable {
    match space {
        EnsembleSpace::Simplex { outcomes } => {
            StatisticalVariable::on_simplex((0..*outcomes).map(|_| rng.range(-5.0, 5.0)).collect())
                .unwrap()
        }
        EnsembleSpace::BlochBall => {
            let g = [
                rng.range(-2.0, 2.0),
                rng.range(-2.0, 2.0),
                rng.range(-2.0, 2.0),
            ];
            StatisticalVariable::on_bloch(g, rng.range(-3.0, 3.0)).unwrap()
        }
        EnsembleSpace::DensityMatrix { dim } => {
            let mut o = Hermitian::zeros(*dim);
            for i in 0..*dim {
                o.set(i, i, num_complex::Complex64::new(rng.range(-3.0, 3.0), 0.0));
                for j in (i + 1)..*dim {
                    let z = num_complex::Complex64::new(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0));
                    o.set(i, j, z);
                    o.set(j, i, z.conj());
                }
            }
            StatisticalVariable::on_density(o).unwrap()
        }
    }
}

fn spaces() -> Vec<EnsembleSpace> {
    vec![
        EnsembleSpace::simplex(2).unwrap(),
        EnsembleSpace::simplex(5).unwrap(),
        EnsembleSpace::BlochBall,
        EnsembleSpace::density_matrix(2).unwrap(),
        EnsembleSpace::density_matrix(3).unwrap(),
    ]
}

#[test]
fn mixtures_stay_in_their_space() {
    // 10^4 randomized trials split across the spaces.
    let mut rng = SplitMix64::new(101);
    for space in spaces() {
        for _ in 0..2000 {
            let a = random_ensemble(&mut rng, &space);
            let b = random_ensemble(&mut rng, &space);
            let p = rng.uniform();
            let mixed = convex_combine(p, &a, &b).unwrap();
            assert!(space.contains(mixed.payload()).unwrap());
        }
    }
}

#[test]
fn extreme_points_admit_no_nontrivial_decomposition() {
    // Distance from an extreme point to the segment between two distinct
    // sampled points stays positive unless an endpoint is the point itself.
    let mut rng = SplitMix64::new(103);
    for space in [EnsembleSpace::BlochBall, EnsembleSpace::simplex(4).unwrap()] {
        let samples = sample_extreme_points(&space, 24, 5).unwrap();
        let interior: Vec<Ensemble> = (0..24).map(|_| random_ensemble(&mut rng, &space)).collect();
        let pool: Vec<&Ensemble> = samples.iter().chain(&interior).collect();
        for x in samples.iter().take(6) {
            for (i, a) in pool.iter().enumerate() {
                for b in pool.iter().skip(i + 1) {
                    if a.distance(x).unwrap() < 1e-9 || b.distance(x).unwrap() < 1e-9 {
                        continue;
                    }
                    // Sample the open segment; x must stay clear of it.
                    for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
                        let mix = convex_combine(p, a, b).unwrap();
                        assert!(
                            mix.distance(x).unwrap() > 1e-9,
                            "extreme point reproduced as a nontrivial mixture in {space}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn bloch_and_qubit_density_geometry_agree() {
    let mut rng = SplitMix64::new(107);
    let qubit = EnsembleSpace::density_matrix(2).unwrap();
    for _ in 0..2000 {
        let bloch = random_ensemble(&mut rng, &EnsembleSpace::BlochBall);
        let rho = bloch.to_qubit_density().unwrap();
        assert!(qubit.contains(rho.payload()).unwrap());
        assert_eq!(bloch.is_extreme(), rho.is_extreme());
        let back = rho.to_bloch().unwrap();
        assert!(bloch.distance(&back).unwrap() < 1e-10);
    }
    // Surface points map to pure states.
    for point in sample_extreme_points(&EnsembleSpace::BlochBall, 50, 0).unwrap() {
        let rho = point.to_qubit_density().unwrap();
        assert!(rho.is_extreme());
    }
}

#[test]
fn evaluation_is_affine() {
    // |F(p a + (1-p) b) - p F(a) - (1-p) F(b)| < 1e-10 over 10^4 triples.
    let mut rng = SplitMix64::new(109);
    for space in spaces() {
        let f = random_variable(&mut rng, &space);
        for _ in 0..2000 {
            let a = random_ensemble(&mut rng, &space);
            let b = random_ensemble(&mut rng, &space);
            let p = rng.uniform();
            let mixed = convex_combine(p, &a, &b).unwrap();
            let lhs = f.evaluate(&mixed).unwrap();
            let rhs = p * f.evaluate(&a).unwrap() + (1.0 - p) * f.evaluate(&b).unwrap();
            assert!((lhs - rhs).abs() < 1e-10, "affinity violated in {space}");
        }
    }
}

#[test]
fn level_sets_shrink_as_the_threshold_grows() {
    let mut rng = SplitMix64::new(113);
    for space in spaces() {
        let samples = sample_extreme_points(&space, 64, 11).unwrap();
        for _ in 0..50 {
            let f = random_variable(&mut rng, &space);
            let range = f.range_over_extremes().unwrap();
            let (a, b) = (range.min_value, range.max_value);
            let s1 = rng.range(a - 0.5, b + 0.5);
            let s2 = s1 + rng.range(0.0, 1.0);
            let lower = f.level_set(s1).unwrap();
            let upper = f.level_set(s2).unwrap();
            // Membership containment on sampled extreme points.
            for x in &samples {
                if upper.contains_extreme(x, 1e-12).unwrap() {
                    assert!(
                        lower.contains_extreme(x, 1e-9).unwrap(),
                        "level set at {s2} not inside level set at {s1} in {space}"
                    );
                }
            }
        }
    }
}

#[test]
fn fibonacci_lattice_covers_the_sphere() {
    // Nearest-neighbor statistics: all 10^4 points distinct, spacing within
    // a small factor of the ideal uniform spacing ~ sqrt(4 pi / n).
    let points = sample_extreme_points(&EnsembleSpace::BlochBall, 10_000, 0).unwrap();
    let coords: Vec<&[f64; 3]> = points.iter().map(|p| p.as_bloch().unwrap()).collect();
    let ideal = (4.0 * std::f64::consts::PI / coords.len() as f64).sqrt();

    let mut max_nn: f64 = 0.0;
    let mut min_nn = f64::INFINITY;
    for (i, a) in coords.iter().enumerate() {
        let mut nearest = f64::INFINITY;
        for (j, b) in coords.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
            nearest = nearest.min(d);
        }
        assert!(nearest > 1e-9, "lattice points collide at index {i}");
        max_nn = max_nn.max(nearest);
        min_nn = min_nn.min(nearest);
    }
    assert!(
        max_nn < 3.0 * ideal,
        "largest nearest-neighbor gap {max_nn} vs ideal {ideal}"
    );
    assert!(
        min_nn > ideal / 10.0,
        "smallest nearest-neighbor gap {min_nn} vs ideal {ideal}"
    );
}

proptest! {
    #[test]
    fn prop_mixture_membership_on_the_ball(
        ax in -1.0..1.0f64, ay in -1.0..1.0f64, az in -1.0..1.0f64,
        bx in -1.0..1.0f64, by in -1.0..1.0f64, bz in -1.0..1.0f64,
        p in 0.0..=1.0f64,
    ) {
        let clamp = |v: [f64; 3]| {
            let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if norm > 1.0 { [v[0] / norm, v[1] / norm, v[2] / norm] } else { v }
        };
        let a = Ensemble::bloch(clamp([ax, ay, az])).unwrap();
        let b = Ensemble::bloch(clamp([bx, by, bz])).unwrap();
        let mixed = convex_combine(p, &a, &b).unwrap();
        prop_assert!(EnsembleSpace::BlochBall.contains(mixed.payload()).unwrap());
    }

    #[test]
    fn prop_level_sets_nest_on_the_simplex(
        values in proptest::collection::vec(-10.0..10.0f64, 2..7),
        s in -12.0..12.0f64,
        delta in 0.0..5.0f64,
    ) {
        let f = StatisticalVariable::on_simplex(values.clone()).unwrap();
        let lower = f.level_set(s).unwrap();
        let upper = f.level_set(s + delta).unwrap();
        let members = |set: &ExtremeSet| -> Vec<usize> {
            (0..values.len())
                .filter(|&i| {
                    let v = Ensemble::simplex_vertex(values.len(), i).unwrap();
                    set.contains_extreme(&v, 1e-12).unwrap()
                })
                .collect()
        };
        let upper_members = members(&upper);
        let lower_members = members(&lower);
        for i in upper_members {
            prop_assert!(lower_members.contains(&i));
        }
    }
}
