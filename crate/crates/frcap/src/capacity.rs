//! Fraction capacities on ensemble spaces.
//!
//! The fraction capacity of a set `A` of extreme points, anchored at a
//! reference state, is the largest fraction `p` such that the reference
//! decomposes as `p * a + (1 - p) * b` with `a` in the closed convex hull of
//! `A` and `b` somewhere in the space. It is a monotone, subadditive set
//! function, normalized to 0 on the empty set and 1 on the full extreme set,
//! and it is additive exactly on the simplex.
//!
//! Three evaluation routes are provided and cross-checked in the tests:
//!
//! * closed forms (vertex mass on the simplex, spherical caps at the Bloch
//!   center),
//! * a bisection over the decomposition feasibility predicate, with inner
//!   convex solvers per space,
//! * an independent discretization oracle that restates the capacity as a
//!   linear program over representing weights on sampled extreme points.

use crate::error::{Error, Result};
use crate::hull::{project_to_cap_hull, project_to_finite_hull};
use crate::lp::{solve_equality_lp, LpOutcome};
use crate::matrix::Hermitian;
use crate::space::{
    norm3, sample_extreme_points, Ensemble, EnsembleSpace, ExtremeSet, Payload, MEMBERSHIP_TOL,
};
use crate::variable::StatisticalVariable;

/// Default bisection tolerance on the returned fraction.
pub const DEFAULT_BISECTION_TOL: f64 = 1e-10;
/// Default sample count for the discretization oracle.
pub const DEFAULT_ORACLE_SAMPLES: usize = 10_000;

const BISECTION_MAX_ITERATIONS: usize = 200;
const FRANK_WOLFE_MAX_ITERATIONS: usize = 500;
const FRANK_WOLFE_GAP_TOL: f64 = 1e-9;
/// Slack on inner feasibility decisions, consistent with membership checks.
const FEASIBILITY_SLACK: f64 = 1e-12;

/// How a [`FractionCapacity`] evaluates sets.
#[derive(Debug, Clone)]
pub enum Strategy {
    /// Closed form where one exists, numeric bisection otherwise.
    Auto,
    /// Closed forms only; errors on sets without one.
    ClosedForm,
    /// Bisection over the feasibility predicate at the given tolerance.
    Numeric { tolerance: f64 },
    /// Discretization oracle: a linear program over sampled extreme points.
    Oracle { samples: usize, seed: u64 },
}

/// The set function `A -> capacity in [0, 1]` anchored at a reference state.
#[derive(Debug, Clone)]
pub struct FractionCapacity {
    reference: Ensemble,
    strategy: Strategy,
}

/// A decomposition `reference = fraction * inside + (1 - fraction) * complement`
/// certifying a feasible fraction.
#[derive(Debug, Clone)]
pub struct FeasibilityWitness {
    pub fraction: f64,
    /// The component drawn from the closed convex hull of the set.
    pub inside: Ensemble,
    /// The rest of the decomposition; an arbitrary point of the space.
    pub complement: Ensemble,
}

/// Value and certificate returned by the numeric solver.
#[derive(Debug, Clone)]
pub struct NumericCapacity {
    pub value: f64,
    pub witness: FeasibilityWitness,
}

impl FractionCapacity {
    /// Capacity anchored at `reference`, evaluated by the most precise
    /// strategy available per set.
    pub fn new(reference: Ensemble) -> Self {
        Self {
            reference,
            strategy: Strategy::Auto,
        }
    }

    pub fn with_strategy(reference: Ensemble, strategy: Strategy) -> Self {
        Self {
            reference,
            strategy,
        }
    }

    pub fn reference(&self) -> &Ensemble {
        &self.reference
    }

    pub fn strategy(&self) -> &Strategy {
        &self.strategy
    }

    pub fn space(&self) -> EnsembleSpace {
        self.reference.space()
    }

    /// The capacity of a set of extreme points.
    pub fn capacity(&self, set: &ExtremeSet) -> Result<f64> {
        match set {
            ExtremeSet::Empty => return Ok(0.0),
            ExtremeSet::Full => return Ok(1.0),
            _ => {}
        }
        if let Some(space) = set.space() {
            if space != self.space() {
                return Err(Error::SpaceMismatch {
                    left: self.space(),
                    right: space,
                });
            }
        }
        match &self.strategy {
            Strategy::Auto => self.capacity_auto(set),
            Strategy::ClosedForm => {
                self.capacity_closed_form(set)?
                    .ok_or_else(|| Error::UnsupportedSet {
                        set: set_variant_name(set),
                        strategy: "closed-form",
                        space: self.space(),
                    })
            }
            Strategy::Numeric { tolerance } => {
                Ok(numeric_capacity(&self.reference, set, *tolerance)?.value)
            }
            Strategy::Oracle { samples, seed } => {
                oracle_capacity(&self.reference, set, *samples, *seed)
            }
        }
    }

    fn capacity_auto(&self, set: &ExtremeSet) -> Result<f64> {
        if let Some(value) = self.capacity_closed_form(set)? {
            return Ok(value);
        }
        Ok(numeric_capacity(&self.reference, set, DEFAULT_BISECTION_TOL)?.value)
    }

    /// Closed form where available: vertex mass on the simplex, spherical
    /// caps anchored at the Bloch center.
    fn capacity_closed_form(&self, set: &ExtremeSet) -> Result<Option<f64>> {
        match (self.reference.payload(), set) {
            (Payload::Distribution(_), ExtremeSet::Finite(_)) => {
                Ok(Some(simplex_capacity(&self.reference, set)?))
            }
            (Payload::Bloch(r), ExtremeSet::Cap { height, .. }) if norm3(r) <= MEMBERSHIP_TOL => {
                Ok(Some(center_cap_capacity(*height)))
            }
            // General-reference caps have no closed form; callers fall
            // through to the numeric solver.
            _ => Ok(None),
        }
    }

    /// The analytic survival profile of `variable` under this capacity, when
    /// the (reference, strategy) pair admits one.
    pub(crate) fn closed_survival(
        &self,
        variable: &StatisticalVariable,
    ) -> Result<Option<ClosedSurvival>> {
        if !matches!(self.strategy, Strategy::Auto | Strategy::ClosedForm) {
            return Ok(None);
        }
        if variable.space() != self.space() {
            return Err(Error::SpaceMismatch {
                left: self.space(),
                right: variable.space(),
            });
        }
        let range = variable.range_over_extremes()?;
        if range.degenerate {
            return Ok(Some(ClosedSurvival::Constant {
                value: range.min_value,
            }));
        }
        match self.reference.payload() {
            Payload::Distribution(q) => match variable.form() {
                crate::variable::VariableForm::Simplex { values } => {
                    Ok(Some(ClosedSurvival::SimplexSteps {
                        values: values.clone(),
                        masses: q.clone(),
                    }))
                }
                _ => Ok(None),
            },
            Payload::Bloch(r) if norm3(r) <= MEMBERSHIP_TOL => {
                Ok(Some(ClosedSurvival::BlochCenterCap {
                    min_value: range.min_value,
                    max_value: range.max_value,
                }))
            }
            _ => Ok(None),
        }
    }
}

/// Analytic survival-function shapes recognized by the integrals.
#[derive(Debug, Clone)]
pub(crate) enum ClosedSurvival {
    /// Constant variable: survival is a single step of height 1 at `value`.
    Constant { value: f64 },
    /// Simplex: survival steps down at each variable value by its mass.
    SimplexSteps { values: Vec<f64>, masses: Vec<f64> },
    /// Bloch center: 1 up to the midpoint, then half-range / (s - min), 0
    /// beyond the maximum.
    BlochCenterCap { min_value: f64, max_value: f64 },
}

fn set_variant_name(set: &ExtremeSet) -> &'static str {
    match set {
        ExtremeSet::Empty => "empty",
        ExtremeSet::Full => "full",
        ExtremeSet::Finite(_) => "finite",
        ExtremeSet::Cap { .. } => "cap",
        ExtremeSet::LevelSet { .. } => "level-set",
    }
}

/// Capacity of a vertex set on the simplex: the total reference mass on the
/// selected vertices. Additivity over disjoint vertex sets is exact here.
pub fn simplex_capacity(reference: &Ensemble, set: &ExtremeSet) -> Result<f64> {
    let q = reference
        .as_distribution()
        .ok_or_else(|| Error::SpaceMismatch {
            left: EnsembleSpace::Simplex { outcomes: 0 },
            right: reference.space(),
        })?;
    match set {
        ExtremeSet::Empty => Ok(0.0),
        ExtremeSet::Full => Ok(1.0),
        ExtremeSet::Finite(points) => {
            let mask = vertex_mask(q.len(), points, &reference.space())?;
            let mass: f64 = mask
                .iter()
                .enumerate()
                .filter(|(_, &selected)| selected)
                .map(|(i, _)| q[i])
                .sum();
            Ok(mass.clamp(0.0, 1.0))
        }
        other => Err(Error::UnsupportedSet {
            set: set_variant_name(other),
            strategy: "simplex closed form",
            space: reference.space(),
        }),
    }
}

/// Maps finite-set members to vertex indices, deduplicating repeats.
fn vertex_mask(n: usize, points: &[Ensemble], space: &EnsembleSpace) -> Result<Vec<bool>> {
    let mut mask = vec![false; n];
    for point in points {
        let q = point
            .as_distribution()
            .ok_or_else(|| Error::SpaceMismatch {
                left: space.clone(),
                right: point.space(),
            })?;
        if q.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: q.len(),
            });
        }
        let (index, &peak) = q
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("distributions are nonempty");
        if peak < 1.0 - 1e-10 {
            return Err(Error::NotExtreme {
                space: space.clone(),
            });
        }
        mask[index] = true;
    }
    Ok(mask)
}

/// Capacity of a spherical cap `{ <axis, x> >= height }` at a Bloch-ball
/// reference. The center admits the closed form `1` for `height <= 0` and
/// `1 / (1 + height)` above; other references go through the numeric solver.
pub fn bloch_cap_capacity(reference: &Ensemble, axis: [f64; 3], height: f64) -> Result<f64> {
    let r = reference.as_bloch().ok_or_else(|| Error::SpaceMismatch {
        left: EnsembleSpace::BlochBall,
        right: reference.space(),
    })?;
    if (norm3(&axis) - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "cap axis must be a unit vector (norm {})",
            norm3(&axis)
        )));
    }
    if height > 1.0 {
        return Ok(0.0); // empty cap
    }
    if norm3(r) <= MEMBERSHIP_TOL {
        return Ok(center_cap_capacity(height));
    }
    let set = ExtremeSet::cap(axis, height.max(-1.0))?;
    Ok(numeric_capacity(reference, &set, DEFAULT_BISECTION_TOL)?.value)
}

/// Center-anchored cap capacity. The nearest hull point of the cap sits at
/// distance `height` along the axis, and mixing it against the antipodal
/// surface point yields the fraction `1 / (1 + height)`.
fn center_cap_capacity(height: f64) -> f64 {
    if height > 1.0 {
        0.0
    } else if height <= 0.0 {
        1.0
    } else {
        1.0 / (1.0 + height)
    }
}

/// Bisection over the decomposition feasibility predicate.
///
/// Feasibility at a fixed fraction `p` asks for a hull point `a` with
/// `(reference - p a) / (1 - p)` still inside the space. The feasible
/// fractions form an interval `[0, p*]`, so bisection converges; the inner
/// test is a convex projection on the Bloch ball, a mass comparison on the
/// simplex and a concave eigenvalue maximization over hull weights on
/// density matrices.
pub fn numeric_capacity(
    reference: &Ensemble,
    set: &ExtremeSet,
    tolerance: f64,
) -> Result<NumericCapacity> {
    if tolerance <= 0.0 {
        return Err(Error::InvalidParameter(
            "bisection tolerance must be positive".into(),
        ));
    }
    match set {
        ExtremeSet::Empty => Err(Error::InvalidParameter(
            "numeric capacity needs a nonempty set".into(),
        )),
        ExtremeSet::Full => Ok(NumericCapacity {
            value: 1.0,
            witness: FeasibilityWitness {
                fraction: 1.0,
                inside: reference.clone(),
                complement: reference.clone(),
            },
        }),
        ExtremeSet::Finite(_) | ExtremeSet::Cap { .. } => match reference.payload() {
            Payload::Distribution(_) => {
                bisect_capacity(reference, tolerance, simplex_feasibility(reference, set)?)
            }
            Payload::Bloch(_) => {
                bisect_capacity(reference, tolerance, bloch_feasibility(reference, set)?)
            }
            Payload::Density(_) => {
                bisect_capacity(reference, tolerance, density_feasibility(reference, set)?)
            }
        },
        ExtremeSet::LevelSet {
            observable,
            threshold,
        } => {
            // Two-level systems map exactly onto the Bloch ball; the affine
            // bijection carries decompositions both ways.
            if observable.dim() == 2 && reference.space() == EnsembleSpace::density_matrix(2)? {
                let bloch_reference = reference.to_bloch()?;
                let bloch_variable =
                    StatisticalVariable::on_density(observable.clone())?.to_bloch_form()?;
                let mapped = bloch_variable.level_set(*threshold)?;
                let result = match mapped {
                    ExtremeSet::Full => {
                        return numeric_capacity(reference, &ExtremeSet::Full, tolerance)
                    }
                    ExtremeSet::Empty => {
                        return Err(Error::InvalidParameter(
                            "numeric capacity needs a nonempty set".into(),
                        ))
                    }
                    other => numeric_capacity(&bloch_reference, &other, tolerance)?,
                };
                Ok(NumericCapacity {
                    value: result.value,
                    witness: FeasibilityWitness {
                        fraction: result.witness.fraction,
                        inside: result.witness.inside.to_qubit_density()?,
                        complement: result.witness.complement.to_qubit_density()?,
                    },
                })
            } else {
                Err(Error::UnsupportedSet {
                    set: "level-set",
                    strategy: "numeric",
                    space: reference.space(),
                })
            }
        }
    }
}

/// Witness ingredients produced by a feasibility probe.
type Probe<'a> = Box<dyn FnMut(f64) -> Result<Option<(Ensemble, Ensemble)>> + 'a>;

fn bisect_capacity(
    reference: &Ensemble,
    tolerance: f64,
    mut feasible_at: Probe<'_>,
) -> Result<NumericCapacity> {
    let stall = |lower: f64, upper: f64, err: Error| match err {
        Error::SolverStalled { .. } => Error::SolverStalled { lower, upper },
        other => other,
    };

    // Reference inside the hull: the whole state counts, by the supremum
    // semantics the complement is unconstrained and we return exactly 1.
    if let Some((inside, _)) = feasible_at(1.0).map_err(|e| stall(0.0, 1.0, e))? {
        return Ok(NumericCapacity {
            value: 1.0,
            witness: FeasibilityWitness {
                fraction: 1.0,
                inside,
                complement: reference.clone(),
            },
        });
    }

    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut best = feasible_at(0.0)
        .map_err(|e| stall(0.0, 1.0, e))?
        .ok_or_else(|| {
            Error::InvalidParameter("feasibility must hold at fraction 0 for a nonempty set".into())
        })?;

    let mut iterations = 0;
    while hi - lo > tolerance && iterations < BISECTION_MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        match feasible_at(mid).map_err(|e| stall(lo, hi, e))? {
            Some(parts) => {
                lo = mid;
                best = parts;
            }
            None => hi = mid,
        }
        iterations += 1;
    }

    Ok(NumericCapacity {
        value: lo,
        witness: FeasibilityWitness {
            fraction: lo,
            inside: best.0,
            complement: best.1,
        },
    })
}

/// Simplex feasibility: a vertex set holds fraction `p` of `q` exactly when
/// `p` does not exceed the mass on the selected vertices.
fn simplex_feasibility<'a>(reference: &'a Ensemble, set: &ExtremeSet) -> Result<Probe<'a>> {
    let q = reference.as_distribution().expect("simplex reference");
    let n = q.len();
    let mask = match set {
        ExtremeSet::Finite(points) => vertex_mask(n, points, &reference.space())?,
        other => {
            return Err(Error::UnsupportedSet {
                set: set_variant_name(other),
                strategy: "numeric",
                space: reference.space(),
            })
        }
    };
    let mass: f64 = mask
        .iter()
        .enumerate()
        .filter(|(_, &s)| s)
        .map(|(i, _)| q[i])
        .sum();
    let selected: Vec<usize> = (0..n).filter(|&i| mask[i]).collect();

    Ok(Box::new(move |p: f64| {
        if p > mass + 1e-15 {
            return Ok(None);
        }
        // Hull point: reference mass renormalized on the selected vertices,
        // or uniform when the set carries no mass (only p = 0 is feasible).
        let mut inside = vec![0.0; n];
        if mass > 0.0 {
            for &i in &selected {
                inside[i] = q[i] / mass;
            }
        } else {
            for &i in &selected {
                inside[i] = 1.0 / selected.len() as f64;
            }
        }
        let complement = if 1.0 - p < 1e-14 {
            reference.clone()
        } else {
            let rest: Vec<f64> = (0..n)
                .map(|j| ((q[j] - p * inside[j]) / (1.0 - p)).max(0.0))
                .collect();
            Ensemble::distribution(normalized(rest))?
        };
        Ok(Some((Ensemble::distribution(inside)?, complement)))
    }))
}

fn normalized(mut q: Vec<f64>) -> Vec<f64> {
    let total: f64 = q.iter().sum();
    if total > 0.0 {
        for w in &mut q {
            *w /= total;
        }
    }
    q
}

/// Bloch-ball feasibility: fraction `p` is feasible when the scaled point
/// `r / p` lies within distance `(1 - p) / p` of the hull, i.e. when
/// `|r - p a| <= 1 - p` for the projection `a`.
fn bloch_feasibility<'a>(reference: &'a Ensemble, set: &ExtremeSet) -> Result<Probe<'a>> {
    let r = *reference.as_bloch().expect("bloch reference");
    enum Hull {
        Cap { axis: [f64; 3], height: f64 },
        Finite(Vec<[f64; 3]>),
    }
    let hull = match set {
        ExtremeSet::Cap { axis, height } => Hull::Cap {
            axis: *axis,
            height: *height,
        },
        ExtremeSet::Finite(points) => Hull::Finite(
            points
                .iter()
                .map(|point| {
                    point
                        .as_bloch()
                        .copied()
                        .ok_or_else(|| Error::SpaceMismatch {
                            left: EnsembleSpace::BlochBall,
                            right: point.space(),
                        })
                })
                .collect::<Result<_>>()?,
        ),
        other => {
            return Err(Error::UnsupportedSet {
                set: set_variant_name(other),
                strategy: "numeric",
                space: reference.space(),
            })
        }
    };

    Ok(Box::new(move |p: f64| {
        let project = |y: &[f64; 3]| match &hull {
            Hull::Cap { axis, height } => project_to_cap_hull(y, axis, *height),
            Hull::Finite(points) => project_to_finite_hull(y, points).0,
        };
        let inside = if p <= 0.0 {
            project(&r)
        } else {
            let y = [r[0] / p, r[1] / p, r[2] / p];
            project(&y)
        };
        let residual = norm3(&[
            r[0] - p * inside[0],
            r[1] - p * inside[1],
            r[2] - p * inside[2],
        ]);
        if residual > (1.0 - p) + FEASIBILITY_SLACK {
            return Ok(None);
        }
        let complement = if 1.0 - p < 1e-14 {
            reference.clone()
        } else {
            let mut b = [
                (r[0] - p * inside[0]) / (1.0 - p),
                (r[1] - p * inside[1]) / (1.0 - p),
                (r[2] - p * inside[2]) / (1.0 - p),
            ];
            let norm = norm3(&b);
            if norm > 1.0 {
                for coord in &mut b {
                    *coord /= norm;
                }
            }
            Ensemble::bloch(b)?
        };
        Ok(Some((Ensemble::bloch(inside)?, complement)))
    }))
}

/// Density-matrix feasibility over a finite set of pure states: maximize the
/// minimum eigenvalue of `rho - p * sum_i w_i P_i` over hull weights `w`.
/// The objective is concave, so one-dimensional hulls use a golden-section
/// search and larger ones a Frank-Wolfe iteration with decision-driven exits.
fn density_feasibility<'a>(reference: &'a Ensemble, set: &ExtremeSet) -> Result<Probe<'a>> {
    let rho = reference.as_density().expect("density reference").clone();
    let projectors: Vec<Hermitian> = match set {
        ExtremeSet::Finite(points) => points
            .iter()
            .map(|point| {
                point
                    .as_density()
                    .cloned()
                    .ok_or_else(|| Error::SpaceMismatch {
                        left: reference.space(),
                        right: point.space(),
                    })
            })
            .collect::<Result<_>>()?,
        other => {
            return Err(Error::UnsupportedSet {
                set: set_variant_name(other),
                strategy: "numeric",
                space: reference.space(),
            })
        }
    };

    let reference_clone = reference.clone();
    Ok(Box::new(move |p: f64| {
        let mix = |weights: &[f64]| -> Hermitian {
            let mut acc = Hermitian::zeros(rho.dim());
            for (w, projector) in weights.iter().zip(&projectors) {
                acc.axpy_mut(*w, projector).expect("dimensions agree");
            }
            acc
        };
        let objective = |weights: &[f64]| -> f64 {
            let mut m = rho.clone();
            m.axpy_mut(-p, &mix(weights)).expect("dimensions agree");
            m.min_eigenvalue()
        };

        let weights = match projectors.len() {
            1 => vec![1.0],
            2 => maximize_concave_on_segment(&objective),
            _ => match frank_wolfe_weights(&rho, &projectors, p)? {
                Some(weights) => weights,
                // Frank-Wolfe left the sign of the optimum open; certify it
                // with eigenvector cutting planes.
                None => cutting_plane_weights(&rho, &projectors, p)?,
            },
        };
        if objective(&weights) < -FEASIBILITY_SLACK {
            return Ok(None);
        }

        let inside_matrix = mix(&weights);
        let complement = if 1.0 - p < 1e-14 {
            reference_clone.clone()
        } else {
            let mut b = rho.clone();
            b.axpy_mut(-p, &inside_matrix).expect("dimensions agree");
            b.scale_mut(1.0 / (1.0 - p));
            Ensemble::density(floor_to_state(b))?
        };
        Ok(Some((Ensemble::density(inside_matrix)?, complement)))
    }))
}

/// Lifts sub-tolerance negative eigenvalues back to zero and renormalizes.
fn floor_to_state(m: Hermitian) -> Hermitian {
    let min = m.min_eigenvalue();
    if min >= 0.0 {
        return m;
    }
    let n = m.dim();
    let shift = -min + 1e-16;
    let mut lifted = m;
    lifted
        .axpy_mut(shift, &Hermitian::identity(n))
        .expect("dimensions agree");
    lifted.scale_mut(1.0 / (1.0 + n as f64 * shift));
    lifted
}

/// Golden-section maximization of a concave function over the segment
/// between two hull points; returns the best weights probed.
fn maximize_concave_on_segment(objective: &dyn Fn(&[f64]) -> f64) -> Vec<f64> {
    let value_at = |t: f64| objective(&[1.0 - t, t]);
    let mut best_t = 0.0;
    let mut best = value_at(0.0);
    for t in [1.0, 0.5] {
        let v = value_at(t);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    if best >= -FEASIBILITY_SLACK {
        return vec![1.0 - best_t, best_t];
    }

    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut t1 = hi - inv_phi * (hi - lo);
    let mut t2 = lo + inv_phi * (hi - lo);
    let mut f1 = value_at(t1);
    let mut f2 = value_at(t2);
    for _ in 0..70 {
        if f1 > best {
            best = f1;
            best_t = t1;
        }
        if f2 > best {
            best = f2;
            best_t = t2;
        }
        if best >= -FEASIBILITY_SLACK {
            break;
        }
        if f1 >= f2 {
            hi = t2;
            t2 = t1;
            f2 = f1;
            t1 = hi - inv_phi * (hi - lo);
            f1 = value_at(t1);
        } else {
            lo = t1;
            t1 = t2;
            f1 = f2;
            t2 = lo + inv_phi * (hi - lo);
            f2 = value_at(t2);
        }
    }
    vec![1.0 - best_t, best_t]
}

/// Frank-Wolfe over the simplex of hull weights with step `2 / (t + 2)`.
/// Exits early once the sign of the optimum is decided: any probe at or
/// above zero proves feasibility, and the concavity bound
/// `max <= value + gap` refutes it. Returns `None` when the sign is still
/// open after the gap converges or the iteration cap is hit; the nonsmooth
/// objective makes that unavoidable near the feasibility boundary.
fn frank_wolfe_weights(
    rho: &Hermitian,
    projectors: &[Hermitian],
    p: f64,
) -> Result<Option<Vec<f64>>> {
    let m = projectors.len();
    let mut weights = vec![1.0 / m as f64; m];
    let mut best_weights = weights.clone();
    let mut best_value = f64::NEG_INFINITY;

    for t in 0..FRANK_WOLFE_MAX_ITERATIONS {
        let mut matrix = rho.clone();
        for (w, projector) in weights.iter().zip(projectors) {
            matrix.axpy_mut(-p * w, projector)?;
        }
        let (values, vectors) = matrix.eigen();
        let value = values[0];
        if value > best_value {
            best_value = value;
            best_weights = weights.clone();
        }
        if best_value >= -FEASIBILITY_SLACK {
            return Ok(Some(best_weights));
        }

        // Supergradient of the min eigenvalue via its eigenvector.
        let ground = Hermitian::projector(&vectors[0])?;
        let gradient: Vec<f64> = projectors
            .iter()
            .map(|projector| -p * projector.trace_product(&ground).expect("dims agree"))
            .collect();
        let (vertex, vertex_score) = gradient
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, &g)| (i, g))
            .expect("nonempty gradient");
        let current_score: f64 = gradient.iter().zip(&weights).map(|(g, w)| g * w).sum();
        let gap = vertex_score - current_score;

        if value + gap < -FEASIBILITY_SLACK {
            return Ok(Some(best_weights)); // provably infeasible
        }
        if gap <= FRANK_WOLFE_GAP_TOL {
            return Ok(None); // converged without deciding the sign
        }

        let step = 2.0 / (t as f64 + 2.0);
        for (i, w) in weights.iter_mut().enumerate() {
            *w = (1.0 - step) * *w + if i == vertex { step } else { 0.0 };
        }
    }
    Ok(None)
}

/// Kelley cutting-plane certification of `max_w min-eig(rho - p sum w_i P_i)`.
///
/// The epigraph form `max t : t <= v^H rho v - p sum_i w_i v^H P_i v` over
/// unit vectors `v` is relaxed to the cuts collected so far and tightened
/// with the minimal eigenvectors of each LP optimum. The LP value is an
/// upper bound and every probed point a lower bound, so the sign of the
/// optimum is certified once the two meet.
fn cutting_plane_weights(rho: &Hermitian, projectors: &[Hermitian], p: f64) -> Result<Vec<f64>> {
    let m = projectors.len();

    let evaluate = |weights: &[f64]| -> Result<(f64, Vec<Vec<num_complex::Complex64>>)> {
        let mut matrix = rho.clone();
        for (w, projector) in weights.iter().zip(projectors) {
            matrix.axpy_mut(-p * w, projector)?;
        }
        let (values, vectors) = matrix.eigen();
        let near_minimal: Vec<_> = values
            .iter()
            .zip(vectors)
            .take_while(|(v, _)| **v <= values[0] + 1e-9)
            .map(|(_, vec)| vec)
            .collect();
        Ok((values[0], near_minimal))
    };

    // cut: t <= offset + sum_j slope_j w_j.
    struct Cut {
        offset: f64,
        slopes: Vec<f64>,
    }
    let cut_from = |vector: &[num_complex::Complex64]| -> Result<Cut> {
        let ground = Hermitian::projector(vector)?;
        let offset = rho.trace_product(&ground)?;
        let slopes = projectors
            .iter()
            .map(|projector| projector.trace_product(&ground).map(|e| -p * e))
            .collect::<Result<Vec<f64>>>()?;
        Ok(Cut { offset, slopes })
    };

    let mut weights = vec![1.0 / m as f64; m];
    let (mut best_value, seed_vectors) = evaluate(&weights)?;
    let mut best_weights = weights.clone();
    let mut cuts: Vec<Cut> = seed_vectors
        .iter()
        .map(|v| cut_from(v))
        .collect::<Result<_>>()?;

    for _ in 0..200 {
        if best_value >= -FEASIBILITY_SLACK {
            return Ok(best_weights);
        }

        // LP over x = [w (m), t+, t-, slacks (k)]: maximize t+ - t-.
        let k = cuts.len();
        let columns = m + 2 + k;
        let mut a = vec![vec![0.0; columns]; 1 + k];
        let mut b = vec![0.0; 1 + k];
        for j in 0..m {
            a[0][j] = 1.0;
        }
        b[0] = 1.0;
        for (c, cut) in cuts.iter().enumerate() {
            for j in 0..m {
                a[1 + c][j] = -cut.slopes[j];
            }
            a[1 + c][m] = 1.0;
            a[1 + c][m + 1] = -1.0;
            a[1 + c][m + 2 + c] = 1.0;
            b[1 + c] = cut.offset;
        }
        let mut objective = vec![0.0; columns];
        objective[m] = 1.0;
        objective[m + 1] = -1.0;

        let upper = match solve_equality_lp(&a, &b, &objective) {
            LpOutcome::Optimal {
                objective: value,
                solution,
            } => {
                weights = normalized(solution[..m].iter().map(|w| w.max(0.0)).collect());
                value
            }
            _ => {
                return Err(Error::SolverStalled {
                    lower: 0.0,
                    upper: 1.0,
                })
            }
        };
        if upper < -FEASIBILITY_SLACK {
            // Certified: even the relaxation stays negative.
            return Ok(best_weights);
        }

        let (value, vectors) = evaluate(&weights)?;
        if value > best_value {
            best_value = value;
            best_weights = weights.clone();
        }
        if upper - best_value <= 1e-13 {
            return Ok(best_weights);
        }
        for vector in &vectors {
            cuts.push(cut_from(vector)?);
        }
    }
    Err(Error::SolverStalled {
        lower: 0.0,
        upper: 1.0,
    })
}

/// Discretization oracle: sample the extreme points, then maximize the total
/// representing weight carried by the samples inside the set,
///
/// ```text
///     maximize sum_{x in A} w_x   s.t.   sum_x w_x x = reference,
///                                        sum_x w_x = 1,  w >= 0.
/// ```
///
/// On the simplex the samples are the vertices and the value is exact; on
/// the Bloch ball it converges to the capacity from below as the lattice
/// refines.
pub fn oracle_capacity(
    reference: &Ensemble,
    set: &ExtremeSet,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if set.is_empty() {
        return Ok(0.0);
    }
    let space = reference.space();
    let points = sample_extreme_points(&space, samples, seed)?;
    let coords: Vec<Vec<f64>> = points.iter().map(flatten_state).collect();
    let target = flatten_state(reference);
    let rows = target.len() + 1;
    let columns = points.len();

    let mut a = vec![vec![0.0; columns]; rows];
    for (j, coord) in coords.iter().enumerate() {
        for (i, value) in coord.iter().enumerate() {
            a[i][j] = *value;
        }
        a[rows - 1][j] = 1.0;
    }
    let mut b = target;
    b.push(1.0);

    let mut c = vec![0.0; columns];
    for (j, point) in points.iter().enumerate() {
        if set.contains_extreme(point, MEMBERSHIP_TOL)? {
            c[j] = 1.0;
        }
    }

    match solve_equality_lp(&a, &b, &c) {
        LpOutcome::Optimal { objective, .. } => Ok(objective.clamp(0.0, 1.0)),
        LpOutcome::Infeasible => Err(Error::OracleInfeasible {
            samples: points.len(),
        }),
        LpOutcome::Unbounded | LpOutcome::Stalled => Err(Error::SolverStalled {
            lower: 0.0,
            upper: 1.0,
        }),
    }
}

/// Real coordinates of a state, matching dimensions across a space.
fn flatten_state(state: &Ensemble) -> Vec<f64> {
    match state.payload() {
        Payload::Distribution(q) => q.clone(),
        Payload::Bloch(r) => r.to_vec(),
        Payload::Density(m) => {
            let n = m.dim();
            let mut coords = Vec::with_capacity(n * n);
            for i in 0..n {
                coords.push(m.get(i, i).re);
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    coords.push(m.get(i, j).re);
                    coords.push(m.get(i, j).im);
                }
            }
            coords
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn center_capacity() -> FractionCapacity {
        FractionCapacity::new(Ensemble::bloch_center())
    }

    #[test]
    fn normalization_is_exact() {
        let cap = center_capacity();
        assert_eq!(cap.capacity(&ExtremeSet::Empty).unwrap(), 0.0);
        assert_eq!(cap.capacity(&ExtremeSet::Full).unwrap(), 1.0);
    }

    #[test]
    fn singleton_extreme_point_at_center_is_half() {
        // The center is the even mixture of any antipodal pair, so a single
        // surface point can carry at most half of it.
        let pole = Ensemble::bloch([0.0, 0.0, 1.0]).unwrap();
        let set = ExtremeSet::finite(vec![pole]).unwrap();
        let value = center_capacity().capacity(&set).unwrap();
        assert!((value - 0.5).abs() < 1e-9, "got {value}");
    }

    #[test]
    fn center_cap_closed_form_values() {
        let cap = center_capacity();
        // Hemisphere: the center lies in the hull, so the whole state counts.
        let hemisphere = ExtremeSet::cap([0.0, 0.0, 1.0], 0.0).unwrap();
        assert_eq!(cap.capacity(&hemisphere).unwrap(), 1.0);
        // Cap cut at height 1/2.
        let half = ExtremeSet::cap([0.0, 0.0, 1.0], 0.5).unwrap();
        assert!((cap.capacity(&half).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        // Singleton at the pole.
        let pole = ExtremeSet::cap([0.0, 0.0, 1.0], 1.0).unwrap();
        assert!((cap.capacity(&pole).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cap_capacity_rejects_bad_axis_and_empty_height() {
        let center = Ensemble::bloch_center();
        assert!(bloch_cap_capacity(&center, [0.0, 0.0, 2.0], 0.5).is_err());
        assert_eq!(
            bloch_cap_capacity(&center, [0.0, 0.0, 1.0], 1.5).unwrap(),
            0.0
        );
    }

    #[test]
    fn numeric_matches_center_closed_form() {
        let center = Ensemble::bloch_center();
        for height in [-0.75, -0.25, 0.0, 0.3, 0.5, 0.9, 1.0] {
            let set = ExtremeSet::cap([0.0, 0.0, 1.0], height).unwrap();
            let numeric = numeric_capacity(&center, &set, 1e-10).unwrap().value;
            let closed = center_cap_capacity(height);
            assert!(
                (numeric - closed).abs() < 1e-8,
                "height {height}: numeric {numeric} vs closed {closed}"
            );
        }
    }

    #[test]
    fn simplex_vertex_masses() {
        let q = Ensemble::distribution(vec![0.2, 0.3, 0.5]).unwrap();
        let cap = FractionCapacity::new(q.clone());
        let v = |i| Ensemble::simplex_vertex(3, i).unwrap();

        let first_and_third = ExtremeSet::finite(vec![v(0), v(2)]).unwrap();
        assert!((cap.capacity(&first_and_third).unwrap() - 0.7).abs() < 1e-15);

        let first = ExtremeSet::finite(vec![v(0)]).unwrap();
        assert!((cap.capacity(&first).unwrap() - 0.2).abs() < 1e-15);

        let all = ExtremeSet::finite(vec![v(0), v(1), v(2)]).unwrap();
        assert_eq!(cap.capacity(&all).unwrap(), 1.0);

        // Duplicated members must not double-count.
        let dup = ExtremeSet::finite(vec![v(0), v(0)]).unwrap();
        assert!((cap.capacity(&dup).unwrap() - 0.2).abs() < 1e-15);

        let point_mass = Ensemble::distribution(vec![1.0, 0.0]).unwrap();
        let other = ExtremeSet::finite(vec![Ensemble::simplex_vertex(2, 1).unwrap()]).unwrap();
        assert_eq!(
            FractionCapacity::new(point_mass).capacity(&other).unwrap(),
            0.0
        );
    }

    #[test]
    fn simplex_numeric_agrees_with_closed_form() {
        let q = Ensemble::distribution(vec![0.2, 0.3, 0.5]).unwrap();
        let v = |i| Ensemble::simplex_vertex(3, i).unwrap();
        let set = ExtremeSet::finite(vec![v(0)]).unwrap();
        let numeric = numeric_capacity(&q, &set, 1e-10).unwrap();
        assert!((numeric.value - 0.2).abs() < 1e-9);
        let oracle = oracle_capacity(&q, &set, 3, 0).unwrap();
        assert!((oracle - 0.2).abs() < 1e-12);
    }

    #[test]
    fn extreme_reference_inside_set_gives_one() {
        let pole = Ensemble::bloch([0.0, 0.0, 1.0]).unwrap();
        let set = ExtremeSet::finite(vec![pole.clone()]).unwrap();
        let result = numeric_capacity(&pole, &set, 1e-10).unwrap();
        assert_eq!(result.value, 1.0);
        assert_eq!(result.witness.fraction, 1.0);
    }

    #[test]
    fn witness_certifies_the_decomposition() {
        let center = Ensemble::bloch_center();
        let set = ExtremeSet::cap([0.0, 0.0, 1.0], 0.5).unwrap();
        let result = numeric_capacity(&center, &set, 1e-10).unwrap();
        let w = &result.witness;
        let mixed = crate::space::convex_combine(w.fraction, &w.inside, &w.complement).unwrap();
        assert!(mixed.distance(&center).unwrap() <= 1e-9);
        // The inside component lies in the cap hull.
        let r = w.inside.as_bloch().unwrap();
        assert!(crate::space::dot3(&[0.0, 0.0, 1.0], r) >= 0.5 - 1e-9);
        assert!(norm3(r) <= 1.0 + 1e-12);
    }

    #[test]
    fn maximally_mixed_three_level_singleton_is_a_third() {
        // rho = I/3 minus p * psi stays positive up to p = 1/3: analytic
        // eigenvalue bound, independently of the solver below.
        let rho = Ensemble::maximally_mixed(3).unwrap();
        let psi = Ensemble::pure_state(&[
            num_complex::Complex64::new(1.0, 0.0),
            num_complex::Complex64::new(0.0, 0.0),
            num_complex::Complex64::new(0.0, 0.0),
        ])
        .unwrap();
        let set = ExtremeSet::finite(vec![psi]).unwrap();
        let result = numeric_capacity(&rho, &set, 1e-10).unwrap();
        assert!(
            (result.value - 1.0 / 3.0).abs() < 1e-8,
            "got {}",
            result.value
        );
    }

    #[test]
    fn commuting_projectors_reduce_to_vertex_mass() {
        // Diagonal reference and diagonal projectors: the capacity collapses
        // to the classical vertex mass, giving an exact cross-check for the
        // density-matrix solver including the Frank-Wolfe path (3 members).
        let rho = Ensemble::density(Hermitian::from_diagonal(&[0.5, 0.3, 0.2])).unwrap();
        let basis_state = |i: usize| {
            let mut diag = [0.0; 3];
            diag[i] = 1.0;
            Ensemble::density(Hermitian::from_diagonal(&diag)).unwrap()
        };
        for (members, expected) in [
            (vec![0], 0.5),
            (vec![1], 0.3),
            (vec![0, 1], 0.8),
            (vec![0, 1, 2], 1.0),
            (vec![1, 2], 0.5),
        ] {
            let set =
                ExtremeSet::finite(members.iter().map(|&i| basis_state(i)).collect()).unwrap();
            let result = numeric_capacity(&rho, &set, 1e-9).unwrap();
            assert!(
                (result.value - expected).abs() < 1e-7,
                "members {members:?}: got {} want {expected}",
                result.value
            );
        }
    }

    #[test]
    fn qubit_level_set_matches_bloch_cap() {
        // Level sets on two-level density matrices map to Bloch caps.
        let rho = Ensemble::maximally_mixed(2).unwrap();
        let observable = Hermitian::from_diagonal(&[3.0, 1.0]);
        let f = StatisticalVariable::on_density(observable.clone()).unwrap();
        let set = f.level_set(2.5).unwrap();
        let result = numeric_capacity(&rho, &set, 1e-10).unwrap();
        // Bloch picture: gradient (0,0,1), offset 2, cap height 0.5.
        assert!(
            (result.value - 2.0 / 3.0).abs() < 1e-8,
            "got {}",
            result.value
        );
        assert_eq!(result.witness.inside.space(), rho.space());
    }

    #[test]
    fn oracle_center_cap_converges_from_below() {
        let center = Ensemble::bloch_center();
        let set = ExtremeSet::cap([0.0, 0.0, 1.0], 0.5).unwrap();
        let value = oracle_capacity(&center, &set, 10_000, 0).unwrap();
        assert!((value - 2.0 / 3.0).abs() < 1e-2, "got {value}");
        let full = oracle_capacity(&center, &ExtremeSet::Full, 10_000, 0).unwrap();
        assert!((full - 1.0).abs() < 1e-9, "got {full}");
    }

    #[test]
    fn oracle_resolves_the_pole_singleton() {
        // The lattice contains the exact pole, so the singleton cap at the
        // maximum keeps its half weight instead of dropping to zero.
        let center = Ensemble::bloch_center();
        let set = ExtremeSet::cap([0.0, 0.0, 1.0], 1.0).unwrap();
        let value = oracle_capacity(&center, &set, 10_000, 0).unwrap();
        assert!((value - 0.5).abs() < 1e-6, "got {value}");
    }

    #[test]
    fn oracle_reports_unrepresentable_references() {
        // Two samples on a great circle cannot represent a generic state.
        let target = Ensemble::bloch([0.3, 0.2, 0.1]).unwrap();
        let result = oracle_capacity(&target, &ExtremeSet::Full, 2, 0);
        assert!(matches!(result, Err(Error::OracleInfeasible { .. })));
    }

    #[test]
    fn capacity_strategy_dispatch() {
        let center = Ensemble::bloch_center();
        let set = ExtremeSet::cap([0.0, 0.0, 1.0], 0.5).unwrap();

        let closed = FractionCapacity::with_strategy(center.clone(), Strategy::ClosedForm);
        assert!((closed.capacity(&set).unwrap() - 2.0 / 3.0).abs() < 1e-15);

        let numeric =
            FractionCapacity::with_strategy(center.clone(), Strategy::Numeric { tolerance: 1e-10 });
        assert!((numeric.capacity(&set).unwrap() - 2.0 / 3.0).abs() < 1e-8);

        let oracle = FractionCapacity::with_strategy(
            center.clone(),
            Strategy::Oracle {
                samples: 5000,
                seed: 1,
            },
        );
        assert!((oracle.capacity(&set).unwrap() - 2.0 / 3.0).abs() < 2e-2);

        // Closed form refuses sets it cannot express.
        let finite = ExtremeSet::finite(vec![Ensemble::bloch([0.0, 0.0, 1.0]).unwrap()]).unwrap();
        assert!(matches!(
            closed.capacity(&finite),
            Err(Error::UnsupportedSet { .. })
        ));
    }

    #[test]
    fn general_reference_cap_goes_numeric() {
        // Off-center reference: feasibility is still a convex projection.
        let reference = Ensemble::bloch([0.0, 0.0, 0.5]).unwrap();
        let set = ExtremeSet::cap([0.0, 0.0, 1.0], 0.8).unwrap();
        let value = FractionCapacity::new(reference.clone())
            .capacity(&set)
            .unwrap();
        // More reference mass sits toward the cap than at the center.
        let center_value = center_capacity().capacity(&set).unwrap();
        assert!(value > center_value);
        assert!(value <= 1.0);
        // Cross-check against the discretization oracle.
        let oracle = oracle_capacity(&reference, &set, 10_000, 0).unwrap();
        assert!(
            (value - oracle).abs() < 1e-2,
            "numeric {value} oracle {oracle}"
        );
    }
}
