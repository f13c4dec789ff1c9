//! Non-additive integrals of statistical variables against capacities.
//!
//! The Choquet integral of a variable `F` against a capacity `phi` is
//!
//! ```text
//!     int_{-inf}^0 (G(s) - phi(X)) ds  +  int_0^inf G(s) ds,
//! ```
//!
//! where `G(s) = phi({ x : F(x) >= s })` is the survival function over the
//! extreme points. `G` is nonincreasing, equals `phi(X)` below the variable's
//! minimum and vanishes above its maximum, so the integral truncates exactly
//! to `[min(a, 0), max(b, 0)]`.
//!
//! When the capacity is additive (the simplex case) the Choquet integral
//! collapses to the ordinary expectation. The Sugeno integral never does,
//! which rules it out as an expectation functional even classically; it is
//! provided for exactly that comparison.

use crate::capacity::{ClosedSurvival, FractionCapacity};
use crate::error::{Error, Result};
use crate::space::{Ensemble, EnsembleSpace, ExtremeSet};
use crate::variable::{StatisticalVariable, VariableRange};

/// Default quadrature tolerance when callers do not supply one.
pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-6;
const MAX_QUADRATURE_EVALS: usize = 4_000_000;
const SUGENO_BISECTION_TOL: f64 = 1e-10;

/// A monotone set function on extreme sets; how the integrals see capacities.
pub trait Capacity {
    fn measure(&self, set: &ExtremeSet) -> Result<f64>;
    fn space(&self) -> EnsembleSpace;
    fn full_measure(&self) -> Result<f64> {
        self.measure(&ExtremeSet::Full)
    }
}

impl Capacity for FractionCapacity {
    fn measure(&self, set: &ExtremeSet) -> Result<f64> {
        self.capacity(set)
    }

    fn space(&self) -> EnsembleSpace {
        FractionCapacity::space(self)
    }
}

/// The nonincreasing integrand `s -> phi({ F >= s })` with its cached range.
pub struct SurvivalFunction<'a> {
    variable: &'a StatisticalVariable,
    capacity: &'a dyn Capacity,
    range: VariableRange,
    full_measure: f64,
}

impl<'a> SurvivalFunction<'a> {
    pub fn new(variable: &'a StatisticalVariable, capacity: &'a dyn Capacity) -> Result<Self> {
        if variable.space() != capacity.space() {
            return Err(Error::SpaceMismatch {
                left: capacity.space(),
                right: variable.space(),
            });
        }
        let range = variable.range_over_extremes()?;
        let full_measure = capacity.full_measure()?;
        Ok(Self {
            variable,
            capacity,
            range,
            full_measure,
        })
    }

    pub fn value(&self, s: f64) -> Result<f64> {
        self.capacity.measure(&self.variable.level_set(s)?)
    }

    pub fn range(&self) -> &VariableRange {
        &self.range
    }

    pub fn full_measure(&self) -> f64 {
        self.full_measure
    }
}

/// Value, rigorous error bound and evaluation count of an integral.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl IntegralResult {
    fn exact(value: f64) -> Self {
        Self {
            value,
            error_estimate: 0.0,
            evaluations: 0,
        }
    }
}

/// Choquet integral of `variable` against a fraction capacity.
///
/// Survival functions with a known analytic shape (simplex steps, caps at
/// the Bloch center, constants) integrate in closed form with a zero error
/// bound; everything else runs the adaptive quadrature at `tolerance`.
pub fn choquet_integral(
    variable: &StatisticalVariable,
    capacity: &FractionCapacity,
    tolerance: f64,
) -> Result<IntegralResult> {
    if let Some(form) = capacity.closed_survival(variable)? {
        let phi_x = capacity.full_measure()?;
        return Ok(closed_form_choquet(&form, phi_x));
    }
    choquet_integral_quadrature(variable, capacity, tolerance)
}

/// Choquet integral by adaptive quadrature against any capacity, additive or
/// not, normalized or not. Monotonicity of the survival function gives
/// lower/upper Riemann sums per interval, so the reported error estimate is
/// a true bound even across jumps.
pub fn choquet_integral_quadrature(
    variable: &StatisticalVariable,
    capacity: &dyn Capacity,
    tolerance: f64,
) -> Result<IntegralResult> {
    if tolerance <= 0.0 {
        return Err(Error::InvalidParameter(
            "quadrature tolerance must be positive".into(),
        ));
    }
    let survival = SurvivalFunction::new(variable, capacity)?;
    let (a, b) = (survival.range().min_value, survival.range().max_value);
    let phi_x = survival.full_measure();

    let mut parts = Vec::new();
    if b > 0.0 {
        parts.push((0.0, b, 0.0));
    }
    if a < 0.0 {
        parts.push((a, 0.0, phi_x));
    }
    let per_part_tol = tolerance / parts.len().max(1) as f64;

    let mut total = IntegralResult::exact(0.0);
    for (lo, hi, shift) in parts {
        let mut g = |s: f64| survival.value(s).map(|v| v - shift);
        let piece = integrate_nonincreasing(&mut g, lo, hi, per_part_tol)?;
        total.value += piece.value;
        total.error_estimate += piece.error_estimate;
        total.evaluations += piece.evaluations;
    }
    Ok(total)
}

/// Adaptive bracket quadrature for a nonincreasing integrand.
///
/// Each interval contributes the trapezoid of its endpoint values; since the
/// integrand is nonincreasing the truth lies between the endpoint Riemann
/// sums, so half the bracket width bounds the error. The worst interval is
/// split until the total bound drops under `tolerance`.
fn integrate_nonincreasing(
    g: &mut dyn FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    tolerance: f64,
) -> Result<IntegralResult> {
    use std::collections::BinaryHeap;

    #[derive(PartialEq)]
    struct Interval {
        bound: f64,
        lo: f64,
        hi: f64,
        g_lo: f64,
        g_hi: f64,
    }
    impl Eq for Interval {}
    impl PartialOrd for Interval {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Interval {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.bound.total_cmp(&other.bound)
        }
    }

    fn bracket(lo: f64, hi: f64, g_lo: f64, g_hi: f64) -> Interval {
        Interval {
            bound: (g_lo - g_hi).max(0.0) * (hi - lo),
            lo,
            hi,
            g_lo,
            g_hi,
        }
    }

    if hi <= lo {
        return Ok(IntegralResult::exact(0.0));
    }

    let mut evaluations = 2;
    let first = bracket(lo, hi, g(lo)?, g(hi)?);
    let mut active_bound = first.bound;
    let mut frozen_bound = 0.0;
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Interval> = Vec::new();
    heap.push(first);

    while (active_bound + frozen_bound) / 2.0 > tolerance {
        if evaluations >= MAX_QUADRATURE_EVALS {
            return Err(Error::QuadratureStalled {
                requested: tolerance,
                achieved: (active_bound + frozen_bound) / 2.0,
            });
        }
        let Some(worst) = heap.pop() else { break };
        if worst.bound <= 0.0 {
            heap.push(worst);
            break;
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Narrowed to machine resolution; its bracket is final.
            active_bound -= worst.bound;
            frozen_bound += worst.bound;
            frozen.push(worst);
            continue;
        }
        let g_mid = g(mid)?;
        evaluations += 1;
        let left = bracket(worst.lo, mid, worst.g_lo, g_mid);
        let right = bracket(mid, worst.hi, g_mid, worst.g_hi);
        active_bound += left.bound + right.bound - worst.bound;
        heap.push(left);
        heap.push(right);
    }

    let mut value = 0.0;
    let mut error = 0.0;
    for interval in heap.into_iter().chain(frozen) {
        value += 0.5 * (interval.g_lo + interval.g_hi) * (interval.hi - interval.lo);
        error += interval.bound / 2.0;
    }
    if error > tolerance * (1.0 + 1e-9) {
        return Err(Error::QuadratureStalled {
            requested: tolerance,
            achieved: error,
        });
    }
    Ok(IntegralResult {
        value,
        error_estimate: error,
        evaluations,
    })
}

/// Exact integration of the recognized survival shapes.
fn closed_form_choquet(form: &ClosedSurvival, phi_x: f64) -> IntegralResult {
    match form {
        // G is a step of height phi_x at the constant's value; both integral
        // terms collapse to value * phi_x regardless of sign.
        ClosedSurvival::Constant { value } => IntegralResult::exact(value * phi_x),
        ClosedSurvival::SimplexSteps { values, masses } => {
            let mut pairs: Vec<(f64, f64)> =
                values.iter().copied().zip(masses.iter().copied()).collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            // G(s) is the suffix mass M_j on (v_{j-1}, v_j], the full mass
            // below the smallest value and zero above the largest.
            let total: f64 = pairs.iter().map(|(_, m)| m).sum();
            let mut value = piecewise_constant_term(f64::NEG_INFINITY, pairs[0].0, total, phi_x);
            let mut suffix = total;
            for j in 1..pairs.len() {
                suffix -= pairs[j - 1].1;
                value += piecewise_constant_term(pairs[j - 1].0, pairs[j].0, suffix, phi_x);
            }
            value += piecewise_constant_term(pairs[pairs.len() - 1].0, f64::INFINITY, 0.0, phi_x);
            IntegralResult::exact(value)
        }
        ClosedSurvival::BlochCenterCap {
            min_value,
            max_value,
        } => {
            let midpoint = 0.5 * (min_value + max_value);
            let half_range = 0.5 * (max_value - min_value);
            let mut value = 0.0;
            // Piece 1: G = 1 on (-inf, midpoint].
            value += piecewise_constant_term(f64::NEG_INFINITY, midpoint, 1.0, phi_x);
            // Piece 2: G = half_range / (s - min) on (midpoint, max].
            value += cap_tail_term(midpoint, *max_value, *min_value, half_range, phi_x);
            // Piece 3: G = 0 on (max, inf).
            value += piecewise_constant_term(*max_value, f64::INFINITY, 0.0, phi_x);
            IntegralResult::exact(value)
        }
    }
}

/// Contribution of a constant piece `G = level` on `(lo, hi]` to the Choquet
/// integral: `level` over the positive part, `level - phi_x` over the
/// negative part.
fn piecewise_constant_term(lo: f64, hi: f64, level: f64, phi_x: f64) -> f64 {
    let mut total = 0.0;
    let positive_width = (hi.max(0.0) - lo.max(0.0)).max(0.0);
    if positive_width > 0.0 && positive_width.is_finite() {
        total += level * positive_width;
    } else if positive_width > 0.0 {
        // Infinite positive tail only appears for level = 0.
        debug_assert_eq!(level, 0.0);
    }
    let negative_width = (hi.min(0.0) - lo.min(0.0)).max(0.0);
    if negative_width > 0.0 && negative_width.is_finite() {
        total += (level - phi_x) * negative_width;
    } else if negative_width > 0.0 {
        // Infinite negative tail only appears for level = phi_x.
        debug_assert!((level - phi_x).abs() < 1e-12);
    }
    total
}

/// Contribution of the cap tail `G(s) = half_range / (s - min)` on `(lo, hi]`.
fn cap_tail_term(lo: f64, hi: f64, min_value: f64, half_range: f64, phi_x: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let antiderivative = |x: f64| half_range * (x - min_value).ln();
    let mut total = 0.0;
    let (pos_lo, pos_hi) = (lo.max(0.0), hi.max(0.0));
    if pos_hi > pos_lo {
        total += antiderivative(pos_hi) - antiderivative(pos_lo);
    }
    let (neg_lo, neg_hi) = (lo.min(0.0), hi.min(0.0));
    if neg_hi > neg_lo {
        total += antiderivative(neg_hi) - antiderivative(neg_lo) - phi_x * (neg_hi - neg_lo);
    }
    total
}

/// Sugeno integral `sup_{s >= 0} min(s, G(s))` of a nonnegative variable.
///
/// `G` is nonincreasing against the increasing identity, so the supremum is
/// the crossing point `sup { s : G(s) >= s }`, located by bisection.
pub fn sugeno_integral(variable: &StatisticalVariable, capacity: &dyn Capacity) -> Result<f64> {
    let survival = SurvivalFunction::new(variable, capacity)?;
    let range = survival.range();
    if range.min_value < -1e-12 {
        return Err(Error::NegativeVariable {
            min: range.min_value,
        });
    }
    let mut lo = 0.0;
    let mut hi = range.max_value.max(survival.full_measure()) + 1.0;
    while hi - lo > SUGENO_BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if survival.value(mid)? >= mid {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The expectation of a variable at a state: the affine evaluation itself.
/// This is the ground truth a suitable non-additive integral would have to
/// reproduce from the capacity restriction alone.
pub fn expectation(variable: &StatisticalVariable, state: &Ensemble) -> Result<f64> {
    variable.evaluate(state)
}

/// Choquet integral minus expectation, both anchored at `state`.
///
/// Zero on the simplex for every instance; at the Bloch center it equals
/// `(b - a) ln(2) / 2`, which is the quantitative failure of the Choquet
/// integral as an expectation functional.
pub fn choquet_gap(variable: &StatisticalVariable, state: &Ensemble) -> Result<f64> {
    let capacity = FractionCapacity::new(state.clone());
    let integral = choquet_integral(variable, &capacity, DEFAULT_QUADRATURE_TOL)?;
    Ok(integral.value - expectation(variable, state)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::convex_combine;

    fn center_capacity() -> FractionCapacity {
        FractionCapacity::new(Ensemble::bloch_center())
    }

    fn unit_bloch_variable(a: f64, b: f64) -> StatisticalVariable {
        StatisticalVariable::on_bloch([0.0, 0.0, (b - a) / 2.0], (a + b) / 2.0).unwrap()
    }

    #[test]
    fn survival_piecewise_values() {
        let capacity = center_capacity();
        let f = unit_bloch_variable(1.0, 3.0);
        let g = SurvivalFunction::new(&f, &capacity).unwrap();
        assert_eq!(g.value(1.5).unwrap(), 1.0);
        assert_eq!(g.value(2.0).unwrap(), 1.0);
        assert!((g.value(2.5).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((g.value(3.0).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(g.value(3.5).unwrap(), 0.0);
    }

    #[test]
    fn bloch_center_choquet_value() {
        let capacity = center_capacity();
        let f = unit_bloch_variable(1.0, 3.0);
        let result = choquet_integral(&f, &capacity, 1e-6).unwrap();
        let expected = 2.0 + std::f64::consts::LN_2;
        assert!(
            (result.value - expected).abs() < 1e-12,
            "value {} vs {expected}",
            result.value
        );
        assert_eq!(result.error_estimate, 0.0);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let capacity = center_capacity();
        for (a, b) in [
            (1.0, 3.0),
            (0.5, 1.0),
            (-2.0, 3.0),
            (-3.0, -1.0),
            (0.0, 4.0),
        ] {
            let f = unit_bloch_variable(a, b);
            let closed = choquet_integral(&f, &capacity, 1e-6).unwrap();
            let quad = choquet_integral_quadrature(&f, &capacity, 1e-6).unwrap();
            assert!(
                (closed.value - quad.value).abs() <= 1e-6 + quad.error_estimate,
                "({a}, {b}): closed {} quad {} (err {})",
                closed.value,
                quad.value,
                quad.error_estimate
            );
            // The analytic identity: midpoint + half-range * ln 2.
            let expected = 0.5 * (a + b) + 0.5 * (b - a) * std::f64::consts::LN_2;
            assert!((closed.value - expected).abs() < 1e-10);
            assert!(quad.error_estimate <= 1e-6);
        }
    }

    #[test]
    fn simplex_choquet_reduces_to_expectation() {
        let q = Ensemble::distribution(vec![0.2, 0.3, 0.5]).unwrap();
        let f = StatisticalVariable::on_simplex(vec![1.0, 2.0, 3.0]).unwrap();
        let capacity = FractionCapacity::new(q.clone());
        let result = choquet_integral(&f, &capacity, 1e-9).unwrap();
        assert!((result.value - 2.3).abs() < 1e-12);
        assert!((expectation(&f, &q).unwrap() - 2.3).abs() < 1e-15);
        // Negative values exercise the negative-part term.
        let g = StatisticalVariable::on_simplex(vec![-1.5, 0.5, 2.0]).unwrap();
        let expected = expectation(&g, &q).unwrap();
        let result = choquet_integral(&g, &capacity, 1e-9).unwrap();
        assert!((result.value - expected).abs() < 1e-12);
    }

    #[test]
    fn constant_variable_integrates_to_the_constant() {
        let capacity = center_capacity();
        for c in [2.5, 0.0, -1.25] {
            let f = StatisticalVariable::on_bloch([0.0, 0.0, 0.0], c).unwrap();
            let result = choquet_integral(&f, &capacity, 1e-9).unwrap();
            assert!((result.value - c).abs() < 1e-12, "c = {c}");
        }
    }

    #[test]
    fn quadrature_handles_step_survival() {
        // Simplex steps through the generic engine, against the dot product.
        let q = Ensemble::distribution(vec![0.4, 0.6]).unwrap();
        let f = StatisticalVariable::on_simplex(vec![-1.0, 2.0]).unwrap();
        let capacity = FractionCapacity::new(q.clone());
        let quad = choquet_integral_quadrature(&f, &capacity, 1e-7).unwrap();
        let expected = expectation(&f, &q).unwrap();
        assert!(
            (quad.value - expected).abs() <= 1e-7,
            "quad {} expected {expected}",
            quad.value
        );
    }

    #[test]
    fn sub_normalized_capacities_integrate_consistently() {
        // A scaled capacity checks that the negative-part term reads phi(X)
        // from the capacity instead of assuming 1.
        struct Scaled(FractionCapacity, f64);
        impl Capacity for Scaled {
            fn measure(&self, set: &ExtremeSet) -> Result<f64> {
                Ok(self.1 * self.0.capacity(set)?)
            }
            fn space(&self) -> EnsembleSpace {
                self.0.space()
            }
        }
        let q = Ensemble::distribution(vec![0.3, 0.7]).unwrap();
        let f = StatisticalVariable::on_simplex(vec![-2.0, 1.0]).unwrap();
        let scaled = Scaled(FractionCapacity::new(q.clone()), 0.6);
        let quad = choquet_integral_quadrature(&f, &scaled, 1e-7).unwrap();
        let expected = 0.6 * expectation(&f, &q).unwrap();
        assert!(
            (quad.value - expected).abs() <= 1e-7,
            "quad {} expected {expected}",
            quad.value
        );
    }

    #[test]
    fn sugeno_counterexample_on_the_simplex() {
        // Survival is 0.1 on (0, 0.05], so sup min(s, G) = 0.05 while the
        // expectation is 0.005: Sugeno misses even additive capacities.
        let q = Ensemble::distribution(vec![0.9, 0.1]).unwrap();
        let f = StatisticalVariable::on_simplex(vec![0.0, 0.05]).unwrap();
        let capacity = FractionCapacity::new(q.clone());
        let sugeno = sugeno_integral(&f, &capacity).unwrap();
        assert!((sugeno - 0.05).abs() < 1e-9, "sugeno {sugeno}");
        let expected = expectation(&f, &q).unwrap();
        assert!((expected - 0.005).abs() < 1e-15);
        assert!((sugeno / expected - 10.0).abs() < 1e-6);
    }

    #[test]
    fn sugeno_of_constants_saturates_at_full_measure() {
        let capacity = center_capacity();
        for (c, expected) in [(0.4, 0.4), (1.0, 1.0), (2.5, 1.0), (0.0, 0.0)] {
            let f = StatisticalVariable::on_bloch([0.0, 0.0, 0.0], c).unwrap();
            let value = sugeno_integral(&f, &capacity).unwrap();
            assert!((value - expected).abs() < 1e-9, "c={c} got {value}");
        }
    }

    #[test]
    fn sugeno_rejects_negative_variables() {
        let capacity = center_capacity();
        let f = unit_bloch_variable(-1.0, 1.0);
        assert!(matches!(
            sugeno_integral(&f, &capacity),
            Err(Error::NegativeVariable { .. })
        ));
    }

    #[test]
    fn gap_values() {
        // Bloch center: ln 2 for (a, b) = (1, 3).
        let f = unit_bloch_variable(1.0, 3.0);
        let gap = choquet_gap(&f, &Ensemble::bloch_center()).unwrap();
        assert!((gap - std::f64::consts::LN_2).abs() < 1e-10, "gap {gap}");

        // Any simplex instance: zero.
        let q = Ensemble::distribution(vec![0.2, 0.3, 0.5]).unwrap();
        let g = StatisticalVariable::on_simplex(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(choquet_gap(&g, &q).unwrap().abs() < 1e-10);

        // Degenerate range: zero.
        let constant = StatisticalVariable::on_bloch([0.0, 0.0, 0.0], 2.0).unwrap();
        assert!(
            choquet_gap(&constant, &Ensemble::bloch_center())
                .unwrap()
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn pure_state_expectation_is_point_evaluation() {
        let psi = Ensemble::bloch([0.0, 0.0, 1.0]).unwrap();
        let f = unit_bloch_variable(1.0, 3.0);
        assert!((expectation(&f, &psi).unwrap() - 3.0).abs() < 1e-15);
        // Mixtures interpolate affinely.
        let mixed =
            convex_combine(0.25, &psi, &Ensemble::bloch([0.0, 0.0, -1.0]).unwrap()).unwrap();
        assert!((expectation(&f, &mixed).unwrap() - (0.25 * 3.0 + 0.75 * 1.0)).abs() < 1e-12);
    }
}
