//! The reproduction checks behind every subcommand.
//!
//! Each check compares a computed quantity against a closed-form reference
//! and records which relation the reference comes from, so a report is
//! auditable without rerunning anything.

use std::collections::BTreeMap;

use anyhow::{ensure, Context, Result};
use frcap::{
    choquet_integral, choquet_integral_quadrature, expectation, numeric_capacity, sugeno_integral,
    Ensemble, EnsembleSpace, ExtremeSet, FractionCapacity, SplitMix64, StatisticalVariable,
    Strategy,
};

use crate::report::{CheckResult, ReproReport};

// Reference relations quoted in the reports.
const ANCHOR_EXPECTATION: &str = "expectation = F(state)";
const ANCHOR_SURVIVAL: &str =
    "survival(s) = 1 below the midpoint, half-range/(s - min) up to the max, then 0";
const ANCHOR_CHOQUET: &str = "choquet at center = midpoint + half-range * ln 2";
const ANCHOR_GAP: &str = "gap at center = half-range * ln 2";
const ANCHOR_SINGLETON: &str = "singleton capacity at center = 1/2 (antipodal mixture)";
const ANCHOR_VERTEX_MASS: &str = "simplex capacity = reference mass on the vertices";
const ANCHOR_AXIOMS: &str = "capacity axioms: normalized, monotone, subadditive";
const ANCHOR_EIGENVALUE_BOUND: &str = "capacity = largest fraction keeping the state positive";
const ANCHOR_SUGENO: &str = "sugeno = sup min(s, survival(s))";

fn bloch_variable(min_value: f64, max_value: f64) -> StatisticalVariable {
    StatisticalVariable::on_bloch(
        [0.0, 0.0, (max_value - min_value) / 2.0],
        (min_value + max_value) / 2.0,
    )
    .expect("finite coefficients")
}

fn validate_range(a: f64, b: f64) -> Result<()> {
    ensure!(
        a.is_finite() && b.is_finite() && 0.0 < a && a < b,
        "the variable range must satisfy 0 < a < b (got a = {a}, b = {b})"
    );
    Ok(())
}

/// Survival profile of the level sets at `rows` thresholds across
/// `[0, b + (b - a) / 2]`, with the closed form, the bisection solver and
/// the discretization oracle side by side.
pub struct CapacityProfile {
    pub csv: String,
    pub checks: Vec<CheckResult>,
}

pub fn capacity_profile(
    a: f64,
    b: f64,
    rows: usize,
    oracle_samples: usize,
    seed: u64,
) -> Result<CapacityProfile> {
    validate_range(a, b)?;
    ensure!(rows >= 2, "the profile needs at least 2 rows (got {rows})");
    ensure!(
        oracle_samples >= 2,
        "the oracle needs at least 2 samples (got {oracle_samples})"
    );

    let variable = bloch_variable(a, b);
    let center = Ensemble::bloch_center();
    let closed = FractionCapacity::new(center.clone());
    let numeric =
        FractionCapacity::with_strategy(center.clone(), Strategy::Numeric { tolerance: 1e-10 });
    let oracle = FractionCapacity::with_strategy(
        center,
        Strategy::Oracle {
            samples: oracle_samples,
            seed,
        },
    );

    let top = b + (b - a) / 2.0;
    let midpoint = (a + b) / 2.0;
    let half_range = (b - a) / 2.0;

    let mut csv = String::from("s,phi_closed_form,phi_numeric,phi_oracle\n");
    let mut closed_vs_formula: f64 = 0.0;
    let mut closed_vs_numeric: f64 = 0.0;
    let mut closed_vs_oracle: f64 = 0.0;

    for row in 0..rows {
        let s = top * row as f64 / (rows - 1) as f64;
        let set = variable.level_set(s)?;
        let phi_closed = closed.capacity(&set)?;
        let phi_numeric = numeric.capacity(&set)?;
        let phi_oracle = oracle.capacity(&set)?;

        let formula = if s <= midpoint {
            1.0
        } else if s <= b {
            half_range / (s - a)
        } else {
            0.0
        };
        closed_vs_formula = closed_vs_formula.max((phi_closed - formula).abs());
        closed_vs_numeric = closed_vs_numeric.max((phi_closed - phi_numeric).abs());
        closed_vs_oracle = closed_vs_oracle.max((phi_closed - phi_oracle).abs());

        csv.push_str(&format!("{s},{phi_closed},{phi_numeric},{phi_oracle}\n"));
    }

    let checks = vec![
        CheckResult::within(
            "profile-closed-form-matches-piecewise-formula",
            closed_vs_formula,
            0.0,
            1e-14,
            ANCHOR_SURVIVAL,
        ),
        CheckResult::within(
            "profile-closed-form-matches-numeric-solver",
            closed_vs_numeric,
            0.0,
            1e-8,
            ANCHOR_SURVIVAL,
        ),
        CheckResult::within(
            "profile-closed-form-matches-oracle",
            closed_vs_oracle,
            0.0,
            1e-2,
            ANCHOR_SURVIVAL,
        ),
    ];
    Ok(CapacityProfile { csv, checks })
}

/// Choquet integral at the Bloch center against the analytic value, the
/// expectation and the gap between them.
pub fn bloch_choquet_checks(a: f64, b: f64, tolerance: f64) -> Result<Vec<CheckResult>> {
    validate_range(a, b)?;
    ensure!(
        tolerance > 0.0,
        "the quadrature tolerance must be positive (got {tolerance})"
    );

    let variable = bloch_variable(a, b);
    let center = Ensemble::bloch_center();
    let capacity = FractionCapacity::new(center.clone());

    let analytic = (a + b) / 2.0 + (b - a) / 2.0 * std::f64::consts::LN_2;
    let expected = expectation(&variable, &center)?;
    let closed = choquet_integral(&variable, &capacity, tolerance)?;
    let quadrature = choquet_integral_quadrature(&variable, &capacity, tolerance)?;

    Ok(vec![
        CheckResult::within(
            "choquet-closed-form",
            closed.value,
            analytic,
            1e-10,
            ANCHOR_CHOQUET,
        ),
        CheckResult::within(
            "choquet-quadrature",
            quadrature.value,
            analytic,
            tolerance,
            ANCHOR_CHOQUET,
        ),
        CheckResult::within(
            "quadrature-error-estimate",
            quadrature.error_estimate,
            0.0,
            tolerance,
            "rigorous bracket bound of the adaptive quadrature",
        ),
        CheckResult::within(
            "expectation-at-center",
            expected,
            (a + b) / 2.0,
            1e-12,
            ANCHOR_EXPECTATION,
        ),
        CheckResult::within(
            "choquet-gap",
            closed.value - expected,
            (b - a) / 2.0 * std::f64::consts::LN_2,
            tolerance,
            ANCHOR_GAP,
        ),
        // The negative result itself: the integral must NOT recover the
        // expectation, by at least half the predicted gap.
        CheckResult::exceeds(
            "choquet-differs-from-expectation",
            closed.value,
            expected,
            (b - a) / 4.0 * std::f64::consts::LN_2,
            ANCHOR_GAP,
        ),
    ])
}

/// Random classical instances: the Choquet integral recovers the expectation
/// on every draw, while the fixed Sugeno counterexample never does.
pub fn classical_checks(
    n: usize,
    trials: usize,
    seed: u64,
    tolerance: f64,
) -> Result<Vec<CheckResult>> {
    ensure!(n >= 2, "need at least two outcomes (got {n})");
    ensure!(trials >= 1, "need at least one trial (got {trials})");
    ensure!(tolerance > 0.0, "tolerance must be positive");

    let mut rng = SplitMix64::new(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let state = Ensemble::distribution(rng.distribution(n))?;
        let values: Vec<f64> = (0..n).map(|_| rng.range(-5.0, 5.0)).collect();
        let variable = StatisticalVariable::on_simplex(values)?;
        let capacity = FractionCapacity::new(state.clone());
        let integral = choquet_integral(&variable, &capacity, tolerance)?;
        let expected = expectation(&variable, &state)?;
        worst = worst.max((integral.value - expected).abs());
    }

    let mut checks = vec![CheckResult::within(
        "classical-choquet-deviation",
        worst,
        0.0,
        tolerance,
        ANCHOR_EXPECTATION,
    )];
    checks.extend(sugeno_counterexample_checks()?);
    Ok(checks)
}

/// The fixed Sugeno counterexample: survival sits at 0.1 over (0, 0.05], so
/// the sup-min lands on 0.05 while the expectation is 0.005.
pub fn sugeno_counterexample_checks() -> Result<Vec<CheckResult>> {
    let state = Ensemble::distribution(vec![0.9, 0.1])?;
    let variable = StatisticalVariable::on_simplex(vec![0.0, 0.05])?;
    let capacity = FractionCapacity::new(state.clone());
    let sugeno = sugeno_integral(&variable, &capacity)?;
    let expected = expectation(&variable, &state)?;
    Ok(vec![
        CheckResult::within("sugeno-counterexample", sugeno, 0.05, 1e-9, ANCHOR_SUGENO),
        CheckResult::within(
            "sugeno-vs-expectation-ratio",
            sugeno / expected,
            10.0,
            1e-6,
            ANCHOR_SUGENO,
        ),
        CheckResult::exceeds(
            "sugeno-differs-from-expectation",
            sugeno,
            expected,
            0.04,
            ANCHOR_SUGENO,
        ),
    ])
}

/// Singleton capacity at the Bloch center for random poles.
pub fn singleton_checks(seed: u64) -> Result<CheckResult> {
    let center = Ensemble::bloch_center();
    let mut rng = SplitMix64::new(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let pole = Ensemble::bloch(rng.unit_vector())?;
        let set = ExtremeSet::finite(vec![pole])?;
        let value = numeric_capacity(&center, &set, 1e-10)?.value;
        worst = worst.max((value - 0.5).abs());
    }
    Ok(CheckResult::within(
        "singleton-capacity-at-center",
        worst,
        0.0,
        1e-9,
        ANCHOR_SINGLETON,
    ))
}

/// Capacity axioms over randomized set pairs, per space: the worst violation
/// of normalization, monotonicity and subadditivity.
pub fn axiom_checks(seed: u64) -> Result<Vec<CheckResult>> {
    let mut rng = SplitMix64::new(seed);
    let mut monotonicity: f64 = 0.0;
    let mut subadditivity: f64 = 0.0;
    let mut normalization: f64 = 0.0;

    // Simplex: nested and overlapping vertex subsets, exact closed form.
    for _ in 0..1000 {
        let n = 2 + rng.index(5);
        let capacity = FractionCapacity::new(Ensemble::distribution(rng.distribution(n))?);
        normalization = normalization
            .max(capacity.capacity(&ExtremeSet::Empty)?.abs())
            .max((capacity.capacity(&ExtremeSet::Full)? - 1.0).abs());
        let vertex = |i: usize| Ensemble::simplex_vertex(n, i).expect("index in range");
        let subset = |rng: &mut SplitMix64| -> Vec<usize> {
            let mut s: Vec<usize> = (0..n).filter(|_| rng.uniform() < 0.5).collect();
            if s.is_empty() {
                s.push(rng.index(n));
            }
            s
        };
        let inner = subset(&mut rng);
        let mut outer = inner.clone();
        outer.push(rng.index(n));
        outer.sort_unstable();
        outer.dedup();
        let set = |idx: &[usize]| {
            ExtremeSet::finite(idx.iter().map(|&i| vertex(i)).collect()).expect("vertices")
        };
        let phi_inner = capacity.capacity(&set(&inner))?;
        let phi_outer = capacity.capacity(&set(&outer))?;
        monotonicity = monotonicity.max(phi_inner - phi_outer);

        let other = subset(&mut rng);
        let set_a = set(&inner);
        let set_b = set(&other);
        let union = set_a.union(&set_b)?;
        subadditivity = subadditivity.max(
            capacity.capacity(&union)? - capacity.capacity(&set_a)? - capacity.capacity(&set_b)?,
        );
    }

    // Bloch ball: nested caps and finite sets, center and interior references.
    let sphere = frcap::sample_extreme_points(&EnsembleSpace::BlochBall, 256, seed)?;
    for trial in 0..1000 {
        let reference = if trial % 2 == 0 {
            Ensemble::bloch_center()
        } else {
            let mut r = rng.unit_vector();
            let radius = rng.uniform() * 0.9;
            for coord in &mut r {
                *coord *= radius;
            }
            Ensemble::bloch(r)?
        };
        let capacity = FractionCapacity::new(reference);
        normalization = normalization
            .max(capacity.capacity(&ExtremeSet::Empty)?.abs())
            .max((capacity.capacity(&ExtremeSet::Full)? - 1.0).abs());

        if trial % 2 == 0 {
            let axis = rng.unit_vector();
            let high = rng.range(-1.0, 1.0);
            let low = (high - rng.range(0.0, 1.0)).max(-1.0);
            let small = capacity.capacity(&ExtremeSet::cap(axis, high)?)?;
            let large = capacity.capacity(&ExtremeSet::cap(axis, low)?)?;
            monotonicity = monotonicity.max(small - large);
        } else {
            let pick = |rng: &mut SplitMix64| -> Vec<Ensemble> {
                let k = 1 + rng.index(4);
                (0..k).map(|_| sphere[rng.index(256)].clone()).collect()
            };
            let inner = pick(&mut rng);
            let mut outer = inner.clone();
            outer.push(sphere[rng.index(256)].clone());
            let phi_inner = capacity.capacity(&ExtremeSet::finite(inner.clone())?)?;
            let phi_outer = capacity.capacity(&ExtremeSet::finite(outer)?)?;
            monotonicity = monotonicity.max(phi_inner - phi_outer);

            let set_a = ExtremeSet::finite(inner)?;
            let set_b = ExtremeSet::finite(pick(&mut rng))?;
            let union = set_a.union(&set_b)?;
            subadditivity = subadditivity.max(
                capacity.capacity(&union)?
                    - capacity.capacity(&set_a)?
                    - capacity.capacity(&set_b)?,
            );
        }
    }

    // Density matrices: singletons and pairs at the maximally mixed state.
    for trial in 0..1000 {
        let dim = 2 + trial % 2;
        let space = EnsembleSpace::density_matrix(dim)?;
        let pures = frcap::sample_extreme_points(&space, 2, rng.next_u64())?;
        let capacity = FractionCapacity::new(Ensemble::maximally_mixed(dim)?);
        normalization = normalization
            .max(capacity.capacity(&ExtremeSet::Empty)?.abs())
            .max((capacity.capacity(&ExtremeSet::Full)? - 1.0).abs());
        let set_a = ExtremeSet::finite(vec![pures[0].clone()])?;
        let set_b = ExtremeSet::finite(vec![pures[1].clone()])?;
        let union = set_a.union(&set_b)?;
        let phi_a = capacity.capacity(&set_a)?;
        let phi_union = capacity.capacity(&union)?;
        monotonicity = monotonicity.max(phi_a - phi_union);
        subadditivity = subadditivity.max(phi_union - phi_a - capacity.capacity(&set_b)?);
    }

    Ok(vec![
        CheckResult::within(
            "axiom-normalization",
            normalization,
            0.0,
            1e-9,
            ANCHOR_AXIOMS,
        ),
        CheckResult::within(
            "axiom-monotonicity",
            monotonicity.max(0.0),
            0.0,
            1e-9,
            ANCHOR_AXIOMS,
        ),
        CheckResult::within(
            "axiom-subadditivity",
            subadditivity.max(0.0),
            0.0,
            1e-9,
            ANCHOR_AXIOMS,
        ),
    ])
}

/// Three-level sanity: the maximally mixed state holds exactly one third of
/// any pure state. The independent oracle bisects the smallest eigenvalue of
/// `rho - mu * psi` directly.
pub fn three_level_checks(seed: u64) -> Result<Vec<CheckResult>> {
    let rho = Ensemble::maximally_mixed(3)?;
    let space = EnsembleSpace::density_matrix(3)?;
    let pure = frcap::sample_extreme_points(&space, 1, seed)?.remove(0);
    let set = ExtremeSet::finite(vec![pure.clone()])?;
    let solver_value = numeric_capacity(&rho, &set, 1e-10)?.value;

    // Eigenvalue-positivity oracle, independent of the hull machinery.
    let rho_matrix = rho.as_density().expect("density reference");
    let psi = pure.as_density().expect("pure state");
    let positive = |mu: f64| -> bool {
        let mut m = rho_matrix.clone();
        m.axpy_mut(-mu, psi).expect("same dimension");
        m.min_eigenvalue() >= -1e-13
    };
    let mut lo = 0.0;
    let mut hi = 1.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if positive(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let oracle_value = 0.5 * (lo + hi);

    Ok(vec![
        CheckResult::within(
            "three-level-singleton-capacity",
            solver_value,
            1.0 / 3.0,
            1e-8,
            ANCHOR_EIGENVALUE_BOUND,
        ),
        CheckResult::within(
            "three-level-solver-vs-eigenvalue-oracle",
            solver_value,
            oracle_value,
            1e-8,
            ANCHOR_EIGENVALUE_BOUND,
        ),
    ])
}

/// Gap scaling: over random ranges, the Choquet gap follows the half-range
/// law to quadrature accuracy.
pub fn gap_scaling_checks(seed: u64) -> Result<CheckResult> {
    let center = Ensemble::bloch_center();
    let capacity = FractionCapacity::new(center.clone());
    let mut rng = SplitMix64::new(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let a = rng.range(0.01, 9.0);
        let b = a + rng.range(0.001, 10.0 - a);
        let variable = bloch_variable(a, b);
        let integral = choquet_integral(&variable, &capacity, 1e-8)?;
        let gap = integral.value - expectation(&variable, &center)?;
        worst = worst.max((gap - (b - a) / 2.0 * std::f64::consts::LN_2).abs());
    }
    Ok(CheckResult::within(
        "gap-scaling-law",
        worst,
        0.0,
        1e-6,
        ANCHOR_GAP,
    ))
}

/// Simplex capacities double-checked against the vertex-mass closed form via
/// the bisection solver.
pub fn vertex_mass_check(seed: u64) -> Result<CheckResult> {
    let mut rng = SplitMix64::new(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = 2 + rng.index(5);
        let reference = Ensemble::distribution(rng.distribution(n))?;
        let indices: Vec<usize> = (0..n).filter(|_| rng.uniform() < 0.5).collect();
        if indices.is_empty() {
            continue;
        }
        let set = ExtremeSet::finite(
            indices
                .iter()
                .map(|&i| Ensemble::simplex_vertex(n, i).expect("in range"))
                .collect(),
        )?;
        let closed = FractionCapacity::new(reference.clone()).capacity(&set)?;
        let numeric = numeric_capacity(&reference, &set, 1e-10)?.value;
        worst = worst.max((closed - numeric).abs());
    }
    Ok(CheckResult::within(
        "simplex-vertex-mass-two-routes",
        worst,
        0.0,
        1e-9,
        ANCHOR_VERTEX_MASS,
    ))
}

/// The complete verification suite: every reproduction check in one report.
pub fn verify_all(seed: u64) -> Result<ReproReport> {
    let mut tolerances = BTreeMap::new();
    tolerances.insert("quadrature".to_string(), 1e-6);
    tolerances.insert("bisection".to_string(), 1e-10);
    tolerances.insert("oracle-vs-closed-form".to_string(), 1e-2);
    tolerances.insert("axioms".to_string(), 1e-9);

    let mut report = ReproReport::new(seed, tolerances);

    // 1. The worked Choquet value at (a, b) = (1, 3).
    report.extend(bloch_choquet_checks(1.0, 3.0, 1e-6).context("bloch choquet")?);

    // 2. Survival profile: three routes across 100 thresholds.
    let profile = capacity_profile(1.0, 3.0, 100, 10_000, seed).context("capacity profile")?;
    report.extend(profile.checks);

    // 3. Singleton capacities at the center.
    report.push(singleton_checks(seed)?);

    // 4. Classical equivalence across random instances, all outcome counts.
    for n in 2..=6 {
        let check = classical_checks(n, 20, seed + n as u64, 1e-9)?;
        let worst = check
            .iter()
            .find(|c| c.name == "classical-choquet-deviation")
            .expect("deviation check present")
            .clone();
        report.push(CheckResult::within(
            format!("classical-choquet-deviation-n{n}"),
            worst.computed,
            0.0,
            1e-9,
            ANCHOR_EXPECTATION,
        ));
    }

    // 5. The Sugeno counterexample.
    report.extend(sugeno_counterexample_checks()?);

    // 6. Capacity axioms per space.
    report.extend(axiom_checks(seed)?);

    // 7. Three-level sanity against the eigenvalue oracle.
    report.extend(three_level_checks(seed)?);

    // 8. Gap scaling across random ranges.
    report.push(gap_scaling_checks(seed)?);

    // Closed form vs numeric on the simplex, rounding out the dual routes.
    report.push(vertex_mass_check(seed)?);

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_validation() {
        assert!(validate_range(1.0, 3.0).is_ok());
        assert!(validate_range(-1.0, 3.0).is_err());
        assert!(validate_range(3.0, 1.0).is_err());
        assert!(validate_range(1.0, 1.0).is_err());
        assert!(validate_range(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn near_degenerate_gap() {
        // Tight range: the predicted gap shrinks with the width.
        let checks = bloch_choquet_checks(2.0, 2.0001, 1e-9).unwrap();
        let gap = checks.iter().find(|c| c.name == "choquet-gap").unwrap();
        assert!(gap.pass);
        let predicted = 0.0001 / 2.0 * std::f64::consts::LN_2;
        assert!((gap.reference - predicted).abs() < 1e-12);
        assert!((predicted - 3.47e-5).abs() < 1e-7);
    }

    #[test]
    fn point_mass_integrals() {
        // q = (1, 0) with f = (5, 7): the Choquet integral recovers the
        // expectation 5. The survival function is 1 up to 5, so the sup-min
        // integral saturates at the full measure instead: min(5, 1) = 1.
        let state = Ensemble::distribution(vec![1.0, 0.0]).unwrap();
        let variable = StatisticalVariable::on_simplex(vec![5.0, 7.0]).unwrap();
        let capacity = FractionCapacity::new(state.clone());
        let choquet = choquet_integral(&variable, &capacity, 1e-9).unwrap().value;
        let sugeno = sugeno_integral(&variable, &capacity).unwrap();
        assert!((choquet - 5.0).abs() < 1e-9);
        assert!((sugeno - 1.0).abs() < 1e-9);
        assert!((expectation(&variable, &state).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn profile_rows_and_landmarks() {
        let profile = capacity_profile(1.0, 3.0, 5, 2000, 0).unwrap();
        let lines: Vec<&str> = profile.csv.lines().collect();
        assert_eq!(lines[0], "s,phi_closed_form,phi_numeric,phi_oracle");
        assert_eq!(lines.len(), 6);
        // s = 0, 1, 2, 3, 4 with closed-form values 1, 1, 1, 0.5, 0.
        let closed: Vec<f64> = lines[1..]
            .iter()
            .map(|line| line.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert_eq!(closed[0], 1.0);
        assert_eq!(closed[2], 1.0); // boundary of the first case
        assert_eq!(closed[3], 0.5); // attained value at the maximum
        assert_eq!(closed[4], 0.0); // beyond the maximum
        for check in &profile.checks {
            assert!(check.pass, "{} failed: {}", check.name, check.computed);
        }
    }

    #[test]
    fn seeded_checks_are_deterministic() {
        let a = classical_checks(3, 10, 42, 1e-9).unwrap();
        let b = classical_checks(3, 10, 42, 1e-9).unwrap();
        assert_eq!(a[0].computed.to_bits(), b[0].computed.to_bits());
    }
}
