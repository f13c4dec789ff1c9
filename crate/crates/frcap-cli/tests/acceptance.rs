//! Acceptance suite: every headline quantitative claim, each as one test
//! with its tolerance pinned and a pass/fail line printed. Run with
//! `cargo test -p frcap-cli --test acceptance -- --nocapture` to see the
//! lines; any failure fails the build either way.

use std::time::{Duration, Instant};

use frcap::{
    choquet_integral, expectation, numeric_capacity, sugeno_integral, Ensemble, ExtremeSet,
    FractionCapacity, SplitMix64, StatisticalVariable,
};
use frcap_cli::checks;

const SEED: u64 = 42;

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "{} {criterion}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion}: {detail}");
}

fn assert_runtime(criterion: &str, elapsed: Duration, budget: Duration) {
    assert!(
        elapsed <= budget,
        "{criterion} took {elapsed:?}, budget {budget:?}"
    );
}

#[test]
fn criterion_1_choquet_value_at_the_bloch_center() {
    let start = Instant::now();
    let variable = StatisticalVariable::on_bloch([0.0, 0.0, 1.0], 2.0).unwrap();
    let center = Ensemble::bloch_center();
    let capacity = FractionCapacity::new(center.clone());

    let choquet = choquet_integral(&variable, &capacity, 1e-6).unwrap().value;
    let expected_choquet = 2.0 + std::f64::consts::LN_2;
    let expectation_value = expectation(&variable, &center).unwrap();
    let gap = choquet - expectation_value;

    report(
        "criterion 1 (choquet value at the center)",
        (choquet - expected_choquet).abs() <= 1e-6
            && expectation_value == 2.0
            && (gap - std::f64::consts::LN_2).abs() <= 1e-6,
        &format!(
            "choquet = {choquet} (want {expected_choquet} within 1e-6), \
             expectation = {expectation_value} (want exactly 2), gap = {gap}"
        ),
    );
    assert_runtime("criterion 1", start.elapsed(), Duration::from_secs(1));
}

#[test]
fn criterion_2_survival_profile_three_routes() {
    let start = Instant::now();
    let profile = checks::capacity_profile(1.0, 3.0, 100, 10_000, SEED).unwrap();
    for check in &profile.checks {
        report(
            &format!("criterion 2 ({})", check.name),
            check.pass,
            &format!(
                "max deviation {} within {}",
                check.computed, check.tolerance
            ),
        );
    }
    assert_runtime("criterion 2", start.elapsed(), Duration::from_secs(30));
}

#[test]
fn criterion_3_singleton_capacities_are_one_half() {
    let start = Instant::now();
    let center = Ensemble::bloch_center();
    let mut rng = SplitMix64::new(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let pole = Ensemble::bloch(rng.unit_vector()).unwrap();
        let set = ExtremeSet::finite(vec![pole]).unwrap();
        let value = numeric_capacity(&center, &set, 1e-10).unwrap().value;
        worst = worst.max((value - 0.5).abs());
    }
    report(
        "criterion 3 (singleton capacity at the center)",
        worst <= 1e-9,
        &format!("worst |capacity - 1/2| = {worst:.3e} over 20 random poles (tol 1e-9)"),
    );
    assert_runtime("criterion 3", start.elapsed(), Duration::from_secs(1));
}

#[test]
fn criterion_4_classical_equivalence() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(SEED);
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let n = 2 + trial % 5;
        let state = Ensemble::distribution(rng.distribution(n)).unwrap();
        let values: Vec<f64> = (0..n).map(|_| rng.range(-5.0, 5.0)).collect();
        let variable = StatisticalVariable::on_simplex(values).unwrap();
        let capacity = FractionCapacity::new(state.clone());
        let choquet = choquet_integral(&variable, &capacity, 1e-10).unwrap().value;
        let expected = expectation(&variable, &state).unwrap();
        worst = worst.max((choquet - expected).abs());
        assert!(
            (choquet - expected).abs() <= 1e-9,
            "instance {trial} (n = {n}) deviated by {}",
            (choquet - expected).abs()
        );
    }
    report(
        "criterion 4 (classical choquet = expectation)",
        worst <= 1e-9,
        &format!("worst |choquet - expectation| = {worst:.3e} over 100 instances (tol 1e-9)"),
    );
    assert_runtime("criterion 4", start.elapsed(), Duration::from_secs(5));
}

#[test]
fn criterion_5_sugeno_rejection() {
    let start = Instant::now();
    let state = Ensemble::distribution(vec![0.9, 0.1]).unwrap();
    let variable = StatisticalVariable::on_simplex(vec![0.0, 0.05]).unwrap();
    let capacity = FractionCapacity::new(state.clone());
    let sugeno = sugeno_integral(&variable, &capacity).unwrap();
    let expected = expectation(&variable, &state).unwrap();
    report(
        "criterion 5 (sugeno rejection)",
        (sugeno - 0.05).abs() <= 1e-9
            && (expected - 0.005).abs() <= 1e-12
            && (sugeno / expected - 10.0).abs() <= 1e-6,
        &format!(
            "sugeno = {sugeno} vs expectation = {expected} (ratio {}): \
             the sup-min integral misses even the additive case",
            sugeno / expected
        ),
    );
    assert_runtime("criterion 5", start.elapsed(), Duration::from_secs(1));
}

#[test]
fn criterion_6_capacity_axioms() {
    let start = Instant::now();
    let results = checks::axiom_checks(SEED).unwrap();
    for check in &results {
        report(
            &format!("criterion 6 ({})", check.name),
            check.pass,
            &format!(
                "worst violation {:.3e} (slack {:.0e}) over randomized set pairs per space",
                check.computed, check.tolerance
            ),
        );
    }
    assert_runtime("criterion 6", start.elapsed(), Duration::from_secs(60));
}

#[test]
fn criterion_7_three_level_singleton() {
    let start = Instant::now();
    let results = checks::three_level_checks(SEED).unwrap();
    for check in &results {
        report(
            &format!("criterion 7 ({})", check.name),
            check.pass,
            &format!(
                "computed {} vs reference {} (tol {:.0e})",
                check.computed, check.reference, check.tolerance
            ),
        );
    }
    assert_runtime("criterion 7", start.elapsed(), Duration::from_secs(5));
}

#[test]
fn criterion_8_gap_scaling_law() {
    let start = Instant::now();
    let check = checks::gap_scaling_checks(SEED).unwrap();
    report(
        "criterion 8 (gap scaling law)",
        check.pass,
        &format!(
            "worst |gap - half-range * ln 2| = {:.3e} over 50 random ranges (tol 1e-6)",
            check.computed
        ),
    );
    assert_runtime("criterion 8", start.elapsed(), Duration::from_secs(10));
}

#[test]
fn full_report_passes_and_is_deterministic() {
    let first = checks::verify_all(SEED).unwrap();
    assert!(first.pass(), "failing checks: {:?}", first.failing());
    let second = checks::verify_all(SEED).unwrap();
    assert_eq!(first.to_json(), second.to_json());
    // A different seed changes instances, never the verdict.
    let other = checks::verify_all(7).unwrap();
    assert!(other.pass(), "failing checks: {:?}", other.failing());
}
