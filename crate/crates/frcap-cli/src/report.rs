//! Machine-readable verification reports.
//!
//! Serialization is deterministic for fixed inputs: struct fields keep their
//! declaration order, checks keep insertion order and the tolerance map is
//! sorted, so identical runs produce identical JSON.

use std::collections::BTreeMap;

use serde::Serialize;

/// One verified quantity: a computed value against its reference.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub computed: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// The closed-form relation the reference value comes from.
    pub anchor: String,
}

impl CheckResult {
    /// Passes when `computed` lies within `tolerance` of `reference`.
    pub fn within(
        name: impl Into<String>,
        computed: f64,
        reference: f64,
        tolerance: f64,
        anchor: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            computed,
            reference,
            tolerance,
            pass: (computed - reference).abs() <= tolerance && computed.is_finite(),
            anchor: anchor.into(),
        }
    }

    /// Passes when `computed` differs from `reference` by more than
    /// `tolerance`; used for the checks that must confirm a mismatch.
    pub fn exceeds(
        name: impl Into<String>,
        computed: f64,
        reference: f64,
        tolerance: f64,
        anchor: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            computed,
            reference,
            tolerance,
            pass: (computed - reference).abs() > tolerance && computed.is_finite(),
            anchor: anchor.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub version: String,
}

/// A full verification report: checks plus the configuration that shaped them.
#[derive(Debug, Clone, Serialize)]
pub struct ReproReport {
    pub checks: Vec<CheckResult>,
    pub metadata: Metadata,
}

impl ReproReport {
    pub fn new(seed: u64, tolerances: BTreeMap<String, f64>) -> Self {
        Self {
            checks: Vec::new(),
            metadata: Metadata {
                seed,
                tolerances,
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
        }
    }

    pub fn push(&mut self, check: CheckResult) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: Vec<CheckResult>) {
        self.checks.extend(checks);
    }

    /// Overall verdict: every check passed.
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failing(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn to_json(&self) -> String {
        let mut json = serde_json::to_string_pretty(self).expect("report serializes");
        json.push('\n');
        json
    }

    /// Zeroes the named check's tolerance and re-evaluates it, forcing a
    /// failure unless the computation is bit-exact. Test hook for the
    /// failure path of the exit-code contract.
    pub fn corrupt_tolerance(&mut self, name: &str) -> bool {
        let mut found = false;
        for check in &mut self.checks {
            if check.name == name {
                check.tolerance = 0.0;
                check.pass = check.computed == check.reference;
                found = true;
            }
        }
        found
    }
}
