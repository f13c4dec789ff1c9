//! Fraction capacities and non-additive integrals on convex ensemble spaces.
//!
//! A statistical theory assigns states to a compact convex set: classical
//! probability lives on a simplex, a two-level quantum system on the Bloch
//! ball, an `n`-level system on the density matrices. Every state induces a
//! *fraction capacity* on the pure states: the largest fraction of the state
//! expressible as a mixture drawn from a given set. The capacity is monotone
//! and subadditive but additive only on the simplex, which makes it a
//! faithful fingerprint of classicality.
//!
//! This crate computes fraction capacities by closed form, by a bisection
//! feasibility solver and by an independent linear-programming oracle, and
//! integrates affine statistical variables against them with the Choquet and
//! Sugeno integrals. The headline quantitative fact, reproduced by the
//! `frcap` CLI and the acceptance suite: on the simplex the Choquet integral
//! recovers the expectation exactly, while at the center of the Bloch ball
//! it overshoots by `(b - a) ln(2) / 2` for a variable ranging over
//! `[a, b]` — so neither standard non-additive integral generalizes the
//! expectation to quantum state spaces.
//!
//! ```
//! use frcap::{
//!     choquet_integral, expectation, Ensemble, FractionCapacity, StatisticalVariable,
//! };
//!
//! // A variable on the Bloch ball ranging over [1, 3].
//! let f = StatisticalVariable::on_bloch([0.0, 0.0, 1.0], 2.0)?;
//! let center = Ensemble::bloch_center();
//!
//! let capacity = FractionCapacity::new(center.clone());
//! let choquet = choquet_integral(&f, &capacity, 1e-9)?.value;
//! let expected = expectation(&f, &center)?;
//!
//! assert!((expected - 2.0).abs() < 1e-12);
//! assert!((choquet - (2.0 + std::f64::consts::LN_2)).abs() < 1e-9);
//! # Ok::<(), frcap::Error>(())
//! ```

#![forbid(unsafe_code)]

mod capacity;
mod error;
mod hull;
mod integral;
mod lp;
mod matrix;
mod rng;
mod space;
mod variable;

pub use capacity::{
    bloch_cap_capacity, numeric_capacity, oracle_capacity, simplex_capacity, FeasibilityWitness,
    FractionCapacity, NumericCapacity, Strategy, DEFAULT_BISECTION_TOL, DEFAULT_ORACLE_SAMPLES,
};
pub use error::{Error, Result};
pub use integral::{
    choquet_gap, choquet_integral, choquet_integral_quadrature, expectation, sugeno_integral,
    Capacity, IntegralResult, SurvivalFunction, DEFAULT_QUADRATURE_TOL,
};
pub use matrix::Hermitian;
pub use rng::SplitMix64;
pub use space::{
    bloch_from_density, convex_combine, density_from_bloch, sample_extreme_points, Ensemble,
    EnsembleSpace, ExtremeSet, Payload, EXTREME_TOL, MEMBERSHIP_TOL,
};
pub use variable::{StatisticalVariable, VariableForm, VariableRange};


// The guide chapters double as doc-tests so their snippets stay honest.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(ensemble_spaces, "../../../book/src/ensemble-spaces.md");
    chapter!(
        statistical_variables,
        "../../../book/src/statistical-variables.md"
    );
    chapter!(fraction_capacity, "../../../book/src/fraction-capacity.md");
    chapter!(choquet_integral, "../../../book/src/choquet-integral.md");
    chapter!(sugeno_integral, "../../../book/src/sugeno-integral.md");
}
