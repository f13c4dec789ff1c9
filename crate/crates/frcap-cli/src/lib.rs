//! Reproduction checks and report machinery behind the `frcap` binary.
//!
//! The library half exists so the acceptance suite can drive the exact same
//! check implementations the CLI ships.

pub mod checks;
pub mod report;
