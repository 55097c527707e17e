//! Monte-Carlo and finite-difference oracles for the closed forms.

pub mod check;
pub mod claims;
pub mod mc;
pub mod normality;
pub mod suite;

pub use check::{CheckRecord, Outcome, Statistic, DEFAULT_K_SIGMA};
pub use mc::{mc_cf, mc_mean, mc_moment, MCEstimate};
pub use normality::{mc_normality, NormalityStats};
pub use suite::{run_suite, SuiteConfig, VerificationReport};
