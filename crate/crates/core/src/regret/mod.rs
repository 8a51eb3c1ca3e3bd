//! External-regret learners.

mod cfr;
mod mwu;

pub use cfr::{measure_external_regret, rm_plus, DagCfr, RegretMeter};
pub use mwu::{Mwu, StepSize};
