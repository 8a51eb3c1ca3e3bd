//! Expected fixed points and the Φ-regret minimizer built on them.

mod extract;
mod fixed_point;
mod minimizer;

pub use extract::{extract_expected_fixed_point, mixture_error, Extracted, MixedStrategyLearner, SimplexMwu};
pub use fixed_point::{expected_fixed_point, iterate, FixedPoint, FixedPointConfig, FixedPointInit, View};
pub use minimizer::{
    measure_phi_regret, Checkpoint, PhiConfig, PhiRegretMinimizer, PhiRegretRun, Play, RoundRecord,
};
