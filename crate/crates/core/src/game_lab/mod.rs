//! Games: correlated equilibria of normal-form games, extensive-form
//! self-play, equilibrium gaps, and a few small experiments.

mod ce;
mod efg;
mod gadget;
mod nfg;
mod profile;
mod quadratic;
mod separation;

pub use ce::{run_ce, run_ce_with, swap_gap, CeConfig, CeRun, CE_HORIZON_CONSTANT};
pub use efg::{efg_self_play, phi_equilibrium_gap, EFGame, SelfPlay, SelfPlayConfig};
pub use gadget::{gadget_iterations, gadget_min_sum, gadget_step};
pub use nfg::{stationarity_error, stationary_average, NormalFormGame, SwapLearner, SwapMeter};
pub use profile::{CorrelatedProfile, PROFILE_CSV_HEADER};
pub use quadratic::{is_convex_combination_of_low_degree, low_degree_boolean_functions, separating_quadratic};
pub use separation::{separation_game, separation_gaps, Separation, SEPARATION_RECODING};
