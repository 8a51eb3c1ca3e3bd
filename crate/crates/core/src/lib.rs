//! Φ-regret minimization over tree-form decision problems.
//!
//! The crate is organised bottom-up:
//!
//! * [`tfsdp`] decision problems, pure strategies, the strategy polytope;
//! * [`strategy_maps`] consistent maps from the polytope to distributions over
//!   pure strategies (behavioral and Carathéodory) and extended-map evaluation;
//! * [`deviations`] polynomial deviations, decision-tree deviation problems,
//!   mediator interleavings and reduced strategies over their DAGs;
//! * [`regret`] external-regret learners (RM+ CFR on DAGs, MWU);
//! * [`phi`] expected fixed points and the Φ-regret minimizer built on them;
//! * [`game_lab`] normal-form correlated equilibria, extensive-form self-play,
//!   equilibrium audits and small experiments.

pub mod deviations;
pub mod error;
pub mod game_lab;
pub mod lp;
pub mod phi;
pub mod poly;
pub mod regret;
pub mod strategy_maps;
pub mod tfsdp;

pub use error::{Error, Result};
pub use tfsdp::{DecisionProblem, NodeKind, TreeStrategy, UtilityVector};
