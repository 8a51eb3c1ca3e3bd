//! Deviation families: decision-tree deviations on the cube, mediator
//! interleavings, reduced strategies over their DAGs, and the extension of
//! the identity from `X` to the whole cube.

mod dag;
mod dt;
mod extension;
mod mediator;

pub use dag::{
    best_reduced_strategy, Dag, DeviationDag, ReducedStrategy, StateKind, DAG_TOL,
};
pub use dt::{
    build_dt_problem, build_dt_problem_capped, cube_point, dt_terminal_count, DtMove, DtProblem,
    DEFAULT_STATE_CAP,
};
pub use extension::{extend_identity, extend_polynomial};
pub use mediator::{child_toward, interleave, interleave_capped, is_strict_ancestor, MediatorDag, Move};

use crate::error::{Error, Result};
use crate::tfsdp::DecisionProblem;

/// A deviation family selected by name: `external`, `dt:K` or `med:K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviationSpec {
    External,
    DecisionTree(usize),
    Mediator(usize),
}

impl std::str::FromStr for DeviationSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "external" {
            return Ok(DeviationSpec::External);
        }
        let bad = || Error::Invalid(format!("deviation set `{s}`: expected external, dt:K or med:K"));
        let (kind, k) = s.split_once(':').ok_or_else(bad)?;
        let k: usize = k.parse().map_err(|_| bad())?;
        match kind {
            "dt" => Ok(DeviationSpec::DecisionTree(k)),
            "med" => Ok(DeviationSpec::Mediator(k)),
            _ => Err(bad()),
        }
    }
}

impl std::fmt::Display for DeviationSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DeviationSpec::External => write!(f, "external"),
            DeviationSpec::DecisionTree(k) => write!(f, "dt:{k}"),
            DeviationSpec::Mediator(k) => write!(f, "med:{k}"),
        }
    }
}

impl DeviationSpec {
    /// Builds the deviation DAG over `p`. Decision-tree deviations need `p`
    /// to be a cube-as-tree.
    pub fn build(&self, p: &DecisionProblem) -> Result<DeviationDag> {
        match *self {
            DeviationSpec::External => Ok(DeviationDag::constant_maps(p)),
            DeviationSpec::Mediator(k) => Ok(interleave(p, k)?.dev),
            DeviationSpec::DecisionTree(k) => {
                let n = p.hypercube_bits().ok_or_else(|| {
                    Error::Invalid("decision-tree deviations need a cube-shaped problem".into())
                })?;
                Ok(build_dt_problem(n, k, false)?.dev)
            }
        }
    }
}
