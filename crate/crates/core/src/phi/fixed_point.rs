use crate::error::{Error, Result};
use crate::poly::PolynomialDeviation;
use crate::strategy_maps::{caratheodory, BehavioralDescriptor, Delta, MixtureStrategy, SupportMix};
use crate::tfsdp::DecisionProblem;

/// Tolerance used when checking that iterates stay in the polytope.
const ITERATE_TOL: f64 = 1e-8;

/// Starting point of the fixed-point iteration.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum FixedPointInit {
    /// The uniform behavioral point.
    #[default]
    Uniform,
    /// Inside a learner: the last iterate of the previous round.
    WarmStart,
    Point(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointConfig {
    pub l: usize,
    pub delta: Delta,
    pub init: FixedPointInit,
}

impl FixedPointConfig {
    pub fn new(l: usize, delta: Delta) -> Self {
        FixedPointConfig { l: l.max(1), delta, init: FixedPointInit::Uniform }
    }

    /// `L = ceil(2 / eps)`, so that the error bound `2 / L` is at most `eps`.
    pub fn for_error(eps: f64, delta: Delta) -> Self {
        Self::new((2.0 / eps).ceil() as usize, delta)
    }
}

/// The iterates `x_1, ..., x_{L+1}` of `x -> phi^delta(x)`. The uniform
/// mixture of `delta(x_1), ..., delta(x_L)` is an expected fixed point whose
/// error `E[phi(x) - x]` telescopes to `(x_{L+1} - x_1) / L`.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub delta: Delta,
    pub iterates: Vec<Vec<f64>>,
}

impl FixedPoint {
    pub fn l(&self) -> usize {
        self.iterates.len() - 1
    }

    pub fn first(&self) -> &[f64] {
        &self.iterates[0]
    }

    pub fn last(&self) -> &[f64] {
        &self.iterates[self.l()]
    }

    /// `(x_{L+1} - x_1) / L`.
    pub fn error(&self) -> Vec<f64> {
        let l = self.l() as f64;
        self.last().iter().zip(self.first()).map(|(a, b)| (a - b) / l).collect()
    }

    /// `E_pi x`, the average of `x_1..x_L`.
    pub fn mean(&self) -> Vec<f64> {
        let l = self.l();
        let mut m = vec![0.0; self.iterates[0].len()];
        for x in &self.iterates[..l] {
            for (a, b) in m.iter_mut().zip(x) {
                *a += b;
            }
        }
        for a in m.iter_mut() {
            *a /= l as f64;
        }
        m
    }

    /// `E_pi phi(x)`, the average of `x_2..x_{L+1}`.
    pub fn image_mean(&self) -> Vec<f64> {
        let l = self.l();
        let mut m = vec![0.0; self.iterates[0].len()];
        for x in &self.iterates[1..] {
            for (a, b) in m.iter_mut().zip(x) {
                *a += b;
            }
        }
        for a in m.iter_mut() {
            *a /= l as f64;
        }
        m
    }

    pub fn mixture(&self, problem: &DecisionProblem) -> Result<MixtureStrategy> {
        MixtureStrategy::uniform(problem, &self.iterates[..self.l()], self.delta)
    }
}

/// One iterate seen through the chosen consistent map.
pub enum View<'a> {
    Beta(&'a BehavioralDescriptor),
    Support(&'a SupportMix),
}

impl View<'_> {
    pub fn monomial_expectation(&self, problem: &DecisionProblem, s: &[usize]) -> f64 {
        match self {
            View::Beta(b) => b.monomial_expectation(problem, s),
            View::Support(m) => m.monomial_expectation(s),
        }
    }
}

/// Runs `L` steps of `x_{l+1} = step(delta(x_l))` from `x1`, checking that
/// every iterate stays in the polytope.
pub fn iterate(
    problem: &DecisionProblem,
    x1: Vec<f64>,
    l: usize,
    delta: Delta,
    mut step: impl FnMut(&View<'_>) -> Vec<f64>,
) -> Result<FixedPoint> {
    let l = l.max(1);
    let mut iterates = Vec::with_capacity(l + 1);
    if !problem.membership_tol(&x1, ITERATE_TOL)? {
        return Err(Error::NotInPolytope("initial point of the fixed-point iteration".into()));
    }
    iterates.push(x1);
    for _ in 0..l {
        let x = iterates.last().unwrap();
        let next = match delta {
            Delta::Beta => step(&View::Beta(&BehavioralDescriptor::new(problem, x)?)),
            Delta::Caratheodory => step(&View::Support(&caratheodory(problem, x)?)),
        };
        if !problem.membership_tol(&next, ITERATE_TOL)? {
            return Err(Error::InvalidDeviation(format!(
                "extended map left the strategy polytope: {next:?}"
            )));
        }
        iterates.push(next);
    }
    Ok(FixedPoint { delta, iterates })
}

/// An expected fixed point of a polynomial deviation `phi: X -> co X`.
pub fn expected_fixed_point(
    problem: &DecisionProblem,
    phi: &PolynomialDeviation,
    cfg: &FixedPointConfig,
) -> Result<FixedPoint> {
    crate::error::check_len(problem.n(), phi.n_in())?;
    crate::error::check_len(problem.n(), phi.n_out())?;
    let x1 = match &cfg.init {
        FixedPointInit::Point(x) => x.clone(),
        _ => problem.uniform_point(),
    };
    iterate(problem, x1, cfg.l, cfg.delta, |v| phi.eval_with(|s| v.monomial_expectation(problem, s)))
}
