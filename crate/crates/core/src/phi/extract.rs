use super::minimizer::PhiRegretMinimizer;
use crate::error::{check_len, Error, Result};
use crate::poly::PolynomialDeviation;
use crate::regret::{Mwu, StepSize};
use crate::strategy_maps::{Component, Delta, MixtureStrategy, SupportMix};
use crate::tfsdp::{DecisionProblem, TreeStrategy};

/// A learner that plays mixtures over pure strategies of one problem and
/// receives linear utilities.
pub trait MixedStrategyLearner {
    fn problem(&self) -> &DecisionProblem;
    fn next_mixture(&mut self) -> Result<MixtureStrategy>;
    fn observe_utility(&mut self, u: &[f64]) -> Result<()>;
}

impl MixedStrategyLearner for PhiRegretMinimizer {
    fn problem(&self) -> &DecisionProblem {
        PhiRegretMinimizer::problem(self)
    }

    fn next_mixture(&mut self) -> Result<MixtureStrategy> {
        self.next()?;
        self.pending_mixture()
    }

    fn observe_utility(&mut self, u: &[f64]) -> Result<()> {
        self.observe(u)
    }
}

/// Plain MWU over the vertices of a simplex-shaped problem: an
/// external-regret learner only.
#[derive(Debug, Clone)]
pub struct SimplexMwu {
    problem: DecisionProblem,
    mwu: Mwu,
}

impl SimplexMwu {
    pub fn new(actions: usize, step: StepSize) -> Result<Self> {
        Ok(SimplexMwu { problem: DecisionProblem::simplex(actions)?, mwu: Mwu::new(actions, step) })
    }
}

impl MixedStrategyLearner for SimplexMwu {
    fn problem(&self) -> &DecisionProblem {
        &self.problem
    }

    fn next_mixture(&mut self) -> Result<MixtureStrategy> {
        let n = self.problem.n();
        let atoms = self
            .mwu
            .next()
            .into_iter()
            .enumerate()
            .map(|(a, w)| {
                let mut bits = vec![0u8; n];
                bits[a] = 1;
                (w, TreeStrategy::new(bits))
            })
            .collect();
        Ok(MixtureStrategy {
            kind: Delta::Caratheodory,
            components: vec![(1.0, Component::Support(SupportMix { atoms }))],
        })
    }

    fn observe_utility(&mut self, u: &[f64]) -> Result<()> {
        self.mwu.observe(u, 1.0)
    }
}

/// Result of [`extract_expected_fixed_point`].
#[derive(Debug, Clone)]
pub struct Extracted {
    pub mixture: MixtureStrategy,
    pub rounds: usize,
    /// `||E_pi[phi(x) - x]||_2` at termination.
    pub error: f64,
    pub diameter: f64,
}

/// `E_pi[phi(x) - x]`.
pub fn mixture_error(problem: &DecisionProblem, phi: &PolynomialDeviation, pi: &MixtureStrategy) -> Vec<f64> {
    let image = phi.eval_with(|s| pi.monomial_expectation(problem, s));
    let mean = pi.mean(problem.n());
    image.iter().zip(&mean).map(|(a, b)| a - b).collect()
}

/// Drives a Φ-regret learner with the utilities `u_t ∝ E_{pi_t}[phi(x) - x]`
/// until its play is an `eps * D`-expected fixed point of `phi` in the
/// Euclidean norm, `D` being the diameter of the pure strategy set.
pub fn extract_expected_fixed_point(
    learner: &mut dyn MixedStrategyLearner,
    phi: &PolynomialDeviation,
    eps: f64,
    max_rounds: usize,
) -> Result<Extracted> {
    let problem = learner.problem().clone();
    check_len(problem.n(), phi.n_in())?;
    let diameter = problem.l2_diameter()?;
    let target = eps * diameter;
    let mut last_error = f64::INFINITY;
    for round in 1..=max_rounds {
        let pi = learner.next_mixture()?;
        let e = mixture_error(&problem, phi, &pi);
        let norm = e.iter().map(|v| v * v).sum::<f64>().sqrt();
        last_error = norm;
        if norm <= target {
            return Ok(Extracted { mixture: pi, rounds: round, error: norm, diameter });
        }
        let u = problem.normalize_utility(&e)?;
        learner.observe_utility(&u.payoffs)?;
    }
    Err(Error::BudgetExhausted { rounds: max_rounds, last_error })
}
