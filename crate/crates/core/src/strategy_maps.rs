//! Consistent maps from the strategy polytope to distributions over pure
//! strategies, and the extended maps they induce on polynomial deviations.

use std::collections::HashMap;

use crate::error::{check_len, Error, Result};
use crate::poly::PolynomialDeviation;
use crate::tfsdp::{DecisionProblem, TreeStrategy};

/// Which consistent map to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Delta {
    /// The behavioral map: independent per-decision-point action choices.
    #[default]
    Beta,
    /// A small-support decomposition into pure strategies.
    Caratheodory,
}

impl std::str::FromStr for Delta {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "beta" => Ok(Delta::Beta),
            "cara" | "caratheodory" => Ok(Delta::Caratheodory),
            _ => Err(Error::Invalid(format!("unknown strategy map `{s}`"))),
        }
    }
}

/// A finitely supported distribution over pure strategies.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SupportMix {
    pub atoms: Vec<(f64, TreeStrategy)>,
}

impl SupportMix {
    pub fn pure(x: TreeStrategy) -> Self {
        SupportMix { atoms: vec![(1.0, x)] }
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|(w, _)| w).sum()
    }

    pub fn expectation(&self, n: usize) -> Vec<f64> {
        let mut e = vec![0.0; n];
        for (w, x) in &self.atoms {
            for (z, v) in e.iter_mut().enumerate() {
                if x.get(z) {
                    *v += w;
                }
            }
        }
        e
    }

    /// `E[prod_{z in S} x[z]]`.
    pub fn monomial_expectation(&self, s: &[usize]) -> f64 {
        self.atoms.iter().filter(|(_, x)| s.iter().all(|&z| x.get(z))).map(|(w, _)| w).sum()
    }
}

/// The behavioral distribution of a point of the polytope, described
/// implicitly by its node values. Never enumerated in the learning loop.
#[derive(Debug, Clone, PartialEq)]
pub struct BehavioralDescriptor {
    pub base: Vec<f64>,
    node_values: Vec<f64>,
}

impl BehavioralDescriptor {
    pub fn new(problem: &DecisionProblem, x: &[f64]) -> Result<Self> {
        check_len(problem.n(), x.len())?;
        Ok(BehavioralDescriptor { base: x.to_vec(), node_values: problem.node_values(x) })
    }

    /// `E_{x' ~ beta(x)} prod_{z in S} x'[z]`: zero if two terminals of `S`
    /// need different actions at a common decision point, otherwise the
    /// product of the conditional action probabilities along the union of
    /// their root paths.
    pub fn monomial_expectation(&self, problem: &DecisionProblem, s: &[usize]) -> f64 {
        match s.len() {
            0 => return 1.0,
            1 => return self.base[s[0]],
            _ => {}
        }
        let mut chosen: Vec<(usize, usize)> = Vec::with_capacity(s.len() * problem.depth());
        for &z in s {
            for &(j, a) in problem.path(z) {
                match chosen.iter().find(|(jj, _)| *jj == j) {
                    Some(&(_, aa)) if aa != a => return 0.0,
                    Some(_) => {}
                    None => chosen.push((j, a)),
                }
            }
        }
        let mut prod = 1.0;
        for (j, a) in chosen {
            let vj = self.node_values[j];
            if vj > 0.0 {
                prod *= self.node_values[problem.node(j).children[a]] / vj;
            }
        }
        prod
    }
}

/// Checks that `x` is a point of the polytope.
pub fn require_member(problem: &DecisionProblem, x: &[f64]) -> Result<()> {
    if problem.membership_tol(x, 1e-7)? {
        Ok(())
    } else {
        Err(Error::NotInPolytope(format!("{x:?}")))
    }
}

/// Convenience wrapper around [`BehavioralDescriptor::monomial_expectation`].
pub fn monomial_expectation_beta(problem: &DecisionProblem, x: &[f64], s: &[usize]) -> Result<f64> {
    check_len(problem.n(), x.len())?;
    if let Some(&z) = s.iter().find(|&&z| z >= problem.n()) {
        return Err(Error::Invalid(format!("terminal index {z} out of range")));
    }
    Ok(BehavioralDescriptor::new(problem, x)?.monomial_expectation(problem, s))
}

/// The behavioral distribution written out explicitly (desk scale). At
/// decision points of value zero the lowest-index action is used.
pub fn beta_support(problem: &DecisionProblem, x: &[f64]) -> Result<SupportMix> {
    check_len(problem.n(), x.len())?;
    let pure = problem.enumerate_pure_strategies()?;
    let vals = problem.node_values(x);
    let mut atoms = Vec::new();
    for y in pure {
        let reach = problem.pure_node_values(&y);
        let mut p = 1.0;
        for j in problem.decision_points() {
            if !reach[j] {
                continue;
            }
            let node = problem.node(j);
            let a = node.children.iter().position(|&c| reach[c]).unwrap();
            p *= if vals[j] > 0.0 {
                vals[node.children[a]] / vals[j]
            } else if a == 0 {
                1.0
            } else {
                0.0
            };
            if p == 0.0 {
                break;
            }
        }
        if p > 0.0 {
            atoms.push((p, y));
        }
    }
    Ok(SupportMix { atoms })
}

/// Decomposes `x` into at most N pure strategies by peeling: follow the
/// largest remaining flow at every reached decision point, subtract the
/// largest feasible multiple of that pure strategy, repeat.
pub fn caratheodory(problem: &DecisionProblem, x: &[f64]) -> Result<SupportMix> {
    require_member(problem, x)?;
    let mut r: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
    let mut atoms = Vec::new();
    let nodes = problem.nodes();
    for _ in 0..=problem.n() {
        let vals = problem.node_values(&r);
        if vals[0] <= 1e-12 {
            break;
        }
        let mut choice = vec![0usize; nodes.len()];
        for j in problem.decision_points() {
            let ch = &nodes[j].children;
            let mut best = 0;
            for k in 1..ch.len() {
                if vals[ch[k]] > vals[ch[best]] {
                    best = k;
                }
            }
            choice[j] = best;
        }
        let y = problem.follow(&choice);
        let (zmin, alpha) = (0..problem.n())
            .filter(|&z| y.get(z))
            .map(|z| (z, r[z]))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if alpha <= 0.0 {
            break;
        }
        for z in 0..problem.n() {
            if y.get(z) {
                r[z] -= alpha;
                if r[z] < 1e-14 {
                    r[z] = 0.0;
                }
            }
        }
        r[zmin] = 0.0;
        atoms.push((alpha, y));
    }
    let total: f64 = atoms.iter().map(|(w, _)| w).sum();
    if total <= 0.0 {
        return Err(Error::NotInPolytope("no mass to decompose".into()));
    }
    for (w, _) in atoms.iter_mut() {
        *w /= total;
    }
    Ok(SupportMix { atoms })
}

/// A component of a mixed strategy.
#[derive(Debug, Clone, PartialEq)]
pub enum Component {
    Behavioral(BehavioralDescriptor),
    Support(SupportMix),
}

impl Component {
    pub fn new(problem: &DecisionProblem, x: &[f64], delta: Delta) -> Result<Self> {
        Ok(match delta {
            Delta::Beta => Component::Behavioral(BehavioralDescriptor::new(problem, x)?),
            Delta::Caratheodory => Component::Support(caratheodory(problem, x)?),
        })
    }

    pub fn mean(&self, n: usize) -> Vec<f64> {
        match self {
            Component::Behavioral(b) => b.base.clone(),
            Component::Support(s) => s.expectation(n),
        }
    }

    pub fn monomial_expectation(&self, problem: &DecisionProblem, s: &[usize]) -> f64 {
        match self {
            Component::Behavioral(b) => b.monomial_expectation(problem, s),
            Component::Support(m) => m.monomial_expectation(s),
        }
    }
}

/// A weighted mixture of components: the object a learner plays.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureStrategy {
    pub kind: Delta,
    pub components: Vec<(f64, Component)>,
}

impl MixtureStrategy {
    /// The uniform mixture of `delta(x_l)` over the given points.
    pub fn uniform(problem: &DecisionProblem, points: &[Vec<f64>], delta: Delta) -> Result<Self> {
        let w = 1.0 / points.len() as f64;
        let components = points
            .iter()
            .map(|x| Ok((w, Component::new(problem, x, delta)?)))
            .collect::<Result<_>>()?;
        Ok(MixtureStrategy { kind: delta, components })
    }

    pub fn mean(&self, n: usize) -> Vec<f64> {
        let mut m = vec![0.0; n];
        for (w, c) in &self.components {
            for (a, b) in m.iter_mut().zip(c.mean(n)) {
                *a += w * b;
            }
        }
        m
    }

    pub fn monomial_expectation(&self, problem: &DecisionProblem, s: &[usize]) -> f64 {
        self.components.iter().map(|(w, c)| w * c.monomial_expectation(problem, s)).sum()
    }

    /// Explicit distribution over pure strategies (desk scale).
    pub fn support(&self, problem: &DecisionProblem) -> Result<SupportMix> {
        let mut acc: HashMap<TreeStrategy, f64> = HashMap::new();
        for (w, c) in &self.components {
            let mix = match c {
                Component::Behavioral(b) => beta_support(problem, &b.base)?,
                Component::Support(s) => s.clone(),
            };
            for (p, x) in mix.atoms {
                *acc.entry(x).or_insert(0.0) += w * p;
            }
        }
        let mut atoms: Vec<(f64, TreeStrategy)> = acc.into_iter().map(|(x, w)| (w, x)).collect();
        atoms.sort_by(|a, b| a.1.cmp(&b.1));
        Ok(SupportMix { atoms })
    }
}

/// `E_{x' ~ delta(x)} phi(x')`.
pub fn extended_map_eval(
    problem: &DecisionProblem,
    phi: &PolynomialDeviation,
    x: &[f64],
    delta: Delta,
) -> Result<Vec<f64>> {
    check_len(problem.n(), phi.n_in())?;
    require_member(problem, x)?;
    Ok(match delta {
        Delta::Beta => {
            let b = BehavioralDescriptor::new(problem, x)?;
            phi.eval_with(|s| b.monomial_expectation(problem, s))
        }
        Delta::Caratheodory => {
            let mix = caratheodory(problem, x)?;
            phi.eval_with(|s| mix.monomial_expectation(s))
        }
    })
}
