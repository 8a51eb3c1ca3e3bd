use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::error::{check_len, Error, Result};
use crate::poly::{PolynomialDeviation, Term};
use crate::strategy_maps::MixtureStrategy;
use crate::tfsdp::DecisionProblem;

/// Flow tolerance for reduced strategies.
pub const DAG_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateKind {
    Decision,
    Observation,
    Terminal,
}

/// A rooted acyclic decision problem whose nodes ("states") may have several
/// parents. State 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct Dag {
    kinds: Vec<StateKind>,
    edge_start: Vec<usize>,
    edge_to: Vec<usize>,
    names: Vec<String>,
    topo: Vec<usize>,
    terminal_index: Vec<Option<usize>>,
    terminals: Vec<usize>,
}

impl Dag {
    pub fn new(kinds: Vec<StateKind>, children: Vec<Vec<usize>>, names: Vec<String>) -> Result<Self> {
        let n = kinds.len();
        if n == 0 || children.len() != n || names.len() != n {
            return Err(Error::Structure("inconsistent DAG description".into()));
        }
        let mut indeg = vec![0usize; n];
        for (s, ch) in children.iter().enumerate() {
            match (kinds[s], ch.is_empty()) {
                (StateKind::Terminal, false) => {
                    return Err(Error::Structure(format!("terminal state {} has successors", names[s])))
                }
                (StateKind::Decision | StateKind::Observation, true) => {
                    return Err(Error::Structure(format!("state {} has no successors", names[s])))
                }
                _ => {}
            }
            for &c in ch {
                if c >= n {
                    return Err(Error::Structure("edge to unknown state".into()));
                }
                indeg[c] += 1;
            }
        }
        if indeg[0] != 0 || (1..n).any(|s| indeg[s] == 0) {
            return Err(Error::Structure("state 0 must be the unique source".into()));
        }
        let mut topo = Vec::with_capacity(n);
        let mut queue = VecDeque::from([0usize]);
        while let Some(s) = queue.pop_front() {
            topo.push(s);
            for &c in &children[s] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    queue.push_back(c);
                }
            }
        }
        if topo.len() != n {
            return Err(Error::Structure("state graph has a cycle".into()));
        }
        let mut edge_start = Vec::with_capacity(n + 1);
        let mut edge_to = Vec::new();
        for ch in &children {
            edge_start.push(edge_to.len());
            edge_to.extend_from_slice(ch);
        }
        edge_start.push(edge_to.len());
        let mut terminal_index = vec![None; n];
        let mut terminals = Vec::new();
        for s in 0..n {
            if kinds[s] == StateKind::Terminal {
                terminal_index[s] = Some(terminals.len());
                terminals.push(s);
            }
        }
        Ok(Dag { kinds, edge_start, edge_to, names, topo, terminal_index, terminals })
    }

    /// The tree of a decision problem viewed as a DAG; terminal order is kept.
    pub fn from_problem(p: &DecisionProblem) -> Self {
        use crate::tfsdp::NodeKind;
        let kinds = p
            .nodes()
            .iter()
            .map(|n| match n.kind {
                NodeKind::Decision => StateKind::Decision,
                NodeKind::Observation => StateKind::Observation,
                NodeKind::Terminal => StateKind::Terminal,
            })
            .collect();
        let children = p.nodes().iter().map(|n| n.children.clone()).collect();
        let names = p.nodes().iter().map(|n| n.id.clone()).collect();
        Dag::new(kinds, children, names).expect("trees are valid DAGs")
    }

    pub fn num_states(&self) -> usize {
        self.kinds.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edge_to.len()
    }

    pub fn num_terminals(&self) -> usize {
        self.terminals.len()
    }

    pub fn kind(&self, s: usize) -> StateKind {
        self.kinds[s]
    }

    pub fn name(&self, s: usize) -> &str {
        &self.names[s]
    }

    /// Global indices of the edges leaving `s`.
    pub fn edges(&self, s: usize) -> std::ops::Range<usize> {
        self.edge_start[s]..self.edge_start[s + 1]
    }

    pub fn children(&self, s: usize) -> &[usize] {
        &self.edge_to[self.edges(s)]
    }

    pub fn edge_target(&self, e: usize) -> usize {
        self.edge_to[e]
    }

    /// States in topological order, root first.
    pub fn topo(&self) -> &[usize] {
        &self.topo
    }

    pub fn terminal_index(&self, s: usize) -> Option<usize> {
        self.terminal_index[s]
    }

    pub fn terminal_state(&self, t: usize) -> usize {
        self.terminals[t]
    }

    /// Text dump, one line per state: `id kind successors...`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for s in 0..self.num_states() {
            let k = match self.kinds[s] {
                StateKind::Decision => 'D',
                StateKind::Observation => 'O',
                StateKind::Terminal => 'T',
            };
            write!(out, "{} {k}", self.names[s]).unwrap();
            for &c in self.children(s) {
                write!(out, " {}", self.names[c]).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// A strategy of a DAG problem, kept as per-edge flows; its terminal values
/// are the reduced strategy proper.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedStrategy {
    pub edge_flow: Vec<f64>,
    pub values: Vec<f64>,
}

impl ReducedStrategy {
    /// Pushes unit mass from the root; decision states split it according to
    /// `local(s)`, a distribution over their outgoing edges.
    pub fn from_local<'a>(dag: &Dag, local: impl Fn(usize) -> &'a [f64]) -> Self {
        let mut mass = vec![0.0; dag.num_states()];
        let mut edge_flow = vec![0.0; dag.num_edges()];
        let mut values = vec![0.0; dag.num_terminals()];
        mass[0] = 1.0;
        for &s in dag.topo() {
            let m = mass[s];
            match dag.kind(s) {
                StateKind::Terminal => values[dag.terminal_index(s).unwrap()] = m,
                StateKind::Observation => {
                    for e in dag.edges(s) {
                        edge_flow[e] = m;
                        mass[dag.edge_target(e)] += m;
                    }
                }
                StateKind::Decision => {
                    let p = local(s);
                    for (k, e) in dag.edges(s).enumerate() {
                        let f = m * p[k];
                        edge_flow[e] = f;
                        mass[dag.edge_target(e)] += f;
                    }
                }
            }
        }
        ReducedStrategy { edge_flow, values }
    }

    /// The pure strategy taking edge `choice[s]` (local index) at every
    /// decision state.
    pub fn from_choices(dag: &Dag, choice: &[usize]) -> Self {
        let mut mass = vec![0.0; dag.num_states()];
        let mut edge_flow = vec![0.0; dag.num_edges()];
        let mut values = vec![0.0; dag.num_terminals()];
        mass[0] = 1.0;
        for &s in dag.topo() {
            let m = mass[s];
            match dag.kind(s) {
                StateKind::Terminal => values[dag.terminal_index(s).unwrap()] = m,
                StateKind::Observation => {
                    for e in dag.edges(s) {
                        edge_flow[e] = m;
                        mass[dag.edge_target(e)] += m;
                    }
                }
                StateKind::Decision => {
                    let e = dag.edges(s).start + choice[s];
                    edge_flow[e] = m;
                    mass[dag.edge_target(e)] += m;
                }
            }
        }
        ReducedStrategy { edge_flow, values }
    }

    /// Checks the DAG flow equations.
    pub fn validate(&self, dag: &Dag) -> Result<()> {
        check_len(dag.num_edges(), self.edge_flow.len())?;
        check_len(dag.num_terminals(), self.values.len())?;
        if self.edge_flow.iter().chain(&self.values).any(|v| !v.is_finite() || *v < -DAG_TOL) {
            return Err(Error::InvalidDeviation("negative or non-finite flow".into()));
        }
        let mut inflow = vec![0.0; dag.num_states()];
        inflow[0] = 1.0;
        for e in 0..dag.num_edges() {
            inflow[dag.edge_target(e)] += self.edge_flow[e];
        }
        for s in 0..dag.num_states() {
            let m = inflow[s];
            let ok = match dag.kind(s) {
                StateKind::Terminal => (self.values[dag.terminal_index(s).unwrap()] - m).abs() <= DAG_TOL,
                StateKind::Observation => dag.edges(s).all(|e| (self.edge_flow[e] - m).abs() <= DAG_TOL),
                StateKind::Decision => {
                    (dag.edges(s).map(|e| self.edge_flow[e]).sum::<f64>() - m).abs() <= DAG_TOL
                }
            };
            if !ok {
                return Err(Error::InvalidDeviation(format!("flow violated at state {}", dag.name(s))));
            }
        }
        Ok(())
    }

    pub fn dot(&self, w: &[f64]) -> f64 {
        self.values.iter().zip(w).map(|(a, b)| a * b).sum()
    }
}

/// Backward induction: value of the best pure strategy for terminal weights
/// `w`, and that strategy. Ties go to the lowest edge.
pub fn best_reduced_strategy(dag: &Dag, w: &[f64]) -> Result<(f64, ReducedStrategy)> {
    check_len(dag.num_terminals(), w.len())?;
    let mut value = vec![0.0; dag.num_states()];
    let mut choice = vec![0usize; dag.num_states()];
    for &s in dag.topo().iter().rev() {
        value[s] = match dag.kind(s) {
            StateKind::Terminal => w[dag.terminal_index(s).unwrap()],
            StateKind::Observation => dag.children(s).iter().map(|&c| value[c]).sum(),
            StateKind::Decision => {
                let ch = dag.children(s);
                let mut best = 0;
                for k in 1..ch.len() {
                    if value[ch[k]] > value[ch[best]] {
                        best = k;
                    }
                }
                choice[s] = best;
                value[ch[best]]
            }
        };
    }
    Ok((value[0], ReducedStrategy::from_choices(dag, &choice)))
}

/// A DAG problem whose reduced strategies parametrize polynomial deviations:
/// terminal state `t` contributes `q[t] * prod_{z in monomial(t)} x[z]` to
/// output coordinate `output(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationDag {
    pub dag: Dag,
    n_in: usize,
    n_out: usize,
    outputs: Vec<usize>,
    monomials: Vec<Vec<usize>>,
}

impl DeviationDag {
    pub fn new(
        dag: Dag,
        n_in: usize,
        n_out: usize,
        outputs: Vec<usize>,
        mut monomials: Vec<Vec<usize>>,
    ) -> Result<Self> {
        check_len(dag.num_terminals(), outputs.len())?;
        check_len(dag.num_terminals(), monomials.len())?;
        for m in monomials.iter_mut() {
            m.sort_unstable();
            m.dedup();
        }
        if outputs.iter().any(|&z| z >= n_out) || monomials.iter().flatten().any(|&z| z >= n_in) {
            return Err(Error::Structure("terminal state refers to an unknown coordinate".into()));
        }
        Ok(DeviationDag { dag, n_in, n_out, outputs, monomials })
    }

    /// The external-deviation problem of `p`: the player simply plays `p`,
    /// so every reduced strategy is a constant map.
    pub fn constant_maps(p: &DecisionProblem) -> Self {
        let dag = Dag::from_problem(p);
        let outputs = (0..p.n()).collect();
        DeviationDag::new(dag, p.n(), p.n(), outputs, vec![Vec::new(); p.n()]).unwrap()
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn output(&self, t: usize) -> usize {
        self.outputs[t]
    }

    pub fn monomial(&self, t: usize) -> &[usize] {
        &self.monomials[t]
    }

    pub fn max_degree(&self) -> usize {
        self.monomials.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `phi_q(x)` evaluated as a polynomial.
    pub fn eval(&self, q: &ReducedStrategy, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n_in, x.len())?;
        check_len(self.dag.num_terminals(), q.values.len())?;
        let mut out = vec![0.0; self.n_out];
        for (t, &v) in q.values.iter().enumerate() {
            if v != 0.0 {
                out[self.outputs[t]] += v * self.monomials[t].iter().map(|&z| x[z]).product::<f64>();
            }
        }
        Ok(out)
    }

    pub fn to_polynomial(&self, q: &ReducedStrategy) -> Result<PolynomialDeviation> {
        check_len(self.dag.num_terminals(), q.values.len())?;
        let terms = q
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(t, &v)| Term { out: self.outputs[t], coef: v, mono: self.monomials[t].clone() })
            .collect();
        PolynomialDeviation::new(self.n_in, self.n_out, terms)
    }

    /// `w[t] = u[output(t)] * expect(monomial(t))`, the linear utility on
    /// reduced strategies induced by `u` against a mixture.
    pub fn terminal_weights_with(&self, u: &[f64], mut expect: impl FnMut(&[usize]) -> f64) -> Result<Vec<f64>> {
        check_len(self.n_out, u.len())?;
        Ok((0..self.dag.num_terminals())
            .map(|t| {
                let c = u[self.outputs[t]];
                if c == 0.0 {
                    0.0
                } else {
                    c * expect(&self.monomials[t])
                }
            })
            .collect())
    }

    pub fn terminal_weights(
        &self,
        problem: &DecisionProblem,
        u: &[f64],
        pi: &MixtureStrategy,
    ) -> Result<Vec<f64>> {
        check_len(self.n_in, problem.n())?;
        self.terminal_weights_with(u, |s| pi.monomial_expectation(problem, s))
    }
}
