use crate::deviations::{best_reduced_strategy, Dag, ReducedStrategy, StateKind};
use crate::error::{check_len, Error, Result};

/// Regret matching+ at every decision state of a DAG, with counterfactual
/// values computed per state (mass arriving on several in-edges is pooled).
#[derive(Debug, Clone, PartialEq)]
pub struct DagCfr {
    states: usize,
    edges: usize,
    /// Cumulative clipped regrets, indexed by global edge.
    regrets: Vec<f64>,
    /// Local distributions of the last `next`, indexed by global edge.
    local: Vec<f64>,
}

/// Regret-matching+ distribution from clipped regrets; uniform when all
/// regrets are zero.
pub fn rm_plus(regrets: &[f64], out: &mut [f64]) {
    let total: f64 = regrets.iter().sum();
    if total > 0.0 {
        for (o, r) in out.iter_mut().zip(regrets) {
            *o = r / total;
        }
    } else {
        out.fill(1.0 / regrets.len() as f64);
    }
}

impl DagCfr {
    pub fn new(dag: &Dag) -> Self {
        let mut cfr = DagCfr {
            states: dag.num_states(),
            edges: dag.num_edges(),
            regrets: vec![0.0; dag.num_edges()],
            local: vec![0.0; dag.num_edges()],
        };
        cfr.refresh(dag);
        cfr
    }

    fn check(&self, dag: &Dag) -> Result<()> {
        if dag.num_states() != self.states || dag.num_edges() != self.edges {
            return Err(Error::StateMismatch(format!(
                "{} states / {} edges, learner built for {} / {}",
                dag.num_states(),
                dag.num_edges(),
                self.states,
                self.edges
            )));
        }
        Ok(())
    }

    fn refresh(&mut self, dag: &Dag) {
        for s in 0..dag.num_states() {
            if dag.kind(s) == StateKind::Decision {
                let r = dag.edges(s);
                let (regrets, local) = (&self.regrets[r.clone()], &mut self.local[r]);
                rm_plus(regrets, local);
            }
        }
    }

    pub fn regrets(&self) -> &[f64] {
        &self.regrets
    }

    /// Local distribution at decision state `s`.
    pub fn local(&self, dag: &Dag, s: usize) -> &[f64] {
        &self.local[dag.edges(s)]
    }

    pub fn next(&mut self, dag: &Dag) -> Result<ReducedStrategy> {
        self.check(dag)?;
        self.refresh(dag);
        let local = &self.local;
        Ok(ReducedStrategy::from_local(dag, |s| &local[dag.edges(s)]))
    }

    /// Updates regrets against terminal weights `w`.
    pub fn observe(&mut self, dag: &Dag, w: &[f64]) -> Result<()> {
        self.check(dag)?;
        check_len(dag.num_terminals(), w.len())?;
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("terminal weights".into()));
        }
        let mut value = vec![0.0; dag.num_states()];
        for &s in dag.topo().iter().rev() {
            value[s] = match dag.kind(s) {
                StateKind::Terminal => w[dag.terminal_index(s).unwrap()],
                StateKind::Observation => dag.children(s).iter().map(|&c| value[c]).sum(),
                StateKind::Decision => {
                    dag.edges(s).map(|e| self.local[e] * value[dag.edge_target(e)]).sum()
                }
            };
        }
        for s in 0..dag.num_states() {
            if dag.kind(s) != StateKind::Decision {
                continue;
            }
            for e in dag.edges(s) {
                let inc = value[dag.edge_target(e)] - value[s];
                self.regrets[e] = (self.regrets[e] + inc).max(0.0);
            }
        }
        Ok(())
    }
}

/// Accumulates `(W, q)` pairs and reports the average external regret
/// `(max_q sum_t <W_t, q> - sum_t <W_t, q_t>) / T`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretMeter {
    pub sum_w: Vec<f64>,
    pub sum_played: f64,
    pub rounds: usize,
}

impl RegretMeter {
    pub fn new(terminals: usize) -> Self {
        RegretMeter { sum_w: vec![0.0; terminals], sum_played: 0.0, rounds: 0 }
    }

    pub fn record(&mut self, w: &[f64], q: &ReducedStrategy) {
        for (a, b) in self.sum_w.iter_mut().zip(w) {
            *a += b;
        }
        self.sum_played += q.dot(w);
        self.rounds += 1;
    }

    pub fn best_total(&self, dag: &Dag) -> Result<f64> {
        Ok(best_reduced_strategy(dag, &self.sum_w)?.0)
    }

    pub fn average_regret(&self, dag: &Dag) -> Result<f64> {
        if self.rounds == 0 {
            return Ok(0.0);
        }
        Ok((self.best_total(dag)? - self.sum_played) / self.rounds as f64)
    }
}

/// `(1/T) [max_q sum_t <W_t, q> - sum_t <W_t, q_t>]` for a recorded history.
pub fn measure_external_regret(history: &[(Vec<f64>, ReducedStrategy)], dag: &Dag) -> Result<f64> {
    let mut m = RegretMeter::new(dag.num_terminals());
    for (w, q) in history {
        check_len(dag.num_terminals(), w.len())?;
        m.record(w, q);
    }
    m.average_regret(dag)
}
