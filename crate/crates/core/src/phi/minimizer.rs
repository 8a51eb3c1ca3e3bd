use std::collections::HashMap;

use super::fixed_point::{iterate, FixedPoint, FixedPointInit, View};
use crate::deviations::{best_reduced_strategy, DeviationDag, ReducedStrategy};
use crate::error::{check_len, Error, Result};
use crate::regret::{DagCfr, RegretMeter};
use crate::strategy_maps::{Delta, MixtureStrategy};
use crate::tfsdp::DecisionProblem;

#[derive(Debug, Clone, PartialEq)]
pub struct PhiConfig {
    /// Fixed-point iterations per round; the fixed-point term of the regret
    /// is at most `2 / l`.
    pub l: usize,
    pub delta: Delta,
    pub init: FixedPointInit,
    /// Keep every round's `(q, mean, u, W)` for later auditing.
    pub keep_history: bool,
}

impl PhiConfig {
    pub fn new(l: usize, delta: Delta) -> Self {
        PhiConfig { l: l.max(1), delta, init: FixedPointInit::Uniform, keep_history: false }
    }

    /// Splits a target `eps` evenly: `L = ceil(4 / eps)`.
    pub fn for_target(eps: f64, delta: Delta) -> Self {
        Self::new((4.0 / eps).ceil() as usize, delta)
    }

    pub fn warm(mut self) -> Self {
        self.init = FixedPointInit::WarmStart;
        self
    }

    pub fn with_history(mut self) -> Self {
        self.keep_history = true;
        self
    }
}

/// Distinct monomials of a deviation DAG and, per terminal state, which one
/// it uses.
#[derive(Debug, Clone)]
struct MonomialTable {
    monos: Vec<Vec<usize>>,
    of_terminal: Vec<usize>,
}

impl MonomialTable {
    fn new(dev: &DeviationDag) -> Self {
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut monos = Vec::new();
        let of_terminal = (0..dev.dag.num_terminals())
            .map(|t| {
                let m = dev.monomial(t).to_vec();
                *index.entry(m.clone()).or_insert_with(|| {
                    monos.push(m);
                    monos.len() - 1
                })
            })
            .collect();
        MonomialTable { monos, of_terminal }
    }
}

/// What the learner plays in one round.
#[derive(Debug, Clone, PartialEq)]
pub struct Play {
    pub q: ReducedStrategy,
    pub fixed_point: FixedPoint,
    /// `E_pi x`.
    pub mean: Vec<f64>,
    /// `E_pi prod_{z in m} x[z]` per distinct monomial.
    mono_avg: Vec<f64>,
}

/// One recorded round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub q: ReducedStrategy,
    pub mean: Vec<f64>,
    pub u: Vec<f64>,
    pub w: Vec<f64>,
}

/// A full run history.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhiRegretRun {
    pub rounds: Vec<RoundRecord>,
}

/// `(1/T) [max_q sum_t <W_t, q> - sum_t <u_t, mean_t>]`.
pub fn measure_phi_regret(run: &PhiRegretRun, dev: &DeviationDag) -> Result<f64> {
    if run.rounds.is_empty() {
        return Ok(0.0);
    }
    let mut sum_w = vec![0.0; dev.dag.num_terminals()];
    let mut base = 0.0;
    for r in &run.rounds {
        check_len(sum_w.len(), r.w.len())?;
        for (a, b) in sum_w.iter_mut().zip(&r.w) {
            *a += b;
        }
        base += r.u.iter().zip(&r.mean).map(|(a, b)| a * b).sum::<f64>();
    }
    let best = best_reduced_strategy(&dev.dag, &sum_w)?.0;
    Ok((best - base) / run.rounds.len() as f64)
}

/// A Φ-regret minimizer over a deviation DAG: RM+ CFR picks a deviation
/// `q`, and the learner plays an expected fixed point of `phi_q`.
#[derive(Debug, Clone)]
pub struct PhiRegretMinimizer {
    problem: DecisionProblem,
    dev: DeviationDag,
    table: MonomialTable,
    cfr: DagCfr,
    cfg: PhiConfig,
    meter: RegretMeter,
    sum_base: f64,
    warm: Option<Vec<f64>>,
    pending: Option<Play>,
    last: Option<Play>,
    run: PhiRegretRun,
}

impl PhiRegretMinimizer {
    pub fn new(problem: DecisionProblem, dev: DeviationDag, cfg: PhiConfig) -> Result<Self> {
        check_len(problem.n(), dev.n_in())?;
        check_len(problem.n(), dev.n_out())?;
        if let FixedPointInit::Point(x) = &cfg.init {
            if !problem.membership(x)? {
                return Err(Error::NotInPolytope("fixed-point initial point".into()));
            }
        }
        let table = MonomialTable::new(&dev);
        let cfr = DagCfr::new(&dev.dag);
        let meter = RegretMeter::new(dev.dag.num_terminals());
        Ok(PhiRegretMinimizer {
            problem,
            dev,
            table,
            cfr,
            cfg,
            meter,
            sum_base: 0.0,
            warm: None,
            pending: None,
            last: None,
            run: PhiRegretRun::default(),
        })
    }

    pub fn problem(&self) -> &DecisionProblem {
        &self.problem
    }

    pub fn deviations(&self) -> &DeviationDag {
        &self.dev
    }

    pub fn config(&self) -> &PhiConfig {
        &self.cfg
    }

    pub fn rounds(&self) -> usize {
        self.meter.rounds
    }

    pub fn run(&self) -> &PhiRegretRun {
        &self.run
    }

    /// The play of the most recently completed round.
    pub fn last_play(&self) -> Option<&Play> {
        self.last.as_ref()
    }

    fn start_point(&self) -> Vec<f64> {
        match &self.cfg.init {
            FixedPointInit::Uniform => self.problem.uniform_point(),
            FixedPointInit::Point(x) => x.clone(),
            FixedPointInit::WarmStart => {
                self.warm.clone().unwrap_or_else(|| self.problem.uniform_point())
            }
        }
    }

    pub fn next(&mut self) -> Result<&Play> {
        let q = self.cfr.next(&self.dev.dag)?;
        let support: Vec<(usize, f64)> =
            q.values.iter().enumerate().filter(|(_, v)| **v > 0.0).map(|(t, &v)| (t, v)).collect();
        let nm = self.table.monos.len();
        let mut mono_sum = vec![0.0; nm];
        let mut e = vec![0.0; nm];
        let (problem, dev, table) = (&self.problem, &self.dev, &self.table);
        let fixed_point = iterate(problem, self.start_point(), self.cfg.l, self.cfg.delta, |view: &View<'_>| {
            for (i, m) in table.monos.iter().enumerate() {
                e[i] = view.monomial_expectation(problem, m);
                mono_sum[i] += e[i];
            }
            let mut out = vec![0.0; dev.n_out()];
            for &(t, v) in &support {
                out[dev.output(t)] += v * e[table.of_terminal[t]];
            }
            out
        })?;
        let l = fixed_point.l() as f64;
        let mono_avg = mono_sum.into_iter().map(|s| s / l).collect();
        let mean = fixed_point.mean();
        if self.cfg.init == FixedPointInit::WarmStart {
            self.warm = Some(fixed_point.last().to_vec());
        }
        self.pending = Some(Play { q, fixed_point, mean, mono_avg });
        Ok(self.pending.as_ref().unwrap())
    }

    /// Terminal weights `W[t] = u[output(t)] * E_pi[monomial(t)]` for the
    /// pending play.
    pub fn weights(&self, u: &[f64]) -> Result<Vec<f64>> {
        let play = self.pending.as_ref().ok_or_else(|| Error::Invalid("observe before next".into()))?;
        check_len(self.problem.n(), u.len())?;
        Ok((0..self.dev.dag.num_terminals())
            .map(|t| u[self.dev.output(t)] * play.mono_avg[self.table.of_terminal[t]])
            .collect())
    }

    pub fn observe(&mut self, u: &[f64]) -> Result<()> {
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("utility".into()));
        }
        let w = self.weights(u)?;
        let play = self.pending.take().unwrap();
        self.cfr.observe(&self.dev.dag, &w)?;
        self.meter.record(&w, &play.q);
        self.sum_base += u.iter().zip(&play.mean).map(|(a, b)| a * b).sum::<f64>();
        if self.cfg.keep_history {
            self.run.rounds.push(RoundRecord {
                q: play.q.clone(),
                mean: play.mean.clone(),
                u: u.to_vec(),
                w,
            });
        }
        self.last = Some(play);
        Ok(())
    }

    /// Time-averaged Φ-regret so far.
    pub fn phi_regret(&self) -> Result<f64> {
        if self.meter.rounds == 0 {
            return Ok(0.0);
        }
        Ok((self.meter.best_total(&self.dev.dag)? - self.sum_base) / self.meter.rounds as f64)
    }

    /// Time-averaged external regret of the inner CFR learner.
    pub fn external_regret(&self) -> Result<f64> {
        self.meter.average_regret(&self.dev.dag)
    }

    /// Bound on the fixed-point term.
    pub fn fp_error_bound(&self) -> f64 {
        2.0 / self.cfg.l as f64
    }

    /// Both regrets and the bound in one pass.
    pub fn checkpoint(&self) -> Result<Checkpoint> {
        let t = self.meter.rounds;
        if t == 0 {
            return Ok(Checkpoint { round: 0, phi_regret: 0.0, external_regret: 0.0, fp_error_bound: self.fp_error_bound() });
        }
        let best = self.meter.best_total(&self.dev.dag)?;
        Ok(Checkpoint {
            round: t,
            phi_regret: (best - self.sum_base) / t as f64,
            external_regret: (best - self.meter.sum_played) / t as f64,
            fp_error_bound: self.fp_error_bound(),
        })
    }

    /// The mixture of the pending play.
    pub fn pending_mixture(&self) -> Result<MixtureStrategy> {
        let play = self.pending.as_ref().ok_or_else(|| Error::Invalid("no pending play".into()))?;
        play.fixed_point.mixture(&self.problem)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checkpoint {
    pub round: usize,
    pub phi_regret: f64,
    pub external_regret: f64,
    pub fp_error_bound: f64,
}

impl Checkpoint {
    pub const CSV_HEADER: &'static str = "round,phi_regret,external_regret,fp_error_bound";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.16e},{:.16e},{:.16e}",
            self.round, self.phi_regret, self.external_regret, self.fp_error_bound
        )
    }

    /// Φ-regret is at most external regret plus the fixed-point term.
    pub fn bound_holds(&self, slack: f64) -> bool {
        self.phi_regret <= self.external_regret + self.fp_error_bound + slack
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deviations::{interleave, DeviationDag};
    use crate::tfsdp::tests::fig1;

    #[test]
    fn first_round_is_uniform() {
        let p = fig1();
        let dev = interleave(&p, 1).unwrap().dev;
        let mut m = PhiRegretMinimizer::new(p.clone(), dev, PhiConfig::new(10, Delta::Beta)).unwrap();
        let play = m.next().unwrap();
        assert_eq!(play.fixed_point.l(), 10);
        assert!(p.membership(&play.mean).unwrap());
    }

    #[test]
    fn zero_utility_is_a_no_op() {
        let p = fig1();
        let dev = interleave(&p, 1).unwrap().dev;
        let mut m = PhiRegretMinimizer::new(p, dev, PhiConfig::new(5, Delta::Beta)).unwrap();
        let q0 = m.next().unwrap().q.clone();
        m.observe(&[0.0; 5]).unwrap();
        assert_eq!(m.next().unwrap().q, q0);
        m.observe(&[0.0; 5]).unwrap();
        assert_eq!(m.phi_regret().unwrap(), 0.0);
    }

    #[test]
    fn external_deviations_reach_their_target_in_one_step() {
        let p = fig1();
        let dev = DeviationDag::constant_maps(&p);
        let mut m = PhiRegretMinimizer::new(p, dev, PhiConfig::new(6, Delta::Beta)).unwrap();
        let play = m.next().unwrap();
        let its = &play.fixed_point.iterates;
        for x in &its[2..] {
            assert_eq!(x, &its[1]);
        }
    }

    #[test]
    fn replay_is_deterministic() {
        let run = || {
            let p = fig1();
            let dev = interleave(&p, 1).unwrap().dev;
            let mut m = PhiRegretMinimizer::new(p, dev, PhiConfig::new(8, Delta::Caratheodory)).unwrap();
            let mut means = Vec::new();
            for t in 0..20 {
                means.push(m.next().unwrap().mean.clone());
                let u: Vec<f64> = (0..5).map(|z| (((t * 7 + z * 3) % 5) as f64 - 2.0) / 4.0).collect();
                m.observe(&u).unwrap();
            }
            means
        };
        assert_eq!(run(), run());
    }
}
