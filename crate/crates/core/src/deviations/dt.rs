use super::dag::{Dag, DeviationDag, ReducedStrategy, StateKind};
use crate::error::{check_len, Error, Result};
use crate::tfsdp::DecisionProblem;

/// Default cap on the number of states of a generated deviation DAG.
pub const DEFAULT_STATE_CAP: u128 = 2_000_000;

/// The depth-`k` decision-tree deviation problem over `{0,1}^N`.
///
/// The deviator observes which output bit `j0` it must produce, then makes
/// `k` adaptive queries `j_i` to the input (observing each reply `a_i`), and
/// finally picks the output `a0`. Inputs and outputs use the cube-as-tree
/// encoding of [`DecisionProblem::hypercube`]: literal `(j, a)` is terminal
/// `2j + a`.
#[derive(Debug, Clone)]
pub struct DtProblem {
    pub n_bits: usize,
    pub k: usize,
    pub distinct: bool,
    pub dev: DeviationDag,
    /// Per terminal state: `(j0, [(j_i, a_i)], a0)`.
    pub tuples: Vec<(usize, Vec<(usize, u8)>, u8)>,
}

struct Gen {
    n: usize,
    k: usize,
    distinct: bool,
    kinds: Vec<StateKind>,
    children: Vec<Vec<usize>>,
    names: Vec<String>,
    tuples: Vec<(usize, Vec<(usize, u8)>, u8)>,
}

impl Gen {
    fn push(&mut self, kind: StateKind, name: String) -> usize {
        self.kinds.push(kind);
        self.children.push(Vec::new());
        self.names.push(name);
        self.kinds.len() - 1
    }

    fn name(j0: usize, hist: &[(usize, u8)]) -> String {
        let mut s = format!("j{j0}");
        for (j, a) in hist {
            s.push_str(&format!(".{j}={a}"));
        }
        s
    }

    /// Decision state after observing `j0` and the replies in `hist`.
    fn decide(&mut self, j0: usize, hist: &mut Vec<(usize, u8)>) -> usize {
        let me = self.push(StateKind::Decision, Self::name(j0, hist));
        let queries: Vec<usize> = if hist.len() == self.k {
            Vec::new()
        } else if self.distinct {
            (0..self.n).filter(|j| !hist.iter().any(|(q, _)| q == j)).collect()
        } else {
            (0..self.n).collect()
        };
        if queries.is_empty() {
            for a0 in 0..2u8 {
                let t = self.push(StateKind::Terminal, format!("{}->{a0}", Self::name(j0, hist)));
                self.children[me].push(t);
                self.tuples.push((j0, hist.clone(), a0));
            }
            return me;
        }
        for j in queries {
            let o = self.push(StateKind::Observation, format!("{}?{j}", Self::name(j0, hist)));
            self.children[me].push(o);
            for a in 0..2u8 {
                hist.push((j, a));
                let d = self.decide(j0, hist);
                hist.pop();
                self.children[o].push(d);
            }
        }
        me
    }
}

/// Number of terminal states of the unconstrained problem.
pub fn dt_terminal_count(n: usize, k: usize) -> u128 {
    (n as u128).saturating_pow(k as u32 + 1).saturating_mul(1u128 << (k + 1).min(100))
}

pub fn build_dt_problem(n: usize, k: usize, distinct: bool) -> Result<DtProblem> {
    build_dt_problem_capped(n, k, distinct, DEFAULT_STATE_CAP)
}

pub fn build_dt_problem_capped(n: usize, k: usize, distinct: bool, cap: u128) -> Result<DtProblem> {
    if n == 0 {
        return Err(Error::Invalid("decision-tree deviations need at least one bit".into()));
    }
    let size = dt_terminal_count(n, k);
    if size > cap {
        return Err(Error::CapExceeded { what: "decision-tree deviation problem", size, cap });
    }
    let mut g = Gen {
        n,
        k,
        distinct,
        kinds: Vec::new(),
        children: Vec::new(),
        names: Vec::new(),
        tuples: Vec::new(),
    };
    let root = g.push(StateKind::Observation, "root".into());
    for j0 in 0..n {
        let d = g.decide(j0, &mut Vec::new());
        g.children[root].push(d);
    }
    let Gen { kinds, children, names, tuples, .. } = g;
    let dag = Dag::new(kinds, children, names)?;
    // Terminal states were created in the same order as their tuples.
    let outputs = tuples.iter().map(|(j0, _, a0)| 2 * j0 + *a0 as usize).collect();
    let monomials = tuples
        .iter()
        .map(|(_, h, _)| h.iter().map(|&(j, a)| 2 * j + a as usize).collect())
        .collect();
    let dev = DeviationDag::new(dag, 2 * n, 2 * n, outputs, monomials)?;
    Ok(DtProblem { n_bits: n, k, distinct, dev, tuples })
}

/// Tree-form point of a bit vector on the cube-as-tree.
pub fn cube_point(bits: &[u8]) -> Vec<f64> {
    bits.iter().flat_map(|&b| if b == 1 { [0.0, 1.0] } else { [1.0, 0.0] }).collect()
}

impl DtProblem {
    /// The matching decision problem `{0,1}^N` as a tree.
    pub fn cube(&self) -> DecisionProblem {
        DecisionProblem::hypercube(self.n_bits).expect("n_bits >= 1")
    }

    /// `phi_q(x)` for a bit vector `x`, as a vector in `[0,1]^N` giving the
    /// probability that each output bit is 1.
    pub fn eval_bits(&self, q: &ReducedStrategy, bits: &[u8]) -> Result<Vec<f64>> {
        check_len(self.n_bits, bits.len())?;
        let y = self.dev.eval(q, &cube_point(bits))?;
        Ok((0..self.n_bits).map(|j| y[2 * j + 1]).collect())
    }

    /// A pure deviation given by a rule `(j0, history) -> Query(j) | Output(a0)`.
    pub fn pure_rule(&self, rule: impl Fn(usize, &[(usize, u8)]) -> DtMove) -> Result<ReducedStrategy> {
        let dag = &self.dev.dag;
        let mut choice = vec![0usize; dag.num_states()];
        // Recover (j0, history) for each decision state from its name.
        for s in 0..dag.num_states() {
            if dag.kind(s) != StateKind::Decision {
                continue;
            }
            let (j0, hist) = parse_name(dag.name(s));
            let mv = rule(j0, &hist);
            let pos = dag.children(s).iter().position(|&c| match (mv, dag.kind(c)) {
                (DtMove::Output(a0), StateKind::Terminal) => {
                    self.tuples[dag.terminal_index(c).unwrap()].2 == a0
                }
                (DtMove::Query(j), StateKind::Observation) => dag.name(c).ends_with(&format!("?{j}")),
                _ => false,
            });
            // An early output is padded with a query to the first index; the
            // rule is asked again one level deeper.
            let pos = match (pos, mv) {
                (None, DtMove::Output(_)) if dag.kind(dag.children(s)[0]) == StateKind::Observation => Some(0),
                _ => pos,
            };
            choice[s] = pos.ok_or_else(|| {
                Error::InvalidDeviation(format!("move {mv:?} unavailable at {}", dag.name(s)))
            })?;
        }
        Ok(ReducedStrategy::from_choices(dag, &choice))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DtMove {
    Query(usize),
    Output(u8),
}

fn parse_name(name: &str) -> (usize, Vec<(usize, u8)>) {
    let mut parts = name.split('.');
    let j0 = parts.next().unwrap()[1..].parse().unwrap();
    let hist = parts
        .map(|p| {
            let (j, a) = p.split_once('=').unwrap();
            (j.parse().unwrap(), a.parse().unwrap())
        })
        .collect();
    (j0, hist)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(build_dt_problem(5, 1, false).unwrap().dev.dag.num_terminals(), 100);
        assert_eq!(build_dt_problem(5, 0, false).unwrap().dev.dag.num_terminals(), 10);
        assert_eq!(build_dt_problem(3, 2, false).unwrap().dev.dag.num_terminals(), 3 * 9 * 8);
        // distinct queries: 3 * (3 * 2 * 2 * 2) * 2 terminals for k = 2
        assert_eq!(build_dt_problem(3, 2, true).unwrap().dev.dag.num_terminals(), 3 * 24 * 2);
        assert!(matches!(
            build_dt_problem_capped(10, 5, false, 1000),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn simple_rules() {
        let p = build_dt_problem(3, 1, false).unwrap();
        let id = p.pure_rule(|j0, h| if h.is_empty() { DtMove::Query(j0) } else { DtMove::Output(h[0].1) }).unwrap();
        let ones = p.pure_rule(|_, _| DtMove::Output(1)).unwrap();
        let flip = p
            .pure_rule(|j0, h| if h.is_empty() { DtMove::Query(j0) } else { DtMove::Output(1 - h[0].1) })
            .unwrap();
        for v in 0..8u8 {
            let bits: Vec<u8> = (0..3).map(|j| (v >> j) & 1).collect();
            let as_f: Vec<f64> = bits.iter().map(|&b| b as f64).collect();
            assert_eq!(p.eval_bits(&id, &bits).unwrap(), as_f);
            assert_eq!(p.eval_bits(&ones, &bits).unwrap(), vec![1.0; 3]);
            let flipped: Vec<f64> = as_f.iter().map(|b| 1.0 - b).collect();
            assert_eq!(p.eval_bits(&flip, &bits).unwrap(), flipped);
        }
        assert_eq!(p.eval_bits(&flip, &[1, 0, 1]).unwrap(), vec![0.0, 1.0, 0.0]);
    }
}
