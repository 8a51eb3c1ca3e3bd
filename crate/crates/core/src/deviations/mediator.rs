use std::collections::HashMap;

use super::dag::{Dag, DeviationDag, ReducedStrategy, StateKind};
use super::dt::DEFAULT_STATE_CAP;
use crate::error::{Error, Result};
use crate::tfsdp::{DecisionProblem, NodeKind};

/// The interleaving of `X` with `k` copies of its dual.
///
/// A state is a tuple `(s, s_1, ..., s_k)` of nodes of the same tree; the
/// first component is read in `X`, the others in the dual (decision and
/// observation points swapped). A state is terminal when every component is;
/// an observation state when some component sits at an observation point
/// (all such components advance together); otherwise the player chooses one
/// decision component and one of its children.
#[derive(Debug, Clone)]
pub struct MediatorDag {
    pub k: usize,
    pub dev: DeviationDag,
    pub states: Vec<Vec<usize>>,
}

fn component_kind(p: &DecisionProblem, comp: usize, s: usize) -> NodeKind {
    let k = p.node(s).kind;
    if comp == 0 {
        k
    } else {
        k.dual()
    }
}

/// Successor tuples of a state and the state's kind.
fn expand(p: &DecisionProblem, st: &[usize]) -> (StateKind, Vec<Vec<usize>>) {
    let kinds: Vec<NodeKind> = st.iter().enumerate().map(|(c, &s)| component_kind(p, c, s)).collect();
    if kinds.iter().all(|&k| k == NodeKind::Terminal) {
        return (StateKind::Terminal, Vec::new());
    }
    if kinds.contains(&NodeKind::Observation) {
        let mut succ = vec![st.to_vec()];
        for (c, &k) in kinds.iter().enumerate() {
            if k != NodeKind::Observation {
                continue;
            }
            let mut next = Vec::new();
            for t in &succ {
                for &ch in &p.node(st[c]).children {
                    let mut u = t.clone();
                    u[c] = ch;
                    next.push(u);
                }
            }
            succ = next;
        }
        return (StateKind::Observation, succ);
    }
    let mut succ = Vec::new();
    for (c, &k) in kinds.iter().enumerate() {
        if k == NodeKind::Decision {
            for &ch in &p.node(st[c]).children {
                let mut u = st.to_vec();
                u[c] = ch;
                succ.push(u);
            }
        }
    }
    (StateKind::Decision, succ)
}

pub fn interleave(p: &DecisionProblem, k: usize) -> Result<MediatorDag> {
    interleave_capped(p, k, DEFAULT_STATE_CAP)
}

pub fn interleave_capped(p: &DecisionProblem, k: usize, cap: u128) -> Result<MediatorDag> {
    let estimate = (p.nodes().len() as u128).saturating_pow(k as u32 + 1);
    if estimate > cap {
        return Err(Error::CapExceeded { what: "mediator interleaving", size: estimate, cap });
    }
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut states = vec![vec![p.root(); k + 1]];
    index.insert(states[0].clone(), 0);
    let mut kinds = Vec::new();
    let mut children: Vec<Vec<usize>> = Vec::new();
    let mut head = 0;
    while head < states.len() {
        let (kind, succ) = expand(p, &states[head]);
        let mut ch = Vec::with_capacity(succ.len());
        for t in succ {
            let id = *index.entry(t.clone()).or_insert_with(|| {
                states.push(t);
                states.len() - 1
            });
            ch.push(id);
        }
        kinds.push(kind);
        children.push(ch);
        head += 1;
    }
    let names = states
        .iter()
        .map(|t| t.iter().map(|&s| p.node(s).id.as_str()).collect::<Vec<_>>().join(","))
        .collect();
    let dag = Dag::new(kinds, children, names)?;
    let mut outputs = Vec::with_capacity(dag.num_terminals());
    let mut monomials = Vec::with_capacity(dag.num_terminals());
    for t in 0..dag.num_terminals() {
        let st = &states[dag.terminal_state(t)];
        let slot = |s: usize| p.terminal_slot(s).expect("terminal component");
        outputs.push(slot(st[0]));
        monomials.push(st[1..].iter().map(|&s| slot(s)).collect());
    }
    let dev = DeviationDag::new(dag, p.n(), p.n(), outputs, monomials)?;
    Ok(MediatorDag { k, dev, states })
}

/// One move at a decision state: component index and the child node.
pub type Move = (usize, usize);

impl MediatorDag {
    /// The moves available at decision state `s`, in edge order.
    pub fn moves(&self, p: &DecisionProblem, s: usize) -> Vec<Move> {
        let st = &self.states[s];
        self.dev
            .dag
            .children(s)
            .iter()
            .map(|&c| {
                let t = &self.states[c];
                let comp = (0..st.len()).find(|&i| st[i] != t[i]).unwrap();
                debug_assert!(p.node(st[comp]).children.contains(&t[comp]));
                (comp, t[comp])
            })
            .collect()
    }

    /// The pure reduced strategy following `rule(state, moves) -> move index`.
    pub fn pure_policy(
        &self,
        p: &DecisionProblem,
        rule: impl Fn(&[usize], &[Move]) -> Option<usize>,
    ) -> Result<ReducedStrategy> {
        let dag = &self.dev.dag;
        let mut choice = vec![0usize; dag.num_states()];
        for s in 0..dag.num_states() {
            if dag.kind(s) == StateKind::Decision {
                let mv = self.moves(p, s);
                choice[s] = rule(&self.states[s], &mv).ok_or_else(|| {
                    Error::InvalidDeviation(format!("no move chosen at state {}", dag.name(s)))
                })?;
                if choice[s] >= mv.len() {
                    return Err(Error::InvalidDeviation("move index out of range".into()));
                }
            }
        }
        Ok(ReducedStrategy::from_choices(dag, &choice))
    }

    /// With one mediator: walk the mediator down to the current node of `X`,
    /// read its recommendation, and play it. The induced map is the identity.
    pub fn follow_mediator(&self, p: &DecisionProblem) -> Result<ReducedStrategy> {
        if self.k != 1 {
            return Err(Error::Invalid("follow_mediator needs exactly one mediator".into()));
        }
        self.pure_policy(p, |st, moves| {
            let (s, m) = (st[0], st[1]);
            if is_strict_ancestor(p, m, s) {
                let target = child_toward(p, m, s);
                return moves.iter().position(|&mv| mv == (1, target));
            }
            if p.node(m).parent == Some(s) {
                return moves.iter().position(|&mv| mv == (0, m));
            }
            Some(0)
        })
    }
}

pub fn is_strict_ancestor(p: &DecisionProblem, a: usize, mut b: usize) -> bool {
    while let Some(q) = p.node(b).parent {
        if q == a {
            return true;
        }
        b = q;
    }
    false
}

/// The child of `a` on the path down to its descendant `b`.
pub fn child_toward(p: &DecisionProblem, a: usize, mut b: usize) -> usize {
    while let Some(q) = p.node(b).parent {
        if q == a {
            return b;
        }
        b = q;
    }
    panic!("not a descendant")
}
