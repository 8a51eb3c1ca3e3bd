#![allow(dead_code)]

use phireg::deviations::{Dag, DeviationDag, ReducedStrategy, StateKind};
use phireg::game_lab::NormalFormGame;
use phireg::lp::{minimize, LpOutcome};
use phireg::poly::{Multilinear, PolynomialDeviation};
use phireg::tfsdp::ProblemBuilder;
use phireg::{DecisionProblem, NodeKind, TreeStrategy};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const FIG1: &str = include_str!("../../data/fig1.tfsdp");

pub fn fig1() -> DecisionProblem {
    DecisionProblem::parse(FIG1).unwrap()
}

/// `(x1 + x3, x2 x4, x2 x5, x2, 0)` on the fig1 problem.
pub fn fig1_phi() -> PolynomialDeviation {
    let v = Multilinear::var;
    PolynomialDeviation::from_outputs(5, &[v(0).add(&v(2)), v(1).mul(&v(3)), v(1).mul(&v(4)), v(1), Multilinear::zero()])
        .unwrap()
}

/// A random alternating problem: decision points with 2..=3 actions, each
/// action leading to a terminal or an observation with 1..=2 follow-up
/// decision points.
pub fn random_problem(rng: &mut ChaCha8Rng, max_pure: u128) -> DecisionProblem {
    loop {
        let mut b = ProblemBuilder::new("rand");
        let mut count = 0usize;
        grow(rng, &mut b, None, 0, &mut count);
        let p = b.build().unwrap();
        let c = p.count_pure_strategies();
        if (2..=max_pure).contains(&c) {
            return p;
        }
    }
}

fn fresh(prefix: &str, count: &mut usize) -> String {
    *count += 1;
    format!("{prefix}{count}")
}

fn grow(rng: &mut ChaCha8Rng, b: &mut ProblemBuilder, parent: Option<usize>, depth: usize, count: &mut usize) {
    let d = b.add(fresh("d", count), NodeKind::Decision, parent, "-");
    for a in 0..rng.gen_range(2..=3) {
        if depth >= 2 || rng.gen_bool(0.5) {
            b.add(fresh("z", count), NodeKind::Terminal, Some(d), a.to_string());
        } else {
            let o = b.add(fresh("o", count), NodeKind::Observation, Some(d), a.to_string());
            for _ in 0..rng.gen_range(1..=2) {
                grow(rng, b, Some(o), depth + 1, count);
            }
        }
    }
}

/// A random point of the polytope, drawn as a random behavioral strategy.
pub fn random_point(rng: &mut ChaCha8Rng, p: &DecisionProblem) -> Vec<f64> {
    let mut mass = vec![0.0; p.nodes().len()];
    mass[0] = 1.0;
    let mut x = vec![0.0; p.n()];
    for s in 0..p.nodes().len() {
        let n = p.node(s);
        match n.kind {
            NodeKind::Terminal => x[p.terminal_slot(s).unwrap()] = mass[s],
            NodeKind::Observation => n.children.iter().for_each(|&c| mass[c] = mass[s]),
            NodeKind::Decision => {
                // Occasionally put all mass on one action to hit boundary cases.
                let w: Vec<f64> = if rng.gen_bool(0.2) {
                    let k = rng.gen_range(0..n.children.len());
                    (0..n.children.len()).map(|i| (i == k) as u8 as f64).collect()
                } else {
                    (0..n.children.len()).map(|_| rng.gen_range(0.0..1.0)).collect()
                };
                let tot: f64 = w.iter().sum();
                for (&c, wi) in n.children.iter().zip(&w) {
                    mass[c] = mass[s] * wi / tot;
                }
            }
        }
    }
    x
}

/// Brute-force oracle for `E_{x' ~ beta(x)} prod_{z in s} x'[z]`: every
/// decision point picks independently, and each joint assignment is mapped
/// to the pure strategy it induces.
pub fn beta_monomial_by_enumeration(p: &DecisionProblem, x: &[f64], s: &[usize]) -> f64 {
    let values = p.node_values(x);
    let decisions: Vec<usize> = (0..p.nodes().len()).filter(|&i| p.node(i).kind == NodeKind::Decision).collect();
    let mut choice = vec![0usize; p.nodes().len()];
    let mut total = 0.0;
    fn rec(
        p: &DecisionProblem,
        values: &[f64],
        decisions: &[usize],
        k: usize,
        prob: f64,
        choice: &mut Vec<usize>,
        s: &[usize],
        total: &mut f64,
    ) {
        if prob == 0.0 {
            return;
        }
        if k == decisions.len() {
            let pure = p.follow(choice);
            if s.iter().all(|&z| pure.get(z)) {
                *total += prob;
            }
            return;
        }
        let j = decisions[k];
        let kids = &p.node(j).children;
        for (a, &c) in kids.iter().enumerate() {
            let pa = if values[j] > 0.0 { values[c] / values[j] } else { 1.0 / kids.len() as f64 };
            choice[j] = a;
            rec(p, values, decisions, k + 1, prob * pa, choice, s, total);
        }
    }
    rec(p, &values, &decisions, 0, 1.0, &mut choice, s, &mut total);
    total
}

/// The induced norm through its primal LP, `max <u, v>` subject to
/// `-1 <= <u, x> <= 1` for every pure `x`.
pub fn x_norm_primal(v: &[f64], pure: &[TreeStrategy]) -> f64 {
    let n = v.len();
    let k = pure.len();
    // Variables: u+ (n), u- (n), slack-high (k), slack-low (k).
    let cols = 2 * n + 2 * k;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (p, x) in pure.iter().enumerate() {
        for sign in [1.0, -1.0] {
            let mut row = vec![0.0; cols];
            for z in 0..n {
                if x.get(z) {
                    row[z] = sign;
                    row[n + z] = -sign;
                }
            }
            row[2 * n + if sign > 0.0 { p } else { k + p }] = 1.0;
            a.push(row);
            b.push(1.0);
        }
    }
    let mut c = vec![0.0; cols];
    for z in 0..n {
        c[z] = -v[z];
        c[n + z] = v[z];
    }
    match minimize(&c, &a, &b) {
        LpOutcome::Optimal { value, .. } => -value,
        LpOutcome::Unbounded => f64::INFINITY,
        LpOutcome::Infeasible => panic!("u = 0 is always feasible"),
    }
}

/// A random mixed reduced strategy: independent random local
/// distributions at every decision state.
pub fn random_reduced_strategy(rng: &mut ChaCha8Rng, dag: &Dag) -> ReducedStrategy {
    let local: Vec<Vec<f64>> = (0..dag.num_states())
        .map(|s| {
            let k = dag.children(s).len();
            if dag.kind(s) != StateKind::Decision || k == 0 {
                return Vec::new();
            }
            if rng.gen_bool(0.5) {
                let pick = rng.gen_range(0..k);
                return (0..k).map(|i| (i == pick) as u8 as f64).collect();
            }
            let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..1.0)).collect();
            let t: f64 = w.iter().sum();
            w.into_iter().map(|v| v / t).collect()
        })
        .collect();
    ReducedStrategy::from_local(dag, |s| &local[s])
}

/// `phi_q(x)[z] = sum_t q[t] [output(t) = z] prod_{i in monomial(t)} x[i]`,
/// written out directly from the terminal table.
pub fn eval_by_terminals(dev: &DeviationDag, q: &ReducedStrategy, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; dev.n_out()];
    for t in 0..dev.dag.num_terminals() {
        let m: f64 = dev.monomial(t).iter().map(|&i| x[i]).product();
        y[dev.output(t)] += q.values[t] * m;
    }
    y
}

/// Random normal-form game with `n` players and `2..=max_a` actions each.
pub fn random_game(rng: &mut ChaCha8Rng, n: usize, max_a: usize) -> NormalFormGame {
    let actions: Vec<usize> = (0..n).map(|_| rng.gen_range(2..=max_a)).collect();
    NormalFormGame::dense(actions, |_| (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect()).unwrap()
}

/// Random utility vector normalized so that every pure strategy earns a
/// value in `[-1, 1]`.
pub fn random_utility(rng: &mut ChaCha8Rng, p: &DecisionProblem) -> Vec<f64> {
    let raw: Vec<f64> = (0..p.n()).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    p.normalize_utility(&raw).unwrap().payoffs
}

pub fn bits_of(v: usize, n: usize) -> Vec<u8> {
    (0..n).map(|j| ((v >> j) & 1) as u8).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
