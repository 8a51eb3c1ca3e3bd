//! One line per acceptance criterion. Run with `cargo test --test acceptance`.
//! Set `PHIREG_SKIP_SLOW=1` to skip the quadratic feasibility LP.

mod common;

use std::time::{Duration, Instant};

use common::*;
use phireg::deviations::{
    build_dt_problem, extend_identity, interleave, DeviationSpec, Move,
};
use phireg::game_lab::*;
use phireg::phi::{
    expected_fixed_point, mixture_error, FixedPointConfig, PhiConfig, PhiRegretMinimizer,
};
use phireg::poly::PolynomialDeviation;
use phireg::strategy_maps::{extended_map_eval, monomial_expectation_beta, Delta};
use phireg::tfsdp::{binarize, x_norm_with};
use phireg::{DecisionProblem, TreeStrategy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ZERO_SUM: &str = include_str!("../data/zero_sum.efg");
const FIG1_VS_COIN: &str = include_str!("../data/fig1_vs_coin.efg");
const FIG1_DUEL: &str = include_str!("../data/fig1_duel.efg");

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn main() {
    let skip_slow = std::env::var("PHIREG_SKIP_SLOW").is_ok_and(|v| v == "1");
    let criteria: Vec<(&str, Option<Duration>, fn() -> Outcome)> = vec![
        ("1 expected fixed point: ||E[phi(x) - x]||_X <= 2/L + 1e-9, telescoping to 1e-9", Some(Duration::from_secs(30)), c1_fixed_point),
        ("2 composite bound: phi-regret <= external + 2/L + 1e-6 at every checkpoint", None, c2_composite),
        ("3 fast CE: swap gap <= 0.05, Reg(4T) <= 0.55 Reg(T) at T = 2000", Some(Duration::from_secs(60)), c3_ce),
        ("4 separation: depth-k gap 1 +- 1e-9, depth-(k-1) gap <= 1e-9 (k = 2, 3)", Some(Duration::from_secs(10)), c4_separation),
        ("5 extended maps: naive evaluation leaves X, beta and gamma stay in X", None, c5_extended),
        ("6 behavioral monomials match enumeration within 1e-12", None, c6_beta),
        ("7 mediators: duality, follow-the-mediator, two-mediator map, regret decay <= 0.6", None, c7_mediator),
        ("8 identity extension on binarized problems: degree <= depth, exact on X", None, c8_extension),
        ("9 gate gadget: |out - min(1, t1 + t2)| <= eps on a 100x100 grid", None, c9_gadget),
        ("10 quadratic non-representability LP is infeasible (slow)", Some(Duration::from_secs(600)), c10_quadratic),
    ];
    let mut failed = 0;
    for (name, limit, f) in criteria {
        if skip_slow && name.starts_with("10 ") {
            println!("SKIP {name}");
            continue;
        }
        let t0 = Instant::now();
        let mut o = f();
        let took = t0.elapsed();
        if let Some(limit) = limit {
            if took > limit {
                o.pass = false;
                o.detail.push_str(&format!("; over the {limit:?} budget"));
            }
        }
        println!("{} {name} [{:.2?}] {}", if o.pass { "PASS" } else { "FAIL" }, took, o.detail);
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

/// Random degree-2 deviations of fig1 (two mediators) and of cubes
/// (depth-2 decision trees), plus the fig1 counterexample map.
fn random_deviations(rng: &mut ChaCha8Rng) -> Vec<(DecisionProblem, PolynomialDeviation)> {
    let mut out = Vec::new();
    let p = fig1();
    let med = interleave(&p, 2).unwrap();
    out.push((p.clone(), fig1_phi()));
    while out.len() < 50 {
        let q = random_reduced_strategy(rng, &med.dev.dag);
        let phi = med.dev.to_polynomial(&q).unwrap();
        phi.validate(&p, &p).unwrap();
        out.push((p.clone(), phi));
    }
    for n in 2..=6 {
        let dt = build_dt_problem(n, 2, false).unwrap();
        let cube = dt.cube();
        for _ in 0..10 {
            let q = random_reduced_strategy(rng, &dt.dev.dag);
            let phi = dt.dev.to_polynomial(&q).unwrap();
            phi.validate(&cube, &cube).unwrap();
            out.push((cube.clone(), phi));
        }
    }
    out
}

fn c1_fixed_point() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let devs = random_deviations(&mut rng);
    let (mut worst_slack, mut worst_tel) = (f64::NEG_INFINITY, 0.0f64);
    let mut checked = 0;
    let mut pure_cache: Vec<(String, usize, Vec<TreeStrategy>)> = Vec::new();
    for (i, (p, phi)) in devs.iter().enumerate() {
        assert!(phi.degree() <= 2);
        let key = (p.name().to_string(), p.n());
        if !pure_cache.iter().any(|(n, k, _)| (n, *k) == (&key.0, key.1)) {
            pure_cache.push((key.0.clone(), key.1, p.enumerate_pure_strategies().unwrap()));
        }
        let pure = &pure_cache.iter().find(|(n, k, _)| (n, *k) == (&key.0, key.1)).unwrap().2;
        let delta = if i % 2 == 0 { Delta::Beta } else { Delta::Caratheodory };
        for l in [10, 50, 200] {
            let fp = expected_fixed_point(p, phi, &FixedPointConfig::new(l, delta)).unwrap();
            let pi = fp.mixture(p).unwrap();
            let direct = mixture_error(p, phi, &pi);
            worst_tel = worst_tel.max(max_abs_diff(&direct, &fp.error()));
            let norm = x_norm_with(&direct, pure);
            worst_slack = worst_slack.max(norm - 2.0 / l as f64);
            checked += 1;
        }
    }
    outcome(
        worst_slack <= 1e-9 && worst_tel <= 1e-9,
        format!("{checked} runs; max(norm - 2/L) = {worst_slack:.3e}; telescoping error {worst_tel:.3e}"),
    )
}

fn c2_composite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = f64::NEG_INFINITY;
    let mut checks = 0;
    let mut check = |c: &phireg::phi::Checkpoint| {
        worst = worst.max(c.phi_regret - c.external_regret - c.fp_error_bound);
        checks += 1;
    };
    // Adversarial runs: random utilities and an adaptive adversary that
    // pays against the learner's current mean.
    let cube = DecisionProblem::hypercube(3).unwrap();
    let setups: Vec<(DecisionProblem, DeviationSpec)> = vec![
        (fig1(), DeviationSpec::External),
        (fig1(), DeviationSpec::Mediator(1)),
        (fig1(), DeviationSpec::Mediator(2)),
        (cube.clone(), DeviationSpec::DecisionTree(1)),
        (cube, DeviationSpec::DecisionTree(2)),
        (random_problem(&mut rng, 64), DeviationSpec::Mediator(1)),
    ];
    for (p, spec) in &setups {
        for delta in [Delta::Beta, Delta::Caratheodory] {
            for adaptive in [false, true] {
                let dev = spec.build(p).unwrap();
                let mut m = PhiRegretMinimizer::new(p.clone(), dev, PhiConfig::new(10, delta)).unwrap();
                for t in 1..=300 {
                    let mean = m.next().unwrap().mean.clone();
                    let u = if adaptive {
                        let raw: Vec<f64> = mean.iter().map(|v| 0.5 - v).collect();
                        p.normalize_utility(&raw).unwrap().payoffs
                    } else {
                        random_utility(&mut rng, p)
                    };
                    m.observe(&u).unwrap();
                    if t % 25 == 0 {
                        check(&m.checkpoint().unwrap());
                    }
                }
            }
        }
    }
    // Self-play runs.
    for (text, devs) in [
        (ZERO_SUM, [DeviationSpec::External, DeviationSpec::External]),
        (FIG1_VS_COIN, [DeviationSpec::Mediator(1), DeviationSpec::Mediator(1)]),
        (FIG1_VS_COIN, [DeviationSpec::Mediator(2), DeviationSpec::External]),
    ] {
        let g = EFGame::parse(text).unwrap();
        for delta in [Delta::Beta, Delta::Caratheodory] {
            let cfg = SelfPlayConfig {
                devs,
                phi: PhiConfig::new(8, delta),
                rounds: 400,
                checkpoints: (1..=16).map(|i| i * 25).collect(),
                keep_profile: false,
            };
            let run = efg_self_play(&g, &cfg).unwrap();
            run.curves.iter().flatten().for_each(&mut check);
        }
    }
    outcome(worst <= 1e-6, format!("{checks} checkpoints; max(phi - ext - 2/L) = {worst:.3e}"))
}

fn c3_ce() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let games: Vec<NormalFormGame> = (0..10).map(|i| random_game(&mut rng, 2 + i % 2, 5)).collect();
    let mut worst_gap: f64 = 0.0;
    for g in &games {
        let run = run_ce(g, 0.05).unwrap();
        let gap = swap_gap(&run.profile, g).unwrap();
        worst_gap = gap.iter().copied().fold(worst_gap, f64::max);
    }
    let (t, l) = (2000, 80);
    let mean_regret = |g: &NormalFormGame, horizon: usize| {
        let run = run_ce_with(g, CeConfig { horizon, l, cold: false }, &[], false).unwrap();
        run.swap_regret.iter().sum::<f64>() / run.swap_regret.len() as f64
    };
    let (mut sum_t, mut sum_4t, mut worst_ratio) = (0.0, 0.0, 0.0f64);
    for g in &games {
        let (a, b) = (mean_regret(g, t), mean_regret(g, 4 * t));
        sum_t += a;
        sum_4t += b;
        worst_ratio = worst_ratio.max(b / a);
    }
    let ratio = sum_4t / sum_t;
    outcome(
        worst_gap <= 0.05 && ratio <= 0.55,
        format!(
            "worst swap gap {worst_gap:.4}; mean regret over 10 seeds {:.4e} -> {:.4e}, ratio {ratio:.3} (worst single seed {worst_ratio:.3})",
            sum_t / 10.0,
            sum_4t / 10.0
        ),
    )
}

fn c4_separation() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for k in [2, 3] {
        let gaps = separation_gaps(k).unwrap();
        let top = gaps[k].1;
        let below = gaps[k - 1].1;
        pass &= (top - 1.0).abs() <= 1e-9 && below <= 1e-9;
        detail.push(format!("k={k}: depth {k} -> {top:.12}, depth {} -> {below:.3e}", k - 1));
    }
    outcome(pass, detail.join("; "))
}

fn c5_extended() -> Outcome {
    let p = fig1();
    let phi = fig1_phi();
    let mut pass = true;
    for x in p.enumerate_pure_strategies().unwrap() {
        let y = phi.eval(&x.to_point()).unwrap();
        pass &= y.iter().all(|&v| v == 0.0 || v == 1.0) && p.membership(&y).unwrap();
    }
    let naive = phi.eval(&[0.5, 0.5, 0.0, 0.5, 0.0]).unwrap();
    pass &= naive == vec![0.5, 0.25, 0.0, 0.5, 0.0] && !p.membership(&naive).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut bad = 0;
    for _ in 0..1000 {
        let x = random_point(&mut rng, &p);
        for delta in [Delta::Beta, Delta::Caratheodory] {
            let y = extended_map_eval(&p, &phi, &x, delta).unwrap();
            bad += usize::from(!p.membership(&y).unwrap());
        }
    }
    pass &= bad == 0;
    outcome(pass, format!("naive image {naive:?}; extended images outside X: {bad} of 2000"))
}

fn subsets_up_to_3(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for a in 0..n {
        out.push(vec![a]);
        for b in a + 1..n {
            out.push(vec![a, b]);
            for c in b + 1..n {
                out.push(vec![a, b, c]);
            }
        }
    }
    out
}

fn c6_beta() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut problems = vec![fig1()];
    while problems.len() < 21 {
        problems.push(random_problem(&mut rng, 64));
    }
    let mut worst = 0.0f64;
    let mut count = 0;
    for p in &problems {
        let mut points: Vec<Vec<f64>> = (0..4).map(|_| random_point(&mut rng, p)).collect();
        points.push(p.uniform_point());
        for x in &points {
            for s in subsets_up_to_3(p.n()) {
                let fast = monomial_expectation_beta(p, x, &s).unwrap();
                let slow = beta_monomial_by_enumeration(p, x, &s);
                worst = worst.max((fast - slow).abs());
                count += 1;
            }
        }
    }
    outcome(worst <= 1e-12, format!("{count} monomials on 21 problems; max deviation {worst:.3e}"))
}

/// The two-mediator deviation behind the fig1 counterexample map: ask
/// mediator 1 at the root and, if it goes on, at B; at B ask mediator 2
/// about C; always take x4 at C.
fn fig1_two_mediator_policy(p: &DecisionProblem, st: &[usize], moves: &[Move]) -> Option<usize> {
    let id = |s: usize| p.node(s).id.as_str();
    let find = |m: Move| moves.iter().position(|&mv| mv == m);
    let node = |name: &str| p.find(name).unwrap();
    let (s, m1, m2) = (id(st[0]), id(st[1]), id(st[2]));
    match s {
        "A" => match m1 {
            "x1" | "x3" => find((0, node("x1"))),
            "x2" => find((0, node("o"))),
            "o" => find((1, node("B"))),
            // Unreachable under this policy.
            _ => Some(0),
        },
        "B" => match m2 {
            "o" => find((2, node("C"))),
            "x5" => find((0, node("x3"))),
            _ => find((0, node("x2"))),
        },
        "C" => find((0, node("x4"))),
        // Only mediators are left to walk; any completion pairs to 1.
        _ => Some(0),
    }
}

fn c7_mediator() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut problems = vec![
        fig1(),
        DecisionProblem::simplex(3).unwrap(),
        DecisionProblem::hypercube(3).unwrap(),
    ];
    while problems.len() < 13 {
        problems.push(random_problem(&mut rng, 64));
    }
    let mut pairing_ok = true;
    let mut follow_ok = true;
    for p in &problems {
        let xs = p.enumerate_pure_strategies().unwrap();
        let ys = p.dual().enumerate_pure_strategies().unwrap();
        for x in &xs {
            for y in &ys {
                pairing_ok &= x.bits().iter().zip(y.bits()).filter(|(a, b)| **a == 1 && **b == 1).count() == 1;
            }
        }
        let med = interleave(p, 1).unwrap();
        let q = med.follow_mediator(p).unwrap();
        for x in &xs {
            follow_ok &= med.dev.eval(&q, &x.to_point()).unwrap() == x.to_point();
        }
    }
    let p = fig1();
    let med2 = interleave(&p, 2).unwrap();
    let q = med2.pure_policy(&p, |st, mv| fig1_two_mediator_policy(&p, st, mv)).unwrap();
    let phi = fig1_phi();
    let mut fig2_ok = true;
    for x in p.enumerate_pure_strategies().unwrap() {
        let pt = x.to_point();
        fig2_ok &= med2.dev.eval(&q, &pt).unwrap() == phi.eval(&pt).unwrap();
    }
    let g = EFGame::parse(FIG1_DUEL).unwrap();
    let cfg = SelfPlayConfig {
        devs: [DeviationSpec::Mediator(1), DeviationSpec::Mediator(1)],
        phi: PhiConfig::new(50, Delta::Beta).warm(),
        rounds: 4000,
        checkpoints: vec![1000, 4000],
        keep_profile: false,
    };
    let run = efg_self_play(&g, &cfg).unwrap();
    let ratios: Vec<f64> = run.curves.iter().map(|c| c[1].phi_regret / c[0].phi_regret).collect();
    let decay_ok = ratios.iter().all(|r| *r <= 0.6);
    outcome(
        pairing_ok && follow_ok && fig2_ok && decay_ok,
        format!(
            "pairing {pairing_ok}, follow {follow_ok}, two-mediator map {fig2_ok}; regret ratio T=4000/T=1000 per player {:.3?} (1000: {:.3e}, {:.3e})",
            ratios, run.curves[0][0].phi_regret, run.curves[1][0].phi_regret
        ),
    )
}

fn c8_extension() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut problems = vec![fig1()];
    while problems.len() < 6 {
        problems.push(random_problem(&mut rng, 64));
    }
    let mut pass = true;
    let mut degrees = Vec::new();
    for p in &problems {
        let b = binarize(p).problem;
        let id = extend_identity(&b).unwrap();
        pass &= id.degree() <= b.depth();
        degrees.push((id.degree(), b.depth()));
        for x in b.enumerate_pure_strategies().unwrap() {
            pass &= id.eval(&x.to_point()).unwrap() == x.to_point();
        }
    }
    outcome(pass, format!("(degree, depth) per problem: {degrees:?}"))
}

fn c9_gadget() -> Outcome {
    let mut worst = Vec::new();
    let mut pass = true;
    for eps in [0.1, 0.01] {
        let mut w = 0.0f64;
        for i in 0..100 {
            for j in 0..100 {
                let (t1, t2) = (i as f64 / 99.0, j as f64 / 99.0);
                let out = gadget_min_sum(t1, t2, eps).unwrap();
                w = w.max((out - (t1 + t2).min(1.0)).abs());
            }
        }
        pass &= w <= eps;
        worst.push(format!("eps {eps}: max error {w:.3e} ({} steps)", gadget_iterations(eps)));
    }
    outcome(pass, worst.join("; "))
}

fn c10_quadratic() -> Outcome {
    let g = separating_quadratic();
    let fs = low_degree_boolean_functions(4, 2).len();
    let feasible = is_convex_combination_of_low_degree(&g, 4, 2);
    // Sanity: the same LP accepts a mixture it should accept.
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let table = low_degree_boolean_functions(4, 2);
    let (a, b) = (rng.gen_range(0..fs), rng.gen_range(0..fs));
    let mix: Vec<f64> = table[a].iter().zip(&table[b]).map(|(x, y)| 0.5 * (x + y)).collect();
    let control = phireg::lp::feasible(
        &(0..16)
            .map(|p| table.iter().map(|f| f[p]).collect())
            .chain(std::iter::once(vec![1.0; fs]))
            .collect::<Vec<Vec<f64>>>(),
        &mix.iter().copied().chain(std::iter::once(1.0)).collect::<Vec<_>>(),
    );
    outcome(!feasible && control, format!("{fs} Boolean functions of degree <= 2; feasible = {feasible}; control mixture feasible = {control}"))
}
