mod common;

use common::*;
use phireg::deviations::DeviationSpec;
use phireg::game_lab::*;
use phireg::phi::PhiConfig;
use phireg::strategy_maps::Delta;
use phireg::DecisionProblem;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TRIANGLE: &str = include_str!("../data/triangle.nfg");
const ZERO_SUM: &str = include_str!("../data/zero_sum.efg");
const FIG1_VS_COIN: &str = include_str!("../data/fig1_vs_coin.efg");

fn random_simplex(rng: &mut ChaCha8Rng, a: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..a).map(|_| rng.gen_range(0.0..1.0)).collect();
    let t: f64 = w.iter().sum();
    w.into_iter().map(|v| v / t).collect()
}

#[test]
fn polymatrix_oracle_matches_dense() {
    let g = NormalFormGame::parse(TRIANGLE).unwrap();
    assert!(g.is_polymatrix());
    let d = g.to_dense().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let pis: Vec<Vec<f64>> = g.actions().iter().map(|&a| random_simplex(&mut rng, a)).collect();
        let (a, b) = (g.expectation_oracle(&pis).unwrap(), d.expectation_oracle(&pis).unwrap());
        for (x, y) in a.iter().zip(&b) {
            assert!(max_abs_diff(x, y) <= 1e-12);
        }
    }
}

#[test]
fn expectation_oracle_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let g = random_game(&mut rng, 3, 3);
        let acts = g.actions().to_vec();
        let pis: Vec<Vec<f64>> = acts.iter().map(|&a| random_simplex(&mut rng, a)).collect();
        let oracle = g.expectation_oracle(&pis).unwrap();
        for i in 0..3 {
            for a in 0..acts[i] {
                let mut v = 0.0;
                for p0 in 0..acts[0] {
                    for p1 in 0..acts[1] {
                        for p2 in 0..acts[2] {
                            let prof = [p0, p1, p2];
                            if prof[i] != a {
                                continue;
                            }
                            let w: f64 = (0..3).filter(|&j| j != i).map(|j| pis[j][prof[j]]).product();
                            v += w * g.payoff(&prof)[i];
                        }
                    }
                }
                assert!((oracle[i][a] - v).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn ce_runs_certify_their_gap() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..3 {
        let g = random_game(&mut rng, 2, 3);
        let run = run_ce(&g, 0.15).unwrap();
        let gap = swap_gap(&run.profile, &g).unwrap();
        for (a, b) in gap.iter().zip(&run.swap_regret) {
            assert!((a - b).abs() <= 1e-9);
            assert!(*a <= 0.15, "gap {a}");
        }
    }
}

#[test]
fn swap_learner_against_random_utilities() {
    // One learner, A = 4, iid utilities: swap regret stays within the
    // Blum–Mansour bound plus the fixed-point term.
    let (a, t, l) = (4usize, 10_000usize, 100usize);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut learner = SwapLearner::new(a, t);
    let mut meter = SwapMeter::new(a);
    for _ in 0..t {
        let pi = learner.next(l);
        let u: Vec<f64> = (0..a).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        learner.observe(&u, &pi).unwrap();
        meter.record(&pi, &u);
    }
    let af = a as f64;
    let bound = (2.0 * af * af.ln() / t as f64).sqrt() + 2.0 / l as f64;
    assert!(meter.regret() <= bound, "{} > {}", meter.regret(), bound);
}

#[test]
fn constant_game_has_no_swap_regret() {
    let g = NormalFormGame::dense(vec![4, 4], |_| vec![0.25, -0.5]).unwrap();
    let run = run_ce_with(&g, CeConfig { horizon: 500, l: 10, cold: false }, &[], true).unwrap();
    for r in swap_gap(&run.profile, &g).unwrap() {
        assert!(r.abs() <= 1e-12);
    }
}

fn self_play(game: &EFGame, devs: [DeviationSpec; 2], delta: Delta, rounds: usize) -> SelfPlay {
    let cfg = SelfPlayConfig {
        devs,
        phi: PhiConfig::new(20, delta),
        rounds,
        checkpoints: vec![rounds],
        keep_profile: true,
    };
    efg_self_play(game, &cfg).unwrap()
}

#[test]
fn audited_gap_equals_learner_regret() {
    let g = EFGame::parse(FIG1_VS_COIN).unwrap();
    for delta in [Delta::Beta, Delta::Caratheodory] {
        let devs = [DeviationSpec::Mediator(1), DeviationSpec::External];
        let run = self_play(&g, devs, delta, 300);
        for i in 0..2 {
            let dev = devs[i].build(&g.players[i]).unwrap();
            let gap = phi_equilibrium_gap(&run.profile, &g, i, &dev).unwrap();
            let reg = run.minimizers[i].phi_regret().unwrap();
            assert!((gap - reg).abs() <= 1e-6, "player {i}: {gap} vs {reg}");
        }
    }
}

#[test]
fn zero_sum_self_play_finds_the_value() {
    let g = EFGame::parse(ZERO_SUM).unwrap();
    let devs = [DeviationSpec::Mediator(0), DeviationSpec::Mediator(0)];
    let run = self_play(&g, devs, Delta::Beta, 10_000);
    let (p1, p2) = (&g.players[0], &g.players[1]);
    let mut avg = 0.0;
    for round in &run.profile.rounds {
        avg += g.value(&round[0].mean(p1.n()), &round[1].mean(p2.n())).unwrap()[0];
    }
    avg /= run.profile.len() as f64;
    assert!((avg - 0.1).abs() <= 0.05, "average value {avg}");
}

#[test]
fn profile_csv_round_trip_is_bit_exact() {
    let g = EFGame::parse(FIG1_VS_COIN).unwrap();
    for delta in [Delta::Beta, Delta::Caratheodory] {
        let run = self_play(&g, [DeviationSpec::Mediator(1), DeviationSpec::External], delta, 25);
        let csv = run.profile.to_csv();
        let back = CorrelatedProfile::from_csv(&csv, &g.players).unwrap();
        assert_eq!(back.to_csv(), csv);
        for i in 0..2 {
            let dev = DeviationSpec::External.build(&g.players[i]).unwrap();
            assert_eq!(
                phi_equilibrium_gap(&back, &g, i, &dev).unwrap(),
                phi_equilibrium_gap(&run.profile, &g, i, &dev).unwrap()
            );
        }
    }
    let nfg = NormalFormGame::parse(TRIANGLE).unwrap();
    let run = run_ce_with(&nfg, CeConfig { horizon: 30, l: 5, cold: false }, &[], true).unwrap();
    let problems: Vec<DecisionProblem> =
        nfg.actions().iter().map(|&a| DecisionProblem::simplex(a).unwrap()).collect();
    let csv = run.profile.to_csv();
    let back = CorrelatedProfile::from_csv(&csv, &problems).unwrap();
    assert_eq!(back.to_csv(), csv);
    assert_eq!(swap_gap(&back, &nfg).unwrap(), swap_gap(&run.profile, &nfg).unwrap());
}

#[test]
fn separation_gaps_for_k3() {
    let g = separation_gaps(3).unwrap();
    assert_eq!(g.len(), 4);
    for &(d, v) in &g[..3] {
        assert!(v <= 1e-12, "depth {d}: {v}");
    }
    assert!((g[3].1 - 1.0).abs() <= 1e-12);
}

proptest! {
    #[test]
    fn gadget_is_close_to_min_sum(t1 in 0.0f64..=1.0, t2 in 0.0f64..=1.0, eps in 0.01f64..0.49) {
        let v = gadget_min_sum(t1, t2, eps).unwrap();
        let target = (t1 + t2).min(1.0);
        prop_assert!(v <= target + 1e-12);
        prop_assert!(target - v <= eps + 1e-12);
    }

    #[test]
    fn gadget_step_keeps_the_sum_until_saturation(t1 in 0.0f64..=1.0, t2 in 0.0f64..=1.0) {
        let (a, b) = gadget_step(t1, t2);
        prop_assert!((a + b - t1 - t2).abs() <= 1e-12);
        prop_assert!(a >= t1 - 1e-15 && b <= t2 + 1e-15);
    }
}
