use super::nfg::{NormalFormGame, SwapLearner, SwapMeter};
use super::profile::CorrelatedProfile;
use crate::error::{check_len, Error, Result};

/// Horizon constant: `T = ceil(c * A ln A / eps^2)`.
pub const CE_HORIZON_CONSTANT: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CeConfig {
    pub horizon: usize,
    /// Fixed-point iterations per round.
    pub l: usize,
    /// Restart the fixed-point iteration from uniform every round.
    pub cold: bool,
}

impl CeConfig {
    pub fn for_eps(game: &NormalFormGame, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::Invalid(format!("eps must be positive, got {eps}")));
        }
        let a = game.actions().iter().copied().max().unwrap_or(1) as f64;
        let horizon = ((CE_HORIZON_CONSTANT * a * a.ln() / (eps * eps)).ceil() as usize).max(1);
        Ok(CeConfig { horizon, l: (4.0 / eps).ceil() as usize, cold: false })
    }
}

#[derive(Debug, Clone)]
pub struct CeRun {
    pub config: CeConfig,
    pub profile: CorrelatedProfile,
    /// Time-averaged swap regret of each player at the end.
    pub swap_regret: Vec<f64>,
    /// `(round, per-player swap regret)` at the requested checkpoints.
    pub curves: Vec<(usize, Vec<f64>)>,
}

impl CeRun {
    pub const CURVES_CSV_HEADER: &'static str = "round,player,swap_regret";

    pub fn curves_csv(&self) -> String {
        let mut s = format!("{}\n", Self::CURVES_CSV_HEADER);
        for (t, regs) in &self.curves {
            for (i, r) in regs.iter().enumerate() {
                s.push_str(&format!("{t},{i},{r:.16e}\n"));
            }
        }
        s
    }
}

/// Self-play of Blum–Mansour learners for `T = ceil(8 A ln A / eps^2)`
/// rounds with `L = ceil(4 / eps)` fixed-point steps. The swap gap of the
/// returned profile is the players' average swap regret.
pub fn run_ce(game: &NormalFormGame, eps: f64) -> Result<CeRun> {
    let cfg = CeConfig::for_eps(game, eps)?;
    run_ce_with(game, cfg, &[], true)
}

/// Runs `cfg.horizon` rounds, recording regrets at `checkpoints`. Keeping the
/// profile is optional since it grows with the horizon.
pub fn run_ce_with(game: &NormalFormGame, cfg: CeConfig, checkpoints: &[usize], keep_profile: bool) -> Result<CeRun> {
    let mut learners: Vec<SwapLearner> = game
        .actions()
        .iter()
        .map(|&a| {
            let l = SwapLearner::new(a, cfg.horizon);
            if cfg.cold {
                l.cold()
            } else {
                l
            }
        })
        .collect();
    let mut meters: Vec<SwapMeter> = game.actions().iter().map(|&a| SwapMeter::new(a)).collect();
    let mut profile = CorrelatedProfile::new();
    let mut curves = Vec::new();
    for t in 1..=cfg.horizon {
        let pis: Vec<Vec<f64>> = learners.iter_mut().map(|l| l.next(cfg.l)).collect();
        let u = game.expectation_oracle(&pis)?;
        for ((l, m), (pi, ui)) in learners.iter_mut().zip(meters.iter_mut()).zip(pis.iter().zip(&u)) {
            l.observe(ui, pi)?;
            m.record(pi, ui);
        }
        if keep_profile {
            profile.push(CorrelatedProfile::simplex_round(&pis))?;
        }
        if checkpoints.contains(&t) {
            curves.push((t, meters.iter().map(SwapMeter::regret).collect()));
        }
    }
    Ok(CeRun { config: cfg, profile, swap_regret: meters.iter().map(SwapMeter::regret).collect(), curves })
}

/// For each player, `sum_a max_b E_pi[1{rec = a} (u(b, .) - u(a, .))]`,
/// computed exactly from the profile's rounds.
pub fn swap_gap(profile: &CorrelatedProfile, game: &NormalFormGame) -> Result<Vec<f64>> {
    let mut meters: Vec<SwapMeter> = game.actions().iter().map(|&a| SwapMeter::new(a)).collect();
    for round in &profile.rounds {
        check_len(game.players(), round.len())?;
        let pis: Vec<Vec<f64>> = round.iter().zip(game.actions()).map(|(m, &a)| m.mean(a)).collect();
        let u = game.expectation_oracle(&pis)?;
        for ((m, pi), ui) in meters.iter_mut().zip(&pis).zip(&u) {
            m.record(pi, ui);
        }
    }
    Ok(meters.iter().map(SwapMeter::regret).collect())
}
