use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use phireg::deviations::DeviationSpec;
use phireg::game_lab::{
    efg_self_play, gadget_iterations, gadget_min_sum, phi_equilibrium_gap, run_ce_with, separation_gaps, swap_gap,
    CeConfig, CeRun, CorrelatedProfile, EFGame, NormalFormGame, SelfPlayConfig,
};
use phireg::phi::{Checkpoint, PhiConfig};
use phireg::strategy_maps::Delta;
use phireg::DecisionProblem;

#[derive(Parser)]
#[command(name = "phireg", version, about = "Phi-regret minimization and equilibrium tools")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Approximate correlated equilibrium of a normal-form game by
    /// Blum–Mansour self-play.
    NfgCe {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        eps: f64,
        /// Use the edge-matrix oracle; the game file must be polymatrix.
        #[arg(long)]
        polymatrix: bool,
        /// Fixed-point steps per round; defaults to ceil(4 / eps).
        #[arg(long)]
        l: Option<usize>,
        /// Override the horizon ceil(8 A ln A / eps^2).
        #[arg(long)]
        rounds: Option<usize>,
        /// Restart the fixed-point iteration from uniform every round.
        #[arg(long)]
        cold: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        curves: Option<PathBuf>,
    },
    /// Two-player extensive-form self-play with Φ-regret minimizers.
    EfgRun {
        #[arg(long)]
        game: PathBuf,
        /// external, dt:K or med:K; one spec for both players or two
        /// separated by a comma.
        #[arg(long, default_value = "external")]
        dev: String,
        #[arg(long)]
        rounds: usize,
        #[arg(long, default_value = "beta")]
        delta: Delta,
        /// Fixed-point steps per round.
        #[arg(long, default_value_t = 100)]
        l: usize,
        /// Start each round's fixed-point iteration at the previous last iterate.
        #[arg(long)]
        warm: bool,
        /// Number of evenly spaced checkpoints in the curves file.
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        curves: Option<PathBuf>,
    },
    /// Per-player equilibrium gaps of an exported profile. Normal-form games
    /// report the swap gap.
    Audit {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        game: PathBuf,
        /// Deviation set for extensive-form games.
        #[arg(long)]
        dev: Option<String>,
    },
    /// Gap table of the hierarchy-separation profile.
    Separation {
        #[arg(long)]
        k: usize,
    },
    /// Iterated min-gate approximation of min(1, t1 + t2).
    Gadget {
        #[arg(long)]
        t1: f64,
        #[arg(long)]
        t2: f64,
        #[arg(long)]
        eps: f64,
    },
}

enum Game {
    Normal(NormalFormGame),
    Extensive(EFGame),
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_game(path: &Path) -> Result<Game> {
    let text = read(path)?;
    let header = text
        .lines()
        .map(|l| l.split('#').next().unwrap().trim())
        .find(|l| !l.is_empty())
        .unwrap_or("");
    let ctx = || format!("parsing {}", path.display());
    match header.split_whitespace().next() {
        Some("nfg") => Ok(Game::Normal(NormalFormGame::parse(&text).with_context(ctx)?)),
        Some("efg") => Ok(Game::Extensive(EFGame::parse(&text).with_context(ctx)?)),
        _ => bail!("{}: expected an `nfg` or `efg` header", path.display()),
    }
}

fn parse_devs(s: &str) -> Result<[DeviationSpec; 2]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts[..] {
        [a] => {
            let d: DeviationSpec = a.parse()?;
            Ok([d, d])
        }
        [a, b] => Ok([a.parse()?, b.parse()?]),
        _ => bail!("--dev takes one spec or two separated by a comma"),
    }
}

fn checkpoints(total: usize, points: usize) -> Vec<usize> {
    let points = points.clamp(1, total.max(1));
    let mut c: Vec<usize> = (1..=points).map(|i| (i * total).div_ceil(points)).collect();
    c.dedup();
    c
}

#[allow(clippy::too_many_arguments)]
fn nfg_ce(
    path: &Path,
    eps: f64,
    polymatrix: bool,
    l: Option<usize>,
    rounds: Option<usize>,
    cold: bool,
    out: Option<&Path>,
    curves: Option<&Path>,
) -> Result<()> {
    let Game::Normal(mut game) = load_game(path)? else {
        bail!("nfg-ce needs a normal-form game");
    };
    if polymatrix && !game.is_polymatrix() {
        bail!("--polymatrix given but {} has dense payoffs", path.display());
    }
    if !polymatrix && game.is_polymatrix() {
        game = game.to_dense()?;
    }
    let mut cfg = CeConfig::for_eps(&game, eps)?;
    cfg.cold = cold;
    if let Some(l) = l {
        cfg.l = l.max(1);
    }
    if let Some(t) = rounds {
        cfg.horizon = t.max(1);
    }
    let start = Instant::now();
    let run: CeRun = run_ce_with(&game, cfg, &checkpoints(cfg.horizon, 20), out.is_some())?;
    let secs = start.elapsed().as_secs_f64();
    println!("rounds {} fixed-point steps {} time {secs:.3}s", cfg.horizon, cfg.l);
    for (i, r) in run.swap_regret.iter().enumerate() {
        println!("player {i} swap regret {r:.6e}");
    }
    let worst = run.swap_regret.iter().copied().fold(0.0, f64::max);
    println!("swap gap {worst:.6e} target {eps}");
    if let Some(p) = out {
        write(p, &run.profile.to_csv())?;
    }
    if let Some(p) = curves {
        write(p, &run.curves_csv())?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn efg_run(
    path: &Path,
    dev: &str,
    rounds: usize,
    delta: Delta,
    l: usize,
    warm: bool,
    points: usize,
    out: Option<&Path>,
    curves: Option<&Path>,
) -> Result<()> {
    let Game::Extensive(game) = load_game(path)? else {
        bail!("efg-run needs an extensive-form game");
    };
    if rounds == 0 {
        bail!("--rounds must be positive");
    }
    let mut phi = PhiConfig::new(l, delta);
    if warm {
        phi = phi.warm();
    }
    let cfg = SelfPlayConfig {
        devs: parse_devs(dev)?,
        phi,
        rounds,
        checkpoints: checkpoints(rounds, points),
        keep_profile: out.is_some(),
    };
    let start = Instant::now();
    let run = efg_self_play(&game, &cfg)?;
    println!("rounds {rounds} time {:.3}s", start.elapsed().as_secs_f64());
    for (i, c) in run.curves.iter().enumerate() {
        let last = c.last().unwrap();
        println!(
            "player {i} dev {} phi regret {:.6e} external {:.6e} fixed-point bound {:.3e}",
            cfg.devs[i], last.phi_regret, last.external_regret, last.fp_error_bound
        );
    }
    if let Some(p) = out {
        write(p, &run.profile.to_csv())?;
    }
    if let Some(p) = curves {
        let mut s = format!("player,{}\n", Checkpoint::CSV_HEADER);
        for (i, c) in run.curves.iter().enumerate() {
            for cp in c {
                s.push_str(&format!("{i},{}\n", cp.csv_row()));
            }
        }
        write(p, &s)?;
    }
    Ok(())
}

fn audit(profile: &Path, game: &Path, dev: Option<&str>) -> Result<()> {
    let text = read(profile)?;
    match load_game(game)? {
        Game::Normal(g) => {
            if dev.is_some() {
                bail!("normal-form profiles are audited by swap gap; drop --dev");
            }
            let problems: Vec<DecisionProblem> =
                g.actions().iter().map(|&a| DecisionProblem::simplex(a)).collect::<phireg::Result<_>>()?;
            let prof = CorrelatedProfile::from_csv(&text, &problems)?;
            for (i, v) in swap_gap(&prof, &g)?.iter().enumerate() {
                println!("player {i} swap gap {v:.6e}");
            }
        }
        Game::Extensive(g) => {
            let devs = parse_devs(dev.unwrap_or("external"))?;
            let prof = CorrelatedProfile::from_csv(&text, &g.players)?;
            for i in 0..2 {
                let d = devs[i].build(&g.players[i])?;
                println!("player {i} dev {} gap {:.6e}", devs[i], phi_equilibrium_gap(&prof, &g, i, &d)?);
            }
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::NfgCe { game, eps, polymatrix, l, rounds, cold, out, curves } => {
            nfg_ce(&game, eps, polymatrix, l, rounds, cold, out.as_deref(), curves.as_deref())
        }
        Cmd::EfgRun { game, dev, rounds, delta, l, warm, points, out, curves } => {
            efg_run(&game, &dev, rounds, delta, l, warm, points, out.as_deref(), curves.as_deref())
        }
        Cmd::Audit { profile, game, dev } => audit(&profile, &game, dev.as_deref()),
        Cmd::Separation { k } => {
            println!("depth,gap");
            for (d, g) in separation_gaps(k)? {
                println!("{d},{g:.6}");
            }
            Ok(())
        }
        Cmd::Gadget { t1, t2, eps } => {
            let v = gadget_min_sum(t1, t2, eps)?;
            let target = (t1 + t2).min(1.0);
            println!("value {v:.12} target {target:.12} error {:.3e} iterations {}", target - v, gadget_iterations(eps));
            Ok(())
        }
    }
}
