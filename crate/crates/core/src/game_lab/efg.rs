use super::profile::CorrelatedProfile;
use crate::deviations::{best_reduced_strategy, DeviationDag, DeviationSpec};
use crate::error::{check_len, Error, Result};
use crate::phi::{Checkpoint, PhiConfig, PhiRegretMinimizer};
use crate::tfsdp::parse::parse_lines;
use crate::tfsdp::DecisionProblem;

/// A two-player extensive-form game given by one decision problem per
/// player and payoffs on terminal pairs: under `(x1, x2)` player `i` gets
/// `sum_{z1, z2} U_i[z1][z2] x1[z1] x2[z2]`. Payoffs are divided by the
/// largest absolute pure-profile value so that every pure profile pays in
/// `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EFGame {
    pub name: String,
    pub players: [DecisionProblem; 2],
    /// Normalized payoffs, row-major `z1 * n2 + z2`.
    pub payoffs: [Vec<f64>; 2],
    /// Raw payoff = normalized payoff * scale.
    pub scale: [f64; 2],
}

impl EFGame {
    pub fn new(name: impl Into<String>, p1: DecisionProblem, p2: DecisionProblem, raw: [Vec<f64>; 2]) -> Result<Self> {
        let cells = p1.n() * p2.n();
        check_len(cells, raw[0].len())?;
        check_len(cells, raw[1].len())?;
        if raw.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("payoff".into()));
        }
        let pure1 = p1.enumerate_pure_strategies()?;
        let mut scale = [1.0; 2];
        let mut payoffs = raw.clone();
        for i in 0..2 {
            let mut m: f64 = 0.0;
            for x1 in &pure1 {
                let u2 = row_times(&raw[i], x1.bits(), p2.n());
                m = m.max(p2.best_pure_response(&u2)?.1.abs()).max(p2.worst_pure_value(&u2)?.abs());
            }
            if m > 0.0 {
                scale[i] = m;
                for v in payoffs[i].iter_mut() {
                    *v /= m;
                }
            }
        }
        Ok(EFGame { name: name.into(), players: [p1, p2], payoffs, scale })
    }

    /// `efg <name>`, then `player 1` ... `end` and `player 2` ... `end`
    /// blocks holding decision problems, then lines
    /// `payoff <z1> <z2> <u1> <u2>` naming terminals by id. Missing pairs
    /// pay 0.
    pub fn parse(text: &str) -> Result<Self> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        let perr = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
        let mut it = lines.into_iter();
        let (hl, header) = it.next().ok_or_else(|| perr(1, "empty game file"))?;
        let name = match header.split_whitespace().collect::<Vec<_>>()[..] {
            ["efg", name] => name.to_string(),
            _ => return Err(perr(hl, "expected header `efg <name>`")),
        };
        let mut problems = Vec::new();
        for who in ["1", "2"] {
            let (ln, l) = it.next().ok_or_else(|| perr(hl, "missing player block"))?;
            if l.split_whitespace().collect::<Vec<_>>() != ["player", who] {
                return Err(perr(ln, &format!("expected `player {who}`")));
            }
            let mut block = Vec::new();
            loop {
                let (bl, b) = it.next().ok_or_else(|| perr(ln, "player block lacks `end`"))?;
                if b == "end" {
                    break;
                }
                block.push((bl, b));
            }
            problems.push(parse_lines(block)?);
        }
        let p2 = problems.pop().unwrap();
        let p1 = problems.pop().unwrap();
        let (n1, n2) = (p1.n(), p2.n());
        let mut raw = [vec![0.0; n1 * n2], vec![0.0; n1 * n2]];
        for (ln, l) in it {
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() != 5 || t[0] != "payoff" {
                return Err(perr(ln, "expected `payoff <z1> <z2> <u1> <u2>`"));
            }
            let z1 = p1.terminal_by_id(t[1]).ok_or_else(|| perr(ln, &format!("unknown terminal `{}`", t[1])))?;
            let z2 = p2.terminal_by_id(t[2]).ok_or_else(|| perr(ln, &format!("unknown terminal `{}`", t[2])))?;
            for i in 0..2 {
                raw[i][z1 * n2 + z2] =
                    t[3 + i].parse().map_err(|_| perr(ln, &format!("bad payoff `{}`", t[3 + i])))?;
            }
        }
        EFGame::new(name, p1, p2, raw)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("efg {}\n", self.name);
        for (i, p) in self.players.iter().enumerate() {
            s.push_str(&format!("player {}\n{}end\n", i + 1, p.to_text()));
        }
        let [p1, p2] = &self.players;
        for z1 in 0..p1.n() {
            for z2 in 0..p2.n() {
                let c = z1 * p2.n() + z2;
                let (a, b) = (self.payoffs[0][c] * self.scale[0], self.payoffs[1][c] * self.scale[1]);
                if a != 0.0 || b != 0.0 {
                    s.push_str(&format!(
                        "payoff {} {} {a:.16e} {b:.16e}\n",
                        p1.node(p1.terminal_node(z1)).id,
                        p2.node(p2.terminal_node(z2)).id
                    ));
                }
            }
        }
        s
    }

    /// Player `i`'s terminal utility vector against the opponent's mean
    /// strategy.
    pub fn utility(&self, player: usize, opponent: &[f64]) -> Result<Vec<f64>> {
        let [p1, p2] = &self.players;
        let (n1, n2) = (p1.n(), p2.n());
        let u = &self.payoffs[player];
        match player {
            0 => {
                check_len(n2, opponent.len())?;
                Ok((0..n1).map(|z1| u[z1 * n2..(z1 + 1) * n2].iter().zip(opponent).map(|(a, b)| a * b).sum()).collect())
            }
            1 => {
                check_len(n1, opponent.len())?;
                Ok(row_times_f(u, opponent, n2))
            }
            _ => Err(Error::Invalid(format!("player {player} of a two-player game"))),
        }
    }

    /// Expected normalized payoffs under independent mean strategies.
    pub fn value(&self, x1: &[f64], x2: &[f64]) -> Result<[f64; 2]> {
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
        Ok([dot(&self.utility(0, x2)?, x1), dot(&self.utility(1, x1)?, x2)])
    }
}

fn row_times(u: &[f64], x1: &[u8], n2: usize) -> Vec<f64> {
    let mut out = vec![0.0; n2];
    for (z1, &b) in x1.iter().enumerate() {
        if b == 1 {
            for (o, v) in out.iter_mut().zip(&u[z1 * n2..(z1 + 1) * n2]) {
                *o += v;
            }
        }
    }
    out
}

fn row_times_f(u: &[f64], x1: &[f64], n2: usize) -> Vec<f64> {
    let mut out = vec![0.0; n2];
    for (z1, &w) in x1.iter().enumerate() {
        if w != 0.0 {
            for (o, v) in out.iter_mut().zip(&u[z1 * n2..(z1 + 1) * n2]) {
                *o += w * v;
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct SelfPlayConfig {
    pub devs: [DeviationSpec; 2],
    pub phi: PhiConfig,
    pub rounds: usize,
    /// Rounds after which both players' regrets are recorded.
    pub checkpoints: Vec<usize>,
    pub keep_profile: bool,
}

#[derive(Debug, Clone)]
pub struct SelfPlay {
    pub profile: CorrelatedProfile,
    pub curves: [Vec<Checkpoint>; 2],
    pub minimizers: [PhiRegretMinimizer; 2],
}

/// Both players run a Φ-regret minimizer; each round player `i` observes its
/// terminal utility against the opponent's mean strategy of that round.
pub fn efg_self_play(game: &EFGame, cfg: &SelfPlayConfig) -> Result<SelfPlay> {
    let mk = |i: usize| -> Result<PhiRegretMinimizer> {
        let p = &game.players[i];
        PhiRegretMinimizer::new(p.clone(), cfg.devs[i].build(p)?, cfg.phi.clone())
    };
    let mut ms = [mk(0)?, mk(1)?];
    let mut profile = CorrelatedProfile::new();
    let mut curves = [Vec::new(), Vec::new()];
    for t in 1..=cfg.rounds {
        let means = [ms[0].next()?.mean.clone(), ms[1].next()?.mean.clone()];
        if cfg.keep_profile {
            profile.push(vec![ms[0].pending_mixture()?, ms[1].pending_mixture()?])?;
        }
        let u = [game.utility(0, &means[1])?, game.utility(1, &means[0])?];
        for (m, ui) in ms.iter_mut().zip(&u) {
            m.observe(ui)?;
        }
        if cfg.checkpoints.contains(&t) {
            for (c, m) in curves.iter_mut().zip(&ms) {
                c.push(m.checkpoint()?);
            }
        }
    }
    Ok(SelfPlay { profile, curves, minimizers: ms })
}

/// The best gain player `i` can get from a deviation in `dev` against the
/// profile: `(1/T) [max_q sum_t <W_t, q> - sum_t <u_t, mean_t>]`.
pub fn phi_equilibrium_gap(
    profile: &CorrelatedProfile,
    game: &EFGame,
    player: usize,
    dev: &DeviationDag,
) -> Result<f64> {
    if player > 1 {
        return Err(Error::Invalid(format!("player {player} of a two-player game")));
    }
    if profile.is_empty() {
        return Ok(0.0);
    }
    let problem = &game.players[player];
    let other = &game.players[1 - player];
    let mut sum_w = vec![0.0; dev.dag.num_terminals()];
    let mut base = 0.0;
    for round in &profile.rounds {
        check_len(2, round.len())?;
        let u = game.utility(player, &round[1 - player].mean(other.n()))?;
        let mix = &round[player];
        for (a, b) in sum_w.iter_mut().zip(dev.terminal_weights(problem, &u, mix)?) {
            *a += b;
        }
        base += u.iter().zip(mix.mean(problem.n())).map(|(a, b)| a * b).sum::<f64>();
    }
    let best = best_reduced_strategy(&dev.dag, &sum_w)?.0;
    Ok((best - base) / profile.len() as f64)
}
