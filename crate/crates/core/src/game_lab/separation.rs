use super::efg::{phi_equilibrium_gap, EFGame};
use super::profile::CorrelatedProfile;
use crate::deviations::build_dt_problem;
use crate::error::{Error, Result};
use crate::tfsdp::{DecisionProblem, TreeStrategy};

/// How `{-1, 1}` coordinates map onto the tree-form encoding.
pub const SEPARATION_RECODING: &str =
    "x in {-1,1} is bit (1+x)/2; u1 = (2a-1)(2b-1) equals x1*y exactly, so gaps keep slope 1";

#[derive(Debug, Clone)]
pub struct Separation {
    pub k: usize,
    pub game: EFGame,
    pub profile: CorrelatedProfile,
    pub recoding: &'static str,
}

/// Player 1 picks `x in {-1,1}^k`, player 2 picks `y in {-1,1}`, and player 1
/// earns `x1 * y`. The profile is uniform over the `2^k` pure profiles with
/// `y = x1 x2 ... xk`.
pub fn separation_game(k: usize) -> Result<Separation> {
    if k == 0 || k > 10 {
        return Err(Error::Invalid(format!("separation game needs 1 <= k <= 10, got {k}")));
    }
    let p1 = DecisionProblem::hypercube(k)?;
    let p2 = DecisionProblem::simplex(2)?;
    let (n1, n2) = (p1.n(), p2.n());
    let mut u1 = vec![0.0; n1 * n2];
    // Terminals 0 and 1 of the cube are "bit 0 is 0" and "bit 0 is 1".
    for a in 0..2 {
        for b in 0..2 {
            u1[a * n2 + b] = ((2 * a) as f64 - 1.0) * ((2 * b) as f64 - 1.0);
        }
    }
    let u2 = u1.iter().map(|v| -v).collect();
    let game = EFGame::new(format!("separation{k}"), p1, p2, [u1, u2])?;
    let mut profile = CorrelatedProfile::new();
    for v in 0..1usize << k {
        let bits: Vec<u8> = (0..k).map(|j| ((v >> j) & 1) as u8).collect();
        let parity = bits.iter().filter(|&&b| b == 0).count() % 2 == 0;
        let x = TreeStrategy::new(bits.iter().flat_map(|&b| [1 - b, b]).collect());
        let y = TreeStrategy::new(if parity { vec![0, 1] } else { vec![1, 0] });
        profile.push(CorrelatedProfile::pure_round(vec![x, y]))?;
    }
    Ok(Separation { k, game, profile, recoding: SEPARATION_RECODING })
}

/// Player 1's gap under depth-`d` decision-tree deviations, for `d = 0..=k`.
pub fn separation_gaps(k: usize) -> Result<Vec<(usize, f64)>> {
    let s = separation_game(k)?;
    (0..=k)
        .map(|d| {
            let dev = build_dt_problem(k, d, false)?.dev;
            Ok((d, phi_equilibrium_gap(&s.profile, &s.game, 0, &dev)?))
        })
        .collect()
}
