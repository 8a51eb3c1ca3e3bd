use crate::error::{check_len, Error, Result};
use crate::strategy_maps::{BehavioralDescriptor, Component, Delta, MixtureStrategy, SupportMix};
use crate::tfsdp::{DecisionProblem, TreeStrategy};

pub const PROFILE_CSV_HEADER: &str = "t,player,ell,j,alpha,bits";

/// A uniform mixture over rounds of product distributions: round `t` has one
/// mixture per player, and players are independent within a round.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CorrelatedProfile {
    pub rounds: Vec<Vec<MixtureStrategy>>,
}

impl CorrelatedProfile {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn players(&self) -> usize {
        self.rounds.first().map_or(0, Vec::len)
    }

    pub fn push(&mut self, round: Vec<MixtureStrategy>) -> Result<()> {
        if !self.rounds.is_empty() {
            check_len(self.players(), round.len())?;
        }
        self.rounds.push(round);
        Ok(())
    }

    /// A round in which every player plays one pure strategy.
    pub fn pure_round(strategies: Vec<TreeStrategy>) -> Vec<MixtureStrategy> {
        strategies
            .into_iter()
            .map(|x| MixtureStrategy {
                kind: Delta::Caratheodory,
                components: vec![(1.0, Component::Support(SupportMix::pure(x)))],
            })
            .collect()
    }

    /// A round of mixed actions on simplices.
    pub fn simplex_round(dists: &[Vec<f64>]) -> Vec<MixtureStrategy> {
        dists
            .iter()
            .map(|p| {
                let atoms = (0..p.len())
                    .map(|a| {
                        let mut bits = vec![0u8; p.len()];
                        bits[a] = 1;
                        (p[a], TreeStrategy::new(bits))
                    })
                    .collect();
                MixtureStrategy {
                    kind: Delta::Caratheodory,
                    components: vec![(1.0, Component::Support(SupportMix { atoms }))],
                }
            })
            .collect()
    }

    /// Rows `t,player,ell,j,alpha,bits`. Support components give one row per
    /// atom; behavioral components give one row with `j = beta` and the
    /// point's coordinates in `bits`, separated by `;`. Components of a
    /// round are equally weighted.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(PROFILE_CSV_HEADER);
        s.push('\n');
        for (t, round) in self.rounds.iter().enumerate() {
            for (i, mix) in round.iter().enumerate() {
                for (ell, (_, c)) in mix.components.iter().enumerate() {
                    match c {
                        Component::Support(m) => {
                            for (j, (alpha, x)) in m.atoms.iter().enumerate() {
                                let bits: String =
                                    x.bits().iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
                                s.push_str(&format!("{t},{i},{ell},{j},{alpha:.16e},{bits}\n"));
                            }
                        }
                        Component::Behavioral(b) => {
                            let vals: Vec<String> = b.base.iter().map(|v| format!("{v:.16e}")).collect();
                            s.push_str(&format!("{t},{i},{ell},beta,1,{}\n", vals.join(";")));
                        }
                    }
                }
            }
        }
        s
    }

    /// Inverse of [`CorrelatedProfile::to_csv`]. `problems[i]` is player
    /// `i`'s decision problem.
    pub fn from_csv(text: &str, problems: &[DecisionProblem]) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == PROFILE_CSV_HEADER => {}
            _ => return Err(Error::Parse { line: 1, msg: format!("expected header `{PROFILE_CSV_HEADER}`") }),
        }
        // (t, player, ell) -> component under construction.
        let mut rows: Vec<(usize, usize, usize, Component)> = Vec::new();
        for (ln, l) in lines {
            let line = ln + 1;
            let perr = |msg: &str| Error::Parse { line, msg: msg.to_string() };
            let f: Vec<&str> = l.trim().split(',').collect();
            if f.len() != 6 {
                return Err(perr("expected 6 fields"));
            }
            let idx = |s: &str| s.parse::<usize>().map_err(|_| perr(&format!("bad index `{s}`")));
            let (t, i, ell) = (idx(f[0])?, idx(f[1])?, idx(f[2])?);
            let problem = problems.get(i).ok_or_else(|| perr("player out of range"))?;
            let same = matches!(rows.last(), Some((tt, ii, ee, _)) if (*tt, *ii, *ee) == (t, i, ell));
            if f[3] == "beta" {
                if same {
                    return Err(perr("duplicate behavioral component"));
                }
                let x: Vec<f64> = f[5]
                    .split(';')
                    .map(|v| v.parse::<f64>().map_err(|_| perr(&format!("bad value `{v}`"))))
                    .collect::<Result<_>>()?;
                check_len(problem.n(), x.len())?;
                rows.push((t, i, ell, Component::Behavioral(BehavioralDescriptor::new(problem, &x)?)));
                continue;
            }
            idx(f[3])?;
            let alpha: f64 = f[4].parse().map_err(|_| perr(&format!("bad weight `{}`", f[4])))?;
            if !(alpha >= 0.0) {
                return Err(perr("weights must be nonnegative"));
            }
            let bits: Vec<u8> = f[5]
                .bytes()
                .map(|b| match b {
                    b'0' => Ok(0),
                    b'1' => Ok(1),
                    _ => Err(perr("bits must be 0 or 1")),
                })
                .collect::<Result<_>>()?;
            check_len(problem.n(), bits.len())?;
            let x = TreeStrategy::new(bits);
            match rows.last_mut() {
                Some((_, _, _, Component::Support(m))) if same => m.atoms.push((alpha, x)),
                _ => rows.push((t, i, ell, Component::Support(SupportMix { atoms: vec![(alpha, x)] }))),
            }
        }
        let mut profile = CorrelatedProfile::new();
        let mut k = 0;
        while k < rows.len() {
            let t = rows[k].0;
            if t != profile.len() {
                return Err(Error::Parse { line: 0, msg: format!("rounds out of order at t = {t}") });
            }
            let mut round: Vec<MixtureStrategy> = Vec::new();
            while k < rows.len() && rows[k].0 == t {
                let i = rows[k].1;
                if i != round.len() {
                    return Err(Error::Parse { line: 0, msg: format!("players out of order in round {t}") });
                }
                let mut comps = Vec::new();
                while k < rows.len() && rows[k].0 == t && rows[k].1 == i {
                    if rows[k].2 != comps.len() {
                        return Err(Error::Parse { line: 0, msg: format!("components out of order in round {t}") });
                    }
                    comps.push(rows[k].3.clone());
                    k += 1;
                }
                let kind = match comps[0] {
                    Component::Behavioral(_) => Delta::Beta,
                    Component::Support(_) => Delta::Caratheodory,
                };
                let w = 1.0 / comps.len() as f64;
                round.push(MixtureStrategy { kind, components: comps.into_iter().map(|c| (w, c)).collect() });
            }
            if round.len() != problems.len() {
                return Err(Error::Parse { line: 0, msg: format!("round {t} lacks some players") });
            }
            profile.push(round)?;
        }
        Ok(profile)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tfsdp::tests::fig1;

    #[test]
    fn csv_round_trip() {
        let p = fig1();
        let s = DecisionProblem::simplex(3).unwrap();
        let mut prof = CorrelatedProfile::new();
        let x = p.uniform_point();
        let beh = MixtureStrategy::uniform(&p, &[x.clone(), x.clone()], Delta::Beta).unwrap();
        let simplex = CorrelatedProfile::simplex_round(&[vec![0.1, 0.2, 0.7]]).pop().unwrap();
        prof.push(vec![beh, simplex]).unwrap();
        let car = MixtureStrategy::uniform(&p, &[x.clone()], Delta::Caratheodory).unwrap();
        let simplex = CorrelatedProfile::simplex_round(&[vec![1.0 / 3.0; 3]]).pop().unwrap();
        prof.push(vec![car, simplex]).unwrap();
        let text = prof.to_csv();
        let back = CorrelatedProfile::from_csv(&text, &[p, s]).unwrap();
        assert_eq!(back, prof);
        assert_eq!(back.to_csv(), text);
    }

    #[test]
    fn rejects_garbage() {
        let s = DecisionProblem::simplex(2).unwrap();
        assert!(CorrelatedProfile::from_csv("nope\n", &[s.clone()]).is_err());
        let bad = format!("{PROFILE_CSV_HEADER}\n0,0,0,0,-1,10\n");
        assert!(CorrelatedProfile::from_csv(&bad, &[s.clone()]).is_err());
        let bad = format!("{PROFILE_CSV_HEADER}\n0,0,0,0,1,102\n");
        assert!(CorrelatedProfile::from_csv(&bad, &[s]).is_err());
    }
}
