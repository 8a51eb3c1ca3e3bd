use crate::error::{check_len, Error, Result};
use crate::regret::{Mwu, StepSize};

/// Slack allowed when checking that payoffs lie in `[-1, 1]`.
const PAYOFF_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
enum Payoffs {
    /// `u[profile * n + i]`, profiles in mixed radix with player 0 slowest.
    Dense(Vec<f64>),
    /// `edges[i][j]`: the `A_i x A_j` matrix of payoffs to `i` from its
    /// interaction with `j`.
    Polymatrix(Vec<Vec<Option<Vec<Vec<f64>>>>>),
}

/// An `n`-player normal-form game with payoffs in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalFormGame {
    actions: Vec<usize>,
    payoffs: Payoffs,
}

fn profile_count(actions: &[usize]) -> usize {
    actions.iter().product()
}

fn decode(mut idx: usize, actions: &[usize], out: &mut [usize]) {
    for i in (0..actions.len()).rev() {
        out[i] = idx % actions[i];
        idx /= actions[i];
    }
}

fn encode(profile: &[usize], actions: &[usize]) -> usize {
    profile.iter().zip(actions).fold(0, |acc, (&a, &n)| acc * n + a)
}

impl NormalFormGame {
    /// Dense game from a payoff function `f(profile) -> payoffs per player`.
    pub fn dense(actions: Vec<usize>, mut f: impl FnMut(&[usize]) -> Vec<f64>) -> Result<Self> {
        if actions.is_empty() || actions.contains(&0) {
            return Err(Error::Invalid("every player needs at least one action".into()));
        }
        let n = actions.len();
        let total = profile_count(&actions);
        let mut u = vec![0.0; total * n];
        let mut prof = vec![0; n];
        for p in 0..total {
            decode(p, &actions, &mut prof);
            let v = f(&prof);
            check_len(n, v.len())?;
            u[p * n..(p + 1) * n].copy_from_slice(&v);
        }
        let g = NormalFormGame { actions, payoffs: Payoffs::Dense(u) };
        g.check_range()?;
        Ok(g)
    }

    /// Polymatrix game from `(i, j, M_ij)` edges.
    pub fn polymatrix(actions: Vec<usize>, edges: Vec<(usize, usize, Vec<Vec<f64>>)>) -> Result<Self> {
        if actions.is_empty() || actions.contains(&0) {
            return Err(Error::Invalid("every player needs at least one action".into()));
        }
        let n = actions.len();
        let mut m = vec![vec![None; n]; n];
        for (i, j, mat) in edges {
            if i >= n || j >= n || i == j {
                return Err(Error::Invalid(format!("bad edge ({i}, {j})")));
            }
            check_len(actions[i], mat.len())?;
            for row in &mat {
                check_len(actions[j], row.len())?;
            }
            m[i][j] = Some(mat);
        }
        let g = NormalFormGame { actions, payoffs: Payoffs::Polymatrix(m) };
        g.check_range()?;
        Ok(g)
    }

    fn check_range(&self) -> Result<()> {
        match &self.payoffs {
            Payoffs::Dense(u) => {
                if let Some(v) = u.iter().find(|v| !v.is_finite() || v.abs() > 1.0 + PAYOFF_TOL) {
                    return Err(Error::Invalid(format!("payoff {v} outside [-1, 1]")));
                }
            }
            Payoffs::Polymatrix(m) => {
                for (i, row) in m.iter().enumerate() {
                    let bound: f64 = row
                        .iter()
                        .flatten()
                        .map(|mat| mat.iter().flatten().fold(0.0, |a: f64, v| a.max(v.abs())))
                        .sum();
                    if !bound.is_finite() || bound > 1.0 + PAYOFF_TOL {
                        return Err(Error::Invalid(format!(
                            "player {i}: edge payoffs may sum beyond [-1, 1] (bound {bound})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn players(&self) -> usize {
        self.actions.len()
    }

    pub fn actions(&self) -> &[usize] {
        &self.actions
    }

    pub fn is_polymatrix(&self) -> bool {
        matches!(self.payoffs, Payoffs::Polymatrix(_))
    }

    /// Payoff to every player under a pure profile.
    pub fn payoff(&self, profile: &[usize]) -> Vec<f64> {
        let n = self.players();
        match &self.payoffs {
            Payoffs::Dense(u) => {
                let p = encode(profile, &self.actions);
                u[p * n..(p + 1) * n].to_vec()
            }
            Payoffs::Polymatrix(m) => (0..n)
                .map(|i| {
                    (0..n)
                        .filter_map(|j| m[i][j].as_ref().map(|mat| mat[profile[i]][profile[j]]))
                        .sum()
                })
                .collect(),
        }
    }

    /// The same game with an explicit payoff tensor.
    pub fn to_dense(&self) -> Result<Self> {
        NormalFormGame::dense(self.actions.clone(), |p| self.payoff(p))
    }

    /// `r[i][a] = u_i(a, pi_{-i})` for every player and own action.
    pub fn expectation_oracle(&self, pi: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let n = self.players();
        check_len(n, pi.len())?;
        for (i, p) in pi.iter().enumerate() {
            check_len(self.actions[i], p.len())?;
        }
        let mut r: Vec<Vec<f64>> = self.actions.iter().map(|&a| vec![0.0; a]).collect();
        match &self.payoffs {
            Payoffs::Dense(u) => {
                let mut prof = vec![0; n];
                for p in 0..profile_count(&self.actions) {
                    decode(p, &self.actions, &mut prof);
                    for i in 0..n {
                        let mut w = 1.0;
                        for j in 0..n {
                            if j != i {
                                w *= pi[j][prof[j]];
                            }
                        }
                        if w != 0.0 {
                            r[i][prof[i]] += w * u[p * n + i];
                        }
                    }
                }
            }
            Payoffs::Polymatrix(m) => {
                for i in 0..n {
                    for j in 0..n {
                        if let Some(mat) = &m[i][j] {
                            for (a, row) in mat.iter().enumerate() {
                                r[i][a] += row.iter().zip(&pi[j]).map(|(x, y)| x * y).sum::<f64>();
                            }
                        }
                    }
                }
            }
        }
        Ok(r)
    }

    /// Parses `nfg n A1 .. An` followed by either payoff lines
    /// `a1 .. an u1 .. un` or polymatrix blocks `edge i j` + `A_i` rows.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hl, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty game file".into() })?;
        let tok: Vec<&str> = header.split_whitespace().collect();
        let perr = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
        if tok.first() != Some(&"nfg") || tok.len() < 2 {
            return Err(perr(hl, "expected header `nfg n A1 .. An`"));
        }
        let n: usize = tok[1].parse().map_err(|_| perr(hl, "bad player count"))?;
        if tok.len() != n + 2 {
            return Err(perr(hl, "header must list one action count per player"));
        }
        let actions: Vec<usize> = tok[2..]
            .iter()
            .map(|t| t.parse().map_err(|_| perr(hl, "bad action count")))
            .collect::<Result<_>>()?;
        let rest: Vec<(usize, &str)> = lines.collect();
        let num = |line: usize, t: &str| -> Result<f64> {
            t.parse::<f64>().map_err(|_| perr(line, &format!("bad number `{t}`")))
        };
        if rest.first().is_some_and(|(_, l)| l.starts_with("edge")) {
            let mut edges = Vec::new();
            let mut it = rest.into_iter();
            while let Some((ln, l)) = it.next() {
                let t: Vec<&str> = l.split_whitespace().collect();
                if t.len() != 3 || t[0] != "edge" {
                    return Err(perr(ln, "expected `edge i j`"));
                }
                let i: usize = t[1].parse().map_err(|_| perr(ln, "bad player index"))?;
                let j: usize = t[2].parse().map_err(|_| perr(ln, "bad player index"))?;
                if i >= n || j >= n {
                    return Err(perr(ln, "player index out of range"));
                }
                let mut mat = Vec::with_capacity(actions[i]);
                for _ in 0..actions[i] {
                    let (rl, row) = it.next().ok_or_else(|| perr(ln, "truncated edge matrix"))?;
                    let vals: Vec<f64> =
                        row.split_whitespace().map(|t| num(rl, t)).collect::<Result<_>>()?;
                    if vals.len() != actions[j] {
                        return Err(perr(rl, "edge matrix row has the wrong length"));
                    }
                    mat.push(vals);
                }
                edges.push((i, j, mat));
            }
            return NormalFormGame::polymatrix(actions, edges);
        }
        let total = profile_count(&actions);
        let mut u = vec![None; total];
        for (ln, l) in rest {
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() != 2 * n {
                return Err(perr(ln, "payoff line needs n actions and n payoffs"));
            }
            let prof: Vec<usize> = t[..n]
                .iter()
                .enumerate()
                .map(|(i, s)| match s.parse::<usize>() {
                    Ok(a) if a < actions[i] => Ok(a),
                    _ => Err(perr(ln, &format!("bad action `{s}`"))),
                })
                .collect::<Result<_>>()?;
            let vals: Vec<f64> = t[n..].iter().map(|s| num(ln, s)).collect::<Result<_>>()?;
            u[encode(&prof, &actions)] = Some(vals);
        }
        if u.iter().any(Option::is_none) {
            return Err(perr(hl, "payoffs missing for some profiles"));
        }
        NormalFormGame::dense(actions.clone(), |p| u[encode(p, &actions)].clone().unwrap())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("nfg {}", self.players());
        for a in &self.actions {
            s.push_str(&format!(" {a}"));
        }
        s.push('\n');
        match &self.payoffs {
            Payoffs::Polymatrix(m) => {
                for (i, row) in m.iter().enumerate() {
                    for (j, mat) in row.iter().enumerate() {
                        if let Some(mat) = mat {
                            s.push_str(&format!("edge {i} {j}\n"));
                            for r in mat {
                                let cells: Vec<String> = r.iter().map(|v| format!("{v:.16e}")).collect();
                                s.push_str(&cells.join(" "));
                                s.push('\n');
                            }
                        }
                    }
                }
            }
            Payoffs::Dense(_) => {
                let mut prof = vec![0; self.players()];
                for p in 0..profile_count(&self.actions) {
                    decode(p, &self.actions, &mut prof);
                    let a: Vec<String> = prof.iter().map(|x| x.to_string()).collect();
                    let v: Vec<String> = self.payoff(&prof).iter().map(|x| format!("{x:.16e}")).collect();
                    s.push_str(&format!("{} {}\n", a.join(" "), v.join(" ")));
                }
            }
        }
        s
    }
}

/// `x_{l+1} = Q^T x_l` for `L` steps; returns the average of `x_1..x_L` and
/// `x_{L+1}`. The average satisfies `||Q^T pi - pi||_1 <= 2 / L`.
pub fn stationary_average(q: &[Vec<f64>], x1: &[f64], l: usize) -> (Vec<f64>, Vec<f64>) {
    let a = x1.len();
    let l = l.max(1);
    let mut x = x1.to_vec();
    let mut avg = vec![0.0; a];
    let mut next = vec![0.0; a];
    for _ in 0..l {
        for (s, v) in avg.iter_mut().zip(&x) {
            *s += v;
        }
        next.fill(0.0);
        for (row, &w) in q.iter().zip(&x) {
            if w != 0.0 {
                for (n, r) in next.iter_mut().zip(row) {
                    *n += w * r;
                }
            }
        }
        std::mem::swap(&mut x, &mut next);
    }
    for s in avg.iter_mut() {
        *s /= l as f64;
    }
    (avg, x)
}

/// `||Q^T pi - pi||_1`.
pub fn stationarity_error(q: &[Vec<f64>], pi: &[f64]) -> f64 {
    let mut img = vec![0.0; pi.len()];
    for (row, &w) in q.iter().zip(pi) {
        for (n, r) in img.iter_mut().zip(row) {
            *n += w * r;
        }
    }
    img.iter().zip(pi).map(|(a, b)| (a - b).abs()).sum()
}

/// Blum–Mansour swap-regret learner: one MWU instance per action, combined
/// through an expected fixed point of the row-stochastic matrix they form.
#[derive(Debug, Clone)]
pub struct SwapLearner {
    instances: Vec<Mwu>,
    warm: Option<Vec<f64>>,
    warm_start: bool,
}

impl SwapLearner {
    /// Each instance gets `eta = sqrt(2 A ln A / T)`: its gains are scaled by
    /// the probability of its action, so the instances share one unit of
    /// variance per round.
    pub fn new(actions: usize, horizon: usize) -> Self {
        let a = actions as f64;
        let eta = (2.0 * a * a.ln() / horizon.max(1) as f64).sqrt();
        SwapLearner {
            instances: (0..actions).map(|_| Mwu::new(actions, StepSize::Fixed(eta))).collect(),
            warm: None,
            warm_start: true,
        }
    }

    /// Start every fixed-point iteration at the uniform distribution instead
    /// of the previous round's last iterate.
    pub fn cold(mut self) -> Self {
        self.warm_start = false;
        self
    }

    pub fn actions(&self) -> usize {
        self.instances.len()
    }

    /// The row-stochastic matrix whose row `a` is instance `a`'s distribution.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.instances.iter().map(Mwu::next).collect()
    }

    pub fn next(&mut self, l: usize) -> Vec<f64> {
        let a = self.actions();
        let x1 = match (&self.warm, self.warm_start) {
            (Some(w), true) => w.clone(),
            _ => vec![1.0 / a as f64; a],
        };
        let (pi, last) = stationary_average(&self.matrix(), &x1, l);
        self.warm = Some(last);
        pi
    }

    /// Instance `a` gains `pi[a] * u`.
    pub fn observe(&mut self, u: &[f64], pi: &[f64]) -> Result<()> {
        check_len(self.actions(), pi.len())?;
        for (m, &p) in self.instances.iter_mut().zip(pi) {
            m.observe(u, p)?;
        }
        Ok(())
    }
}

/// `sum_a max_b E[1{rec = a} (u(b) - u(a))]` accumulated over rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapMeter {
    m: Vec<Vec<f64>>,
    rounds: usize,
}

impl SwapMeter {
    pub fn new(actions: usize) -> Self {
        SwapMeter { m: vec![vec![0.0; actions]; actions], rounds: 0 }
    }

    pub fn record(&mut self, pi: &[f64], u: &[f64]) {
        for (row, &p) in self.m.iter_mut().zip(pi) {
            if p != 0.0 {
                for (c, &v) in row.iter_mut().zip(u) {
                    *c += p * v;
                }
            }
        }
        self.rounds += 1;
    }

    pub fn regret(&self) -> f64 {
        if self.rounds == 0 {
            return 0.0;
        }
        let total: f64 = self
            .m
            .iter()
            .enumerate()
            .map(|(a, row)| row.iter().copied().fold(f64::NEG_INFINITY, f64::max) - row[a])
            .sum();
        total / self.rounds as f64
    }
}
