use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSize {
    /// `sqrt(ln A / T)` for a known horizon `T`.
    Horizon(usize),
    /// Doubling trick: epochs of length 1, 2, 4, ..., restarting each time.
    Anytime,
    Fixed(f64),
}

/// Multiplicative weights over `A` arms, kept as log-weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Mwu {
    logw: Vec<f64>,
    step: StepSize,
    eta: f64,
    t: usize,
    epoch_end: usize,
}

impl Mwu {
    pub fn new(arms: usize, step: StepSize) -> Self {
        assert!(arms >= 1);
        let ln_a = (arms as f64).ln();
        let eta = match step {
            StepSize::Horizon(t) => (ln_a / t.max(1) as f64).sqrt(),
            StepSize::Anytime => ln_a.sqrt(),
            StepSize::Fixed(e) => e,
        };
        Mwu { logw: vec![0.0; arms], step, eta, t: 0, epoch_end: 1 }
    }

    pub fn arms(&self) -> usize {
        self.logw.len()
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn next(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.logw.len()];
        self.next_into(&mut p);
        p
    }

    pub fn next_into(&self, p: &mut [f64]) {
        let max = self.logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for (o, w) in p.iter_mut().zip(&self.logw) {
            *o = (w - max).exp();
            total += *o;
        }
        for o in p.iter_mut() {
            *o /= total;
        }
    }

    /// Gains `scale * u[a]` for each arm `a`.
    pub fn observe(&mut self, u: &[f64], scale: f64) -> Result<()> {
        check_len(self.logw.len(), u.len())?;
        if !scale.is_finite() || u.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("utility".into()));
        }
        if scale != 0.0 {
            for (w, g) in self.logw.iter_mut().zip(u) {
                *w += self.eta * scale * g;
            }
        }
        self.t += 1;
        if self.step == StepSize::Anytime && self.t == self.epoch_end {
            self.epoch_end *= 2;
            self.eta = ((self.logw.len() as f64).ln() / (self.epoch_end - self.t) as f64).sqrt();
            self.logw.fill(0.0);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_utility_keeps_distribution() {
        let mut m = Mwu::new(3, StepSize::Horizon(100));
        let before = m.next();
        m.observe(&[0.0; 3], 1.0).unwrap();
        assert_eq!(m.next(), before);
        assert_eq!(before, vec![1.0 / 3.0; 3]);
    }

    #[test]
    fn mass_moves_monotonically() {
        let mut m = Mwu::new(2, StepSize::Horizon(100));
        let mut last = 0.5;
        for _ in 0..100 {
            m.observe(&[1.0, 0.0], 1.0).unwrap();
            let p = m.next()[0];
            assert!(p > last);
            last = p;
        }
        assert!(last > 0.99);
    }

    #[test]
    fn shift_invariance() {
        let mut a = Mwu::new(3, StepSize::Horizon(10));
        let mut b = a.clone();
        a.observe(&[0.1, 0.5, -0.2], 1.0).unwrap();
        b.observe(&[0.6, 1.0, 0.3], 1.0).unwrap();
        for (x, y) in a.next().iter().zip(b.next()) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn fixed_utility_regret() {
        let t_max = 10_000;
        let arms = 4;
        let u = [0.1, -0.3, 0.7, 0.2];
        let mut m = Mwu::new(arms, StepSize::Horizon(t_max));
        let mut got = 0.0;
        for _ in 0..t_max {
            let p = m.next();
            got += p.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>();
            m.observe(&u, 1.0).unwrap();
        }
        let reg = (0.7 * t_max as f64 - got) / t_max as f64;
        assert!(reg <= 2.0 * ((arms as f64).ln() / t_max as f64).sqrt(), "{reg}");
    }

    #[test]
    fn anytime_runs() {
        let mut m = Mwu::new(2, StepSize::Anytime);
        for _ in 0..100 {
            m.observe(&[1.0, 0.0], 1.0).unwrap();
        }
        assert!(m.next()[0] > 0.5);
        assert!(m.observe(&[f64::NAN, 0.0], 1.0).is_err());
    }
}
