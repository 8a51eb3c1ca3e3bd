use crate::error::{Error, Result};

/// One step of `f(t1, t2) = (1 - (1 - t1)(1 - t2), t1 t2)`. It keeps
/// `t1 + t2` fixed and moves mass into `t1` until `t1 = 1` or `t2 = 0`.
pub fn gadget_step(t1: f64, t2: f64) -> (f64, f64) {
    (1.0 - (1.0 - t1) * (1.0 - t2), t1 * t2)
}

/// Iterations needed for accuracy `eps`: while the error exceeds `eps` it
/// shrinks by a factor of at least `1 - eps` per step.
pub fn gadget_iterations(eps: f64) -> usize {
    ((1.0 / eps).ln() / (1.0 / (1.0 - eps)).ln()).ceil() as usize + 1
}

/// Approximates `min(1, t1 + t2)` within `eps` by iterating [`gadget_step`].
pub fn gadget_min_sum(t1: f64, t2: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Invalid(format!("eps must lie in (0, 1/2), got {eps}")));
    }
    if !(0.0..=1.0).contains(&t1) || !(0.0..=1.0).contains(&t2) {
        return Err(Error::Invalid(format!("inputs must lie in [0, 1], got ({t1}, {t2})")));
    }
    let (mut a, mut b) = (t1, t2);
    for _ in 0..gadget_iterations(eps) {
        (a, b) = gadget_step(a, b);
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(gadget_min_sum(0.0, 0.0, 0.1).unwrap(), 0.0);
        assert!((gadget_min_sum(0.3, 0.3, 1e-6).unwrap() - 0.6).abs() <= 1e-6);
        assert!(gadget_min_sum(0.9, 0.8, 0.01).unwrap() >= 0.99);
        assert!(gadget_min_sum(0.5, 0.5, 0.5).is_err());
        assert!(gadget_min_sum(1.5, 0.0, 0.1).is_err());
    }

    #[test]
    fn step_preserves_sum() {
        let (a, b) = gadget_step(0.25, 0.5);
        assert_eq!(a + b, 0.75);
    }
}
