use super::{DecisionProblem, TreeStrategy};
use crate::error::{check_len, Result};
use crate::lp::{minimize, LpOutcome};

/// The induced norm `max { <u, v> : |<u, x>| <= 1 for every pure x }`.
///
/// Solved through its dual: the least total weight `sum |c_p|` of a signed
/// combination `sum c_p x_p = v`. Vectors outside the span of the pure
/// strategies have infinite norm.
pub fn x_norm(v: &[f64], problem: &DecisionProblem) -> Result<f64> {
    check_len(problem.n(), v.len())?;
    let pure = problem.enumerate_pure_strategies()?;
    Ok(x_norm_with(v, &pure))
}

/// [`x_norm`] against an explicit list of pure strategies.
pub fn x_norm_with(v: &[f64], pure: &[TreeStrategy]) -> f64 {
    if v.iter().all(|&x| x == 0.0) {
        return 0.0;
    }
    let n = v.len();
    let k = pure.len();
    let a: Vec<Vec<f64>> = (0..n)
        .map(|z| {
            let mut row = vec![0.0; 2 * k];
            for (p, x) in pure.iter().enumerate() {
                if x.get(z) {
                    row[p] = 1.0;
                    row[k + p] = -1.0;
                }
            }
            row
        })
        .collect();
    match minimize(&vec![1.0; 2 * k], &a, v) {
        LpOutcome::Optimal { value, .. } => value,
        _ => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let fig1 = super::super::tests::fig1();
        assert_eq!(x_norm(&[0.0; 5], &fig1).unwrap(), 0.0);
        let s = DecisionProblem::simplex(2).unwrap();
        assert!((x_norm(&[0.5, -0.5], &s).unwrap() - 1.0).abs() < 1e-9);
        assert!((x_norm(&[1.0, 0.0, 0.0, 0.0, 0.0], &fig1).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn outside_span_is_infinite() {
        // On the cube-as-tree the two literals of one bit always sum to 1.
        let p = DecisionProblem::hypercube(1).unwrap();
        assert!(x_norm(&[1.0, 0.0], &p).unwrap().is_finite());
        let q = DecisionProblem::hypercube(2).unwrap();
        assert_eq!(x_norm(&[1.0, 0.0, 0.0, 0.0], &q).unwrap(), f64::INFINITY);
    }
}
