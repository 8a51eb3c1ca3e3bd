use crate::lp::feasible;
use crate::poly::Multilinear;

/// Truth tables `f: {0,1}^n -> {0,1}` of multilinear degree at most `d`,
/// as value vectors over the `2^n` points (bit `i` of the point index is
/// variable `i`).
pub fn low_degree_boolean_functions(n: usize, d: usize) -> Vec<Vec<f64>> {
    assert!(n <= 4, "2^(2^n) truth tables");
    let points = 1usize << n;
    let mut out = Vec::new();
    for table in 0u64..1u64 << points {
        let f = |p: usize| ((table >> p) & 1) as i64;
        // Moebius transform: coefficient of prod_{i in S} x_i.
        let high = (0..points).any(|s: usize| {
            (s.count_ones() as usize) > d && {
                let mut c = 0i64;
                let mut t = s;
                loop {
                    let sign = if (s.count_ones() - t.count_ones()) % 2 == 0 { 1 } else { -1 };
                    c += sign * f(t);
                    if t == 0 {
                        break;
                    }
                    t = (t - 1) & s;
                }
                c != 0
            }
        });
        if !high {
            out.push((0..points).map(|p| f(p) as f64).collect());
        }
    }
    out
}

/// Whether `g` (on `n <= 4` variables) is a convex combination of Boolean
/// functions of degree at most `d`, decided by an exact feasibility LP.
pub fn is_convex_combination_of_low_degree(g: &Multilinear, n: usize, d: usize) -> bool {
    let fs = low_degree_boolean_functions(n, d);
    let points = 1usize << n;
    let mut a: Vec<Vec<f64>> = (0..points).map(|p| fs.iter().map(|f| f[p]).collect()).collect();
    a.push(vec![1.0; fs.len()]);
    let mut b: Vec<f64> = (0..points)
        .map(|p| g.eval(&(0..n).map(|i| ((p >> i) & 1) as f64).collect::<Vec<_>>()))
        .collect();
    b.push(1.0);
    feasible(&a, &b)
}

/// `x1 - x1 x2 - x1 x3 / 2 + x2 x3 / 2 + x3 x4 / 2`: a quadratic map from
/// the cube to `[0, 1]` that is not a mixture of quadratic Boolean functions.
pub fn separating_quadratic() -> Multilinear {
    let mut g = Multilinear::zero();
    g.add_term(vec![0], 1.0);
    g.add_term(vec![0, 1], -1.0);
    g.add_term(vec![0, 2], -0.5);
    g.add_term(vec![1, 2], 0.5);
    g.add_term(vec![2, 3], 0.5);
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_on_small_cubes() {
        // On one variable every function is affine.
        assert_eq!(low_degree_boolean_functions(1, 1).len(), 4);
        // 0, 1, x1, 1 - x1, x2, 1 - x2
        assert_eq!(low_degree_boolean_functions(2, 1).len(), 6);
        assert_eq!(low_degree_boolean_functions(2, 2).len(), 16);
    }

    #[test]
    fn trivial_representations() {
        let mut h = Multilinear::zero();
        h.add_term(vec![0], 0.5);
        h.add_term(vec![1], 0.5);
        assert!(is_convex_combination_of_low_degree(&h, 2, 1));
        let mut xor = Multilinear::zero();
        xor.add_term(vec![0], 1.0);
        xor.add_term(vec![1], 1.0);
        xor.add_term(vec![0, 1], -2.0);
        assert!(!is_convex_combination_of_low_degree(&xor, 2, 1));
        assert!(is_convex_combination_of_low_degree(&xor, 2, 2));
    }

    #[test]
    fn quadratic_stays_in_unit_interval() {
        let g = separating_quadratic();
        for p in 0..16usize {
            let v = g.eval(&(0..4).map(|i| ((p >> i) & 1) as f64).collect::<Vec<_>>());
            assert!((0.0..=1.0).contains(&v));
        }
    }
}
