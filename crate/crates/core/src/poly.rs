//! Multilinear polynomials over 0/1 variables and polynomial deviations.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{check_len, Error, Result};
use crate::tfsdp::DecisionProblem;

/// A multilinear polynomial. Monomials are sorted, duplicate-free variable
/// sets; multiplication is idempotent (`x * x = x`) as on the Boolean cube.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Multilinear {
    terms: BTreeMap<Vec<usize>, f64>,
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            out.push(b[j]);
            j += 1;
        } else {
            out.push(a[i]);
            i += 1;
            j += 1;
        }
    }
    out
}

impl Multilinear {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn var(i: usize) -> Self {
        let mut p = Self::zero();
        p.add_term(vec![i], 1.0);
        p
    }

    /// `1 - x_i`.
    pub fn not_var(i: usize) -> Self {
        Self::constant(1.0).sub(&Self::var(i))
    }

    /// Adds `coef * prod_{i in mono} x_i`.
    pub fn add_term(&mut self, mut mono: Vec<usize>, coef: f64) {
        mono.sort_unstable();
        mono.dedup();
        let sum = self.terms.get(&mono).copied().unwrap_or(0.0) + coef;
        if sum == 0.0 {
            self.terms.remove(&mono);
        } else {
            self.terms.insert(mono, sum);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.to_vec(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::zero();
        for (m, c) in self.terms() {
            out.add_term(m.to_vec(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                out.add_term(union(a, b), ca * cb);
            }
        }
        out
    }

    /// Replaces every variable `i` by the polynomial `sub[i]`.
    pub fn compose(&self, sub: &[Multilinear]) -> Self {
        let mut out = Self::zero();
        for (m, c) in self.terms() {
            let mut prod = Self::constant(c);
            for &i in m {
                prod = prod.mul(&sub[i]);
            }
            out = out.add(&prod);
        }
        out
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// Multilinear extension evaluated at `x`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms().map(|(m, c)| c * m.iter().map(|&i| x[i]).product::<f64>()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Drops terms whose coefficient is below `eps` in magnitude.
    pub fn pruned(&self, eps: f64) -> Self {
        Multilinear { terms: self.terms.iter().filter(|(_, c)| c.abs() > eps).map(|(k, v)| (k.clone(), *v)).collect() }
    }
}

impl fmt::Display for Multilinear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for i in m {
                write!(f, "*x{i}")?;
            }
        }
        Ok(())
    }
}

/// One term `coef * prod_{z in mono} x[z]` contributing to output `out`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub out: usize,
    pub coef: f64,
    pub mono: Vec<usize>,
}

/// A map `x -> phi(x)` whose every output coordinate is a multilinear
/// polynomial in the input terminal coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialDeviation {
    n_in: usize,
    n_out: usize,
    terms: Vec<Term>,
}

impl PolynomialDeviation {
    pub fn new(n_in: usize, n_out: usize, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            if t.out >= n_out || t.mono.iter().any(|&z| z >= n_in) {
                return Err(Error::InvalidDeviation("term index out of range".into()));
            }
            if !t.coef.is_finite() {
                return Err(Error::NonFinite("deviation coefficient".into()));
            }
        }
        let mut merged: BTreeMap<(usize, Vec<usize>), f64> = BTreeMap::new();
        for t in terms {
            let mut m = t.mono;
            m.sort_unstable();
            m.dedup();
            *merged.entry((t.out, m)).or_insert(0.0) += t.coef;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|((out, mono), coef)| Term { out, coef, mono })
            .collect();
        Ok(PolynomialDeviation { n_in, n_out, terms })
    }

    /// One polynomial per output coordinate.
    pub fn from_outputs(n_in: usize, outputs: &[Multilinear]) -> Result<Self> {
        let mut terms = Vec::new();
        for (z, p) in outputs.iter().enumerate() {
            for (m, c) in p.terms() {
                terms.push(Term { out: z, coef: c, mono: m.to_vec() });
            }
        }
        Self::new(n_in, outputs.len(), terms)
    }

    pub fn identity(n: usize) -> Self {
        let terms = (0..n).map(|z| Term { out: z, coef: 1.0, mono: vec![z] }).collect();
        PolynomialDeviation { n_in: n, n_out: n, terms }
    }

    /// The constant map to `target`.
    pub fn constant(n_in: usize, target: &[f64]) -> Self {
        let terms = target
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(z, &v)| Term { out: z, coef: v, mono: Vec::new() })
            .collect();
        PolynomialDeviation { n_in, n_out: target.len(), terms }
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|t| t.mono.len()).max().unwrap_or(0)
    }

    pub fn outputs(&self) -> Vec<Multilinear> {
        let mut out = vec![Multilinear::zero(); self.n_out];
        for t in &self.terms {
            out[t.out].add_term(t.mono.clone(), t.coef);
        }
        out
    }

    /// Plain polynomial evaluation (exact on 0/1 inputs).
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n_in, x.len())?;
        let mut out = vec![0.0; self.n_out];
        for t in &self.terms {
            out[t.out] += t.coef * t.mono.iter().map(|&z| x[z]).product::<f64>();
        }
        Ok(out)
    }

    /// Evaluation with monomial expectations supplied by `expect`.
    pub fn eval_with(&self, mut expect: impl FnMut(&[usize]) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; self.n_out];
        for t in &self.terms {
            out[t.out] += t.coef * expect(&t.mono);
        }
        out
    }

    /// `self ∘ inner`: substitutes the polynomials of `inner` for the inputs.
    pub fn compose(&self, inner: &PolynomialDeviation) -> Result<Self> {
        check_len(self.n_in, inner.n_out)?;
        let subs = inner.outputs();
        let outs: Vec<Multilinear> = self.outputs().iter().map(|p| p.compose(&subs)).collect();
        Self::from_outputs(inner.n_in, &outs)
    }

    /// Desk-scale validation: every pure strategy of `domain` must map into
    /// the strategy polytope of `range`.
    pub fn validate(&self, domain: &DecisionProblem, range: &DecisionProblem) -> Result<()> {
        check_len(self.n_in, domain.n())?;
        check_len(self.n_out, range.n())?;
        for x in domain.enumerate_pure_strategies()? {
            let y = self.eval(&x.to_point())?;
            if !range.membership(&y)? {
                return Err(Error::InvalidDeviation(format!(
                    "pure strategy {:?} maps to {:?}, outside the polytope",
                    x.bits(),
                    y
                )));
            }
        }
        Ok(())
    }
}
