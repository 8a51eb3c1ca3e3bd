use crate::error::{check_len, Error, Result};
use crate::poly::{Multilinear, PolynomialDeviation};
use crate::tfsdp::{DecisionProblem, NodeKind};

/// Linear form reading the value of node `s` from terminal coordinates.
fn reader(p: &DecisionProblem, s: usize) -> Multilinear {
    let n = p.node(s);
    match n.kind {
        NodeKind::Terminal => Multilinear::var(p.terminal_slot(s).unwrap()),
        NodeKind::Decision => {
            n.children.iter().fold(Multilinear::zero(), |acc, &c| acc.add(&reader(p, c)))
        }
        NodeKind::Observation => {
            match n.children.iter().find(|&&c| p.node(c).kind == NodeKind::Terminal) {
                Some(&t) => reader(p, t),
                None => reader(p, n.children[0]),
            }
        }
    }
}

/// Extends the identity of `X` to a polynomial map on the whole cube
/// `{0,1}^N`. At each binary decision point `j` the value of its first
/// child is read as a bit `c_j`; mass is routed `c_j` to the first child and
/// `1 - c_j` to the second. The degree is at most the depth.
pub fn extend_identity(p: &DecisionProblem) -> Result<PolynomialDeviation> {
    let mut id = vec![Multilinear::zero(); p.nodes().len()];
    id[0] = Multilinear::constant(1.0);
    let mut out = vec![Multilinear::zero(); p.n()];
    for s in 0..p.nodes().len() {
        let n = p.node(s);
        match n.kind {
            NodeKind::Terminal => out[p.terminal_slot(s).unwrap()] = id[s].clone(),
            NodeKind::Observation => {
                for &c in &n.children {
                    id[c] = id[s].clone();
                }
            }
            NodeKind::Decision => {
                if n.children.len() != 2 {
                    return Err(Error::Structure(format!(
                        "decision point {} has {} actions; binarize first",
                        n.id,
                        n.children.len()
                    )));
                }
                let (c0, c1) = (n.children[0], n.children[1]);
                let bit = if p.node(c0).kind == NodeKind::Terminal {
                    reader(p, c0)
                } else if p.node(c1).kind == NodeKind::Terminal {
                    Multilinear::constant(1.0).sub(&reader(p, c1))
                } else {
                    reader(p, c0)
                };
                id[c0] = bit.mul(&id[s]);
                id[c1] = Multilinear::constant(1.0).sub(&bit).mul(&id[s]);
            }
        }
    }
    PolynomialDeviation::from_outputs(p.n(), &out)
}

/// `f ∘ id~`: a polynomial on the cube agreeing with `f` on `X`.
pub fn extend_polynomial(p: &DecisionProblem, f: &PolynomialDeviation) -> Result<PolynomialDeviation> {
    check_len(p.n(), f.n_in())?;
    f.compose(&extend_identity(p)?)
}
