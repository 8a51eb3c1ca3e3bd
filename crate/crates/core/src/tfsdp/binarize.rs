use super::{DecisionProblem, NodeKind, ProblemBuilder};

/// A binarized problem and the correspondence between terminal slots.
#[derive(Debug, Clone)]
pub struct Binarized {
    pub problem: DecisionProblem,
    /// `old_of_new[z']` is the original terminal slot of new terminal `z'`.
    pub old_of_new: Vec<usize>,
    pub new_of_old: Vec<usize>,
}

impl Binarized {
    /// Re-indexes a vector over the original terminals to the new ones.
    pub fn forward(&self, v: &[f64]) -> Vec<f64> {
        self.old_of_new.iter().map(|&z| v[z]).collect()
    }

    pub fn backward(&self, v: &[f64]) -> Vec<f64> {
        self.new_of_old.iter().map(|&z| v[z]).collect()
    }
}

/// Replaces every decision point with more than two actions by a balanced
/// cascade of binary decision points. Fresh decision points sit behind
/// single-child observation points so that alternation is kept.
pub fn binarize(p: &DecisionProblem) -> Binarized {
    let mut b = ProblemBuilder::new(format!("bin({})", p.name()));
    let mut fresh = 0usize;
    copy(p, 0, None, &mut b, &mut fresh);
    let problem = b.build().expect("binarization preserves validity");
    let old_of_new: Vec<usize> = (0..problem.n())
        .map(|z| {
            let id = &problem.node(problem.terminal_node(z)).id;
            p.terminal_by_id(id).expect("terminal ids are preserved")
        })
        .collect();
    let mut new_of_old = vec![0; old_of_new.len()];
    for (new, &old) in old_of_new.iter().enumerate() {
        new_of_old[old] = new;
    }
    Binarized { problem, old_of_new, new_of_old }
}

fn copy(
    p: &DecisionProblem,
    s: usize,
    parent: Option<usize>,
    b: &mut ProblemBuilder,
    fresh: &mut usize,
) -> usize {
    let n = p.node(s);
    let me = b.add(n.id.clone(), n.kind, parent, n.label.clone());
    if n.kind == NodeKind::Decision && n.children.len() > 2 {
        split(p, &n.children, me, &n.id, b, fresh);
    } else {
        for &c in &n.children {
            copy(p, c, Some(me), b, fresh);
        }
    }
    me
}

fn split(
    p: &DecisionProblem,
    group: &[usize],
    at: usize,
    base: &str,
    b: &mut ProblemBuilder,
    fresh: &mut usize,
) {
    let mid = group.len().div_ceil(2);
    for half in [&group[..mid], &group[mid..]] {
        if half.len() == 1 {
            copy(p, half[0], Some(at), b, fresh);
        } else {
            *fresh += 1;
            let o = b.add(format!("{base}__o{fresh}"), NodeKind::Observation, Some(at), "-");
            let d = b.add(format!("{base}__d{fresh}"), NodeKind::Decision, Some(o), "-");
            split(p, half, d, base, b, fresh);
        }
    }
}
