//! Tree-form sequential decision problems.
//!
//! A [`DecisionProblem`] is a rooted tree of decision points (the player picks a
//! child), observation points (the environment picks a child) and terminal
//! nodes. Pure strategies are identified with their tree-form representation:
//! a 0/1 vector over terminal nodes marking the terminals whose root path is
//! played in full. Mixed points of the convex hull are plain `&[f64]` slices of
//! the same length.

mod binarize;
mod norm;
pub(crate) mod parse;

pub use binarize::{binarize, Binarized};
pub use norm::{x_norm, x_norm_with};

use crate::error::{check_len, Error, Result};

/// Default cap on the number of pure strategies any enumeration may produce.
pub const DEFAULT_ENUM_CAP: u128 = 1_000_000;

/// Tolerance for the flow equations.
pub const FLOW_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Decision,
    Observation,
    Terminal,
}

impl NodeKind {
    pub fn code(self) -> char {
        match self {
            NodeKind::Decision => 'D',
            NodeKind::Observation => 'O',
            NodeKind::Terminal => 'T',
        }
    }

    /// The kind this node takes in the dual problem.
    pub fn dual(self) -> Self {
        match self {
            NodeKind::Decision => NodeKind::Observation,
            NodeKind::Observation => NodeKind::Decision,
            NodeKind::Terminal => NodeKind::Terminal,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Label of the edge from the parent, `-` at the root.
    pub label: String,
}

/// An immutable, validated tree-form decision problem. Nodes are stored in
/// breadth-first order from the root (index 0); terminals are densely
/// re-indexed in the same order.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionProblem {
    name: String,
    nodes: Vec<Node>,
    terminals: Vec<usize>,
    terminal_slot: Vec<Option<usize>>,
    depth: usize,
    /// Per terminal: the (decision node, child position) pairs on its root path.
    paths: Vec<Vec<(usize, usize)>>,
    transforms: Vec<String>,
}

/// A pure strategy in tree-form representation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeStrategy(Vec<u8>);

impl TreeStrategy {
    pub fn new(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        TreeStrategy(bits)
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, z: usize) -> bool {
        self.0[z] == 1
    }

    pub fn to_point(&self) -> Vec<f64> {
        self.0.iter().map(|&b| b as f64).collect()
    }

    pub fn from_point(x: &[f64]) -> Self {
        TreeStrategy(x.iter().map(|&v| u8::from(v > 0.5)).collect())
    }

    pub fn dot(&self, u: &[f64]) -> f64 {
        self.0.iter().zip(u).filter(|(b, _)| **b == 1).map(|(_, v)| v).sum()
    }
}

/// A utility vector over terminals together with the factor it was divided by.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityVector {
    pub payoffs: Vec<f64>,
    pub scale: f64,
}

/// Incremental construction of a decision problem. Nodes may be added in any
/// order as long as parents are added before their children.
#[derive(Debug, Clone, Default)]
pub struct ProblemBuilder {
    name: String,
    nodes: Vec<(String, NodeKind, Option<usize>, String)>,
}

impl ProblemBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        ProblemBuilder { name: name.into(), nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Adds a node and returns its builder index.
    pub fn add(
        &mut self,
        id: impl Into<String>,
        kind: NodeKind,
        parent: Option<usize>,
        label: impl Into<String>,
    ) -> usize {
        self.nodes.push((id.into(), kind, parent, label.into()));
        self.nodes.len() - 1
    }

    /// Validates, repairs decision/decision adjacency, and indexes the tree.
    pub fn build(self) -> Result<DecisionProblem> {
        self.finish(true)
    }

    /// Indexes the tree without enforcing branching or alternation. Used for
    /// derived problems such as duals, whose decision points may have one child.
    pub fn build_relaxed(self) -> Result<DecisionProblem> {
        self.finish(false)
    }

    fn finish(self, strict: bool) -> Result<DecisionProblem> {
        let ProblemBuilder { name, mut nodes } = self;
        if nodes.is_empty() {
            return Err(Error::Structure("problem has no nodes".into()));
        }
        let mut roots = nodes.iter().enumerate().filter(|(_, n)| n.2.is_none());
        let root = match (roots.next(), roots.next()) {
            (Some((r, _)), None) => r,
            (None, _) => return Err(Error::Structure("no root node (cycle)".into())),
            (Some((a, _)), Some((b, _))) => {
                return Err(Error::Structure(format!(
                    "two root nodes: {} and {}",
                    nodes[a].0, nodes[b].0
                )))
            }
        };
        for (i, n) in nodes.iter().enumerate() {
            if let Some(p) = n.2 {
                if p >= nodes.len() || p == i {
                    return Err(Error::Structure(format!("node {} has an invalid parent", n.0)));
                }
            }
        }

        let mut transforms = Vec::new();
        let mut wrapped: Vec<(usize, usize)> = Vec::new();
        if strict {
            // Decision point directly below a decision point: insert a dummy
            // single-child observation point between them.
            let original = nodes.len();
            for i in 0..original {
                let Some(p) = nodes[i].2 else { continue };
                if nodes[i].1 == NodeKind::Decision && nodes[p].1 == NodeKind::Decision {
                    let dummy_id = format!("{}__obs", nodes[i].0);
                    let label = std::mem::replace(&mut nodes[i].3, "-".into());
                    nodes.push((dummy_id.clone(), NodeKind::Observation, Some(p), label));
                    let d = nodes.len() - 1;
                    nodes[i].2 = Some(d);
                    wrapped.push((d, i));
                    transforms.push(format!(
                        "inserted observation point {dummy_id} between decision points {} and {}",
                        nodes[p].0, nodes[i].0
                    ));
                }
            }
        }

        let mut children: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
        for (i, n) in nodes.iter().enumerate() {
            if let Some(p) = n.2 {
                children[p].push(i);
            }
        }
        // Repaired nodes must keep their original position among siblings.
        if !wrapped.is_empty() {
            let mut key: Vec<usize> = (0..nodes.len()).collect();
            for &(dummy, inner) in &wrapped {
                key[dummy] = inner;
            }
            for list in children.iter_mut() {
                list.sort_by_key(|&c| key[c]);
            }
        }

        // Reachability / cycle check.
        let mut order = Vec::with_capacity(nodes.len());
        let mut seen = vec![false; nodes.len()];
        order.push(root);
        seen[root] = true;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &c in &children[v] {
                if !seen[c] {
                    seen[c] = true;
                    order.push(c);
                }
            }
        }
        if order.len() != nodes.len() {
            let stray = seen.iter().position(|s| !s).unwrap();
            return Err(Error::Structure(format!(
                "node {} is not reachable from the root (cycle)",
                nodes[stray].0
            )));
        }

        for (i, n) in nodes.iter().enumerate() {
            let nc = children[i].len();
            match n.1 {
                NodeKind::Terminal if nc > 0 => {
                    return Err(Error::Structure(format!("terminal node {} has children", n.0)))
                }
                NodeKind::Decision if strict && nc < 2 => {
                    return Err(Error::Structure(format!(
                        "decision point {} has {nc} action(s); at least 2 are required",
                        n.0
                    )))
                }
                NodeKind::Decision | NodeKind::Observation if nc == 0 => {
                    return Err(Error::Structure(format!("internal node {} has no children", n.0)))
                }
                _ => {}
            }
            if strict && n.1 == NodeKind::Observation {
                if let Some(p) = n.2 {
                    if nodes[p].1 == NodeKind::Observation {
                        return Err(Error::Structure(format!(
                            "observation point {} sits directly below observation point {}",
                            n.0, nodes[p].0
                        )));
                    }
                }
            }
        }
        {
            let mut ids = std::collections::HashSet::new();
            for n in &nodes {
                if !ids.insert(n.0.as_str()) {
                    return Err(Error::Structure(format!("duplicate node id {}", n.0)));
                }
            }
        }

        let mut new_index = vec![0usize; nodes.len()];
        for (k, &old) in order.iter().enumerate() {
            new_index[old] = k;
        }
        let out: Vec<Node> = order
            .iter()
            .map(|&old| {
                let (id, kind, parent, label) = nodes[old].clone();
                Node {
                    id,
                    kind,
                    parent: parent.map(|p| new_index[p]),
                    children: children[old].iter().map(|&c| new_index[c]).collect(),
                    label,
                }
            })
            .collect();
        Ok(DecisionProblem::index(name, out, transforms))
    }
}

impl DecisionProblem {
    fn index(name: String, nodes: Vec<Node>, transforms: Vec<String>) -> Self {
        let mut terminals = Vec::new();
        let mut terminal_slot = vec![None; nodes.len()];
        for (i, n) in nodes.iter().enumerate() {
            if n.kind == NodeKind::Terminal {
                terminal_slot[i] = Some(terminals.len());
                terminals.push(i);
            }
        }
        let paths: Vec<Vec<(usize, usize)>> = terminals
            .iter()
            .map(|&z| {
                let mut path = Vec::new();
                let mut s = z;
                while let Some(p) = nodes[s].parent {
                    if nodes[p].kind == NodeKind::Decision {
                        let pos = nodes[p].children.iter().position(|&c| c == s).unwrap();
                        path.push((p, pos));
                    }
                    s = p;
                }
                path.reverse();
                path
            })
            .collect();
        let depth = paths.iter().map(Vec::len).max().unwrap_or(0);
        DecisionProblem { name, nodes, terminals, terminal_slot, depth, paths, transforms }
    }

    /// Parses the line-oriented `tfsdp` text format.
    pub fn parse(text: &str) -> Result<Self> {
        parse::parse_problem(text)
    }

    /// Writes the problem back in the `tfsdp` text format.
    pub fn to_text(&self) -> String {
        let mut s = format!("tfsdp {}\n", self.name);
        for n in &self.nodes {
            let parent = n.parent.map_or("-", |p| self.nodes[p].id.as_str());
            s.push_str(&format!("{} {} {} {}\n", n.id, n.kind.code(), parent, n.label));
        }
        s
    }

    /// One decision point with `actions` terminal children.
    pub fn simplex(actions: usize) -> Result<Self> {
        let mut b = ProblemBuilder::new(format!("simplex{actions}"));
        let r = b.add("r", NodeKind::Decision, None, "-");
        for a in 0..actions {
            b.add(format!("a{a}"), NodeKind::Terminal, Some(r), a.to_string());
        }
        // A single action is a legal, if trivial, choice.
        if actions == 1 {
            b.build_relaxed()
        } else {
            b.build()
        }
    }

    /// The hypercube {0,1}^n as a tree: a root observation point over `n`
    /// binary decision points. Terminal `2j + a` is "bit j equals a".
    pub fn hypercube(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("hypercube needs at least one bit".into()));
        }
        let mut b = ProblemBuilder::new(format!("cube{n}"));
        let r = b.add("r", NodeKind::Observation, None, "-");
        let ds: Vec<usize> = (0..n)
            .map(|j| b.add(format!("d{j}"), NodeKind::Decision, Some(r), j.to_string()))
            .collect();
        for (j, &d) in ds.iter().enumerate() {
            b.add(format!("b{j}_0"), NodeKind::Terminal, Some(d), "0");
            b.add(format!("b{j}_1"), NodeKind::Terminal, Some(d), "1");
        }
        b.build()
    }

    /// If this problem has the shape produced by [`DecisionProblem::hypercube`],
    /// returns the number of bits.
    pub fn hypercube_bits(&self) -> Option<usize> {
        let root = &self.nodes[0];
        if root.kind != NodeKind::Observation {
            return None;
        }
        for (j, &d) in root.children.iter().enumerate() {
            let dn = &self.nodes[d];
            if dn.kind != NodeKind::Decision || dn.children.len() != 2 {
                return None;
            }
            for (a, &c) in dn.children.iter().enumerate() {
                if self.terminal_slot[c] != Some(2 * j + a) {
                    return None;
                }
            }
        }
        Some(root.children.len())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn root(&self) -> usize {
        0
    }

    /// Number of terminal nodes.
    pub fn n(&self) -> usize {
        self.terminals.len()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Node index of terminal slot `z`.
    pub fn terminal_node(&self, z: usize) -> usize {
        self.terminals[z]
    }

    pub fn terminal_nodes(&self) -> &[usize] {
        &self.terminals
    }

    /// Terminal slot of node `s`, if it is a terminal.
    pub fn terminal_slot(&self, s: usize) -> Option<usize> {
        self.terminal_slot[s]
    }

    /// Decision (node, child position) pairs on the root path of terminal `z`.
    pub fn path(&self, z: usize) -> &[(usize, usize)] {
        &self.paths[z]
    }

    pub fn transforms(&self) -> &[String] {
        &self.transforms
    }

    pub fn find(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Terminal slot of the terminal with the given id.
    pub fn terminal_by_id(&self, id: &str) -> Option<usize> {
        self.find(id).and_then(|s| self.terminal_slot[s])
    }

    pub fn decision_points(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].kind == NodeKind::Decision)
    }

    /// The dual problem: decision and observation points swapped.
    pub fn dual(&self) -> DecisionProblem {
        let nodes = self
            .nodes
            .iter()
            .map(|n| Node { kind: n.kind.dual(), ..n.clone() })
            .collect();
        DecisionProblem::index(format!("dual({})", self.name), nodes, Vec::new())
    }

    /// Extends a terminal vector to all nodes: decision points sum their
    /// children, observation points take the mean of theirs.
    pub fn node_values(&self, x: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.nodes.len()];
        for s in (0..self.nodes.len()).rev() {
            let n = &self.nodes[s];
            v[s] = match n.kind {
                NodeKind::Terminal => x[self.terminal_slot[s].unwrap()],
                NodeKind::Decision => n.children.iter().map(|&c| v[c]).sum(),
                NodeKind::Observation => {
                    n.children.iter().map(|&c| v[c]).sum::<f64>() / n.children.len() as f64
                }
            };
        }
        v
    }

    /// Node values of a pure strategy: 1 exactly on the played part of the tree.
    pub fn pure_node_values(&self, x: &TreeStrategy) -> Vec<bool> {
        let mut v = vec![false; self.nodes.len()];
        for s in (0..self.nodes.len()).rev() {
            let n = &self.nodes[s];
            v[s] = match n.kind {
                NodeKind::Terminal => x.get(self.terminal_slot[s].unwrap()),
                _ => n.children.iter().any(|&c| v[c]),
            };
        }
        v
    }

    /// True iff `v` satisfies the flow equations of the strategy polytope
    /// within `tol`.
    pub fn membership_tol(&self, v: &[f64], tol: f64) -> Result<bool> {
        check_len(self.n(), v.len())?;
        if v.iter().any(|x| !x.is_finite() || *x < -tol || *x > 1.0 + tol) {
            return Ok(false);
        }
        let vals = self.node_values(v);
        for n in &self.nodes {
            if n.kind == NodeKind::Observation {
                let first = vals[n.children[0]];
                if n.children.iter().any(|&c| (vals[c] - first).abs() > tol) {
                    return Ok(false);
                }
            }
        }
        Ok((vals[0] - 1.0).abs() <= tol)
    }

    pub fn membership(&self, v: &[f64]) -> Result<bool> {
        self.membership_tol(v, FLOW_TOL)
    }

    /// Number of distinct tree-form pure strategies (saturating).
    pub fn count_pure_strategies(&self) -> u128 {
        let mut c = vec![0u128; self.nodes.len()];
        for s in (0..self.nodes.len()).rev() {
            let n = &self.nodes[s];
            c[s] = match n.kind {
                NodeKind::Terminal => 1,
                NodeKind::Decision => {
                    n.children.iter().fold(0u128, |acc, &ch| acc.saturating_add(c[ch]))
                }
                NodeKind::Observation => {
                    n.children.iter().fold(1u128, |acc, &ch| acc.saturating_mul(c[ch]))
                }
            };
        }
        c[0]
    }

    pub fn enumerate_pure_strategies(&self) -> Result<Vec<TreeStrategy>> {
        self.enumerate_pure_strategies_capped(DEFAULT_ENUM_CAP)
    }

    /// All distinct tree-form pure strategies, in a deterministic order.
    pub fn enumerate_pure_strategies_capped(&self, cap: u128) -> Result<Vec<TreeStrategy>> {
        let count = self.count_pure_strategies();
        if count > cap {
            return Err(Error::CapExceeded { what: "pure strategy set", size: count, cap });
        }
        let sets = self.enumerate_from(0);
        Ok(sets
            .into_iter()
            .map(|set| {
                let mut bits = vec![0u8; self.n()];
                for z in set {
                    bits[z] = 1;
                }
                TreeStrategy(bits)
            })
            .collect())
    }

    fn enumerate_from(&self, s: usize) -> Vec<Vec<usize>> {
        let n = &self.nodes[s];
        match n.kind {
            NodeKind::Terminal => vec![vec![self.terminal_slot[s].unwrap()]],
            NodeKind::Decision => n.children.iter().flat_map(|&c| self.enumerate_from(c)).collect(),
            NodeKind::Observation => {
                let mut acc: Vec<Vec<usize>> = vec![Vec::new()];
                for &c in &n.children {
                    let sub = self.enumerate_from(c);
                    let mut next = Vec::with_capacity(acc.len() * sub.len());
                    for a in &acc {
                        for b in &sub {
                            let mut m = a.clone();
                            m.extend_from_slice(b);
                            next.push(m);
                        }
                    }
                    acc = next;
                }
                acc
            }
        }
    }

    /// Backward induction: the best pure strategy for `u` and its value. Ties
    /// go to the lowest child index.
    pub fn best_pure_response(&self, u: &[f64]) -> Result<(TreeStrategy, f64)> {
        check_len(self.n(), u.len())?;
        let (value, choice) = self.induct(u, true);
        Ok((self.follow(&choice), value[0]))
    }

    /// Value of the worst pure strategy for `u`.
    pub fn worst_pure_value(&self, u: &[f64]) -> Result<f64> {
        check_len(self.n(), u.len())?;
        Ok(self.induct(u, false).0[0])
    }

    fn induct(&self, u: &[f64], maximize: bool) -> (Vec<f64>, Vec<usize>) {
        let mut value = vec![0.0; self.nodes.len()];
        let mut choice = vec![0usize; self.nodes.len()];
        for s in (0..self.nodes.len()).rev() {
            let n = &self.nodes[s];
            value[s] = match n.kind {
                NodeKind::Terminal => u[self.terminal_slot[s].unwrap()],
                NodeKind::Observation => n.children.iter().map(|&c| value[c]).sum(),
                NodeKind::Decision => {
                    let mut best = 0;
                    for (k, &c) in n.children.iter().enumerate() {
                        let better = if maximize {
                            value[c] > value[n.children[best]]
                        } else {
                            value[c] < value[n.children[best]]
                        };
                        if better {
                            best = k;
                        }
                    }
                    choice[s] = best;
                    value[n.children[best]]
                }
            };
        }
        (value, choice)
    }

    /// The pure strategy playing `choice[j]` at every decision point `j`.
    pub fn follow(&self, choice: &[usize]) -> TreeStrategy {
        let mut bits = vec![0u8; self.n()];
        let mut stack = vec![0usize];
        while let Some(s) = stack.pop() {
            let n = &self.nodes[s];
            match n.kind {
                NodeKind::Terminal => bits[self.terminal_slot[s].unwrap()] = 1,
                NodeKind::Decision => stack.push(n.children[choice[s]]),
                NodeKind::Observation => stack.extend(n.children.iter().copied()),
            }
        }
        TreeStrategy(bits)
    }

    /// Divides `raw` by the largest absolute pure-strategy value so that
    /// |<u, x>| <= 1 on every pure strategy.
    pub fn normalize_utility(&self, raw: &[f64]) -> Result<UtilityVector> {
        check_len(self.n(), raw.len())?;
        if let Some(bad) = raw.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("utility entry {bad}")));
        }
        let hi = self.induct(raw, true).0[0];
        let lo = self.induct(raw, false).0[0];
        let m = hi.abs().max(lo.abs());
        if m == 0.0 {
            return Ok(UtilityVector { payoffs: raw.to_vec(), scale: 1.0 });
        }
        Ok(UtilityVector { payoffs: raw.iter().map(|v| v / m).collect(), scale: m })
    }

    /// The uniform behavioral strategy: every reached decision point splits
    /// its mass evenly.
    pub fn uniform_point(&self) -> Vec<f64> {
        let mut mass = vec![0.0; self.nodes.len()];
        mass[0] = 1.0;
        let mut x = vec![0.0; self.n()];
        for s in 0..self.nodes.len() {
            let n = &self.nodes[s];
            match n.kind {
                NodeKind::Terminal => x[self.terminal_slot[s].unwrap()] = mass[s],
                NodeKind::Decision => {
                    let share = mass[s] / n.children.len() as f64;
                    for &c in &n.children {
                        mass[c] = share;
                    }
                }
                NodeKind::Observation => {
                    for &c in &n.children {
                        mass[c] = mass[s];
                    }
                }
            }
        }
        x
    }

    /// Euclidean diameter of the pure strategy set (desk scale).
    pub fn l2_diameter(&self) -> Result<f64> {
        let pure = self.enumerate_pure_strategies()?;
        let mut d: f64 = 0.0;
        for (i, a) in pure.iter().enumerate() {
            for b in &pure[i + 1..] {
                let dist = a.0.iter().zip(&b.0).filter(|(x, y)| x != y).count();
                d = d.max(dist as f64);
            }
        }
        Ok(d.sqrt())
    }
}
