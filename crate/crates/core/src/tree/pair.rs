//! Trees of coordinate pairs, the level product, and the perfect kernel.

use super::{canonical_ranks, FinTree};
use crate::ordinal::OrdinalNotation;
use crate::seq::Seq;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// A finite set of node pairs `(s, t)` with `|s| = |t|`, prefix-closed in
/// both coordinates at once. May be empty (the perfect kernel of a tree
/// with no splitting structure is empty).
///
/// `frontier_depth`, when present, marks the truncation boundary: nodes of
/// that length stand for nodes with unexplored extensions, and the kernel
/// derivative treats them as having two incompatible ones.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "PairTreeRaw", into = "PairTreeRaw")]
pub struct PairTree {
    nodes: BTreeSet<(Seq, Seq)>,
    frontier_depth: Option<u32>,
}

#[derive(Serialize, Deserialize)]
struct PairTreeRaw {
    nodes: Vec<(Seq, Seq)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    frontier_depth: Option<u32>,
}

impl TryFrom<PairTreeRaw> for PairTree {
    type Error = Error;

    fn try_from(raw: PairTreeRaw) -> Result<Self> {
        PairTree::new(raw.nodes, raw.frontier_depth)
    }
}

impl From<PairTree> for PairTreeRaw {
    fn from(t: PairTree) -> Self {
        PairTreeRaw { nodes: t.nodes.into_iter().collect(), frontier_depth: t.frontier_depth }
    }
}

fn pair_parent(n: &(Seq, Seq)) -> Option<(Seq, Seq)> {
    match (n.0.parent(), n.1.parent()) {
        (Some(a), Some(b)) => Some((a, b)),
        _ => None,
    }
}

impl PairTree {
    pub fn new(
        nodes: impl IntoIterator<Item = (Seq, Seq)>,
        frontier_depth: Option<u32>,
    ) -> Result<Self> {
        let nodes: BTreeSet<(Seq, Seq)> = nodes.into_iter().collect();
        for (s, t) in &nodes {
            if s.len() != t.len() {
                return Err(Error::UnevenPair(format!("({s},{t})")));
            }
            if let Some(p) = pair_parent(&(s.clone(), t.clone())) {
                if !nodes.contains(&p) {
                    return Err(Error::NotPrefixClosed(format!("({},{})", p.0, p.1)));
                }
            }
        }
        Ok(PairTree { nodes, frontier_depth })
    }

    pub fn nodes(&self) -> &BTreeSet<(Seq, Seq)> {
        &self.nodes
    }

    pub fn frontier_depth(&self) -> Option<u32> {
        self.frontier_depth
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, s: &Seq, t: &Seq) -> bool {
        // Avoid a clone-heavy lookup for the common membership question.
        self.nodes.contains(&(s.clone(), t.clone()))
    }

    /// Maximum node length.
    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|(s, _)| s.len()).max().unwrap_or(0)
    }

    /// Second coordinates of maximal-length nodes, deduplicated: the
    /// depth-window witnesses of the projection to the second coordinate.
    pub fn full_depth_seconds(&self, depth: usize) -> BTreeSet<Seq> {
        self.nodes.iter().filter(|(s, _)| s.len() == depth).map(|(_, t)| t.clone()).collect()
    }
}

/// Canonical ranks of a pair tree under coordinatewise extension.
pub fn pair_rank_map(t: &PairTree) -> BTreeMap<(Seq, Seq), OrdinalNotation> {
    canonical_ranks(&t.nodes, pair_parent)
}

/// The level product: all pairs `(s, t)` with `s` in `t0`, `t` in `t1`, and
/// `|s| = |t|`. Its root rank is the minimum of the two root ranks.
pub fn oplus(t0: &FinTree, t1: &FinTree) -> PairTree {
    let mut nodes = BTreeSet::new();
    for s in t0.nodes() {
        for t in t1.nodes() {
            if s.len() == t.len() {
                nodes.insert((s.clone(), t.clone()));
            }
        }
    }
    PairTree { nodes, frontier_depth: None }
}

fn extends(a: &(Seq, Seq), b: &(Seq, Seq)) -> bool {
    b.0.is_prefix_of(&a.0) && b.1.is_prefix_of(&a.1)
}

fn derivative(nodes: &BTreeSet<(Seq, Seq)>, frontier: Option<u32>) -> BTreeSet<(Seq, Seq)> {
    let mut survives: BTreeSet<(Seq, Seq)> = BTreeSet::new();
    for n in nodes {
        if frontier.is_some_and(|d| n.0.len() == d as usize) {
            survives.insert(n.clone());
            continue;
        }
        let exts: Vec<&(Seq, Seq)> = nodes.iter().filter(|e| extends(e, n)).collect();
        let two = exts
            .iter()
            .enumerate()
            .any(|(i, a)| exts[i + 1..].iter().any(|b| !a.1.comparable(&b.1)));
        if two {
            survives.insert(n.clone());
        }
    }
    // A node survives via witnesses only if its ancestors do too; frontier
    // survival is local, so re-impose closure explicitly.
    survives
        .iter()
        .filter(|n| {
            let mut p = pair_parent(n);
            while let Some(q) = p {
                if !survives.contains(&q) {
                    return false;
                }
                p = pair_parent(&q);
            }
            true
        })
        .cloned()
        .collect()
}

/// Iterates the splitting derivative to a fixpoint: a node survives one
/// step when two of its extensions (non-strict, possibly equal length) have
/// incompatible second coordinates, or when it sits on the declared
/// frontier. Returns the fixpoint and the number of derivative steps taken;
/// iteration stops as soon as a step changes nothing or empties the tree.
pub fn perfect_kernel(t: &PairTree) -> (PairTree, u32) {
    let mut cur = t.nodes.clone();
    let mut steps = 0;
    loop {
        let next = derivative(&cur, t.frontier_depth);
        steps += 1;
        if next == cur || next.is_empty() {
            return (PairTree { nodes: next, frontier_depth: t.frontier_depth }, steps);
        }
        cur = next;
    }
}

/// A perfect skeleton of height `k` inside a kernel: binary indices map to
/// kernel nodes so that the two successors of each index go to extensions
/// with incompatible second coordinates. Sibling witnesses are the
/// lexicographically least pair of kernel nodes, so the output is
/// deterministic. Fails when some node cannot be split.
pub fn perfect_skeleton(
    kernel: &PairTree,
    k: u32,
) -> Result<BTreeMap<Seq, (Seq, Seq)>> {
    let root = (Seq::empty(), Seq::empty());
    let mut out: BTreeMap<Seq, (Seq, Seq)> = BTreeMap::new();
    out.insert(Seq::empty(), root);
    let mut level: Vec<Seq> = vec![Seq::empty()];
    for depth in 0..k {
        let mut next = Vec::new();
        for sigma in &level {
            let at = out[sigma].clone();
            let nodes: Vec<&(Seq, Seq)> =
                kernel.nodes.iter().filter(|n| extends(n, &at)).collect();
            let mut found = None;
            'search: for (i, a) in nodes.iter().enumerate() {
                for b in &nodes[i + 1..] {
                    if !a.1.comparable(&b.1) {
                        found = Some(((*a).clone(), (*b).clone()));
                        break 'search;
                    }
                }
            }
            let Some((a, b)) = found else { return Err(Error::SkeletonStuck(depth)) };
            out.insert(sigma.child(0), a);
            out.insert(sigma.child(1), b);
            next.push(sigma.child(0));
            next.push(sigma.child(1));
        }
        level = next;
    }
    Ok(out)
}
