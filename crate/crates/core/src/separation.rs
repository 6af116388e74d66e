//! Scheme restriction, the product tree of two schemes, the constructive
//! separator code for projections certified disjoint at the truncation
//! depth, and the rank-based reduction rule on tree pairs.
//!
//! A scheme here is a [`PairTree`]: nodes `(u, t)` pair a witness branch
//! with a projected point, coordinatewise. The projection consists of the
//! second coordinates that reach full depth.

use crate::code::{BasicClopen, BorelCode, Connective, Point};
use crate::seq::Seq;
use crate::tree::{embeds, FinTree, PairTree};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// A coordinatewise prefix-closed set of triples of equal-length
/// sequences. Houses the common refinement of two schemes.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<(Seq, Seq, Seq)>", into = "Vec<(Seq, Seq, Seq)>")]
pub struct TripleTree {
    nodes: BTreeSet<(Seq, Seq, Seq)>,
}

impl TryFrom<Vec<(Seq, Seq, Seq)>> for TripleTree {
    type Error = Error;

    fn try_from(nodes: Vec<(Seq, Seq, Seq)>) -> Result<Self> {
        TripleTree::new(nodes)
    }
}

impl From<TripleTree> for Vec<(Seq, Seq, Seq)> {
    fn from(t: TripleTree) -> Self {
        t.nodes.into_iter().collect()
    }
}

fn triple_parent(n: &(Seq, Seq, Seq)) -> Option<(Seq, Seq, Seq)> {
    Some((n.0.parent()?, n.1.parent()?, n.2.parent()?))
}

impl TripleTree {
    pub fn new(nodes: impl IntoIterator<Item = (Seq, Seq, Seq)>) -> Result<Self> {
        let nodes: BTreeSet<(Seq, Seq, Seq)> = nodes.into_iter().collect();
        if !nodes.contains(&(Seq::empty(), Seq::empty(), Seq::empty())) {
            return Err(Error::EmptyTree);
        }
        for n in &nodes {
            if n.0.len() != n.1.len() || n.0.len() != n.2.len() {
                return Err(Error::UnevenPair(format!("({},{},{})", n.0, n.1, n.2)));
            }
            if let Some(p) = triple_parent(n) {
                if !nodes.contains(&p) {
                    return Err(Error::NotPrefixClosed(format!("({},{},{})", p.0, p.1, p.2)));
                }
            }
        }
        Ok(TripleTree { nodes })
    }

    pub fn nodes(&self) -> &BTreeSet<(Seq, Seq, Seq)> {
        &self.nodes
    }

    pub fn contains(&self, u: &Seq, v: &Seq, t: &Seq) -> bool {
        // Equal lengths are an invariant, so a cheap pre-check avoids the
        // clone on most misses.
        u.len() == v.len()
            && u.len() == t.len()
            && self.nodes.contains(&(u.clone(), v.clone(), t.clone()))
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.0.len()).max().unwrap_or(0)
    }
}

/// The restriction of a scheme to the nodes whose coordinates are
/// comparable with `s` and `t` respectively. Comparability survives taking
/// prefixes, so the result is again a scheme.
pub fn restrict(tree: &PairTree, s: &Seq, t: &Seq) -> PairTree {
    let kept = tree
        .nodes()
        .iter()
        .filter(|(a, b)| a.comparable(s) && b.comparable(t))
        .cloned();
    PairTree::new(kept, tree.frontier_depth()).expect("restriction preserves the invariants")
}

/// The common refinement: triples `(u, v, t)` with `(u, t)` in the first
/// scheme and `(v, t)` in the second, together with its greatest node
/// length. The pair of schemes admits a depth-`d` common projected point
/// exactly when that length reaches `d`.
pub fn product_tree(a: &PairTree, b: &PairTree) -> (TripleTree, usize) {
    let mut nodes = BTreeSet::new();
    for (u, t) in a.nodes() {
        for (v, t2) in b.nodes() {
            if t == t2 {
                nodes.insert((u.clone(), v.clone(), t.clone()));
            }
        }
    }
    let tree = TripleTree::new(nodes).expect("roots pair up and prefixes survive");
    let alive = tree.depth();
    (tree, alive)
}

/// The separator and the evidence it was checked against.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeparationReport {
    /// Greatest length in the product tree; separation is certified only
    /// relative to the truncation depth, not for any untruncated scheme.
    pub alive_depth: usize,
    pub code: BorelCode,
    /// Projected points of the first scheme reaching full depth, tail 0.
    pub witnesses_a: Vec<Point>,
    /// Likewise for the second scheme.
    pub witnesses_b: Vec<Point>,
}

/// Builds the separating code for two schemes whose product tree dies
/// before the truncation depth.
///
/// The recursion runs over the product tree extended by one ring of
/// just-out children: terminal triples contribute the cylinder of their
/// projected coordinate when the first scheme is still alive there and the
/// empty set otherwise, and each interior triple combines its children as
/// a union over projection moves of intersections over second-scheme moves
/// of unions over first-scheme moves.
pub fn kleene_separate(a: &PairTree, b: &PairTree) -> Result<SeparationReport> {
    let depth = a.depth().max(b.depth());
    let (product, alive_depth) = product_tree(a, b);
    if depth == 0 {
        return Err(Error::InvalidScheme(
            "schemes of depth zero cannot certify disjoint projections".into(),
        ));
    }
    if alive_depth >= depth {
        return Err(Error::InvalidScheme(format!(
            "product tree is alive at depth {alive_depth}, not below {depth}"
        )));
    }
    let branching = a
        .nodes()
        .iter()
        .chain(b.nodes().iter())
        .flat_map(|(u, t)| u.0.iter().chain(t.0.iter()))
        .max()
        .map_or(1, |&m| m + 1);

    fn build(
        a: &PairTree,
        product: &TripleTree,
        u: &Seq,
        v: &Seq,
        t: &Seq,
        branching: u32,
    ) -> BorelCode {
        if !product.contains(u, v, t) {
            // Just out: one of the schemes died on the last step.
            return if a.contains(u, t) {
                BorelCode::basic(BasicClopen::Cyl(t.clone()))
            } else {
                BorelCode::basic(BasicClopen::Empty)
            };
        }
        let unions = (0..branching)
            .map(|k| {
                let meets = (0..branching)
                    .map(|m| {
                        let inner = (0..branching)
                            .map(|n| {
                                build(a, product, &u.child(n), &v.child(m), &t.child(k), branching)
                            })
                            .collect();
                        BorelCode::connect(Connective::Union, inner)
                    })
                    .collect();
                BorelCode::connect(Connective::Intersection, meets)
            })
            .collect();
        BorelCode::connect(Connective::Union, unions)
    }

    let code = build(a, &product, &Seq::empty(), &Seq::empty(), &Seq::empty(), branching);
    let as_points = |seconds: BTreeSet<Seq>| {
        seconds.into_iter().map(|t| Point::new(t.0, 0)).collect()
    };
    Ok(SeparationReport {
        alive_depth,
        code,
        witnesses_a: as_points(a.full_depth_seconds(depth)),
        witnesses_b: as_points(b.full_depth_seconds(depth)),
    })
}

/// Which member of a pair the reduction rule keeps.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    A,
    B,
}

/// The reduction rule on a pair of finite trees: keep side A when the
/// second tree does not strictly embed into the first, otherwise side B
/// (whose defining condition, failure of the nonstrict embedding the other
/// way, must then hold). Equivalent to taking the side of smaller root
/// rank, ties to A.
pub fn reduce_pair(ta: &FinTree, tb: &FinTree) -> Side {
    if !embeds(tb, ta, true).0 {
        Side::A
    } else {
        Side::B
    }
}
