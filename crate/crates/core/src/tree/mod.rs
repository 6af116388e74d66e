//! Finite well-founded trees on sequences of naturals.
//!
//! A tree is a prefix-closed finite set of [`Seq`] nodes containing the
//! root. The canonical rank of a node is `sup { rank(child) + 1 }`, which
//! for finite trees is the successor of the maximum child rank; leaves have
//! rank zero, and the root rank equals the height of the tree.
//!
//! Tree embeddings are maps preserving the proper-prefix relation. They
//! need not be injective. The search here considers maps sending children
//! to children below the image of the root, which is complete: an embedding
//! exists in that restricted form exactly when one exists at all, and
//! existence is equivalent to a rank inequality (`<=` for embeddings fixing
//! the root, `<` for embeddings moving the root strictly down).

mod pair;
mod scale;
mod trunc;

pub use pair::{oplus, pair_rank_map, perfect_kernel, perfect_skeleton, PairTree};
pub use scale::{
    canonical_listing, listing_covering, normal_form_tree, partial_rank_tree, scale_tuple,
    NormalFormTree, RankValue, ScaleTuple,
};
pub use trunc::{fuse, leq_n, BinTreeTrunc};

use crate::ordinal::{ord_rank_sup, OrdinalNotation};
use crate::seq::Seq;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// A finite prefix-closed set of sequences, containing the root.
///
/// Serialized as an array of node arrays, in shortlex order.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<Seq>", into = "Vec<Seq>")]
pub struct FinTree {
    nodes: BTreeSet<Seq>,
}

impl TryFrom<Vec<Seq>> for FinTree {
    type Error = Error;

    fn try_from(nodes: Vec<Seq>) -> Result<Self> {
        FinTree::new(nodes)
    }
}

impl From<FinTree> for Vec<Seq> {
    fn from(t: FinTree) -> Self {
        t.nodes.into_iter().collect()
    }
}

impl FinTree {
    /// Validates that the node set is nonempty and prefix-closed.
    pub fn new(nodes: impl IntoIterator<Item = Seq>) -> Result<Self> {
        let nodes: BTreeSet<Seq> = nodes.into_iter().collect();
        if nodes.is_empty() {
            return Err(Error::EmptyTree);
        }
        for n in &nodes {
            if let Some(p) = n.parent() {
                if !nodes.contains(&p) {
                    return Err(Error::NotPrefixClosed(format!("{p}")));
                }
            }
        }
        Ok(FinTree { nodes })
    }

    /// Builds the smallest tree containing the given nodes.
    pub fn prefix_closure(nodes: impl IntoIterator<Item = Seq>) -> Self {
        let mut all = BTreeSet::new();
        all.insert(Seq::empty());
        for n in nodes {
            for i in 0..=n.len() {
                all.insert(n.truncate(i));
            }
        }
        FinTree { nodes: all }
    }

    /// The tree with just the root.
    pub fn root_only() -> Self {
        FinTree::prefix_closure(std::iter::empty())
    }

    /// The chain `<>, <0>, <0,0>, ...` with `n` edges.
    pub fn chain(n: usize) -> Self {
        FinTree::prefix_closure([Seq(vec![0; n])])
    }

    /// The full `b`-ary tree of the given depth.
    pub fn full(branching: u32, depth: u32) -> Self {
        let mut nodes = vec![Seq::empty()];
        let mut level = vec![Seq::empty()];
        for _ in 0..depth {
            let mut next = Vec::new();
            for s in &level {
                for n in 0..branching {
                    next.push(s.child(n));
                }
            }
            nodes.extend(next.iter().cloned());
            level = next;
        }
        FinTree { nodes: nodes.into_iter().collect() }
    }

    pub fn nodes(&self) -> &BTreeSet<Seq> {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, s: &Seq) -> bool {
        self.nodes.contains(s)
    }

    /// Maximum node length.
    pub fn depth(&self) -> usize {
        self.nodes.iter().map(Seq::len).max().unwrap_or(0)
    }

    /// Children of `s` in shortlex (hence numeric) order.
    pub fn children(&self, s: &Seq) -> Vec<Seq> {
        self.nodes
            .iter()
            .filter(|t| t.len() == s.len() + 1 && s.is_prefix_of(t))
            .cloned()
            .collect()
    }

    /// The canonical rank of every node: leaves get zero, internal nodes the
    /// successor of the maximum child rank.
    pub fn rank_map(&self) -> BTreeMap<Seq, OrdinalNotation> {
        canonical_ranks(&self.nodes, |s| s.parent())
    }

    pub fn root_rank(&self) -> OrdinalNotation {
        self.rank_map().remove(&Seq::empty()).expect("root is present")
    }
}

/// Ranks for any length-graded node type: `parent` must shorten nodes and
/// the node order must be length-first, so reverse iteration visits children
/// before parents.
pub(crate) fn canonical_ranks<N: Ord + Clone>(
    nodes: &BTreeSet<N>,
    parent: impl Fn(&N) -> Option<N>,
) -> BTreeMap<N, OrdinalNotation> {
    let mut child_ranks: BTreeMap<N, Vec<OrdinalNotation>> = BTreeMap::new();
    let mut out = BTreeMap::new();
    for n in nodes.iter().rev() {
        let rank = ord_rank_sup(child_ranks.get(n).map_or(&[][..], Vec::as_slice));
        if let Some(p) = parent(n) {
            if nodes.contains(&p) {
                child_ranks.entry(p).or_default().push(rank.clone());
            }
        }
        out.insert(n.clone(), rank);
    }
    out
}

/// Whether `t` embeds into `t_hat` by a proper-prefix-preserving map, with
/// the lexicographically least witness (reading the map in shortlex order of
/// the domain). `strict` requires the root to move to a nonroot node.
///
/// The witness maps each child one level below the image of its parent;
/// within that family the backtracking search is exhaustive and memoized.
pub fn embeds(
    t: &FinTree,
    t_hat: &FinTree,
    strict: bool,
) -> (bool, Option<BTreeMap<Seq, Seq>>) {
    let dom: Vec<Seq> = t.nodes.iter().cloned().collect();
    let cod: Vec<Seq> = t_hat.nodes.iter().cloned().collect();
    let index = |v: &[Seq], s: &Seq| v.binary_search(s).expect("node present");
    let kids = |v: &[Seq], set: &BTreeSet<Seq>| -> Vec<Vec<usize>> {
        v.iter()
            .map(|s| {
                set.iter()
                    .filter(|c| c.len() == s.len() + 1 && s.is_prefix_of(c))
                    .map(|c| index(v, c))
                    .collect()
            })
            .collect()
    };
    let dkids = kids(&dom, &t.nodes);
    let ckids = kids(&cod, &t_hat.nodes);
    let mut memo = vec![-1i8; dom.len() * cod.len()];

    fn can(
        i: usize,
        j: usize,
        dkids: &[Vec<usize>],
        ckids: &[Vec<usize>],
        ncod: usize,
        memo: &mut [i8],
    ) -> bool {
        let key = i * ncod + j;
        if memo[key] >= 0 {
            return memo[key] == 1;
        }
        let ok = dkids[i]
            .iter()
            .all(|&c| ckids[j].iter().any(|&d| can(c, d, dkids, ckids, ncod, memo)));
        memo[key] = ok as i8;
        ok
    }

    let root_d = index(&dom, &Seq::empty());
    let root_c = index(&cod, &Seq::empty());
    let base = if strict {
        // Least nonroot image for the root, in shortlex order.
        (0..cod.len())
            .filter(|&j| j != root_c)
            .find(|&j| can(root_d, j, &dkids, &ckids, cod.len(), &mut memo))
    } else if can(root_d, root_c, &dkids, &ckids, cod.len(), &mut memo) {
        Some(root_c)
    } else {
        None
    };
    let Some(base) = base else { return (false, None) };

    let mut witness: BTreeMap<Seq, Seq> = BTreeMap::new();
    let mut assigned: BTreeMap<usize, usize> = BTreeMap::new();
    witness.insert(Seq::empty(), cod[base].clone());
    assigned.insert(root_d, base);
    for (i, s) in dom.iter().enumerate() {
        if i == root_d {
            continue;
        }
        let p = index(&dom, &s.parent().expect("nonroot"));
        let pj = assigned[&p];
        let d = ckids[pj]
            .iter()
            .copied()
            .find(|&d| can(i, d, &dkids, &ckids, cod.len(), &mut memo))
            .expect("a child image exists when the parent image was chosen");
        assigned.insert(i, d);
        witness.insert(s.clone(), cod[d].clone());
    }
    (true, Some(witness))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::ord_cmp;
    use crate::seq;
    use proptest::prelude::*;
    use std::cmp::Ordering;

    fn nat(n: u64) -> OrdinalNotation {
        OrdinalNotation::from_nat(n)
    }

    #[test]
    fn rank_examples() {
        assert_eq!(FinTree::root_only().root_rank(), nat(0));
        let t = FinTree::prefix_closure([seq![0], seq![1]]);
        assert_eq!(t.root_rank(), nat(1));
        let t = FinTree::prefix_closure([seq![0, 0], seq![1]]);
        let ranks = t.rank_map();
        assert_eq!(ranks[&Seq::empty()], nat(2));
        assert_eq!(ranks[&seq![0]], nat(1));
        assert_eq!(ranks[&seq![1]], nat(0));
        assert_eq!(ranks[&seq![0, 0]], nat(0));
    }

    #[test]
    fn chain_rank_is_its_length() {
        for n in 0..8 {
            assert_eq!(FinTree::chain(n).root_rank(), nat(n as u64));
        }
    }

    #[test]
    fn non_prefix_closed_input_is_rejected() {
        assert!(FinTree::new([Seq::empty(), seq![0, 0]]).is_err());
        assert!(FinTree::new([seq![0]]).is_err());
        assert!(FinTree::new([]).is_err());
    }

    #[test]
    fn embed_examples() {
        // Chain into itself, nonstrict: identity is the least witness.
        let c1 = FinTree::chain(1);
        let (ok, w) = embeds(&c1, &c1, false);
        assert!(ok);
        let w = w.unwrap();
        assert_eq!(w[&Seq::empty()], Seq::empty());
        assert_eq!(w[&seq![0]], seq![0]);

        // Strictly into a longer chain: root moves to <0>.
        let c2 = FinTree::chain(2);
        let (ok, w) = embeds(&c1, &c2, true);
        assert!(ok);
        let w = w.unwrap();
        assert_eq!(w[&Seq::empty()], seq![0]);
        assert_eq!(w[&seq![0]], seq![0, 0]);

        // A chain of rank 2 does not embed into a rank-1 tree.
        let (ok, w) = embeds(&c2, &FinTree::full(2, 1), false);
        assert!(!ok);
        assert!(w.is_none());
    }

    #[test]
    fn embedding_does_not_require_injectivity() {
        // Two incomparable leaves can share an image.
        let t = FinTree::prefix_closure([seq![0], seq![1]]);
        let chain = FinTree::chain(1);
        let (ok, w) = embeds(&t, &chain, false);
        assert!(ok);
        let w = w.unwrap();
        assert_eq!(w[&seq![0]], seq![0]);
        assert_eq!(w[&seq![1]], seq![0]);
    }

    fn check_witness(t: &FinTree, w: &BTreeMap<Seq, Seq>) {
        for a in t.nodes() {
            for b in t.nodes() {
                if a.is_proper_prefix_of(b) {
                    assert!(w[a].is_proper_prefix_of(&w[b]), "{a}->{} {b}->{}", w[a], w[b]);
                }
            }
        }
    }

    #[test]
    fn witnesses_preserve_proper_prefixes() {
        let t = FinTree::prefix_closure([seq![0, 0], seq![1]]);
        let big = FinTree::full(2, 3);
        for strict in [false, true] {
            let (ok, w) = embeds(&t, &big, strict);
            assert!(ok);
            check_witness(&t, &w.unwrap());
        }
    }

    #[test]
    fn embedding_matches_rank_comparison_on_small_pairs() {
        let trees: Vec<FinTree> = vec![
            FinTree::root_only(),
            FinTree::chain(1),
            FinTree::chain(2),
            FinTree::chain(3),
            FinTree::full(2, 1),
            FinTree::full(2, 2),
            FinTree::prefix_closure([seq![0, 0], seq![1]]),
            FinTree::prefix_closure([seq![0], seq![1], seq![2]]),
        ];
        for a in &trees {
            for b in &trees {
                let (ra, rb) = (a.root_rank(), b.root_rank());
                assert_eq!(embeds(a, b, false).0, ord_cmp(&ra, &rb) != Ordering::Greater);
                assert_eq!(embeds(a, b, true).0, ord_cmp(&ra, &rb) == Ordering::Less);
            }
        }
    }

    proptest! {
        #[test]
        fn prop_rank_at_root_is_height(paths in proptest::collection::vec(
            proptest::collection::vec(0u32..3, 0..5), 0..8)) {
            let t = FinTree::prefix_closure(paths.into_iter().map(Seq));
            let height = t.nodes().iter().map(Seq::len).max().unwrap();
            prop_assert_eq!(t.root_rank(), nat(height as u64));
        }

        #[test]
        fn prop_rank_strictly_decreases_along_children(paths in proptest::collection::vec(
            proptest::collection::vec(0u32..3, 0..5), 0..8)) {
            let t = FinTree::prefix_closure(paths.into_iter().map(Seq));
            let ranks = t.rank_map();
            for s in t.nodes() {
                for c in t.children(s) {
                    prop_assert!(ranks[&c] < ranks[s]);
                }
            }
        }
    }
}
