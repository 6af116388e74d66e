//! Perfect-tree truncations: binary trees cut at a fixed depth, splitting
//! structure, and fusion of descending chains.

use crate::seq::Seq;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// A binary tree truncated at `depth`: prefix-closed, rooted, and with
/// every node extendable to a node of exactly that length, so all maximal
/// nodes sit on the boundary.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "BinTreeTruncRaw", into = "BinTreeTruncRaw")]
pub struct BinTreeTrunc {
    nodes: BTreeSet<Seq>,
    depth: u32,
}

#[derive(Serialize, Deserialize)]
struct BinTreeTruncRaw {
    nodes: Vec<Seq>,
    depth: u32,
}

impl TryFrom<BinTreeTruncRaw> for BinTreeTrunc {
    type Error = Error;

    fn try_from(raw: BinTreeTruncRaw) -> Result<Self> {
        BinTreeTrunc::new(raw.nodes, raw.depth)
    }
}

impl From<BinTreeTrunc> for BinTreeTruncRaw {
    fn from(t: BinTreeTrunc) -> Self {
        BinTreeTruncRaw { nodes: t.nodes.into_iter().collect(), depth: t.depth }
    }
}

impl BinTreeTrunc {
    pub fn new(nodes: impl IntoIterator<Item = Seq>, depth: u32) -> Result<Self> {
        let nodes: BTreeSet<Seq> = nodes.into_iter().collect();
        if !nodes.contains(&Seq::empty()) {
            return Err(Error::InvalidTruncation("missing root".into()));
        }
        for n in &nodes {
            if n.0.iter().any(|&e| e > 1) {
                return Err(Error::InvalidTruncation(format!("non-binary entry in {n}")));
            }
            if n.len() > depth as usize {
                return Err(Error::InvalidTruncation(format!("{n} is deeper than {depth}")));
            }
            if let Some(p) = n.parent() {
                if !nodes.contains(&p) {
                    return Err(Error::NotPrefixClosed(format!("{p}")));
                }
            }
        }
        // Every node must reach the boundary; walk down from the deep end.
        let mut reaches: BTreeSet<&Seq> = BTreeSet::new();
        for n in nodes.iter().rev() {
            if n.len() == depth as usize
                || (0..2).any(|b| reaches.contains(&n.child(b)))
            {
                reaches.insert(n);
            } else {
                return Err(Error::InvalidTruncation(format!(
                    "{n} has no extension of length {depth}"
                )));
            }
        }
        Ok(BinTreeTrunc { nodes, depth })
    }

    /// The full binary truncation of the given depth.
    pub fn full(depth: u32) -> Self {
        let nodes = super::FinTree::full(2, depth).nodes().clone();
        BinTreeTrunc { nodes, depth }
    }

    pub fn nodes(&self) -> &BTreeSet<Seq> {
        &self.nodes
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn contains(&self, s: &Seq) -> bool {
        self.nodes.contains(s)
    }

    /// Both immediate extensions present.
    pub fn is_splitting(&self, s: &Seq) -> bool {
        self.nodes.contains(&s.child(0)) && self.nodes.contains(&s.child(1))
    }

    /// The shallowest splitting node extending `u`, following the unique
    /// path while nodes have a single child. `None` when the walk leaves
    /// the tree or hits the boundary without splitting.
    fn first_split_from(&self, u: &Seq) -> Option<Seq> {
        if !self.nodes.contains(u) {
            return None;
        }
        let mut cur = u.clone();
        loop {
            if self.is_splitting(&cur) {
                return Some(cur);
            }
            let next = (0..2).map(|b| cur.child(b)).find(|c| self.nodes.contains(c))?;
            cur = next;
        }
    }

    /// The splitting node indexed by a binary address in the natural
    /// correspondence: the empty address names the first splitting node,
    /// and address `sigma + [b]` names the first splitting node beyond the
    /// `b`-side successor of the node at `sigma`.
    pub fn split_node(&self, sigma: &Seq) -> Option<Seq> {
        let mut cur = self.first_split_from(&Seq::empty())?;
        for &b in &sigma.0 {
            cur = self.first_split_from(&cur.child(b))?;
        }
        Some(cur)
    }
}

/// Whether `t <= t_prime` as truncations while the first `2^n - 1`
/// splitting nodes of `t_prime` (binary addresses of length below `n`)
/// survive as splitting nodes of `t`. Fails when `t_prime` does not have
/// that much splitting structure to check.
pub fn leq_n(t: &BinTreeTrunc, t_prime: &BinTreeTrunc, n: u32) -> Result<bool> {
    // All binary addresses of length below n, shortlex so that erroring is
    // deterministic as well.
    let mut addresses: Vec<Seq> = Vec::new();
    if n > 0 {
        addresses.push(Seq::empty());
        for len in 1..n {
            let mut next = Vec::new();
            for a in addresses.iter().filter(|a| a.len() == len as usize - 1) {
                next.push(a.child(0));
                next.push(a.child(1));
            }
            addresses.extend(next);
        }
    }
    let mut required = Vec::new();
    for a in &addresses {
        match t_prime.split_node(a) {
            Some(s) => required.push(s),
            None => {
                return Err(Error::SplittingExhausted(format!(
                    "no splitting node at address {a}"
                )))
            }
        }
    }
    if !t.nodes.is_subset(&t_prime.nodes) {
        return Ok(false);
    }
    Ok(required.iter().all(|s| t.contains(s) && t.is_splitting(s)))
}

/// Intersects a chain with `chain[i+1] <= chain[i]` at strength `i` and
/// re-truncates to the minimum depth. The result still relates to every
/// link at its strength.
pub fn fuse(chain: &[BinTreeTrunc]) -> Result<BinTreeTrunc> {
    if chain.is_empty() {
        return Err(Error::FusionChain("empty chain".into()));
    }
    for i in 0..chain.len() - 1 {
        match leq_n(&chain[i + 1], &chain[i], i as u32) {
            Ok(true) => {}
            Ok(false) => {
                return Err(Error::FusionChain(format!("link {i} is not a <=_{i} extension")))
            }
            Err(e) => return Err(Error::FusionChain(format!("link {i}: {e}"))),
        }
    }
    let depth = chain.iter().map(BinTreeTrunc::depth).min().expect("nonempty");
    let mut inter: BTreeSet<Seq> = chain[0]
        .nodes
        .iter()
        .filter(|s| s.len() <= depth as usize)
        .cloned()
        .collect();
    for t in &chain[1..] {
        inter.retain(|s| t.contains(s));
    }
    // Drop nodes stranded above the new boundary.
    let mut reaches: BTreeSet<Seq> = BTreeSet::new();
    for n in inter.iter().rev() {
        if n.len() == depth as usize || (0..2).any(|b| reaches.contains(&n.child(b))) {
            reaches.insert(n.clone());
        }
    }
    BinTreeTrunc::new(reaches, depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq;

    /// Depth-3 full tree with the whole subtree above one node removed.
    fn full3_minus(node: Seq) -> BinTreeTrunc {
        let nodes = BinTreeTrunc::full(3)
            .nodes()
            .iter()
            .filter(|s| !node.is_prefix_of(s))
            .cloned()
            .collect::<Vec<_>>();
        BinTreeTrunc::new(nodes, 3).unwrap()
    }

    #[test]
    fn validation_rejects_stranded_nodes() {
        // <1> is maximal at length 1 in a depth-2 truncation.
        let nodes = vec![Seq::empty(), seq![0], seq![1], seq![0, 0]];
        assert!(BinTreeTrunc::new(nodes, 2).is_err());
        let nodes = vec![Seq::empty(), seq![2]];
        assert!(BinTreeTrunc::new(nodes, 1).is_err());
    }

    #[test]
    fn split_nodes_of_the_full_tree() {
        let t = BinTreeTrunc::full(3);
        assert_eq!(t.split_node(&Seq::empty()), Some(Seq::empty()));
        assert_eq!(t.split_node(&seq![0]), Some(seq![0]));
        assert_eq!(t.split_node(&seq![1, 1]), Some(seq![1, 1]));
        assert_eq!(t.split_node(&seq![1, 1, 1]), None);
    }

    #[test]
    fn split_nodes_skip_non_splitting_stems() {
        let t = full3_minus(seq![1, 1]);
        // Above <1> only the 0 side continues, so the next split is <1,0>.
        assert_eq!(t.split_node(&seq![1]), Some(seq![1, 0]));
    }

    #[test]
    fn leq_reflexive_within_available_structure() {
        let t = BinTreeTrunc::full(3);
        for n in 0..=3 {
            assert!(leq_n(&t, &t, n).unwrap());
        }
        assert!(leq_n(&t, &t, 4).is_err());
    }

    #[test]
    fn leq_examples() {
        let full = BinTreeTrunc::full(3);
        let t = full3_minus(seq![1, 1]);
        // The root split survives.
        assert!(leq_n(&t, &full, 1).unwrap());
        // The address-<1> split of the full tree is <1>, which no longer
        // splits in t.
        assert!(!leq_n(&t, &full, 2).unwrap());
        // Not a subset: unrelated trees.
        let other = full3_minus(seq![0, 0]);
        assert!(!leq_n(&t, &other, 1).unwrap());
    }

    #[test]
    fn fuse_of_a_constant_chain_is_the_tree() {
        let t = BinTreeTrunc::full(3);
        let got = fuse(&[t.clone(), t.clone(), t.clone()]).unwrap();
        assert_eq!(got, t);
    }

    #[test]
    fn fuse_respects_every_link_strength() {
        let full = BinTreeTrunc::full(3);
        let t1 = full3_minus(seq![1, 1, 1]);
        // Additionally prune the subtree above <0,1>; the root split and the
        // first side splits survive.
        let t2 = {
            let nodes: Vec<Seq> = t1
                .nodes()
                .iter()
                .filter(|s| !seq![0, 1].is_prefix_of(s))
                .cloned()
                .collect();
            BinTreeTrunc::new(nodes, 3).unwrap()
        };
        let chain = vec![full.clone(), t1.clone(), t2.clone()];
        let fused = fuse(&chain).unwrap();
        for (i, link) in chain.iter().enumerate() {
            assert!(leq_n(&fused, link, i as u32).unwrap(), "strength {i}");
        }
    }

    #[test]
    fn fuse_rejects_a_broken_link() {
        let full = BinTreeTrunc::full(3);
        let degenerate = full3_minus(seq![1]);
        // Losing the root split is fine at strength 0 but fatal at 1.
        assert!(fuse(&[full.clone(), degenerate.clone()]).is_ok());
        assert!(fuse(&[full.clone(), full.clone(), degenerate]).is_err());
        assert!(fuse(&[]).is_err());
    }

    #[test]
    fn fuse_retruncates_to_the_minimum_depth() {
        let d3 = BinTreeTrunc::full(3);
        let d2 = BinTreeTrunc::full(2);
        let got = fuse(&[d3, d2]).unwrap();
        assert_eq!(got.depth(), 2);
        assert_eq!(got, BinTreeTrunc::full(2));
    }
}
