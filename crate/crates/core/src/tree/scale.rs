//! Scales, partial rank functions, and normal-form trees.
//!
//! All three need one fixed enumeration `s_0, s_1, ...` of finite sequences
//! with `s_0` empty and `|s_i| <= i`. The enumeration here grades sequences
//! by length plus entry sum and lists each grade in shortlex order; grade
//! `g` starts at index `2^(g-1)`, so the length bound holds, and every
//! sequence appears eventually.

use super::FinTree;
use crate::code::Point;
use crate::ordinal::OrdinalNotation;
use crate::seq::Seq;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeSet;

/// A rank slot in a scale tuple: either the canonical rank of a tree node,
/// or the below-everything marker used off the tree. The marker is not an
/// ordinal notation; it is a tagged value ordered before all of them.
///
/// Serialized as `-1` for the marker and as a notation otherwise.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum RankValue {
    Absent,
    Ranked(OrdinalNotation),
}

impl Serialize for RankValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            RankValue::Absent => s.serialize_i64(-1),
            RankValue::Ranked(o) => o.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for RankValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Marker(i64),
            Notation(OrdinalNotation),
        }
        match Raw::deserialize(d)? {
            Raw::Marker(-1) => Ok(RankValue::Absent),
            Raw::Marker(n) => Err(D::Error::custom(format!("bad rank marker {n}"))),
            Raw::Notation(o) => Ok(RankValue::Ranked(o)),
        }
    }
}

/// An alternating tuple `(r(s_0), x(0), ..., r(s_n), x(n))`. Comparison is
/// lexicographic left to right, which makes tuple prefixes coarsenings:
/// a strict increase at stage `i` persists at every later stage.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct ScaleTuple(pub Vec<(RankValue, u32)>);

impl Serialize for ScaleTuple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.0.len() * 2))?;
        for (r, x) in &self.0 {
            seq.serialize_element(r)?;
            seq.serialize_element(x)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for ScaleTuple {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Slot {
            Value(u32),
            Rank(RankValue),
        }
        let slots = Vec::<Slot>::deserialize(d)?;
        if slots.len() % 2 != 0 {
            return Err(D::Error::custom("scale tuple must have even length"));
        }
        let mut out = Vec::with_capacity(slots.len() / 2);
        for pair in slots.chunks(2) {
            match pair {
                [Slot::Rank(r), Slot::Value(x)] => out.push((r.clone(), *x)),
                [Slot::Value(v), Slot::Value(x)] => {
                    // A bare natural in a rank slot is the notation for it.
                    out.push((RankValue::Ranked(OrdinalNotation::from_nat(*v as u64)), *x))
                }
                _ => return Err(D::Error::custom("scale tuple slots out of order")),
            }
        }
        Ok(ScaleTuple(out))
    }
}

fn push_compositions(len: u32, sum: u32, prefix: &mut Vec<u32>, out: &mut Vec<Seq>) {
    if len == 0 {
        if sum == 0 {
            out.push(Seq(prefix.clone()));
        }
        return;
    }
    for v in 0..=sum {
        prefix.push(v);
        push_compositions(len - 1, sum - v, prefix, out);
        prefix.pop();
    }
}

/// The first `count` sequences of the canonical enumeration.
pub fn canonical_listing(count: usize) -> Vec<Seq> {
    let mut out = vec![Seq::empty()];
    let mut grade = 1u32;
    while out.len() < count {
        for len in 1..=grade {
            push_compositions(len, grade - len, &mut Vec::new(), &mut out);
        }
        grade += 1;
    }
    out.truncate(count);
    out
}

/// The least `n` such that the first `n` listed sequences include every node
/// of `t`.
pub fn listing_covering(t: &FinTree) -> usize {
    let max_grade =
        t.nodes().iter().map(|s| s.len() as u32 + s.0.iter().sum::<u32>()).max().unwrap_or(0);
    let mut listing = vec![Seq::empty()];
    for grade in 1..=max_grade {
        for len in 1..=grade {
            push_compositions(len, grade - len, &mut Vec::new(), &mut listing);
        }
    }
    let last = t
        .nodes()
        .iter()
        .map(|s| listing.iter().position(|l| l == s).expect("grade bound covers the node"))
        .max()
        .expect("tree is nonempty");
    last + 1
}

/// The stage-`n` scale tuple of `x` over `t`: canonical ranks at the listed
/// sequences, interleaved with the first `n + 1` entries of `x`. Sequences
/// off the tree contribute the below-everything marker.
pub fn scale_tuple(t: &FinTree, x: &Point, n: usize) -> ScaleTuple {
    let listing = canonical_listing(n + 1);
    let ranks = t.rank_map();
    ScaleTuple(
        listing
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let r = match ranks.get(s) {
                    Some(o) => RankValue::Ranked(o.clone()),
                    None => RankValue::Absent,
                };
                (r, x.at(i))
            })
            .collect(),
    )
}

/// All maps `r : {0..n-1} -> {0..bound}` (inclusive) that strictly descend
/// along listed tree nodes: whenever `s_i` and `s_j` are both in `t` and
/// `s_i` is a proper prefix of `s_j`, `r(i) > r(j)`. Results are in
/// lexicographic order.
pub fn partial_rank_tree(t: &FinTree, n: usize, bound: u32) -> Vec<Vec<u32>> {
    let listing = canonical_listing(n);
    // Extending a sequence strictly raises its grade, so prefixes always
    // appear earlier in the listing and constraints point backwards.
    let mut constraints: Vec<Vec<usize>> = vec![Vec::new(); n];
    for j in 0..n {
        if !t.contains(&listing[j]) {
            continue;
        }
        for i in 0..j {
            if t.contains(&listing[i]) && listing[i].is_proper_prefix_of(&listing[j]) {
                constraints[j].push(i);
            }
        }
    }
    let mut out = Vec::new();
    let mut cur: Vec<u32> = Vec::with_capacity(n);
    fn go(
        j: usize,
        n: usize,
        bound: u32,
        constraints: &[Vec<usize>],
        cur: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if j == n {
            out.push(cur.clone());
            return;
        }
        'next: for v in 0..=bound {
            for &i in &constraints[j] {
                if cur[i] <= v {
                    continue 'next;
                }
            }
            cur.push(v);
            go(j + 1, n, bound, constraints, cur, out);
            cur.pop();
        }
    }
    go(0, n, bound, &constraints, &mut cur, &mut out);
    out
}

/// The tree of sequences a relation accepts along a point, to a depth.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum NormalFormTree {
    /// The relation does not accept the empty pair, so not even the root
    /// survives; there is no valid tree to return.
    Rejected,
    Accepted(FinTree),
}

impl NormalFormTree {
    pub fn is_rejected(&self) -> bool {
        matches!(self, NormalFormTree::Rejected)
    }

    pub fn tree(&self) -> Option<&FinTree> {
        match self {
            NormalFormTree::Rejected => None,
            NormalFormTree::Accepted(t) => Some(t),
        }
    }
}

/// `{ s : |s| <= depth and (x restricted to i, s restricted to i) is in the
/// relation for every i <= |s| }`. Candidate child entries are read off the
/// relation itself, so no branching bound is needed.
pub fn normal_form_tree(
    relation: &BTreeSet<(Seq, Seq)>,
    x: &Point,
    depth: u32,
) -> NormalFormTree {
    if !relation.contains(&(Seq::empty(), Seq::empty())) {
        return NormalFormTree::Rejected;
    }
    let mut nodes: BTreeSet<Seq> = BTreeSet::new();
    nodes.insert(Seq::empty());
    let mut frontier = vec![Seq::empty()];
    while let Some(s) = frontier.pop() {
        if s.len() >= depth as usize {
            continue;
        }
        let xa = Seq((0..=s.len()).map(|i| x.at(i)).take(s.len() + 1).collect());
        for (xs, ss) in relation {
            if ss.len() == s.len() + 1 && s.is_prefix_of(ss) && *xs == xa {
                if nodes.insert(ss.clone()) {
                    frontier.push(ss.clone());
                }
            }
        }
    }
    NormalFormTree::Accepted(FinTree::new(nodes).expect("grown prefix-closed"))
}
