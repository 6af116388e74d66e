//! Rank-labeled tree truncations with full branching below positive
//! ranks: successor nodes drop rank by one to every child, limit nodes
//! spread child ranks strictly increasing toward the limit starting at
//! two, rank-zero nodes are leaves. The depth bound cuts the tree off
//! regardless of rank.

use crate::ordinal::OrdinalNotation;
use crate::seq::Seq;
use crate::tree::FinTree;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "NiceTreeRaw", into = "NiceTreeRaw")]
pub struct NiceTree {
    tree: FinTree,
    ranks: BTreeMap<Seq, OrdinalNotation>,
    branching: u32,
    depth: u32,
}

#[derive(Serialize, Deserialize)]
struct NiceTreeRaw {
    tree: Vec<Seq>,
    ranks: Vec<(Seq, OrdinalNotation)>,
    branching: u32,
    depth: u32,
}

impl TryFrom<NiceTreeRaw> for NiceTree {
    type Error = Error;

    fn try_from(raw: NiceTreeRaw) -> Result<Self> {
        let t = NiceTree {
            tree: FinTree::new(raw.tree)?,
            ranks: raw.ranks.into_iter().collect(),
            branching: raw.branching,
            depth: raw.depth,
        };
        t.check()?;
        Ok(t)
    }
}

impl From<NiceTree> for NiceTreeRaw {
    fn from(t: NiceTree) -> Self {
        NiceTreeRaw {
            tree: t.tree.nodes().iter().cloned().collect(),
            ranks: t.ranks.into_iter().collect(),
            branching: t.branching,
            depth: t.depth,
        }
    }
}

impl NiceTree {
    pub fn tree(&self) -> &FinTree {
        &self.tree
    }

    pub fn contains(&self, s: &Seq) -> bool {
        self.tree.contains(s)
    }

    pub fn rank(&self, s: &Seq) -> Option<&OrdinalNotation> {
        self.ranks.get(s)
    }

    pub fn branching(&self) -> u32 {
        self.branching
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Nodes of rank zero.
    pub fn leaves(&self) -> Vec<Seq> {
        self.ranks
            .iter()
            .filter(|(_, r)| r.is_zero())
            .map(|(s, _)| s.clone())
            .collect()
    }

    /// Verifies every defining clause of the labeling.
    pub fn check(&self) -> Result<()> {
        if self.branching < 2 {
            return Err(Error::InvalidNiceTree("branching must be at least 2".into()));
        }
        let root_rank = self
            .ranks
            .get(&Seq::empty())
            .ok_or_else(|| Error::InvalidNiceTree("root has no rank".into()))?;
        if *root_rank < OrdinalNotation::from_nat(2) {
            return Err(Error::InvalidNiceTree("root rank must be at least 2".into()));
        }
        for s in self.tree.nodes() {
            let r = self
                .ranks
                .get(s)
                .ok_or_else(|| Error::InvalidNiceTree(format!("{s} has no rank")))?;
            if s.len() as u32 > self.depth {
                return Err(Error::InvalidNiceTree(format!("{s} is beyond the depth bound")));
            }
            let children = self.tree.children(s);
            if r.is_zero() || s.len() as u32 == self.depth {
                if !children.is_empty() {
                    return Err(Error::InvalidNiceTree(format!(
                        "{s} should be a leaf but has children"
                    )));
                }
                continue;
            }
            let expected: Vec<Seq> = (0..self.branching).map(|n| s.child(n)).collect();
            if children != expected {
                return Err(Error::InvalidNiceTree(format!(
                    "{s} must carry exactly children 0..{}",
                    self.branching
                )));
            }
            let child_ranks: Vec<&OrdinalNotation> =
                expected.iter().map(|c| &self.ranks[c]).collect();
            if let Some(pred) = r.pred() {
                for (c, cr) in expected.iter().zip(&child_ranks) {
                    if **cr != pred {
                        return Err(Error::InvalidNiceTree(format!(
                            "successor node {s}: child {c} rank is not one less"
                        )));
                    }
                }
            } else {
                // Limit rank: strictly increasing child ranks below it,
                // starting at 2 or more.
                if *child_ranks[0] < OrdinalNotation::from_nat(2) {
                    return Err(Error::InvalidNiceTree(format!(
                        "limit node {s}: first child rank below 2"
                    )));
                }
                for w in child_ranks.windows(2) {
                    if w[0] >= w[1] {
                        return Err(Error::InvalidNiceTree(format!(
                            "limit node {s}: child ranks must strictly increase"
                        )));
                    }
                }
                if *child_ranks[child_ranks.len() - 1] >= *r {
                    return Err(Error::InvalidNiceTree(format!(
                        "limit node {s}: child rank reaches the limit"
                    )));
                }
            }
        }
        for s in self.ranks.keys() {
            if !self.tree.contains(s) {
                return Err(Error::InvalidNiceTree(format!("rank at {s} outside the tree")));
            }
        }
        Ok(())
    }
}

/// Builds the canonical truncation of the rank-`alpha` tree: full
/// branching below every positive rank until the depth bound. Limit nodes
/// read child ranks off the limit's fundamental sequence, shifted past the
/// entries below 2.
pub fn nice_tree(alpha: &OrdinalNotation, branching: u32, depth: u32) -> Result<NiceTree> {
    if *alpha < OrdinalNotation::from_nat(2) {
        return Err(Error::InvalidNiceTree("rank must be at least 2".into()));
    }
    if branching < 2 {
        return Err(Error::InvalidNiceTree("branching must be at least 2".into()));
    }
    let mut ranks: BTreeMap<Seq, OrdinalNotation> = BTreeMap::new();
    ranks.insert(Seq::empty(), alpha.clone());
    let mut frontier = vec![Seq::empty()];
    while let Some(s) = frontier.pop() {
        let r = ranks[&s].clone();
        if r.is_zero() || s.len() as u32 == depth {
            continue;
        }
        let child_ranks: Vec<OrdinalNotation> = if let Some(pred) = r.pred() {
            vec![pred; branching as usize]
        } else {
            let two = OrdinalNotation::from_nat(2);
            let shift = (0..64)
                .find(|&k| r.fundamental(k).expect("limit rank") >= two)
                .ok_or_else(|| {
                    Error::InvalidNiceTree(format!("fundamental sequence of {r} stays below 2"))
                })?;
            (0..branching as u64)
                .map(|n| r.fundamental(shift + n).expect("limit rank"))
                .collect()
        };
        for (n, cr) in child_ranks.into_iter().enumerate() {
            let c = s.child(n as u32);
            ranks.insert(c.clone(), cr);
            frontier.push(c);
        }
    }
    let tree = FinTree::new(ranks.keys().cloned()).expect("generated prefix-closed");
    let out = NiceTree { tree, ranks, branching, depth };
    out.check()?;
    Ok(out)
}
