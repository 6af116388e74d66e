//! Subtree conditions inside a fixed ambient binary truncation, ordered
//! by end-extension: a stronger condition may only grow below the
//! terminal nodes of a weaker one.

use crate::seq::Seq;
use crate::tree::BinTreeTrunc;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "SubtreeConditionRaw", into = "SubtreeConditionRaw")]
pub struct SubtreeCondition {
    nodes: BTreeSet<Seq>,
}

#[derive(Serialize, Deserialize)]
struct SubtreeConditionRaw {
    nodes: Vec<Seq>,
}

impl TryFrom<SubtreeConditionRaw> for SubtreeCondition {
    type Error = Error;

    fn try_from(raw: SubtreeConditionRaw) -> Result<Self> {
        SubtreeCondition::new(raw.nodes)
    }
}

impl From<SubtreeCondition> for SubtreeConditionRaw {
    fn from(p: SubtreeCondition) -> Self {
        SubtreeConditionRaw { nodes: p.nodes.into_iter().collect() }
    }
}

impl SubtreeCondition {
    pub fn new(nodes: impl IntoIterator<Item = Seq>) -> Result<Self> {
        let nodes: BTreeSet<Seq> = nodes.into_iter().collect();
        if !nodes.contains(&Seq::empty()) {
            return Err(Error::InvalidCondition("subtree must contain the root".into()));
        }
        for s in &nodes {
            if let Some(parent) = s.parent() {
                if !nodes.contains(&parent) {
                    return Err(Error::NotPrefixClosed(format!("{s} present without its parent")));
                }
            }
        }
        Ok(SubtreeCondition { nodes })
    }

    pub fn root_only() -> Self {
        SubtreeCondition { nodes: [Seq::empty()].into() }
    }

    pub fn nodes(&self) -> &BTreeSet<Seq> {
        &self.nodes
    }

    pub fn contains(&self, s: &Seq) -> bool {
        self.nodes.contains(s)
    }

    /// Nodes with no child in the condition.
    pub fn terminals(&self) -> Vec<Seq> {
        self.nodes
            .iter()
            .filter(|s| !self.nodes.contains(&s.child(0)) && !self.nodes.contains(&s.child(1)))
            .cloned()
            .collect()
    }
}

pub fn validate_subtree(ambient: &BinTreeTrunc, p: &SubtreeCondition) -> Result<()> {
    for s in p.nodes() {
        if !ambient.contains(s) {
            return Err(Error::InvalidCondition(format!("{s} lies outside the ambient tree")));
        }
    }
    Ok(())
}

/// End-extension order: `p` refines `q` when it contains `q` and every
/// new node properly extends one of `q`'s terminals.
pub fn subtree_leq(p: &SubtreeCondition, q: &SubtreeCondition) -> bool {
    if !q.nodes().is_subset(p.nodes()) {
        return false;
    }
    let terminals = q.terminals();
    p.nodes()
        .iter()
        .filter(|s| !q.contains(s))
        .all(|s| terminals.iter().any(|t| t.is_proper_prefix_of(s)))
}

pub fn subtree_union(p: &SubtreeCondition, q: &SubtreeCondition) -> SubtreeCondition {
    SubtreeCondition { nodes: p.nodes().union(q.nodes()).cloned().collect() }
}

pub fn subtree_compatible(
    ambient: &BinTreeTrunc,
    p: &SubtreeCondition,
    q: &SubtreeCondition,
) -> Result<bool> {
    validate_subtree(ambient, p)?;
    validate_subtree(ambient, q)?;
    let u = subtree_union(p, q);
    Ok(subtree_leq(&u, p) && subtree_leq(&u, q))
}
