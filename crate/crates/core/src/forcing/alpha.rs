//! Conditions over a rank-labeled tree and a finite point space. A
//! condition assigns basic sets to some rank-zero nodes and attaches
//! escaping points to positive-rank nodes. The rank of a condition
//! against a target set measures how high its unresolved escapes sit;
//! `alpha_rank_hat` rebuilds a condition below a rank bound without
//! losing compatibility.

use crate::forcing::nice::NiceTree;
use crate::forcing::space::Space;
use crate::ordinal::OrdinalNotation;
use crate::seq::Seq;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
#[serde(try_from = "AlphaConditionRaw", into = "AlphaConditionRaw")]
pub struct AlphaCondition {
    /// Basic-set assignments at rank-zero nodes, by basic index.
    pub t: BTreeMap<Seq, usize>,
    /// Escape pairs: point `x` avoids the set named below node `s`.
    pub f: BTreeSet<(Seq, String)>,
}

#[derive(Serialize, Deserialize)]
struct AlphaConditionRaw {
    t: Vec<(Seq, usize)>,
    f: Vec<(Seq, String)>,
}

impl TryFrom<AlphaConditionRaw> for AlphaCondition {
    type Error = Error;

    fn try_from(raw: AlphaConditionRaw) -> Result<Self> {
        let mut t = BTreeMap::new();
        for (s, b) in raw.t {
            if t.insert(s.clone(), b).is_some() {
                return Err(Error::InvalidCondition(format!("duplicate assignment at {s}")));
            }
        }
        Ok(AlphaCondition { t, f: raw.f.into_iter().collect() })
    }
}

impl From<AlphaCondition> for AlphaConditionRaw {
    fn from(p: AlphaCondition) -> Self {
        AlphaConditionRaw { t: p.t.into_iter().collect(), f: p.f.into_iter().collect() }
    }
}

/// Checks a condition against its tree and space: assignments sit at
/// rank-zero nodes, escapes at positive-rank nodes, no escape directly
/// above another for the same point, and no escape contradicted by an
/// assignment at a child node.
pub fn validate_alpha(tree: &NiceTree, space: &Space, p: &AlphaCondition) -> Result<()> {
    for (s, b) in &p.t {
        let r = tree
            .rank(s)
            .ok_or_else(|| Error::InvalidCondition(format!("assignment at {s} outside the tree")))?;
        if !r.is_zero() {
            return Err(Error::InvalidCondition(format!("assignment at positive-rank node {s}")));
        }
        if *b >= space.basics().len() {
            return Err(Error::InvalidCondition(format!("assignment at {s} names basic {b}")));
        }
    }
    for (s, x) in &p.f {
        let r = tree
            .rank(s)
            .ok_or_else(|| Error::InvalidCondition(format!("escape at {s} outside the tree")))?;
        if r.is_zero() {
            return Err(Error::InvalidCondition(format!("escape at rank-zero node {s}")));
        }
        if !space.has_point(x) {
            return Err(Error::InvalidCondition(format!("escape names unknown point {x}")));
        }
        if let Some(parent) = s.parent() {
            if p.f.contains(&(parent.clone(), x.clone())) {
                return Err(Error::InvalidCondition(format!(
                    "escape for {x} at {s} directly below another"
                )));
            }
        }
        for c in tree.tree().children(s) {
            if let Some(b) = p.t.get(&c) {
                if space.basic_contains(*b, x) {
                    return Err(Error::InvalidCondition(format!(
                        "escape for {x} at {s} contradicted by assignment at {c}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Merges two conditions; fails if their assignments disagree at a node.
pub fn alpha_union(p: &AlphaCondition, q: &AlphaCondition) -> Result<AlphaCondition> {
    let mut t = p.t.clone();
    for (s, b) in &q.t {
        match t.insert(s.clone(), *b) {
            Some(old) if old != *b => {
                return Err(Error::InvalidCondition(format!("assignments disagree at {s}")))
            }
            _ => {}
        }
    }
    let f = p.f.union(&q.f).cloned().collect();
    Ok(AlphaCondition { t, f })
}

/// Two conditions are compatible when their merge is again a condition.
pub fn alpha_compatible(
    tree: &NiceTree,
    space: &Space,
    p: &AlphaCondition,
    q: &AlphaCondition,
) -> Result<bool> {
    validate_alpha(tree, space, p)?;
    validate_alpha(tree, space, q)?;
    match alpha_union(p, q) {
        Ok(u) => Ok(validate_alpha(tree, space, &u).is_ok()),
        Err(_) => Ok(false),
    }
}

/// Largest tree rank carrying an escape whose point lies outside `q`.
pub fn alpha_rank(
    p: &AlphaCondition,
    q: &BTreeSet<String>,
    tree: &NiceTree,
) -> Result<OrdinalNotation> {
    let mut best = OrdinalNotation::zero();
    for (s, x) in &p.f {
        if q.contains(x) {
            continue;
        }
        let r = tree
            .rank(s)
            .ok_or_else(|| Error::InvalidCondition(format!("escape at {s} outside the tree")))?;
        if *r > best {
            best = r.clone();
        }
    }
    Ok(best)
}

/// Rebuilds `p` with rank at most `beta` against `q`: every escape at a
/// limit node above `beta` is first witnessed two levels down at a node
/// of rank at most `beta` (least admissible grandchild), then every
/// escape above the bound whose point is outside `q` is dropped. The
/// result is compatible with `p`.
pub fn alpha_rank_hat(
    p: &AlphaCondition,
    beta: &OrdinalNotation,
    q: &BTreeSet<String>,
    tree: &NiceTree,
    space: &Space,
) -> Result<AlphaCondition> {
    if beta.is_zero() {
        return Err(Error::InvalidInput("rank bound must be at least 1".into()));
    }
    validate_alpha(tree, space, p)?;
    let mut f0 = p.f.clone();
    for (s, x) in &p.f {
        let r = tree.rank(s).expect("validated");
        if !r.is_limit() || r <= beta {
            continue;
        }
        for n in 0..tree.branching() {
            let c = s.child(n);
            let Some(cr) = tree.rank(&c) else { continue };
            if cr > beta {
                continue;
            }
            if f0.contains(&(c.clone(), x.clone())) {
                continue;
            }
            let grandchildren = tree.tree().children(&c);
            if grandchildren.is_empty() {
                return Err(Error::TooShallow(format!("no nodes below {c} to witness an escape")));
            }
            if grandchildren.iter().any(|g| f0.contains(&(g.clone(), x.clone()))) {
                continue;
            }
            let mut placed = false;
            'candidates: for g in &grandchildren {
                if tree.rank(g).expect("in tree").is_zero() {
                    continue;
                }
                for gg in tree.tree().children(g) {
                    if f0.contains(&(gg.clone(), x.clone())) {
                        continue 'candidates;
                    }
                    if let Some(b) = p.t.get(&gg) {
                        if space.basic_contains(*b, x) {
                            continue 'candidates;
                        }
                    }
                }
                f0.insert((g.clone(), x.clone()));
                placed = true;
                break;
            }
            if !placed {
                return Err(Error::InvalidCondition(format!(
                    "no admissible witness below {c} for {x}"
                )));
            }
        }
    }
    let f = f0
        .into_iter()
        .filter(|(s, x)| q.contains(x) || *tree.rank(s).expect("in tree") <= *beta)
        .collect();
    let hat = AlphaCondition { t: p.t.clone(), f };
    validate_alpha(tree, space, &hat)?;
    Ok(hat)
}
