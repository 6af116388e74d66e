//! Finite partial assignments of values to nodes of a rank-labeled
//! tree, ordered by extension, with the single constraint that a node
//! never repeats its parent's value. Condition rank is the largest tree
//! rank in the domain; `p_rank_hat` pushes a condition below a rank
//! bound while keeping it compatible with the original.

use crate::forcing::nice::NiceTree;
use crate::ordinal::OrdinalNotation;
use crate::seq::Seq;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
#[serde(try_from = "PConditionRaw", into = "PConditionRaw")]
pub struct PCondition {
    pub assignments: BTreeMap<Seq, u32>,
}

#[derive(Serialize, Deserialize)]
struct PConditionRaw {
    assignments: Vec<(Seq, u32)>,
}

impl TryFrom<PConditionRaw> for PCondition {
    type Error = Error;

    fn try_from(raw: PConditionRaw) -> Result<Self> {
        let mut assignments = BTreeMap::new();
        for (s, v) in raw.assignments {
            if assignments.insert(s.clone(), v).is_some() {
                return Err(Error::InvalidCondition(format!("duplicate assignment at {s}")));
            }
        }
        Ok(PCondition { assignments })
    }
}

impl From<PCondition> for PConditionRaw {
    fn from(p: PCondition) -> Self {
        PConditionRaw { assignments: p.assignments.into_iter().collect() }
    }
}

pub fn validate_p(tree: &NiceTree, value_bound: u32, p: &PCondition) -> Result<()> {
    for (s, v) in &p.assignments {
        if !tree.contains(s) {
            return Err(Error::InvalidCondition(format!("assignment at {s} outside the tree")));
        }
        if *v >= value_bound {
            return Err(Error::InvalidCondition(format!("value {v} at {s} exceeds the bound")));
        }
        if let Some(parent) = s.parent() {
            if p.assignments.get(&parent) == Some(v) {
                return Err(Error::InvalidCondition(format!("{s} repeats its parent's value")));
            }
        }
    }
    Ok(())
}

pub fn p_union(p: &PCondition, q: &PCondition) -> Result<PCondition> {
    let mut assignments = p.assignments.clone();
    for (s, v) in &q.assignments {
        match assignments.insert(s.clone(), *v) {
            Some(old) if old != *v => {
                return Err(Error::InvalidCondition(format!("assignments disagree at {s}")))
            }
            _ => {}
        }
    }
    Ok(PCondition { assignments })
}

pub fn p_compatible(
    tree: &NiceTree,
    value_bound: u32,
    p: &PCondition,
    q: &PCondition,
) -> Result<bool> {
    validate_p(tree, value_bound, p)?;
    validate_p(tree, value_bound, q)?;
    match p_union(p, q) {
        Ok(u) => Ok(validate_p(tree, value_bound, &u).is_ok()),
        Err(_) => Ok(false),
    }
}

/// Largest tree rank in the domain of `p`.
pub fn p_rank(p: &PCondition, tree: &NiceTree) -> Result<OrdinalNotation> {
    let mut best = OrdinalNotation::zero();
    for s in p.assignments.keys() {
        let r = tree
            .rank(s)
            .ok_or_else(|| Error::InvalidCondition(format!("assignment at {s} outside the tree")))?;
        if *r > best {
            best = r.clone();
        }
    }
    Ok(best)
}

/// Rebuilds `p` with rank at most `beta`: wherever a value sits at a
/// limit node above `beta` and a child drops strictly below `beta`, the
/// value is copied to the least admissible grandchild first, and then
/// the domain is cut down to nodes of rank at most `beta`.
pub fn p_rank_hat(
    p: &PCondition,
    beta: &OrdinalNotation,
    tree: &NiceTree,
    value_bound: u32,
) -> Result<PCondition> {
    if beta.is_zero() {
        return Err(Error::InvalidInput("rank bound must be at least 1".into()));
    }
    validate_p(tree, value_bound, p)?;
    let mut p0 = p.assignments.clone();
    for (s, v) in &p.assignments {
        let r = tree.rank(s).expect("validated");
        if !r.is_limit() || r <= beta {
            continue;
        }
        for n in 0..tree.branching() {
            let c = s.child(n);
            let Some(cr) = tree.rank(&c) else { continue };
            if cr >= beta {
                continue;
            }
            let grandchildren = tree.tree().children(&c);
            if grandchildren.is_empty() {
                return Err(Error::TooShallow(format!("no nodes below {c} to carry a value")));
            }
            if grandchildren.iter().any(|g| p0.get(g) == Some(v)) {
                continue;
            }
            let mut placed = false;
            'candidates: for g in &grandchildren {
                if p0.contains_key(g) || p0.get(&c) == Some(v) {
                    continue;
                }
                for gg in tree.tree().children(g) {
                    if p0.get(&gg) == Some(v) {
                        continue 'candidates;
                    }
                }
                p0.insert(g.clone(), *v);
                placed = true;
                break;
            }
            if !placed {
                return Err(Error::InvalidCondition(format!(
                    "no admissible slot below {c} for value {v}"
                )));
            }
        }
    }
    let assignments = p0
        .into_iter()
        .filter(|(s, _)| *tree.rank(s).expect("in tree") <= *beta)
        .collect();
    let hat = PCondition { assignments };
    validate_p(tree, value_bound, &hat)?;
    Ok(hat)
}
