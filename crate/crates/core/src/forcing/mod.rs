//! Forcing posets with a deterministic generic-filter simulation. Each
//! poset couples a condition type with a compatibility relation; dense
//! sets are named by finite specifications, and the driver builds a
//! descending chain meeting each one in turn, always choosing the least
//! admissible extension. Transcripts record the whole run and can be
//! re-verified independently.

pub mod alpha;
pub mod nice;
pub mod palpha;
pub mod pi;
pub mod silver;
pub mod space;
pub mod subtree;

pub use alpha::{
    alpha_compatible, alpha_rank, alpha_rank_hat, alpha_union, validate_alpha, AlphaCondition,
};
pub use nice::{nice_tree, NiceTree};
pub use palpha::{p_compatible, p_rank, p_rank_hat, p_union, validate_p, PCondition};
pub use pi::{pi_eval, PiSentence};
pub use silver::{
    escape_profile, profiles_incompatible, silver_compatible, silver_union, validate_silver,
    SilverCondition, SilverSentence,
};
pub use space::{singleton_space, BasicSet, Space};
pub use subtree::{
    subtree_compatible, subtree_leq, subtree_union, validate_subtree, SubtreeCondition,
};

use crate::seq::Seq;
use crate::tree::BinTreeTrunc;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Finite partial zero-one assignments on coordinates, ordered by
/// extension. The unconstrained warm-up poset.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct FinCondition {
    pub assignments: BTreeMap<u32, bool>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Poset {
    Fin,
    Silver(Space),
    Alpha {
        tree: NiceTree,
        space: Space,
    },
    #[serde(rename = "palpha")]
    PAlpha {
        tree: NiceTree,
        value_bound: u32,
    },
    Subtree(BinTreeTrunc),
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Condition {
    Fin(FinCondition),
    Silver(SilverCondition),
    Alpha(AlphaCondition),
    #[serde(rename = "palpha")]
    PAlpha(PCondition),
    Subtree(SubtreeCondition),
}

/// A dense set, named finitely. Each one is dense in its poset: every
/// condition extends to one inside it, except where an explicit
/// unmeetable error is reported.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DenseSpec {
    /// Conditions whose domain contains the coordinate.
    FinDomain { index: u32 },
    /// Conditions placing the point outside some level.
    SilverEscape { point: String },
    /// Conditions covering the point by a basic inside the level.
    SilverCover { point: String, n: u32 },
    /// Conditions whose domain contains the node.
    #[serde(rename = "palpha_domain")]
    PAlphaDomain { node: Seq },
    /// Conditions taking the value at the node or one of its children.
    #[serde(rename = "palpha_value")]
    PAlphaValue { node: Seq, k: u32 },
    /// Conditions all of whose terminals reach the given length.
    SubtreeGrow { depth: u32 },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Transcript {
    pub poset: Poset,
    pub chain: Vec<Condition>,
    pub specs: Vec<DenseSpec>,
}

/// The weakest condition of the poset.
pub fn top(poset: &Poset) -> Condition {
    match poset {
        Poset::Fin => Condition::Fin(FinCondition::default()),
        Poset::Silver(_) => Condition::Silver(SilverCondition::default()),
        Poset::Alpha { .. } => Condition::Alpha(AlphaCondition::default()),
        Poset::PAlpha { .. } => Condition::PAlpha(PCondition::default()),
        Poset::Subtree(_) => Condition::Subtree(SubtreeCondition::root_only()),
    }
}

fn mismatch() -> Error {
    Error::InvalidCondition("condition kind does not match the poset".into())
}

pub fn validate_condition(poset: &Poset, c: &Condition) -> Result<()> {
    match (poset, c) {
        (Poset::Fin, Condition::Fin(_)) => Ok(()),
        (Poset::Silver(space), Condition::Silver(p)) => validate_silver(space, p),
        (Poset::Alpha { tree, space }, Condition::Alpha(p)) => validate_alpha(tree, space, p),
        (Poset::PAlpha { tree, value_bound }, Condition::PAlpha(p)) => {
            validate_p(tree, *value_bound, p)
        }
        (Poset::Subtree(ambient), Condition::Subtree(p)) => validate_subtree(ambient, p),
        _ => Err(mismatch()),
    }
}

/// The order of the poset: `p` is at least as strong as `q`.
pub fn leq(poset: &Poset, p: &Condition, q: &Condition) -> Result<bool> {
    match (poset, p, q) {
        (Poset::Fin, Condition::Fin(p), Condition::Fin(q)) => {
            Ok(q.assignments.iter().all(|(k, v)| p.assignments.get(k) == Some(v)))
        }
        (Poset::Silver(_), Condition::Silver(p), Condition::Silver(q)) => {
            Ok(q.sentences.is_subset(&p.sentences))
        }
        (Poset::Alpha { .. }, Condition::Alpha(p), Condition::Alpha(q)) => {
            Ok(q.t.iter().all(|(s, b)| p.t.get(s) == Some(b)) && q.f.is_subset(&p.f))
        }
        (Poset::PAlpha { .. }, Condition::PAlpha(p), Condition::PAlpha(q)) => {
            Ok(q.assignments.iter().all(|(s, v)| p.assignments.get(s) == Some(v)))
        }
        (Poset::Subtree(_), Condition::Subtree(p), Condition::Subtree(q)) => {
            Ok(subtree_leq(p, q))
        }
        _ => Err(mismatch()),
    }
}

pub fn compatible(poset: &Poset, p: &Condition, q: &Condition) -> Result<bool> {
    match (poset, p, q) {
        (Poset::Fin, Condition::Fin(p), Condition::Fin(q)) => Ok(p
            .assignments
            .iter()
            .all(|(k, v)| q.assignments.get(k).map_or(true, |w| w == v))),
        (Poset::Silver(space), Condition::Silver(p), Condition::Silver(q)) => {
            silver_compatible(space, p, q)
        }
        (Poset::Alpha { tree, space }, Condition::Alpha(p), Condition::Alpha(q)) => {
            alpha_compatible(tree, space, p, q)
        }
        (Poset::PAlpha { tree, value_bound }, Condition::PAlpha(p), Condition::PAlpha(q)) => {
            p_compatible(tree, *value_bound, p, q)
        }
        (Poset::Subtree(ambient), Condition::Subtree(p), Condition::Subtree(q)) => {
            subtree_compatible(ambient, p, q)
        }
        _ => Err(mismatch()),
    }
}

/// Checks that a dense-set specification refers to the right poset and
/// resolves all its references.
pub fn validate_spec(poset: &Poset, spec: &DenseSpec) -> Result<()> {
    match (poset, spec) {
        (Poset::Fin, DenseSpec::FinDomain { .. }) => Ok(()),
        (Poset::Silver(space), DenseSpec::SilverEscape { point })
        | (Poset::Silver(space), DenseSpec::SilverCover { point, .. }) => {
            if space.has_point(point) {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("unknown point {point:?}")))
            }
        }
        (Poset::PAlpha { tree, .. }, DenseSpec::PAlphaDomain { node }) => {
            if tree.contains(node) {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("node {node} outside the tree")))
            }
        }
        (Poset::PAlpha { tree, value_bound }, DenseSpec::PAlphaValue { node, k }) => {
            let Some(r) = tree.rank(node) else {
                return Err(Error::InvalidInput(format!("node {node} outside the tree")));
            };
            if r.is_zero() {
                return Err(Error::InvalidInput(format!(
                    "value spreading is only dense at positive-rank nodes, not {node}"
                )));
            }
            if k >= value_bound {
                return Err(Error::InvalidInput(format!("value {k} exceeds the bound")));
            }
            Ok(())
        }
        (Poset::Subtree(_), DenseSpec::SubtreeGrow { .. }) => Ok(()),
        _ => Err(Error::InvalidInput("dense set does not fit the poset".into())),
    }
}

/// Does the condition already lie in the dense set?
pub fn met(poset: &Poset, c: &Condition, spec: &DenseSpec) -> Result<bool> {
    validate_spec(poset, spec)?;
    match (c, spec) {
        (Condition::Fin(p), DenseSpec::FinDomain { index }) => {
            Ok(p.assignments.contains_key(index))
        }
        (Condition::Silver(p), DenseSpec::SilverEscape { point }) => Ok(p
            .sentences
            .iter()
            .any(|s| matches!(s, SilverSentence::PointOutside { point: x, .. } if x == point))),
        (Condition::Silver(p), DenseSpec::SilverCover { point, n }) => {
            let Poset::Silver(space) = poset else { return Err(mismatch()) };
            Ok(p.sentences.iter().any(|s| {
                matches!(s, SilverSentence::BasicInside { basic, n: m }
                    if m == n && space.basic_contains(*basic, point))
            }))
        }
        (Condition::PAlpha(p), DenseSpec::PAlphaDomain { node }) => {
            Ok(p.assignments.contains_key(node))
        }
        (Condition::PAlpha(p), DenseSpec::PAlphaValue { node, k }) => {
            let Poset::PAlpha { tree, .. } = poset else { return Err(mismatch()) };
            if p.assignments.get(node) == Some(k) {
                return Ok(true);
            }
            Ok(tree.tree().children(node).iter().any(|c| p.assignments.get(c) == Some(k)))
        }
        (Condition::Subtree(p), DenseSpec::SubtreeGrow { depth }) => {
            Ok(p.terminals().iter().all(|t| t.len() as u32 >= *depth))
        }
        _ => Err(mismatch()),
    }
}

/// The canonical least extension of `c` into the dense set: the
/// condition itself if it already lies inside, otherwise the first
/// admissible strengthening in the enumeration order of the poset.
pub fn extend(poset: &Poset, c: &Condition, spec: &DenseSpec) -> Result<Condition> {
    validate_condition(poset, c)?;
    if met(poset, c, spec)? {
        return Ok(c.clone());
    }
    match (poset, c, spec) {
        (Poset::Fin, Condition::Fin(p), DenseSpec::FinDomain { index }) => {
            let mut out = p.clone();
            out.assignments.insert(*index, false);
            Ok(Condition::Fin(out))
        }
        (Poset::Silver(space), Condition::Silver(p), DenseSpec::SilverEscape { point }) => {
            Ok(Condition::Silver(silver::extend_escape(space, p, point)?))
        }
        (Poset::Silver(space), Condition::Silver(p), DenseSpec::SilverCover { point, n }) => {
            Ok(Condition::Silver(silver::extend_cover(space, p, point, *n)?))
        }
        (
            Poset::PAlpha { tree, value_bound },
            Condition::PAlpha(p),
            DenseSpec::PAlphaDomain { node },
        ) => {
            let parent_value = node.parent().and_then(|s| p.assignments.get(&s).copied());
            let child_values: BTreeSet<u32> = tree
                .tree()
                .children(node)
                .iter()
                .filter_map(|c| p.assignments.get(c).copied())
                .collect();
            for v in 0..*value_bound {
                if parent_value != Some(v) && !child_values.contains(&v) {
                    let mut out = p.clone();
                    out.assignments.insert(node.clone(), v);
                    return Ok(Condition::PAlpha(out));
                }
            }
            Err(Error::DenseUnmeetable(format!("every value at {node} is blocked")))
        }
        (
            Poset::PAlpha { tree, .. },
            Condition::PAlpha(p),
            DenseSpec::PAlphaValue { node, k },
        ) => {
            let mut slots = vec![node.clone()];
            slots.extend(tree.tree().children(node));
            'slots: for s in slots {
                if p.assignments.contains_key(&s) {
                    continue;
                }
                if let Some(parent) = s.parent() {
                    if p.assignments.get(&parent) == Some(k) {
                        continue;
                    }
                }
                for c in tree.tree().children(&s) {
                    if p.assignments.get(&c) == Some(k) {
                        continue 'slots;
                    }
                }
                let mut out = p.clone();
                out.assignments.insert(s, *k);
                return Ok(Condition::PAlpha(out));
            }
            Err(Error::DenseUnmeetable(format!("value {k} cannot appear at or below {node}")))
        }
        (Poset::Subtree(ambient), Condition::Subtree(p), DenseSpec::SubtreeGrow { depth }) => {
            if *depth > ambient.depth() {
                return Err(Error::DenseUnmeetable(format!(
                    "the ambient tree stops at depth {}",
                    ambient.depth()
                )));
            }
            let mut nodes = p.nodes().clone();
            for terminal in p.terminals() {
                let mut cur = terminal;
                while (cur.len() as u32) < *depth {
                    let next = [cur.child(0), cur.child(1)]
                        .into_iter()
                        .find(|c| ambient.contains(c))
                        .ok_or_else(|| {
                            Error::DenseUnmeetable(format!("{cur} has no extension in the ambient tree"))
                        })?;
                    nodes.insert(next.clone());
                    cur = next;
                }
            }
            Ok(Condition::Subtree(SubtreeCondition::new(nodes)?))
        }
        _ => Err(mismatch()),
    }
}

/// Builds a descending chain from the weakest condition, meeting each
/// dense set in order. Deterministic: the same poset and specification
/// list always produce the same transcript.
pub fn rasiowa_sikorski(poset: &Poset, specs: &[DenseSpec]) -> Result<Transcript> {
    let mut chain = vec![top(poset)];
    for (i, spec) in specs.iter().enumerate() {
        let cur = chain.last().expect("nonempty");
        let next = extend(poset, cur, spec).map_err(|e| match e {
            Error::DenseUnmeetable(msg) => Error::DenseUnmeetable(format!("spec {i}: {msg}")),
            other => other,
        })?;
        chain.push(next);
    }
    Ok(Transcript { poset: poset.clone(), chain, specs: specs.to_vec() })
}

/// Re-checks a transcript from scratch: every condition valid, the chain
/// starts at the weakest condition and descends, each step meets its
/// dense set, and the final condition meets all of them.
pub fn verify_transcript(t: &Transcript) -> Result<()> {
    if t.chain.len() != t.specs.len() + 1 {
        return Err(Error::BadTranscript(format!(
            "chain of length {} does not fit {} dense sets",
            t.chain.len(),
            t.specs.len()
        )));
    }
    for c in &t.chain {
        validate_condition(&t.poset, c)?;
    }
    if t.chain[0] != top(&t.poset) {
        return Err(Error::BadTranscript("chain does not start at the weakest condition".into()));
    }
    for i in 0..t.specs.len() {
        if !leq(&t.poset, &t.chain[i + 1], &t.chain[i])? {
            return Err(Error::BadTranscript(format!("step {i} does not strengthen")));
        }
        if !met(&t.poset, &t.chain[i + 1], &t.specs[i])? {
            return Err(Error::BadTranscript(format!("step {i} misses its dense set")));
        }
    }
    let last = t.chain.last().expect("nonempty");
    for (i, spec) in t.specs.iter().enumerate() {
        if !met(&t.poset, last, spec)? {
            return Err(Error::BadTranscript(format!("final condition misses dense set {i}")));
        }
    }
    Ok(())
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SilverExtract {
    /// The part of each level the final condition commits to.
    pub levels: Vec<BTreeSet<String>>,
    /// Points placed in every level.
    pub trace: BTreeSet<String>,
}

/// Reads the open-set tower off a Silver transcript.
pub fn silver_extract(t: &Transcript, n_levels: u32) -> Result<SilverExtract> {
    let Poset::Silver(space) = &t.poset else {
        return Err(Error::InvalidCondition("not a transcript over the Silver poset".into()));
    };
    let Some(Condition::Silver(last)) = t.chain.last() else {
        return Err(Error::InvalidCondition("transcript has no Silver conditions".into()));
    };
    let mut levels = Vec::new();
    for n in 0..n_levels {
        let mut level = BTreeSet::new();
        for s in &last.sentences {
            if let SilverSentence::BasicInside { basic, n: m } = s {
                if *m == n {
                    let b = space.basics().get(*basic).ok_or_else(|| {
                        Error::InvalidCondition(format!("no basic {basic}"))
                    })?;
                    level.extend(b.members.iter().cloned());
                }
            }
        }
        levels.push(level);
    }
    let trace = space
        .points()
        .iter()
        .filter(|x| levels.iter().all(|l| l.contains(*x)))
        .cloned()
        .collect();
    Ok(SilverExtract { levels, trace })
}

/// Reads the assignment off a transcript over the partial-function poset.
pub fn palpha_extract(t: &Transcript) -> Result<BTreeMap<Seq, u32>> {
    if !matches!(t.poset, Poset::PAlpha { .. }) {
        return Err(Error::InvalidCondition(
            "not a transcript over the partial-function poset".into(),
        ));
    }
    match t.chain.last() {
        Some(Condition::PAlpha(p)) => Ok(p.assignments.clone()),
        _ => Err(Error::InvalidCondition("transcript has no assignments".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::OrdinalNotation;
    use crate::seq;

    #[test]
    fn fin_driver_is_deterministic() {
        let poset = Poset::Fin;
        let specs = vec![
            DenseSpec::FinDomain { index: 2 },
            DenseSpec::FinDomain { index: 0 },
            DenseSpec::FinDomain { index: 2 },
        ];
        let t1 = rasiowa_sikorski(&poset, &specs).unwrap();
        let t2 = rasiowa_sikorski(&poset, &specs).unwrap();
        assert_eq!(t1, t2);
        assert_eq!(t1.chain.len(), 4);
        assert_eq!(t1.chain[2], t1.chain[3]);
        verify_transcript(&t1).unwrap();
        let Condition::Fin(last) = t1.chain.last().unwrap() else { panic!() };
        assert_eq!(last.assignments.keys().copied().collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn silver_run_recovers_the_chosen_set() {
        let space = singleton_space(&["a", "b", "c"]);
        let poset = Poset::Silver(space);
        let mut specs = vec![DenseSpec::SilverEscape { point: "b".into() }];
        for n in 0..2 {
            for x in ["a", "c"] {
                specs.push(DenseSpec::SilverCover { point: x.into(), n });
            }
        }
        let t = rasiowa_sikorski(&poset, &specs).unwrap();
        verify_transcript(&t).unwrap();
        let out = silver_extract(&t, 2).unwrap();
        let want: BTreeSet<String> = ["a".to_string(), "c".to_string()].into();
        assert_eq!(out.levels, vec![want.clone(), want.clone()]);
        assert_eq!(out.trace, want);
    }

    #[test]
    fn palpha_run_respects_the_parent_constraint() {
        let tree = nice_tree(&OrdinalNotation::from_nat(2), 2, 2).unwrap();
        let poset = Poset::PAlpha { tree, value_bound: 3 };
        let specs = vec![
            DenseSpec::PAlphaDomain { node: Seq::empty() },
            DenseSpec::PAlphaValue { node: Seq::empty(), k: 0 },
            DenseSpec::PAlphaValue { node: Seq::empty(), k: 1 },
            DenseSpec::PAlphaDomain { node: seq![1] },
        ];
        let t = rasiowa_sikorski(&poset, &specs).unwrap();
        verify_transcript(&t).unwrap();
        let got = palpha_extract(&t).unwrap();
        let want: BTreeMap<Seq, u32> =
            [(Seq::empty(), 0), (seq![0], 1), (seq![1], 1)].into_iter().collect();
        assert_eq!(got, want);
    }

    #[test]
    fn subtree_growth_is_an_end_extension() {
        let poset = Poset::Subtree(BinTreeTrunc::full(2));
        let specs = vec![DenseSpec::SubtreeGrow { depth: 1 }, DenseSpec::SubtreeGrow { depth: 2 }];
        let t = rasiowa_sikorski(&poset, &specs).unwrap();
        verify_transcript(&t).unwrap();
        let Condition::Subtree(last) = t.chain.last().unwrap() else { panic!() };
        assert!(last.terminals().iter().all(|s| s.len() == 2));

        let err = rasiowa_sikorski(&poset, &[DenseSpec::SubtreeGrow { depth: 5 }]).unwrap_err();
        let Error::DenseUnmeetable(msg) = err else { panic!("wrong error: {err}") };
        assert!(msg.contains("spec 0"));
    }

    #[test]
    fn verifier_rejects_tampering() {
        let poset = Poset::Fin;
        let specs = vec![DenseSpec::FinDomain { index: 1 }];
        let mut t = rasiowa_sikorski(&poset, &specs).unwrap();
        t.chain.pop();
        assert!(matches!(verify_transcript(&t).unwrap_err(), Error::BadTranscript(_)));

        let mut t = rasiowa_sikorski(&poset, &specs).unwrap();
        t.chain[1] = Condition::Fin(FinCondition::default());
        assert!(matches!(verify_transcript(&t).unwrap_err(), Error::BadTranscript(_)));

        let mut t = rasiowa_sikorski(&poset, &specs).unwrap();
        t.chain[0] = t.chain[1].clone();
        assert!(matches!(verify_transcript(&t).unwrap_err(), Error::BadTranscript(_)));

        let mut t = rasiowa_sikorski(&poset, &specs).unwrap();
        t.chain[1] = Condition::Silver(SilverCondition::default());
        assert!(verify_transcript(&t).is_err());
    }

    #[test]
    fn specs_must_fit_the_poset() {
        let poset = Poset::Fin;
        let spec = DenseSpec::SilverEscape { point: "a".into() };
        assert!(rasiowa_sikorski(&poset, &[spec]).is_err());
        let tree = nice_tree(&OrdinalNotation::from_nat(2), 2, 2).unwrap();
        let poset = Poset::PAlpha { tree, value_bound: 2 };
        let leaf_spec = DenseSpec::PAlphaValue { node: seq![0, 0], k: 1 };
        assert!(rasiowa_sikorski(&poset, &[leaf_spec]).is_err());
    }

    #[test]
    fn serialization_tags() {
        let poset = Poset::Subtree(BinTreeTrunc::full(1));
        let j = serde_json::to_string(&poset).unwrap();
        assert!(j.starts_with(r#"{"kind":"subtree""#), "{j}");
        assert_eq!(serde_json::from_str::<Poset>(&j).unwrap(), poset);

        let spec = DenseSpec::SilverCover { point: "a".into(), n: 0 };
        let j = serde_json::to_string(&spec).unwrap();
        assert_eq!(j, r#"{"kind":"silver_cover","point":"a","n":0}"#);

        let spec = DenseSpec::PAlphaValue { node: seq![1], k: 2 };
        let j = serde_json::to_string(&spec).unwrap();
        assert_eq!(j, r#"{"kind":"palpha_value","node":[1],"k":2}"#);

        let c = Condition::PAlpha(PCondition::default());
        let j = serde_json::to_string(&c).unwrap();
        assert_eq!(j, r#"{"kind":"palpha","assignments":[]}"#);
        assert_eq!(serde_json::from_str::<Condition>(&j).unwrap(), c);
    }
}
