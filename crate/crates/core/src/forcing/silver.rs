//! Conditions that are finite consistent sets of sentences about a tower
//! of open sets `U_0, U_1, ...` over a declared space: a basic set sits
//! inside some `U_n`, a point escapes some `U_n`, or a point belongs to
//! every `U_n`.

use super::space::Space;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// One sentence. The derived order (variant first, then fields) is the
/// canonical enumeration order for extensions.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SilverSentence {
    /// The `basic`-th basic set is inside `U_n`.
    BasicInside { basic: usize, n: u32 },
    /// The point is outside `U_n`.
    PointOutside { point: String, n: u32 },
    /// The point is in every `U_n`.
    PointInAll { point: String },
}

#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct SilverCondition {
    pub sentences: BTreeSet<SilverSentence>,
}

/// Consistency: a point cannot be outside `U_n` while a basic containing
/// it sits inside `U_n`, and cannot be outside some `U_n` while being in
/// all of them. References must resolve in the space.
pub fn validate_silver(space: &Space, p: &SilverCondition) -> Result<()> {
    for s in &p.sentences {
        match s {
            SilverSentence::BasicInside { basic, .. } => {
                if *basic >= space.basics().len() {
                    return Err(Error::InvalidCondition(format!("no basic {basic}")));
                }
            }
            SilverSentence::PointOutside { point, .. } | SilverSentence::PointInAll { point } => {
                if !space.has_point(point) {
                    return Err(Error::InvalidCondition(format!("unknown point {point:?}")));
                }
            }
        }
    }
    for s in &p.sentences {
        if let SilverSentence::PointOutside { point, n } = s {
            if p.sentences.contains(&SilverSentence::PointInAll { point: point.clone() }) {
                return Err(Error::InvalidCondition(format!(
                    "{point:?} both escapes level {n} and belongs to every level"
                )));
            }
            for t in &p.sentences {
                if let SilverSentence::BasicInside { basic, n: m } = t {
                    if n == m && space.basic_contains(*basic, point) {
                        return Err(Error::InvalidCondition(format!(
                            "{point:?} escapes level {n} but basic {basic} covers it there"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn silver_union(p: &SilverCondition, q: &SilverCondition) -> SilverCondition {
    SilverCondition { sentences: p.sentences.union(&q.sentences).cloned().collect() }
}

pub fn silver_compatible(space: &Space, p: &SilverCondition, q: &SilverCondition) -> Result<bool> {
    validate_silver(space, p)?;
    validate_silver(space, q)?;
    Ok(validate_silver(space, &silver_union(p, q)).is_ok())
}

/// The level-escape profile of a condition: 0 for a point in every level,
/// `n + 1` for a point outside level `n` (least such `n`), absent
/// otherwise. Conditions with identical basic-set sentences are
/// incompatible exactly when their profiles disagree somewhere, which is
/// the combinatorial heart of the antichain-counting argument.
pub fn escape_profile(p: &SilverCondition) -> BTreeMap<String, u32> {
    let mut out = BTreeMap::new();
    for s in &p.sentences {
        match s {
            SilverSentence::PointInAll { point } => {
                out.insert(point.clone(), 0);
            }
            SilverSentence::PointOutside { point, n } => {
                let e = out.entry(point.clone()).or_insert(n + 1);
                if *e != 0 {
                    *e = (*e).min(n + 1);
                }
            }
            SilverSentence::BasicInside { .. } => {}
        }
    }
    out
}

/// Partial-function incompatibility: some shared argument with different
/// values.
pub fn profiles_incompatible(a: &BTreeMap<String, u32>, b: &BTreeMap<String, u32>) -> bool {
    a.iter().any(|(k, v)| b.get(k).is_some_and(|w| w != v))
}

/// Least `n` such that the condition can say the point escapes `U_n`,
/// and the extended condition.
pub(super) fn extend_escape(
    space: &Space,
    p: &SilverCondition,
    point: &str,
) -> Result<SilverCondition> {
    if !space.has_point(point) {
        return Err(Error::InvalidSpace(format!("unknown point {point:?}")));
    }
    if p.sentences.contains(&SilverSentence::PointInAll { point: point.to_string() }) {
        return Err(Error::DenseUnmeetable(format!(
            "{point:?} is already in every level"
        )));
    }
    let blocked: BTreeSet<u32> = p
        .sentences
        .iter()
        .filter_map(|s| match s {
            SilverSentence::BasicInside { basic, n } if space.basic_contains(*basic, point) => {
                Some(*n)
            }
            _ => None,
        })
        .collect();
    let n = (0..).find(|n| !blocked.contains(n)).unwrap();
    let mut out = p.clone();
    out.sentences.insert(SilverSentence::PointOutside { point: point.to_string(), n });
    Ok(out)
}

/// Least-indexed basic containing the point that can consistently sit
/// inside `U_n`, and the extended condition.
pub(super) fn extend_cover(
    space: &Space,
    p: &SilverCondition,
    point: &str,
    n: u32,
) -> Result<SilverCondition> {
    if !space.has_point(point) {
        return Err(Error::InvalidSpace(format!("unknown point {point:?}")));
    }
    let excluded: Vec<&String> = p
        .sentences
        .iter()
        .filter_map(|s| match s {
            SilverSentence::PointOutside { point, n: m } if *m == n => Some(point),
            _ => None,
        })
        .collect();
    for (i, b) in space.basics().iter().enumerate() {
        if b.members.contains(point) && excluded.iter().all(|y| !b.members.contains(*y)) {
            let mut out = p.clone();
            out.sentences.insert(SilverSentence::BasicInside { basic: i, n });
            return Ok(out);
        }
    }
    Err(Error::DenseUnmeetable(format!(
        "no declared basic covers {point:?} at level {n} consistently"
    )))
}

#[cfg(test)]
mod tests {
    use super::super::space::singleton_space;
    use super::*;

    fn cond(sentences: &[SilverSentence]) -> SilverCondition {
        SilverCondition { sentences: sentences.iter().cloned().collect() }
    }

    fn outside(point: &str, n: u32) -> SilverSentence {
        SilverSentence::PointOutside { point: point.into(), n }
    }

    fn in_all(point: &str) -> SilverSentence {
        SilverSentence::PointInAll { point: point.into() }
    }

    fn inside(basic: usize, n: u32) -> SilverSentence {
        SilverSentence::BasicInside { basic, n }
    }

    #[test]
    fn consistency_clauses() {
        let sp = singleton_space(&["x", "y"]);
        // Escaping a level while a basic covers you there.
        assert!(validate_silver(&sp, &cond(&[outside("x", 0), inside(0, 0)])).is_err());
        // Same basic at a different level is fine.
        assert!(validate_silver(&sp, &cond(&[outside("x", 0), inside(0, 1)])).is_ok());
        // Escaping while in every level.
        assert!(validate_silver(&sp, &cond(&[outside("x", 3), in_all("x")])).is_err());
        assert!(validate_silver(&sp, &cond(&[outside("x", 3), in_all("y")])).is_ok());
        assert!(validate_silver(&sp, &cond(&[inside(5, 0)])).is_err());
    }

    #[test]
    fn compatibility_is_union_consistency() {
        let sp = singleton_space(&["x", "y"]);
        let p = cond(&[outside("x", 0)]);
        let q = cond(&[inside(0, 0)]);
        assert!(!silver_compatible(&sp, &p, &q).unwrap());
        let r = cond(&[inside(1, 0)]);
        assert!(silver_compatible(&sp, &p, &r).unwrap());
    }

    #[test]
    fn escape_profiles_detect_incompatibility() {
        let p = cond(&[in_all("x"), outside("y", 0)]);
        let q = cond(&[outside("x", 1), outside("y", 0)]);
        let (sp, sq) = (escape_profile(&p), escape_profile(&q));
        assert_eq!(sp["x"], 0);
        assert_eq!(sq["x"], 2);
        assert!(profiles_incompatible(&sp, &sq));
        assert!(!profiles_incompatible(&sp, &escape_profile(&cond(&[outside("y", 0)]))));
    }

    #[test]
    fn incompatible_families_stay_incompatible_as_profiles() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let ids = ["p", "q", "r", "s", "t", "u"];
        let sp = singleton_space(&ids);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut masks: Vec<u32> = (0..64).collect();
        masks.shuffle(&mut rng);
        let family: Vec<SilverCondition> = masks[..50]
            .iter()
            .map(|m| {
                let sentences = ids
                    .iter()
                    .enumerate()
                    .map(|(i, x)| {
                        if m & (1 << i) != 0 {
                            in_all(x)
                        } else {
                            outside(x, 0)
                        }
                    })
                    .collect();
                SilverCondition { sentences }
            })
            .collect();
        for (i, p) in family.iter().enumerate() {
            for q in &family[i + 1..] {
                assert!(!silver_compatible(&sp, p, q).unwrap());
                assert!(profiles_incompatible(&escape_profile(p), &escape_profile(q)));
            }
        }
    }

    #[test]
    fn canonical_extensions() {
        let sp = singleton_space(&["x", "y"]);
        let top = SilverCondition::default();
        let p = extend_escape(&sp, &top, "x").unwrap();
        assert!(p.sentences.contains(&outside("x", 0)));
        // A covering sentence at level 0 pushes the escape to level 1.
        let covered = cond(&[inside(0, 0)]);
        let p = extend_escape(&sp, &covered, "x").unwrap();
        assert!(p.sentences.contains(&outside("x", 1)));
        assert!(extend_escape(&sp, &cond(&[in_all("x")]), "x").is_err());

        let q = extend_cover(&sp, &top, "y", 0).unwrap();
        assert!(q.sentences.contains(&inside(1, 0)));
        assert!(extend_cover(&sp, &cond(&[outside("y", 0)]), "y", 0).is_err());
    }
}
