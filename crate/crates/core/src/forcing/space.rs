//! Declared finite spaces: labeled points and basic sets with explicit
//! membership tables. Separation properties become checkable facts about
//! the table instead of ambient assumptions.

use crate::code::BasicClopen;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// A basic set: its clopen shape and the declared points inside it.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BasicSet {
    pub set: BasicClopen,
    pub members: BTreeSet<String>,
}

/// A finite labeled point set with a list of basic sets over it.
/// Basic sets are referenced by index everywhere.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "SpaceRaw", into = "SpaceRaw")]
pub struct Space {
    points: Vec<String>,
    basics: Vec<BasicSet>,
}

#[derive(Serialize, Deserialize)]
struct SpaceRaw {
    points: Vec<String>,
    basics: Vec<BasicSet>,
}

impl TryFrom<SpaceRaw> for Space {
    type Error = Error;

    fn try_from(raw: SpaceRaw) -> Result<Self> {
        Space::new(raw.points, raw.basics)
    }
}

impl From<Space> for SpaceRaw {
    fn from(s: Space) -> Self {
        SpaceRaw { points: s.points, basics: s.basics }
    }
}

impl Space {
    pub fn new(points: Vec<String>, basics: Vec<BasicSet>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for p in &points {
            if !seen.insert(p) {
                return Err(Error::InvalidSpace(format!("duplicate point {p:?}")));
            }
        }
        for (i, b) in basics.iter().enumerate() {
            for m in &b.members {
                if !seen.contains(m) {
                    return Err(Error::InvalidSpace(format!(
                        "basic {i} contains unknown point {m:?}"
                    )));
                }
            }
        }
        Ok(Space { points, basics })
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn basics(&self) -> &[BasicSet] {
        &self.basics
    }

    pub fn has_point(&self, id: &str) -> bool {
        self.points.iter().any(|p| p == id)
    }

    pub fn basic_contains(&self, basic: usize, id: &str) -> bool {
        self.basics.get(basic).is_some_and(|b| b.members.contains(id))
    }

    /// Every two distinct points are separated by some basic containing
    /// the first and not the second.
    pub fn check_separating(&self) -> Result<()> {
        for x in &self.points {
            for y in &self.points {
                if x == y {
                    continue;
                }
                let ok = self
                    .basics
                    .iter()
                    .any(|b| b.members.contains(x) && !b.members.contains(y));
                if !ok {
                    return Err(Error::InvalidSpace(format!(
                        "no basic separates {x:?} from {y:?}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A space of named points with singleton basics, the simplest separating
/// table. Basic `i` has shape cylinder-at-`i` and contains exactly point `i`.
pub fn singleton_space(ids: &[&str]) -> Space {
    use crate::seq::Seq;
    let points: Vec<String> = ids.iter().map(|s| s.to_string()).collect();
    let basics = points
        .iter()
        .enumerate()
        .map(|(i, p)| BasicSet {
            set: BasicClopen::Cyl(Seq(vec![i as u32])),
            members: [p.clone()].into_iter().collect(),
        })
        .collect();
    Space::new(points, basics).expect("singleton tables are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Space::new(vec!["x".into(), "x".into()], vec![]).is_err());
        let b = BasicSet { set: BasicClopen::Empty, members: ["y".to_string()].into() };
        assert!(Space::new(vec!["x".into()], vec![b]).is_err());
    }

    #[test]
    fn separation_is_checked_against_the_table() {
        let s = singleton_space(&["x", "y", "z"]);
        assert!(s.check_separating().is_ok());
        let lumped = Space::new(
            vec!["x".into(), "y".into()],
            vec![BasicSet {
                set: BasicClopen::Empty,
                members: ["x".to_string(), "y".to_string()].into(),
            }],
        )
        .unwrap();
        assert!(lumped.check_separating().is_err());
    }

    #[test]
    fn serialization_round_trips() {
        let s = singleton_space(&["x", "y"]);
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<Space>(&j).unwrap(), s);
    }
}
