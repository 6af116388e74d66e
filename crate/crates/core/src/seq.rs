//! Finite sequences of naturals, the node alphabet of every tree here.

use serde::{Deserialize, Serialize};
use std::fmt;

/// A finite sequence of naturals. Ordered shortlex: first by length, then
/// entrywise; every "least node" and every serialized node list in this
/// crate uses this order.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct Seq(pub Vec<u32>);

impl Seq {
    pub fn empty() -> Self {
        Seq(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The extension `self + [n]`.
    pub fn child(&self, n: u32) -> Seq {
        let mut v = self.0.clone();
        v.push(n);
        Seq(v)
    }

    /// Everything but the last entry; `None` for the empty sequence.
    pub fn parent(&self) -> Option<Seq> {
        if self.0.is_empty() {
            None
        } else {
            Some(Seq(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// The first `n` entries (all of them if `n` exceeds the length).
    pub fn truncate(&self, n: usize) -> Seq {
        Seq(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Seq) -> bool {
        self.0.len() <= other.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    pub fn is_proper_prefix_of(&self, other: &Seq) -> bool {
        self.0.len() < other.0.len() && self.is_prefix_of(other)
    }

    /// Comparable in the prefix order: one extends the other.
    pub fn comparable(&self, other: &Seq) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }
}

impl PartialOrd for Seq {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Seq {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Debug for Seq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ">")
    }
}

impl fmt::Display for Seq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl From<Vec<u32>> for Seq {
    fn from(v: Vec<u32>) -> Self {
        Seq(v)
    }
}

impl From<&[u32]> for Seq {
    fn from(v: &[u32]) -> Self {
        Seq(v.to_vec())
    }
}

#[macro_export]
macro_rules! seq {
    ($($x:expr),* $(,)?) => {
        $crate::seq::Seq(vec![$($x as u32),*])
    };
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortlex_orders_by_length_first() {
        assert!(seq![1] < seq![0, 0]);
        assert!(seq![0] < seq![1]);
        assert!(seq![0, 1] < seq![0, 2]);
        assert!(Seq::empty() < seq![0]);
    }

    #[test]
    fn prefix_relations() {
        assert!(Seq::empty().is_prefix_of(&seq![3]));
        assert!(seq![1, 2].is_prefix_of(&seq![1, 2]));
        assert!(!seq![1, 2].is_proper_prefix_of(&seq![1, 2]));
        assert!(seq![1].is_proper_prefix_of(&seq![1, 0]));
        assert!(!seq![2].is_prefix_of(&seq![1, 0]));
        assert!(seq![0, 1].comparable(&seq![0, 1, 5]));
        assert!(!seq![0, 1].comparable(&seq![0, 2]));
    }

    #[test]
    fn child_parent_round_trip() {
        let s = seq![4, 7];
        assert_eq!(s.child(9).parent().unwrap(), s);
        assert_eq!(Seq::empty().parent(), None);
    }
}
