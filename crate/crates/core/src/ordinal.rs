//! Ordinal notations below epsilon-zero in Cantor normal form.
//!
//! A notation is a finite sum `w^e1*c1 + ... + w^ek*ck` with exponents `ei`
//! that are themselves notations, kept in strictly decreasing order, and
//! coefficients `ci >= 1`. Zero is the empty sum. Comparison is the usual
//! Cantor-normal-form order; because the term list is kept normalized it
//! coincides with lexicographic comparison of the term lists, so `Ord` can be
//! derived structurally.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// An ordinal below epsilon-zero, as a Cantor-normal-form term list.
///
/// Serialized as nested arrays of `[exponent, coefficient]` pairs; zero is
/// the empty array. For example `w^2*3 + 1` is `[[[[[],2]],3],[[],1]]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<(OrdinalNotation, u64)>", into = "Vec<(OrdinalNotation, u64)>")]
pub struct OrdinalNotation {
    terms: Vec<(OrdinalNotation, u64)>,
}

impl TryFrom<Vec<(OrdinalNotation, u64)>> for OrdinalNotation {
    type Error = Error;

    fn try_from(terms: Vec<(OrdinalNotation, u64)>) -> Result<Self> {
        OrdinalNotation::from_terms(terms)
    }
}

impl From<OrdinalNotation> for Vec<(OrdinalNotation, u64)> {
    fn from(o: OrdinalNotation) -> Self {
        o.terms
    }
}

impl OrdinalNotation {
    /// The empty sum.
    pub fn zero() -> Self {
        OrdinalNotation { terms: Vec::new() }
    }

    /// The finite ordinal `n`, i.e. `w^0*n` for positive `n`.
    pub fn from_nat(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            OrdinalNotation { terms: vec![(Self::zero(), n)] }
        }
    }

    /// `w^1*1`.
    pub fn omega() -> Self {
        Self::omega_pow(Self::from_nat(1))
    }

    /// `w^e*1`.
    pub fn omega_pow(e: OrdinalNotation) -> Self {
        OrdinalNotation { terms: vec![(e, 1)] }
    }

    /// Builds a notation from raw terms, rejecting non-normal input:
    /// exponents must strictly decrease and coefficients must be positive.
    pub fn from_terms(terms: Vec<(OrdinalNotation, u64)>) -> Result<Self> {
        for (i, (e, c)) in terms.iter().enumerate() {
            if *c == 0 {
                return Err(Error::InvalidNotation(format!("coefficient 0 at term {i}")));
            }
            if i > 0 && terms[i - 1].0 <= *e {
                return Err(Error::InvalidNotation(format!(
                    "exponents not strictly decreasing at term {i}"
                )));
            }
        }
        Ok(OrdinalNotation { terms })
    }

    pub fn terms(&self) -> &[(OrdinalNotation, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the notation is a successor, i.e. its last term is finite.
    pub fn is_successor(&self) -> bool {
        matches!(self.terms.last(), Some((e, _)) if e.is_zero())
    }

    /// True for nonzero notations whose last term is infinite.
    pub fn is_limit(&self) -> bool {
        matches!(self.terms.last(), Some((e, _)) if !e.is_zero())
    }

    /// The finite value, if the notation denotes a natural number.
    pub fn as_nat(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(e, c)] if e.is_zero() => Some(*c),
            _ => None,
        }
    }

    /// `self + 1`.
    pub fn succ(&self) -> Self {
        let mut terms = self.terms.clone();
        match terms.last_mut() {
            Some((e, c)) if e.is_zero() => *c += 1,
            _ => terms.push((Self::zero(), 1)),
        }
        OrdinalNotation { terms }
    }

    /// `self - 1` for successors.
    pub fn pred(&self) -> Option<Self> {
        if !self.is_successor() {
            return None;
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().expect("successor has a last term");
        if last.1 > 1 {
            last.1 -= 1;
        } else {
            terms.pop();
        }
        Some(OrdinalNotation { terms })
    }

    /// For a limit `l`, the `n`-th member of its canonical increasing
    /// approximating sequence. Writing `l = g + w^e` (splitting one `w^e`
    /// off the final term):
    ///
    /// * if `e` is a successor, `l[n] = g + w^(e-1)*n`;
    /// * if `e` is a limit, `l[n] = g + w^(e[n])`.
    ///
    /// The sequence is strictly increasing with supremum `l`. Returns `None`
    /// for zero and successors.
    pub fn fundamental(&self, n: u64) -> Option<Self> {
        if !self.is_limit() {
            return None;
        }
        let mut terms = self.terms.clone();
        let (e, c) = terms.pop().expect("limit is nonzero");
        if c > 1 {
            terms.push((e.clone(), c - 1));
        }
        if e.is_successor() {
            let d = e.pred().expect("successor exponent");
            if n > 0 {
                terms.push((d, n));
            }
        } else {
            let en = e.fundamental(n).expect("limit exponent");
            if !en.is_zero() {
                terms.push((en, 1));
            } else {
                // w^(e[0]) = w^0 = 1 contributes a finite term.
                terms.push((OrdinalNotation::zero(), 1));
            }
        }
        Some(OrdinalNotation { terms })
    }
}

/// Three-way Cantor-normal-form comparison.
pub fn ord_cmp(a: &OrdinalNotation, b: &OrdinalNotation) -> std::cmp::Ordering {
    a.cmp(b)
}

/// The rank step `sup { c + 1 : c in children }`: zero for no children,
/// otherwise the successor of the maximum.
pub fn ord_rank_sup(children: &[OrdinalNotation]) -> OrdinalNotation {
    match children.iter().max() {
        None => OrdinalNotation::zero(),
        Some(m) => m.succ(),
    }
}

impl fmt::Display for OrdinalNotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if e.is_zero() {
                write!(f, "{c}")?;
            } else {
                if e.as_nat() == Some(1) {
                    write!(f, "w")?;
                } else if e.terms.len() == 1 && e.terms[0].1 == 1 && e.terms[0].0.as_nat().is_some()
                {
                    write!(f, "w^{}", e)?;
                } else {
                    write!(f, "w^({})", e)?;
                }
                if *c > 1 {
                    write!(f, "*{c}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for OrdinalNotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
