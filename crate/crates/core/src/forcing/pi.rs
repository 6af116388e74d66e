//! Negative-normal sentences over finitely many atoms: a sentence is an
//! atom or a conjunction of negations of simpler sentences. Evaluation
//! reports truth in a subset model together with the sentence's rank,
//! which counts nesting of the conjunction step.

use crate::ordinal::OrdinalNotation;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PiSentence {
    /// The k-th atomic statement.
    Atom(u32),
    /// Conjunction of the negations of the listed sentences.
    BigAndNeg(Vec<PiSentence>),
}

/// Evaluates a sentence in the model `y` over atoms `0..kappa`, returning
/// its truth value and rank. Atoms have rank zero; a conjunction of
/// negations has rank one more than its deepest member, at least one.
pub fn pi_eval(
    sentence: &PiSentence,
    y: &BTreeSet<u32>,
    kappa: u32,
) -> Result<(bool, OrdinalNotation)> {
    for a in y {
        if *a >= kappa {
            return Err(Error::InvalidInput(format!("model names atom {a} beyond the signature")));
        }
    }
    eval_inner(sentence, y, kappa)
}

fn eval_inner(
    sentence: &PiSentence,
    y: &BTreeSet<u32>,
    kappa: u32,
) -> Result<(bool, OrdinalNotation)> {
    match sentence {
        PiSentence::Atom(k) => {
            if *k >= kappa {
                return Err(Error::InvalidInput(format!("atom {k} beyond the signature")));
            }
            Ok((y.contains(k), OrdinalNotation::zero()))
        }
        PiSentence::BigAndNeg(members) => {
            let mut truth = true;
            let mut rank = OrdinalNotation::zero();
            for m in members {
                let (t, r) = eval_inner(m, y, kappa)?;
                truth &= !t;
                let bumped = r.succ();
                if bumped > rank {
                    rank = bumped;
                }
            }
            if rank.is_zero() {
                rank = OrdinalNotation::from_nat(1);
            }
            Ok((truth, rank))
        }
    }
}
