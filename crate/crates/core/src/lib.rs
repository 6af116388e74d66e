//! Constructive descriptive set theory at explicit finite truncation scale.
//!
//! Everything in this crate is exact: ordinals below epsilon-zero are term
//! lists in Cantor normal form, trees are explicit finite node sets, Borel
//! codes are labeled finite trees evaluated by structural recursion, forcing
//! posets are finite condition sets driven by a deterministic
//! Rasiowa-Sikorski loop, and Borel hierarchies live inside finite boolean
//! algebras represented as atom bitmasks.
//!
//! The crate is organized by subject:
//!
//! * [`ordinal`]: notations below epsilon-zero with comparison and the
//!   successor-of-max rank step.
//! * [`tree`]: finite well-founded trees, canonical ranks, embeddings,
//!   the level product, perfect kernels and skeletons, scales, partial rank
//!   functions, and perfect-tree truncations with fusion.
//! * [`code`]: points with finite support, Borel codes, duality, the
//!   characteristic-function embedding, pairing, universal sets, and the
//!   Baire-to-Cantor block encoding.
//! * [`separation`]: Souslin scheme restrictions, product trees, the Kleene
//!   separator construction, and rank-based reduction.
//! * [`forcing`]: condition posets (finite partial functions, Silver-style
//!   sentence sets, tree-labeling conditions), rank-lowering condition
//!   surgery, infinitary sentences with ordinal rank, and the generic-filter
//!   simulation driver with extraction.
//! * [`hierarchy`]: level chains, ring closure alternation, and quotients in
//!   finite boolean algebras.
//!
//! All operations are deterministic; serialization of every public type is
//! stable, so equal inputs produce byte-identical outputs.

pub mod code;
pub mod forcing;
pub mod hierarchy;
pub mod ordinal;
pub mod separation;
pub mod seq;
pub mod sweep;
pub mod tree;

pub use ordinal::OrdinalNotation;
pub use seq::Seq;

use thiserror::Error;

/// Errors shared by every module: validation failures of structural
/// invariants and domain preconditions. Malformed serialized input is the
/// caller's concern (`serde_json::Error`); this type covers semantically
/// invalid but well-formed data.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid ordinal notation: {0}")]
    InvalidNotation(String),
    #[error("node set is not prefix-closed: missing {0}")]
    NotPrefixClosed(String),
    #[error("tree is empty (the root must be present)")]
    EmptyTree,
    #[error("pair node has coordinates of different lengths: {0}")]
    UnevenPair(String),
    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),
    #[error("splitting structure exhausted: {0}")]
    SplittingExhausted(String),
    #[error("fusion chain invalid: {0}")]
    FusionChain(String),
    #[error("skeleton level {0} cannot be split: no incompatible pair of extensions")]
    SkeletonStuck(u32),
    #[error("invalid code: {0}")]
    InvalidCode(String),
    #[error("branching window too small: {0}")]
    WindowExceeded(String),
    #[error("target not representable: {0}")]
    NotRepresentable(String),
    #[error("point not in the range of the encoding: {0}")]
    NotInRange(String),
    #[error("invalid field of sets: {0}")]
    InvalidFamily(String),
    #[error("invalid separation input: {0}")]
    InvalidScheme(String),
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("invalid condition: {0}")]
    InvalidCondition(String),
    #[error("invalid nice tree: {0}")]
    InvalidNiceTree(String),
    #[error("tree too shallow: {0}")]
    TooShallow(String),
    #[error("dense specification cannot be met: {0}")]
    DenseUnmeetable(String),
    #[error("transcript invalid: {0}")]
    BadTranscript(String),
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
