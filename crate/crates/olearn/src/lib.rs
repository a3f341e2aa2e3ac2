//! Online learning of finite concept classes.
//!
//! The library computes exact combinatorial dimensions (Littlestone, VC,
//! dual VC, dual Helly, threshold), exact optimal mistake bounds and
//! equivalence-query complexity on small instances, and runs three online
//! learners with proof-grade bookkeeping:
//!
//! * a weighted-cover learner that uses hypotheses from an arbitrary class
//!   `H` and makes at most `4·L·K·ln(2K)` mistakes,
//! * a margin-vote learner whose predictors are sparse votes of concepts,
//!   with a majority wrapper achieving at most `80·L` mistakes,
//! * an agnostic randomized-proper learner built from mistake-set experts
//!   and exponential weights.
//!
//! Underneath sits finite zero-sum game machinery: an exact rational game
//! solver, an iterative multiplicative-weights solver with a certified
//! duality gap, triangular-submatrix dimension, and verified sparsification
//! searches (epsilon-nets over examples and dual epsilon-approximations over
//! concepts).
//!
//! Everything that feeds a mistake-bound argument is computed in exact
//! rational arithmetic; floats appear only in the iterative game solver and
//! in the exponential-weights aggregator.

pub mod agnostic;
pub mod bits;
pub mod concepts;
pub mod cover;
pub mod dims;
pub mod games;
pub mod harness;
pub mod learner_helly;
pub mod learner_vote;
pub mod rng;
pub mod soa;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use concepts::{Concept, ConceptClass, ExampleSequence, Instance, LabeledExample};

/// Exact rational scalar used for weights, votes, and game values.
pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: i64) -> Rat {
    BigRational::from_integer(BigInt::from(v))
}

/// A count that may be infinite (unbounded adversary / no finite Helly number).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Count {
    Finite(u64),
    Infinite,
}

impl Count {
    pub fn finite(self) -> Option<u64> {
        match self {
            Count::Finite(v) => Some(v),
            Count::Infinite => None,
        }
    }

    pub fn plus(self, k: u64) -> Count {
        match self {
            Count::Finite(v) => Count::Finite(v + k),
            Count::Infinite => Count::Infinite,
        }
    }
}

impl std::fmt::Display for Count {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Count::Finite(v) => write!(f, "{v}"),
            Count::Infinite => write!(f, "inf"),
        }
    }
}

/// `log(z) = max(ln z, 1)` for `z >= 1`; the convention used by every bound
/// in this crate that is written with `log`.
pub fn log1(z: f64) -> f64 {
    z.ln().max(1.0)
}

#[derive(thiserror::Error, Debug)]
pub enum Error {
    #[error("class must not be empty (pass an explicit empty class if intended)")]
    EmptyClass,
    #[error("rows must have length >= 1")]
    ZeroLengthRow,
    #[error("ragged rows: expected length {expected}, got {got}")]
    RaggedRows { expected: usize, got: usize },
    #[error("instance {x} out of range for domain of size {domain}")]
    InstanceOutOfRange { x: usize, domain: usize },
    #[error("classes are over different domains ({left} vs {right})")]
    DomainMismatch { left: usize, right: usize },
    #[error("{what} cap exceeded (limit {limit})")]
    CapExceeded { what: &'static str, limit: u64 },
    #[error("stream is not realizable; first violating prefix has length {prefix_len}")]
    UnrealizableStream { prefix_len: usize },
    #[error("cannot parse class file at line {line}: {message}")]
    ParseClass { line: usize, message: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(
        "tolerance {tol} not reached within {iterations} iterations (achieved gap {achieved})"
    )]
    ToleranceNotReached {
        tol: f64,
        achieved: f64,
        iterations: u64,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("verified search failed after {doublings} doublings at size {size}; this signals a defect: {context}")]
    VerifiedSearchFailed {
        doublings: u32,
        size: usize,
        context: &'static str,
    },
    #[error("internal defect: {0}")]
    Defect(String),
    #[error("io error on {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
