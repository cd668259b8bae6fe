use thiserror::Error;

use crate::report::Report;

/// Errors raised by constructors and operations in this crate.
///
/// Verification routines never return these for a failed axiom; failures are
/// entries in a [`Report`]. Errors are reserved for malformed input and for
/// violated preconditions.
#[derive(Debug, Error)]
pub enum Error {
    #[error("table is not square: row {row} has length {len}, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("entry mult[{row}][{col}] = {value} is outside 0..{order}")]
    NotClosed { row: usize, col: usize, value: i64, order: usize },
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("element {0} has no two-sided inverse")]
    NoInverse(usize),
    #[error("associativity fails at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("measure carriers differ: {left} vs {right}")]
    CarrierMismatch { left: String, right: String },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("index {index} out of range 0..{bound}")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("invalid block system: {0}")]
    InvalidBlocks(String),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("permutation {index} is not an automorphism: sigma({p}*{q}) != sigma({p})*sigma({q})")]
    NotAnAutomorphism { index: usize, p: usize, q: usize },
    #[error("automorphism list is not a group: {0}")]
    NotAGroupOfAutomorphisms(String),
    #[error("counting measure is not preserved: sum of P(1_{element}) is {sum}")]
    HaarIncompatible { element: usize, sum: String },
    #[error("precondition failed in `{}`", .0.subject)]
    PreconditionFailed(Box<Report>),
    #[error("involution ill-defined: inverses of block {block} meet blocks {targets:?}")]
    InvolutionIllDefined { block: usize, targets: Vec<usize> },
    #[error("invariant measure system has no positive solution")]
    NoPositiveSolution,
    #[error("invariant measure system has a {0}-dimensional solution space")]
    NonUniqueSolution(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("hypergroup is not commutative: c[{0}][{1}] != c[{1}][{0}]")]
    NotCommutative(usize, usize),
    #[error("spectrum could not be separated after {0} attempts")]
    DegenerateSpectrum(usize),
    #[error("block decomposition failed after {attempts} attempts: {reason}")]
    DecompositionFailed { attempts: usize, reason: String },
    #[error("decomposition does not match hypergroup: {0}")]
    DecompositionMismatch(String),
    #[error("modular value kappa({0}) is not the square of a rational")]
    NonSquareModular(usize),
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
