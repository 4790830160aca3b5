//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Errors produced by graph construction, distribution validation and the
/// bound/witness operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The edge set admits a directed cycle.
    CycleDetected,
    /// An operation referenced a variable name that is not declared.
    UnknownVariable(String),
    /// Two variables were declared with the same name.
    DuplicateName(String),
    /// A variable was declared with cardinality zero.
    ZeroCardinality(String),
    /// The sets of a separation query overlap.
    QuerySetsOverlap(String),
    /// Consecutive vertices of a supplied path are not adjacent.
    InvalidPath { from: String, to: String },
    /// A distribution entry is negative.
    NegativeEntry { index: usize },
    /// Entries do not sum to one within the accepted tolerance.
    NotNormalized { sum: f64 },
    /// Value count or factor dimensions do not match the declared axes.
    ShapeMismatch { expected: usize, got: usize },
    /// Conditioning on an event of probability zero.
    ZeroConditioningEvent { variable: String, value: usize },
    /// An expectation-value conversion was asked of a non-binary axis.
    NonBinaryAxis { axis: String, cardinality: usize },
    /// The supplied moments induce a probability below `-tolerance`.
    InfeasibleMoments { probability: f64 },
    /// An expectation value lies outside `[-1, 1]`.
    OutOfRange { value: f64 },
    /// The support is too large for the exact rectangle-cover search.
    TooLarge { entries: usize, max: usize },
    /// Every component of a factorization carries zero mass.
    ZeroMassComponent,
    /// The observed data does not cover a required variable.
    NoObservedData(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::CycleDetected => write!(f, "edge set admits a directed cycle"),
            Error::UnknownVariable(name) => write!(f, "unknown variable `{name}`"),
            Error::DuplicateName(name) => write!(f, "duplicate variable name `{name}`"),
            Error::ZeroCardinality(name) => {
                write!(f, "variable `{name}` must have cardinality >= 1")
            }
            Error::QuerySetsOverlap(name) => {
                write!(f, "variable `{name}` appears in more than one query set")
            }
            Error::InvalidPath { from, to } => {
                write!(f, "path step `{from}` -- `{to}` is not an edge of the graph")
            }
            Error::NegativeEntry { index } => {
                write!(f, "negative probability entry at flat index {index}")
            }
            Error::NotNormalized { sum } => {
                write!(f, "entries sum to {sum}, not 1 within tolerance")
            }
            Error::ShapeMismatch { expected, got } => {
                write!(f, "shape mismatch: expected {expected} values, got {got}")
            }
            Error::ZeroConditioningEvent { variable, value } => {
                write!(f, "cannot condition on {variable}={value}: event has probability 0")
            }
            Error::NonBinaryAxis { axis, cardinality } => {
                write!(f, "axis `{axis}` has cardinality {cardinality}, expected 2")
            }
            Error::InfeasibleMoments { probability } => {
                write!(f, "moments induce negative probability {probability}")
            }
            Error::OutOfRange { value } => {
                write!(f, "expectation value {value} outside [-1, 1]")
            }
            Error::TooLarge { entries, max } => {
                write!(f, "support has {entries} nonzero entries, exact search capped at {max}")
            }
            Error::ZeroMassComponent => {
                write!(f, "factorization has no component with positive mass")
            }
            Error::NoObservedData(name) => {
                write!(f, "data does not cover observed variable `{name}`")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
