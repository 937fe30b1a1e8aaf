//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the slice, proof-check, vector and
/// optimizer layers. Variants carry the offending values so callers can
/// print actionable messages.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension n must be at least 2 (got {0})")]
    DimensionTooSmall(usize),

    #[error("slice level s = {s} is outside [sqrt(n), n] = [{lo}, {hi}] for n = {n}")]
    LevelOutOfRange { n: usize, s: f64, lo: f64, hi: f64 },

    #[error("value {name} = {value} must be finite")]
    NonFinite { name: &'static str, value: f64 },

    #[error("point has {got} coordinates, expected {expected}")]
    WrongCoordinateCount { got: usize, expected: usize },

    #[error(
        "coordinate {index} = {value} violates the box bounds [{lo}, 1] beyond tolerance {tol}"
    )]
    CoordinateOutOfBox {
        index: usize,
        value: f64,
        lo: f64,
        tol: f64,
    },

    #[error("coordinate sum {sum} deviates from the slice level {s} by more than {tol}")]
    SumMismatch { sum: f64, s: f64, tol: f64 },

    #[error("no feasible structured candidate on the slice (n = {n}, s = {s})")]
    EmptySlice { n: usize, s: f64 },

    #[error("branch index j = {j} is outside 1..={n}")]
    BranchIndexOutOfRange { j: usize, n: usize },

    #[error("evaluation point x = {x} lies outside the branch interval [{lo}, {hi}]")]
    OutsideBranchInterval { x: f64, lo: f64, hi: f64 },

    #[error("grid must have at least {min} points (got {got})")]
    GridTooCoarse { got: usize, min: usize },

    #[error("derivative sign indeterminate on the grid: {count} near-zero values")]
    IndeterminateSign { count: usize },

    #[error("analysis requires n >= {min} (got {n})")]
    DimensionBelowAnalysisRange { n: usize, min: usize },

    #[error("input matrix must be square: row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },

    #[error("non-finite entry at row {row}, column {col}")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("row {row} has norm {norm}; only rows within {tol} of unit norm are renormalized")]
    RowNotUnit { row: usize, norm: f64, tol: f64 },

    #[error("generator parameter {name} = {value} is out of range ({requirement})")]
    BadGeneratorParam {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("n = {n} exceeds the limit {limit} for {what}")]
    TooLarge {
        n: usize,
        limit: usize,
        what: &'static str,
    },

    #[error("vector has {got} coordinates, set is {expected}-dimensional")]
    DimensionMismatch { got: usize, expected: usize },

    #[error("witness vector has norm {norm}; must be within {tol} of 1")]
    PointNotUnit { norm: f64, tol: f64 },

    #[error("|<x, v_{index}>| < {min:e}: the log-product gradient is undefined here")]
    DegeneratePoint { index: usize, min: f64 },

    #[error("restart count must be at least 1")]
    NoRestarts,

    #[error("invalid optimizer configuration: {0}")]
    BadConfig(&'static str),

    #[error("every optimizer start was degenerate (some inner product pinned at zero)")]
    AllStartsDegenerate,

    #[error("longest-sum result is not maximal for this set: {source}")]
    NonMaximalLongestSum {
        #[source]
        source: Box<Error>,
    },
}
