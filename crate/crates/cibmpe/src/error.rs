//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong while validating, building, solving or
/// verifying a game. Stage numbers in messages are 1-based, matching the
/// text reports.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse `{0}` as a rational (expected `p/q` or an integer)")]
    BadRational(String),

    #[error("game file: {0}")]
    SpecFile(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("horizon must be at least 1")]
    ZeroHorizon,

    #[error("label set `{0}` is empty")]
    EmptyLabelSet(String),

    #[error("label set `{set}` contains duplicate label `{label}`")]
    DuplicateLabel { set: String, label: String },

    #[error("{what}: expected shape {expected}, got {got}")]
    ShapeMismatch {
        what: String,
        expected: String,
        got: String,
    },

    #[error("{kernel} row (stage {stage}, {row}) sums to {total}, not 1")]
    NonStochasticRow {
        kernel: String,
        stage: usize,
        row: String,
        total: String,
    },

    #[error("{kernel} entry (stage {stage}, {row}) is negative: {value}")]
    NegativeEntry {
        kernel: String,
        stage: usize,
        row: String,
        value: String,
    },

    #[error("{what} out of range: {detail}")]
    OutOfRange { what: String, detail: String },

    #[error("information structure `{structure}` incompatible with game: {reason}")]
    IncompatibleGame { structure: String, reason: String },

    #[error("argument out of declared domain: {0}")]
    OutOfDomain(String),

    #[error("stage mismatch: expected {expected}, got {got}")]
    StageMismatch { expected: usize, got: usize },

    #[error("increment `{z}` has probability zero at stage {stage}; conditional belief undefined")]
    ZeroProbabilityIncrement { stage: usize, z: String },

    #[error("increment `{z}` is unreachable from the given belief at stage {stage}")]
    UnreachableIncrement { stage: usize, z: String },

    #[error("missing continuation value at stage {stage} for successor belief [{belief}]")]
    MissingContinuationValue { stage: usize, belief: String },

    #[error("no pure-strategy stage equilibrium at stage {stage}, belief [{belief}]")]
    NoPureEquilibrium { stage: usize, belief: String },

    #[error(
        "cost tensors differ at (x={x}, u1={u1}, u2={u2}): controller 1 has {c1}, controller 2 has {c2}"
    )]
    NotATeam {
        x: String,
        u1: String,
        u2: String,
        c1: String,
        c2: String,
    },

    #[error("belief enumeration budget exceeded at stage {stage} (frontier {frontier})")]
    BudgetExceeded { stage: usize, frontier: usize },

    #[error("strategy-independence check failed: {0}")]
    IndependenceFailed(String),

    #[error("strategy-independence check inconclusive (frontier {frontier} at stage {stage})")]
    IndependenceInconclusive { stage: usize, frontier: usize },

    #[error("selection rule rejected every stage equilibrium at stage {stage}, belief [{belief}]: {reason}")]
    SelectionFailed {
        stage: usize,
        belief: String,
        reason: String,
    },

    #[error("strategy profile has no entry for {0}")]
    MissingProfileEntry(String),

    #[error("profile does not match game: {0}")]
    ProfileMismatch(String),

    #[error("internal defect: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
