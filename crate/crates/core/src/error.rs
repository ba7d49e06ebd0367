use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("{func}: argument {arg} outside the domain {domain}")]
    Domain {
        func: &'static str,
        arg: f64,
        domain: &'static str,
    },

    #[error("character {index} mod {q}: |character sum| = {magnitude:e} is numerically zero")]
    NumericalDegeneracy { q: u64, index: usize, magnitude: f64 },

    #[error("q = {q} exceeds the cost guard {limit} for {what}")]
    CostGuard { q: u64, limit: u64, what: &'static str },

    #[error("the principal character has a pole at s = 1")]
    PrincipalCharacter,

    #[error("expected {expected} L(1, chi) values, got {got}")]
    MissingL1Values { expected: usize, got: usize },

    #[error("log L_P({n}, chi_{index}) mod {q} = {value:e} exceeds the bound {bound:e}")]
    TruncationBound {
        q: u64,
        n: u32,
        index: usize,
        value: f64,
        bound: f64,
    },

    #[error("sum over characters of log L_P({n}, chi^{n}) mod {q} = {value:e} exceeds the bound {bound:e}")]
    AggregateTruncationBound { q: u64, n: u32, value: f64, bound: f64 },

    #[error("q = {q}: {what} = {value} violates the bound {bound}")]
    BoundViolated {
        q: u64,
        what: &'static str,
        value: f64,
        bound: f64,
    },

    #[error("verification failed for q = {q}: {what} differ by {diff:e} > {tol:e}")]
    VerificationFailed {
        q: u64,
        what: &'static str,
        diff: f64,
        tol: f64,
    },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: schema mismatch: {detail}")]
    Schema { path: PathBuf, detail: String },

    #[error("{path}: {} malformed row(s); first at line {}: {}", .errors.len(), .errors[0].0, .errors[0].1)]
    MalformedRows { path: PathBuf, errors: Vec<(u64, String)> },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
