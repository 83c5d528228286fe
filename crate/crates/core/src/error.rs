use alloc::string::String;

/// Errors raised by the algebra engine.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("malformed permutation: {0}")]
    MalformedPermutation(String),

    #[error("domain mismatch: expected {expected} points, found {found}")]
    DomainMismatch { expected: usize, found: usize },

    #[error("subgroup is not contained in the ambient group")]
    NotSubgroup,

    #[error("{what} = {value} exceeds the cap of {cap}")]
    Scale {
        what: &'static str,
        value: u128,
        cap: u128,
    },

    #[error("inconsistent coset table: {0}")]
    InvalidTable(String),

    #[error("operands belong to different algebras")]
    PairMismatch,

    #[error("R(x) != R(x^-1) for double coset {0}; the modular factor would not be trivial")]
    NotUnimodular(usize),

    #[error("element is not invariant: {0}")]
    NotInvariant(String),

    #[error("element is not self-adjoint (defect {0:e})")]
    NotSelfAdjoint(f64),

    #[error("unitary does not lie in the algebra span (residual {0:e})")]
    AlgebraMembership(f64),

    #[error("the pair is commutative; commutator moments are identically 1")]
    CommutativePair,

    #[error("search budget exhausted; best max moment {best}")]
    SearchFailed { best: f64 },

    #[error("eigen decomposition failed: {0}")]
    Spectral(String),

    #[error("element is not in the level-{level} subgroup: {reason}")]
    Level { level: usize, reason: String },

    #[error("tree shapes differ")]
    ShapeMismatch,

    #[error("invalid tree data: {0}")]
    InvalidTree(String),
}

pub type Result<T> = core::result::Result<T, Error>;
