use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter lies outside its physical or numerical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The transition source |m⟩⟨n| has no closed-form coefficients.
    #[error(
        "unsupported transition source |{m}><{n}|: closed forms exist only for \
         (m,n) in {{(0,0),(0,1),(1,0),(1,1),(2,2)}}"
    )]
    UnsupportedSource { m: usize, n: usize },

    /// The Fock cutoff truncates too much weight for the requested channel.
    #[error("cutoff {cutoff} too small: truncated tail weight {tail:.3e} exceeds {tol:.1e}")]
    CutoffTail { cutoff: usize, tail: f64, tol: f64 },

    /// Operands live on different Fock cutoffs.
    #[error("cutoff mismatch: {0} vs {1}")]
    CutoffMismatch(usize, usize),

    /// Operands live on different phase-space grids.
    #[error("grid mismatch: (L={0}, M={1}) vs (L={2}, M={3})")]
    GridMismatch(f64, usize, f64, usize),

    /// A matrix fails the density-operator invariants.
    #[error("not a density operator: {0}")]
    NotDensity(String),

    /// A matrix is not Hermitian within tolerance.
    #[error("matrix not Hermitian: max |A - A^H| element is {0:.3e}")]
    NotHermitian(f64),

    /// A scalar-optimization bracket has no interior maximum.
    #[error("bracket error: {0}")]
    Bracket(String),

    /// A series truncation bound was not met.
    #[error("truncation error: {0}")]
    Truncation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
