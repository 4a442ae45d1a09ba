use thiserror::Error;

/// Errors produced by form construction, invariant computation and the
/// geometric/counting routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed form file: {0}")]
    Parse(String),

    #[error("zero factor at index {0}")]
    ZeroFactor(usize),

    #[error("not an integer form at this tolerance: max residual {residual:e} exceeds {tol:e}")]
    NotIntegerForm { residual: f64, tol: f64 },

    #[error("expanded form does not match the expected integer form: {0}")]
    ExpectedFormMismatch(String),

    #[error("matrix is not unimodular (|det| = {0})")]
    NotUnimodular(i64),

    #[error("zero form")]
    ZeroForm,

    #[error("the independence tuple set is empty")]
    EmptyTupleSet,

    #[error("coefficients {0} are not sorted nondecreasing")]
    UnsortedCoefficients(String),

    #[error("linear forms are dependent at the working tolerance")]
    DependentForms,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("a(F) is undefined (no admissible tuple)")]
    UndefinedA,

    #[error("a(F) = {0} is not below d/n; the solution volume is not finite")]
    NotFiniteVolume(String),

    #[error("form has finite volume; no degenerate direction set exists")]
    FiniteVolume,

    #[error("conjugate/span chain condition violated at step {0}")]
    ConjugateChain(usize),

    #[error("subspace basis is rank deficient")]
    RankDeficientBasis,

    #[error("candidate budget exhausted ({0} candidates)")]
    CandidateBudget(u64),

    #[error("search budget exhausted; largest sup-norm reached {achieved}")]
    SearchBudget { achieved: i64 },

    #[error("fewer than n linearly independent lattice points in the body")]
    TooFewLatticePoints,

    #[error("not of finite type; witness subspace {0}")]
    NotFiniteType(String),

    #[error("restriction is identically zero")]
    ZeroRestriction,
}

pub type Result<T> = std::result::Result<T, Error>;
