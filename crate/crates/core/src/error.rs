use crate::HalfInt;

/// Errors raised by the algebraic and spectral routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("structure constants are not antisymmetric at ({i}, {j}, {k})")]
    NotAntisymmetric { i: usize, j: usize, k: usize },

    #[error("unknown basis label `{0}`")]
    UnknownLabel(alloc::string::String),

    #[error("algebra is solvable")]
    Solvable,

    #[error("not a subalgebra: bracket closure residual {residual:e}")]
    NotSubalgebra { residual: f64 },

    #[error("no complement found within search space")]
    NoComplement,

    #[error("lambda out of range: {0} (continuous class needs lambda < -1/4)")]
    LambdaOutOfRange(f64),

    #[error("invalid irrep parameter: {0}")]
    InvalidIrrep(&'static str),

    #[error("window outside irrep support")]
    WindowOutsideSupport,

    #[error("window endpoint {0} is not on the irrep's m-grid")]
    WindowOffGrid(HalfInt),

    #[error("invalid irrep window: negative ladder radicand {radicand:e} at m = {m}")]
    InvalidIrrepWindow { m: HalfInt, radicand: f64 },

    #[error("j = {0} is incompatible with the irrep's m-grid")]
    SectorParity(HalfInt),

    #[error("empty sector")]
    EmptySector,

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("quantum numbers (n_a = {n_a}, n_b = {n_b}, m = {m}) are outside the irrep")]
    InvalidQuantumNumbers { n_a: u32, n_b: u32, m: HalfInt },

    #[error("non-Hermitian input: residual {residual:e}")]
    NonHermitian { residual: f64 },

    #[error("eigensolver did not converge: {0}")]
    NoConvergence(&'static str),

    #[error("level-matching ambiguity at t = {t}")]
    LevelMatchingAmbiguity { t: f64 },

    #[error("truncation ladder needs at least {needed} rungs, got {got}")]
    ShortLadder { needed: usize, got: usize },

    #[error("no sign matches")]
    NoSignMatch,

    #[error("no conserved rotation generator among the candidates")]
    NoConservedGenerator,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
