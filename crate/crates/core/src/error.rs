use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("invalid inverse temperatures: {0}")]
    InvalidTemperatures(String),
    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),
    #[error("beta-energy overflow")]
    Overflow,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("cyclicity violated: catalyst marginal moved by {0:e}")]
    CyclicityViolated(f64),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("enumeration too large: {0}! permutations exceeds the guard")]
    EnumerationTooLarge(usize),
    #[error("invalid simple permutation: {0}")]
    InvalidSimplePerm(String),
    #[error("singular linear system")]
    Singular,
    #[error("infeasible catalyst: population p[{index}] = {value:e}")]
    InfeasibleCatalyst { index: usize, value: f64 },
    #[error("use linear solver at degenerate point")]
    DegeneratePoint,
    #[error("catalyst dimension {d} outside the window [{lo}, {hi}]")]
    OutsideWindow { d: usize, lo: f64, hi: f64 },
    #[error("closed-form and explicit stroke disagree by {0:e}")]
    Inconsistent(f64),
    #[error("not bistochastic: {0}")]
    NotBistochastic(String),
    #[error("no perfect matching on positive support")]
    NoPerfectMatching,
    #[error("LP failure: {0}")]
    Lp(String),
    #[error("not unitary: deviation {0:e}")]
    NotUnitary(f64),
    #[error("not a density matrix: {0}")]
    NotDensity(String),
}
