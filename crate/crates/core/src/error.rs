//! Library-wide error type.

/// Everything that can go wrong while building systems or constructing orbits.
///
/// Variants are deliberately specific: callers (and the CLI exit-code mapping)
/// distinguish "the math says no" from "the numerics gave up".
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("density must be positive, got {0}")]
    NonPositiveDensity(f64),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("end states must differ; got p_plus = p_minus = {0}")]
    EqualEndStates(f64),

    #[error("end states are not jump-consistent: {what} mismatch {mismatch:e}")]
    InconsistentShock { what: &'static str, mismatch: f64 },

    /// The momentum offset A = s·P± − J± vanished while the end states differ.
    /// A = 0 forces equal end states, so such input is self-contradictory.
    #[error("momentum offset A is zero with unequal end states; no such jump exists")]
    ZeroMomentumOffset,

    #[error("no sign change on bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("function evaluated to a non-finite value at {x}")]
    NonFiniteEval { x: f64 },

    #[error("iteration limit reached without meeting tolerance")]
    IterationLimit,

    #[error("bracket search failed: {0}")]
    BracketSearchFailed(String),

    #[error("ratio must exceed 1, got {0}")]
    RatioNotAboveOne(f64),

    #[error("point {at} is not an equilibrium (residual {residual:e})")]
    NotAnEquilibrium { at: f64, residual: f64 },

    #[error("step size underflow at y = {y}")]
    StepSizeUnderflow { y: f64 },

    #[error("state left the positivity domain at y = {y}")]
    PositivityLoss { y: f64 },

    #[error("step budget exhausted at y = {y}")]
    MaxStepsExceeded { y: f64 },

    #[error("state became non-finite at y = {y}")]
    NonFiniteState { y: f64 },

    #[error("the requested wave does not exist: {0}")]
    VerdictNotExists(String),

    #[error("orbit did not reach the target within the integration window (residual {residual:e} at y = {y})")]
    NoConvergence { y: f64, residual: f64 },

    /// Input outside the regimes for which a profile is established.
    #[error("configuration outside the proven existence regimes: {0}")]
    OutsideTheoremScope(String),

    #[error("neither momentum branch is Lax-admissible for these end states")]
    NoAdmissibleBranch,
}

pub type Result<T> = std::result::Result<T, Error>;
