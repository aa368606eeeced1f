use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability {prob} is negative or not a number")]
    InvalidProbability { prob: f64 },
    #[error("atom value is not a number")]
    InvalidValue,
    #[error("total mass {total} differs from one")]
    NotNormalized { total: f64 },
    #[error("variance is zero")]
    ZeroVariance,
    #[error("mean {mean} is not zero")]
    NonzeroMean { mean: f64 },
    #[error("segment [{lo}, {hi}] is empty or reversed")]
    InvalidSegment { lo: f64, hi: f64 },
    #[error("{what}: expected length {expected}, got {got}")]
    LengthMismatch { what: &'static str, expected: usize, got: usize },
    #[error("triple violates the zbest identity at degree {degree} (residual {residual:e})")]
    NotZbest { degree: u32, residual: f64 },
    #[error("reweighting factor {value} at atom {index} is negative")]
    NegativeWeight { index: usize, value: f64 },
    #[error("atom {index} has W'' != W' but zero weight")]
    SupportViolation { index: usize },
    #[error("atom {index} has DG = {value} < 0")]
    SignViolation { index: usize, value: f64 },
    #[error("parameter {name} out of range")]
    InvalidParameter { name: &'static str },
    #[error("pair law is not exchangeable at ({w_pp}, {w}): {mass} vs {swapped}")]
    NotExchangeable { w_pp: f64, w: f64, mass: f64, swapped: f64 },
    #[error("regression condition {form} fails at w = {worst_value} (residual {residual:e})")]
    RegressionViolation { form: &'static str, worst_value: f64, residual: f64 },
    #[error("coordinate {index} has P(X_i = 1) = {prob}, not in (0, 1)")]
    DegenerateCoordinate { index: usize, prob: f64 },
    #[error("coupler for coordinate {index} has wrong {which} marginal (discrepancy {discrepancy:e})")]
    MarginalMismatch { index: usize, which: &'static str, discrepancy: f64 },
    #[error("indicator vector of length {n} does not fit in 64 bits")]
    TooManyCoordinates { n: usize },
    #[error("coupling is not monotone at atom {index}: W'' = {w_pp} < W' = {w_p}")]
    NotMonotone { index: usize, w_pp: f64, w_p: f64 },
    #[error("G is not the constant mean at atom {index}")]
    NonconstantGain { index: usize },
    #[error("need at least two samples, got {got}")]
    TooFewSamples { got: usize },
    #[error("bound input {name} is negative")]
    NegativeInput { name: &'static str },
    #[error("n = {n} is odd")]
    OddN { n: usize },
    #[error("n = {n} is below the minimum {min}")]
    NTooSmall { n: usize, min: usize },
    #[error("exact enumeration supports even n in 4..=6, got {n}")]
    UnsupportedN { n: usize },
    #[error("invalid toggle matrix: {reason}")]
    InvalidConfiguration { reason: &'static str },
    #[error("middle-stage toggles of bulbs {i} and {j} are equal")]
    PreconditionViolation { i: usize, j: usize },
    #[error("no candidate index at stage {stage} for bulb {bulb} (excluding {excluded})")]
    EmptyCandidateSet { stage: usize, bulb: usize, excluded: usize },
}
