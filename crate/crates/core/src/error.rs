use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("metric is singular or not positive definite (min eigenvalue {min_eigenvalue:e})")]
    SingularMetric { min_eigenvalue: f64 },
    #[error("trajectory left the chart domain at t = {t}")]
    LeftChartDomain { t: f64 },
    #[error("finite-difference step {h:e} is outside the quadratic regime (ratio {ratio:.3})")]
    StepTooLarge { h: f64, ratio: f64 },
    #[error("chart is not Kähler: {check} residual {residual:e}")]
    NotKahler { check: &'static str, residual: f64 },
    #[error("spectrum is degenerate (gap {gap:e} below {threshold:e})")]
    DegenerateSpectrum { gap: f64, threshold: f64 },
    #[error("eigenvalue μ = {mu:e} vanishes, θ = d ln|μ| is undefined")]
    MuVanishes { mu: f64 },
    #[error("expected a {expected}-dimensional distribution, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("form failed the Hamiltonian residual check ({residual:e})")]
    NotHamiltonian { residual: f64 },
    #[error("tensor failed the Killing residual check ({residual:e})")]
    NotKilling { residual: f64 },
    #[error("bad model parameters: {0}")]
    BadParameters(&'static str),
    #[error("invalid momentum profile: {0}")]
    ProfileInvalid(&'static str),
    #[error("no usable sample points: {0}")]
    DegenerateSample(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
