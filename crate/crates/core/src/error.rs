use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dispersion relation jumps at k = {k}")]
    JumpDiscontinuity { k: f64 },

    #[error("dispersion relation is not differentiable at k = {k}")]
    NotDifferentiable { k: f64 },

    #[error("harmonic {mode} is resonant with the carrier (c0 - cp = {gap:e})")]
    WiltonResonance { mode: usize, gap: f64 },

    #[error("traveling-wave Newton iteration stalled at residual {residual:e}")]
    ContinuationFailure { residual: f64 },

    #[error("colliding modes share the group velocity {cg} (p0 = {p0})")]
    DegenerateGroupVelocity { p0: f64, cg: f64 },

    #[error("collision at p0 = {p0} has matching Krein signatures and does not destabilize")]
    StableCollision { p0: f64 },

    #[error("secondary resonance between modes {q} and {neighbour}")]
    SecondaryResonance { q: f64, neighbour: f64 },

    #[error("quartet coefficient E vanishes")]
    DegenerateQuartet,

    #[error("omega''(1) vanishes, modulational discriminant undefined")]
    DegenerateCurvature,

    #[error("modulational coefficient has a vanishing denominator ({0})")]
    BfResonance(&'static str),

    #[error("modulational discriminant {delta} is not positive; no figure-eight")]
    Stable { delta: f64 },

    #[error("amplitude must be positive on this branch, got {epsilon}")]
    SignRestriction { epsilon: f64 },

    #[error("eigenvalue solver did not converge")]
    EigFailure,

    #[error("eigenpair Newton iteration diverged (last residual {:e})", residuals.last().copied().unwrap_or(f64::NAN))]
    NewtonDiverged { residuals: Vec<f64> },

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("invalid model specification: {0}")]
    InvalidModel(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Wraps the error with a short description of what was being attempted.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// True for errors caused by bad user input rather than numerics.
    pub fn is_config(&self) -> bool {
        match self {
            Error::InvalidModel(_) | Error::Config(_) | Error::Io(_) | Error::Json(_) | Error::Csv(_) => true,
            Error::Context { source, .. } => source.is_config(),
            _ => false,
        }
    }
}
