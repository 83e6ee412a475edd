use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular cavity parameters: |denominator| = {magnitude:e}")]
    SingularParameters { magnitude: f64 },

    #[error("steady-state oracle did not converge within t = {horizon} (residual {residual:e})")]
    OracleFailure { horizon: f64, residual: f64 },

    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },

    #[error("bitstring {bits} out of range for {n} qubits")]
    BitstringOutOfRange { bits: usize, n: usize },

    #[error("environment label lists differ in length ({left} vs {right})")]
    EnvironmentMismatch { left: usize, right: usize },

    #[error("degenerate decision rule: {0}")]
    DegenerateRule(String),

    #[error("outcome v = {v} has zero probability density")]
    DegenerateOutcome { v: f64 },

    #[error("fidelity undefined: class success probability {success_prob:e} is below 1e-12")]
    UndefinedFidelity { success_prob: f64 },

    #[error("class {class} has no target state")]
    NoTarget { class: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_)
            | Error::QubitOutOfRange { .. }
            | Error::BitstringOutOfRange { .. }
            | Error::NoTarget { .. } => 2,
            Error::Io(_) => 1,
            _ => 3,
        }
    }
}
