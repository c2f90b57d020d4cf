use thiserror::Error;

use crate::sequencer::config::Diagnostic;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right} qubits")]
    LengthMismatch { left: usize, right: usize },

    #[error("qubit index {qubit} out of range for a {n_qubits}-qubit chain")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("qubits {0} and {1} are not nearest neighbours")]
    NotNeighbours(usize, usize),

    #[error("term has imaginary phase and cannot enter a Hermitian sum")]
    NonHermitian,

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),

    #[error("{}", format_diagnostics(.0))]
    Parse(Vec<Diagnostic>),

    #[error("numerical failure at t = {time}: {reason}")]
    Numerical { time: f64, reason: String },

    #[error("schedule JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical { .. })
    }
}

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("\n")
}
