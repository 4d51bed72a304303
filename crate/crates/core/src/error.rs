use thiserror::Error;

/// Errors surfaced by the solver and its I/O layers.
#[derive(Debug, Error)]
pub enum HwmError {
    /// Two fields (or a field and an operator) live on different grids.
    #[error("grid mismatch: operands live on different grids")]
    GridMismatch,

    /// A parameter is outside the operator's admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    /// Config file problem, reported with the first offending line.
    #[error("config error{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },

    /// The time stepper produced a non-finite value. For ε > 0 the flow is
    /// globally regular, so this always indicates a discretization problem.
    #[error("blow-up detected at t = {time}: |u|_inf = {norm} (non-finite state)")]
    BlowUp { time: f64, norm: f64 },

    /// Snapshot file is malformed (bad magic, truncation, version).
    #[error("snapshot error: {0}")]
    Snapshot(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl HwmError {
    pub fn domain(msg: impl Into<String>) -> Self {
        HwmError::Domain(msg.into())
    }

    pub fn config(line: Option<usize>, msg: impl Into<String>) -> Self {
        HwmError::Config {
            line,
            message: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, HwmError>;
