use thiserror::Error;

/// Errors produced anywhere in the simulation stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("missing required key `{0}`")]
    MissingKey(String),

    #[error("value out of range for `{field}`: {reason}")]
    OutOfRange { field: String, reason: String },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("degenerate trap: omega_x == omega_y with nonzero coupling angle")]
    DegenerateTrap,

    #[error("empty grid")]
    EmptyGrid,

    #[error("non-finite state at step {step} (t = {t}); reduce dt")]
    StepTooLarge { step: usize, t: f64 },

    #[error("non-finite Langevin state at step {step}{}", trajectory.map(|k| format!(" in trajectory {k}")).unwrap_or_default())]
    NonFinite { step: usize, trajectory: Option<usize> },

    #[error("cooling backaction Gamma_c{mode} > 0 requires gamma_c{mode} > 0")]
    InvalidCooling { mode: char },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("susceptibility pole hit in {which} denominator at omega = {omega}")]
    PoleHit { which: &'static str, omega: f64 },

    #[error("no steady state: {0}")]
    NoSteadyState(String),

    #[error("unknown subcommand `{0}`")]
    UnknownSubcommand(String),

    #[error("unknown figure `{0}` (expected fig2..fig9)")]
    UnknownFigure(String),

    #[error("strict mode: {0} negative phonon clamp events")]
    ClampEvents(usize),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn out_of_range(field: &str, reason: impl Into<String>) -> Self {
        Error::OutOfRange {
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Short machine-readable tag used by the CLI error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MissingKey(_) => "MissingKey",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::Parse(_) => "ParseError",
            Error::DegenerateTrap => "DegenerateTrap",
            Error::EmptyGrid => "EmptyGrid",
            Error::StepTooLarge { .. } => "StepTooLarge",
            Error::NonFinite { .. } => "NonFinite",
            Error::InvalidCooling { .. } => "InvalidCooling",
            Error::InsufficientData(_) => "InsufficientData",
            Error::PoleHit { .. } => "PoleHit",
            Error::NoSteadyState(_) => "NoSteadyState",
            Error::UnknownSubcommand(_) => "UnknownSubcommand",
            Error::UnknownFigure(_) => "UnknownFigure",
            Error::ClampEvents(_) => "ClampEvents",
            Error::Io { .. } => "IoError",
        }
    }

    /// True for errors caused by the user's input rather than a failed run.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::MissingKey(_)
                | Error::OutOfRange { .. }
                | Error::Parse(_)
                | Error::DegenerateTrap
                | Error::InvalidCooling { .. }
                | Error::UnknownSubcommand(_)
                | Error::UnknownFigure(_)
                | Error::EmptyGrid
        ) || matches!(self, Error::Io { source, .. } if source.kind() == std::io::ErrorKind::NotFound)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
