use std::fmt;

/// Failure classes; everything except `Verification` maps to exit status 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Config,
    Compute,
    Io,
    Verification,
}

impl ErrorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ErrorKind::Usage => "usage",
            ErrorKind::Config => "config",
            ErrorKind::Compute => "compute",
            ErrorKind::Io => "io",
            ErrorKind::Verification => "verification",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Config, message)
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Verification => 1,
            _ => 2,
        }
    }

    /// One-line JSON object for standard error.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": self.kind.as_str(),
            "message": self.message,
            "exit_code": self.exit_code(),
        })
        .to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.as_str(), self.message)
    }
}

impl std::error::Error for CliError {}

impl From<fluorospec::Error> for CliError {
    fn from(e: fluorospec::Error) -> Self {
        use fluorospec::Error as E;
        let kind = match e {
            E::InvalidParams { .. }
            | E::StepTooCoarse { .. }
            | E::NoiseUnderResolved { .. }
            | E::NonzeroDetuning(_)
            | E::TooFewRealizations { .. }
            | E::InsufficientRelaxation { .. }
            | E::GridTooSmall { .. }
            | E::InvalidGrid(_) => ErrorKind::Config,
            _ => ErrorKind::Compute,
        };
        Self::new(kind, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::new(ErrorKind::Io, e.to_string())
    }
}
