//! Command-line error families and their stable exit codes.

use std::path::PathBuf;

/// Everything that can go wrong during a command, grouped into families
/// with one stable exit code each (see [`CliError::exit_code`]).
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Arguments or configuration that cannot be acted on.
    #[error("{0}")]
    Usage(String),

    /// The input file does not exist or cannot be opened.
    #[error("input file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    /// A cell that could not be read at all (blank, malformed quoting, …).
    #[error("parse error at row {row}, column {column}: {message}")]
    ParseError {
        row: usize,
        column: String,
        message: String,
    },

    /// A referenced column is absent from the header.
    #[error("column \"{0}\" not found in the CSV header")]
    MissingColumn(String),

    /// A cell that parsed as text but not as a number.
    #[error("non-numeric cell \"{value}\" at row {row}, column {column}")]
    NonNumericCell {
        row: usize,
        column: String,
        value: String,
    },

    /// Input data that loads but violates the model's requirements.
    #[error("invalid input data: {0}")]
    Validation(String),

    /// The estimation itself failed on otherwise valid data.
    #[error("estimation failed: {0}")]
    Estimation(String),

    /// An output file could not be written.
    #[error("could not write {path}: {message}")]
    Output { path: String, message: String },
}

impl CliError {
    /// Stable exit code of the error family.
    ///
    /// 2 usage · 3 missing input file · 4 malformed input ·
    /// 5 invalid data · 6 estimation failure · 7 output failure.
    /// (Code 2 matches the argument-parser's own usage exits.)
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::FileNotFound(_) => 3,
            CliError::ParseError { .. }
            | CliError::MissingColumn(_)
            | CliError::NonNumericCell { .. } => 4,
            CliError::Validation(_) => 5,
            CliError::Estimation(_) => 6,
            CliError::Output { .. } => 7,
        }
    }

    /// Maps a core-library error into the matching CLI family.
    pub fn from_core(err: mvdwls::Error) -> Self {
        use mvdwls::Error as E;
        match &err {
            E::DimensionMismatch { .. }
            | E::TooFewObservations { .. }
            | E::NonFiniteInput { .. }
            | E::MissingIntercept { .. }
            | E::SingularDesign { .. }
            | E::ZeroRankVariance { .. }
            | E::SplitTooSmall { .. }
            | E::EmptyReport => CliError::Validation(err.to_string()),
            E::InvalidConfig { .. } => CliError::Usage(err.to_string()),
            E::Io { path, message } => CliError::Output {
                path: path.clone(),
                message: message.clone(),
            },
            _ => CliError::Estimation(err.to_string()),
        }
    }
}

/// Result alias for all CLI operations.
pub type Result<T> = std::result::Result<T, CliError>;

/// Shorthand for wrapping write failures.
pub fn output_err(path: &std::path::Path, err: &std::io::Error) -> CliError {
    CliError::Output {
        path: path.display().to_string(),
        message: err.to_string(),
    }
}
