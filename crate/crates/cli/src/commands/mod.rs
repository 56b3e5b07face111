//! The three subcommands and their shared output plumbing.

pub mod crossval;
pub mod fit;
pub mod simulate;

use std::path::{Path, PathBuf};

use crate::error::{output_err, CliError, Result};

/// Creates and returns the run's output directory: the requested one, or a
/// fresh timestamped directory under the working directory.
pub(crate) fn resolve_output_dir(requested: Option<&Path>) -> Result<PathBuf> {
    let dir = match requested {
        Some(d) => d.to_path_buf(),
        None => PathBuf::from(format!(
            "mvdwls-{}",
            chrono::Utc::now().format("%Y%m%d-%H%M%S")
        )),
    };
    std::fs::create_dir_all(&dir).map_err(|e| output_err(&dir, &e))?;
    Ok(dir)
}

/// Serializes a report as pretty JSON with a trailing newline.
pub(crate) fn write_json<T: serde::Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Output {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| output_err(path, &e))
}

/// `(a, b, c)` with four decimals, for console summaries.
pub(crate) fn fmt_vec(values: &[f64]) -> String {
    let inner: Vec<String> = values.iter().map(|v| format!("{v:.4}")).collect();
    format!("({})", inner.join(", "))
}
