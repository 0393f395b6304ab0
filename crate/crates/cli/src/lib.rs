//! Driver for the `segsel` command: subcommand implementations, the
//! reproducible preprocessing pipeline and the evaluation report table.

pub mod commands;
pub mod pipeline;
pub mod report;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

pub use commands::{run, Cli};

/// Exit status classes of the `segsel` binary.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] segsel_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(segsel_core::Error::Config(_) | segsel_core::Error::MissingReferences) => 1,
            CliError::Core(e) if e.is_io() => 3,
            CliError::Core(_) => 2,
            CliError::Io { .. } => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Reads UTF-8 text from a reader, naming `label` in errors.
pub fn read_text(mut reader: impl Read, label: &str) -> Result<String> {
    let mut bytes = Vec::new();
    reader
        .read_to_end(&mut bytes)
        .map_err(|e| CliError::io(label, e))?;
    String::from_utf8(bytes).map_err(|e| {
        let valid = &e.as_bytes()[..e.utf8_error().valid_up_to()];
        CliError::Core(segsel_core::Error::Data {
            path: PathBuf::from(label),
            line: valid.iter().filter(|&&b| b == b'\n').count() + 1,
            message: "invalid UTF-8".into(),
        })
    })
}

pub fn lines_of(text: &str) -> Vec<&str> {
    text.lines().map(|l| l.trim_end_matches('\r')).collect()
}

pub fn read_file_lines(path: &Path) -> Result<Vec<String>> {
    Ok(segsel_core::corpus::read_lines(path)?)
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Joins lines with a trailing newline after each.
pub fn join_lines<S: AsRef<str>>(lines: &[S]) -> String {
    let mut out = String::new();
    for l in lines {
        out.push_str(l.as_ref());
        out.push('\n');
    }
    out
}

pub fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::io("<stdout>", e))
}
