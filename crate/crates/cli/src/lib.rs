//! Library side of the `wavepart` command-line tool.

pub mod commands;
pub mod config;
pub mod histfile;
pub mod json;

use std::path::{Path, PathBuf};

use thiserror::Error;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "WAVEPART_OUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl From<wavepart_core::Error> for CliError {
    fn from(e: wavepart_core::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl CliError {
    /// 2 for bad input, 3 for IO failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Resolves relative output paths against `$WAVEPART_OUT_DIR` when set.
pub fn resolve_out(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() && !dir.is_empty() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Writes to the resolved `path`, or to stdout when `path` is `None`.
pub fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let p = resolve_out(p);
            std::fs::write(&p, text).map_err(|source| CliError::Io { path: p, source })
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
