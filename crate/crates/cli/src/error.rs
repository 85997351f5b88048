use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: line {line}, column {col}: {message}")]
    Syntax {
        path: String,
        line: usize,
        col: usize,
        message: String,
    },

    #[error("{}[{section}] {key}: {message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Config {
        section: String,
        key: String,
        line: Option<usize>,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Core {
        context: String,
        source: ihc_core::Error,
    },

    #[error("{0}")]
    Usage(String),

    #[error("all {cells} cells failed; see the error column")]
    AllCellsFailed { cells: usize },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn core(context: impl Into<String>, source: ihc_core::Error) -> Self {
        CliError::Core {
            context: context.into(),
            source,
        }
    }

    /// 0 ok, 2 parse/IO, 3 dimension, 4 all cells failed, 5 not positive definite.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core { source, .. } => core_exit_code(source),
            CliError::AllCellsFailed { .. } => 4,
            _ => 2,
        }
    }
}

fn core_exit_code(e: &ihc_core::Error) -> u8 {
    use ihc_core::Error::*;
    match e {
        Replicate { source, .. } => core_exit_code(source),
        DimensionMismatch { .. } => 3,
        NotPositiveDefinite { .. } | FactorizationFailure { .. } => 5,
        _ => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let dim = ihc_core::Error::DimensionMismatch {
            expected: 3,
            found: 4,
        };
        assert_eq!(CliError::core("x", dim.clone()).exit_code(), 3);
        let nested = ihc_core::Error::Replicate {
            index: 2,
            source: Box::new(ihc_core::Error::NotPositiveDefinite {
                min_eigenvalue: -1.0,
                tolerance: 1e-12,
            }),
        };
        assert_eq!(CliError::core("x", nested).exit_code(), 5);
        assert_eq!(CliError::AllCellsFailed { cells: 1 }.exit_code(), 4);
        assert_eq!(CliError::Usage("bad".into()).exit_code(), 2);
        assert_eq!(
            CliError::core("x", ihc_core::Error::BetaOutOfRange { beta: 2.0 }).exit_code(),
            2
        );
    }

    #[test]
    fn config_message_names_line_and_key() {
        let e = CliError::Config {
            section: "boundary".into(),
            key: "rho".into(),
            line: Some(4),
            message: "invalid number `x`".into(),
        };
        assert_eq!(e.to_string(), "line 4: [boundary] rho: invalid number `x`");
    }
}
