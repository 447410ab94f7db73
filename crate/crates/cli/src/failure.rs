// SPDX-License-Identifier: Apache-2.0

use qrdp::Error;
use thiserror::Error as ThisError;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_DOCUMENT: i32 = 4;
pub const EXIT_SCHEDULE: i32 = 5;

/// A failure carrying the process exit code.
#[derive(Debug, ThisError)]
#[error("{message}")]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    pub fn document(message: impl Into<String>) -> Self {
        Self { code: EXIT_DOCUMENT, message: message.into() }
    }

    /// Library error raised while reading an input document. Everything but
    /// a schedule clash is the document's fault.
    pub fn from_document(path: &str, err: Error) -> Self {
        let code = match err {
            Error::ScheduleConflict { .. } => EXIT_SCHEDULE,
            _ => EXIT_DOCUMENT,
        };
        Self { code, message: format!("{path}: {err}") }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        Self { code: exit_code(&err), message: err.to_string() }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::ParamOutOfRange { .. } | Error::InvalidOrder(_) | Error::InvalidGrid(_) | Error::DeltaOutOfRange(_) => {
            EXIT_USAGE
        }
        Error::NoClosedForm(_) | Error::NoConvergence { .. } | Error::ImaginaryProbability { .. } => EXIT_DOMAIN,
        Error::ScheduleConflict { .. } => EXIT_SCHEDULE,
        _ => EXIT_DOCUMENT,
    }
}
