//! Artifact encoding: pretty JSON reports carrying `"schema_version": 1` and
//! CSV tables with a header row and complex values split into `_re`/`_im`.

use std::path::PathBuf;

use serde::Serialize;

use crate::error::{CliResult, EXIT_CHECK_FAILURE, EXIT_NUMERIC_FAILURE, EXIT_SUCCESS};

/// Version stamped into every JSON report.
pub const SCHEMA_VERSION: u32 = 1;

/// Encoded artifact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Artifact {
    /// JSON report text.
    Json(String),
    /// CSV table text.
    Csv(String),
}

impl Artifact {
    /// Encoded bytes.
    pub fn as_bytes(&self) -> &[u8] {
        match self {
            Self::Json(text) | Self::Csv(text) => text.as_bytes(),
        }
    }
}

/// How the checks of a completed command came out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// Every contract bound was met.
    Passed,
    /// Some contract bound was missed.
    Failed,
    /// A quadrature did not converge; the artifacts are still written.
    Unconverged,
}

impl Status {
    /// Exit status of the run.
    pub fn exit_code(self) -> u8 {
        match self {
            Self::Passed => EXIT_SUCCESS,
            Self::Failed => EXIT_CHECK_FAILURE,
            Self::Unconverged => EXIT_NUMERIC_FAILURE,
        }
    }
}

/// Result of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Primary artifact, written to `--out` or standard output.
    pub artifact: Artifact,
    /// Secondary artifacts with their own paths.
    pub attachments: Vec<(PathBuf, Artifact)>,
    /// Human-readable lines for standard error.
    pub summary: Vec<String>,
    /// Check outcome.
    pub status: Status,
}

impl Outcome {
    /// Outcome without attachments, passed or failed.
    pub fn new(artifact: Artifact, summary: Vec<String>, passed: bool) -> Self {
        Self {
            artifact,
            attachments: Vec::new(),
            summary,
            status: if passed {
                Status::Passed
            } else {
                Status::Failed
            },
        }
    }

    /// Whether every contract bound was met.
    pub fn passed(&self) -> bool {
        self.status == Status::Passed
    }
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    schema_version: u32,
    command: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

/// Versioned JSON report of `command`.
///
/// # Errors
/// Serialisation failures.
pub fn json_report<T: Serialize>(command: &str, body: &T) -> CliResult<Artifact> {
    let mut text = serde_json::to_string_pretty(&Envelope {
        schema_version: SCHEMA_VERSION,
        command,
        body,
    })?;
    text.push('\n');
    Ok(Artifact::Json(text))
}

/// CSV table of `rows`, the header taken from the row field names.
///
/// # Errors
/// Serialisation failures.
pub fn csv_table<R: Serialize>(rows: &[R]) -> CliResult<Artifact> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| crate::error::CliError::Serialise(e.to_string()))?;
    Ok(Artifact::Csv(String::from_utf8(bytes).map_err(|e| {
        crate::error::CliError::Serialise(e.to_string())
    })?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        s: f64,
        value_re: f64,
        value_im: f64,
        ok: bool,
    }

    #[test]
    fn csv_has_a_header_and_round_trip_floats() {
        let rows = [
            Row {
                s: 10.0,
                value_re: 0.1,
                value_im: -2.5e-17,
                ok: true,
            },
            Row {
                s: 20.0,
                value_re: 1.0 / 3.0,
                value_im: 0.0,
                ok: false,
            },
        ];
        let Artifact::Csv(text) = csv_table(&rows).unwrap() else {
            panic!("expected CSV");
        };
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "s,value_re,value_im,ok");
        assert_eq!(lines[1], "10.0,0.1,-2.5e-17,true");
        let third: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(third, 1.0 / 3.0);
    }

    #[test]
    fn json_reports_are_versioned() {
        #[derive(Serialize)]
        struct Body {
            value: f64,
        }
        let Artifact::Json(text) = json_report("phi-root", &Body { value: 0.5 }).unwrap() else {
            panic!("expected JSON");
        };
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["schema_version"], 1);
        assert_eq!(parsed["command"], "phi-root");
        assert_eq!(parsed["value"], 0.5);
        assert!(text.ends_with('\n'));
    }
}
