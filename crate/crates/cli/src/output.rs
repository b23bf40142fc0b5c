//! Machine-readable output: CSV/JSON reports with a provenance header.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Output format selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A rectangular result table plus the metadata identifying its run.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub config_hash: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// One-line result summary, rendered as a second comment line in
    /// CSV output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<String>,
    /// Structured payload some commands attach alongside the table.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra: Option<serde_json::Value>,
}

impl Report {
    pub fn new(command: &str, config: &str, columns: &[&str]) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config_hash(config),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: None,
            extra: None,
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    /// Renders the report and writes it to `path`, or stdout when absent.
    pub fn write(&self, format: Format, path: Option<&Path>) -> Result<(), CliError> {
        let text = match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        };
        match path {
            Some(p) => std::fs::write(p, text)
                .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", p.display()))),
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Internal(format!("cannot write stdout: {e}"))),
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# chanclone {} v{} config={}\r\n",
            self.command, self.version, self.config_hash
        ));
        if let Some(summary) = &self.summary {
            out.push_str(&format!("# {summary}\r\n"));
        }
        out.push_str(&csv_line(&self.columns));
        for row in &self.rows {
            out.push_str(&csv_line(row));
        }
        out
    }

    fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

/// One RFC-4180 record: fields joined by commas, quoted when needed,
/// terminated by CRLF.
fn csv_line(fields: &[String]) -> String {
    let quoted: Vec<String> = fields
        .iter()
        .map(|f| {
            if f.contains(',') || f.contains('"') || f.contains('\n') {
                format!("\"{}\"", f.replace('"', "\"\""))
            } else {
                f.clone()
            }
        })
        .collect();
    format!("{}\r\n", quoted.join(","))
}

/// Short hash identifying the resolved run configuration.
pub fn config_hash(config: &str) -> String {
    let digest = Sha256::digest(config.as_bytes());
    digest[..6].iter().map(|b| format!("{b:02x}")).collect()
}

/// A number rendered with 12 significant digits and a `.` decimal mark.
pub fn fmt_sig(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    let decimals = (11 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}
