//! Table output in CSV or JSON.
//!
//! CSV mode prints a fixed header line, one comma-separated numeric row per
//! data point, and (when present) a trailing `# key=value ...` summary
//! comment. JSON mode wraps the same rows with the resolved configuration,
//! optional per-point coefficient dumps, and the summary as structured data.
//! Numbers use Rust's shortest round-trip float formatting, so output is
//! bit-stable for identical configurations.

use crate::failure::Failure;
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;

/// Output format selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    /// Comma-separated values with a header line.
    Csv,
    /// A single JSON object with config echo and rows.
    Json,
}

/// A finished table ready for rendering.
#[derive(Debug)]
pub struct Report {
    /// Subcommand that produced the table.
    pub command: &'static str,
    /// Resolved configuration echo for the JSON output.
    pub config: Value,
    /// Column names, in row order.
    pub columns: Vec<&'static str>,
    /// Numeric rows.
    pub rows: Vec<Vec<f64>>,
    /// Optional moment-coefficient dumps (JSON output only).
    pub coefficients: Option<Value>,
    /// Optional summary statistics.
    pub summary: Option<Value>,
}

impl Report {
    /// Renders to the chosen format.
    pub fn render(&self, format: OutputFormat) -> String {
        // Collapse negative zero so repeated runs compare bytewise.
        let rows: Vec<Vec<f64>> = self
            .rows
            .iter()
            .map(|row| row.iter().map(|v| if *v == 0.0 { 0.0 } else { *v }).collect())
            .collect();
        match format {
            OutputFormat::Csv => {
                let mut out = String::new();
                out.push_str(&self.columns.join(","));
                out.push('\n');
                for row in &rows {
                    let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                if let Some(Value::Object(map)) = &self.summary {
                    let cells: Vec<String> =
                        map.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    out.push_str(&format!("# {}\n", cells.join(" ")));
                }
                out
            }
            OutputFormat::Json => {
                let mut doc = json!({
                    "command": self.command,
                    "config": self.config,
                    "columns": self.columns,
                    "rows": rows,
                });
                if let Some(c) = &self.coefficients {
                    doc["coefficients"] = c.clone();
                }
                if let Some(s) = &self.summary {
                    doc["summary"] = s.clone();
                }
                let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
                text.push('\n');
                text
            }
        }
    }

    /// Writes the rendered table to a file or standard output.
    pub fn emit(&self, format: OutputFormat, output: Option<&PathBuf>) -> Result<(), Failure> {
        let text = self.render(format);
        match output {
            Some(path) => std::fs::write(path, text).map_err(|e| {
                Failure::Domain(format!("cannot write {}: {e}", path.display()))
            })?,
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                lock.write_all(text.as_bytes())?;
            }
        }
        Ok(())
    }
}

/// Serializes a flux polynomial as a JSON coefficient dump.
pub fn polynomial_json(label_key: &str, label: f64, p: &srge::types::ModulatedPolynomial) -> Value {
    json!({
        label_key: label,
        "phase_rate": p.phase_rate,
        "coeffs": p.coeffs.iter().map(|c| json!([c.re, c.im])).collect::<Vec<_>>(),
    })
}
