//! Tabular results with a full metadata echo, written as CSV (RFC-4180
//! quoting, LF line endings, `#`-prefixed comment lines for metadata) or as
//! a single JSON document.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::Config;
use crate::RunError;

/// How transmit power maps to the swept SNR; echoed into every output file.
pub const SNR_DEFINITION: &str =
    "snr_db = 10*log10(trace of the per-user emitted-power matrix / (n_sc * sigma_w2)); \
     sigma_w2 is fixed and per-user power_scale is chosen per SNR point with the \
     unmasked unit-column precoder trace";

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    U64(u64),
    F64(f64),
    Str(String),
    Bool(bool),
}

impl Field {
    fn csv(&self) -> String {
        match self {
            Field::U64(v) => v.to_string(),
            Field::F64(v) => format_f64(*v),
            Field::Str(s) => quote_csv(s),
            Field::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Field::U64(v) => serde_json::Value::from(*v),
            Field::F64(v) => {
                serde_json::Number::from_f64(*v).map(serde_json::Value::Number).unwrap_or(
                    serde_json::Value::String(format_f64(*v)), // NaN / infinities
                )
            }
            Field::Str(s) => serde_json::Value::from(s.as_str()),
            Field::Bool(b) => serde_json::Value::from(*b),
        }
    }
}

fn format_f64(v: f64) -> String {
    // shortest round-trip representation; stable for byte-identical reruns
    let mut s = format!("{v}");
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn quote_csv(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Metadata block echoed into every output file.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub master_seed: u64,
    pub snr_definition: &'static str,
    pub config: Config,
}

impl Meta {
    pub fn new(subcommand: &str, master_seed: u64, config: Config) -> Self {
        Meta {
            tool: "coexist-ia",
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.to_string(),
            master_seed,
            snr_definition: SNR_DEFINITION,
            config,
        }
    }
}

/// A complete run result: metadata plus one table.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub meta: Meta,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Field>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl RunResult {
    pub fn render(&self, format: Format) -> Result<String, RunError> {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> Result<String, RunError> {
        let mut out = String::new();
        out.push_str(&format!(
            "# {} v{} {}\n",
            self.meta.tool, self.meta.version, self.meta.subcommand
        ));
        out.push_str(&format!("# master_seed = {}\n", self.meta.master_seed));
        out.push_str(&format!("# snr_definition = {}\n", self.meta.snr_definition));
        let cfg = serde_json::to_string(&self.meta.config)
            .map_err(|e| RunError::Numeric(format!("config serialization: {e}")))?;
        out.push_str(&format!("# config = {cfg}\n"));
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            debug_assert_eq!(row.len(), self.columns.len());
            let cells: Vec<String> = row.iter().map(Field::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        Ok(out)
    }

    fn render_json(&self) -> Result<String, RunError> {
        let rows: Vec<Vec<serde_json::Value>> =
            self.rows.iter().map(|r| r.iter().map(Field::json).collect()).collect();
        let doc = serde_json::json!({
            "meta": self.meta,
            "columns": self.columns,
            "rows": rows,
        });
        serde_json::to_string_pretty(&doc)
            .map_err(|e| RunError::Numeric(format!("json serialization: {e}")))
            .map(|mut s| {
                s.push('\n');
                s
            })
    }

    /// Writes to the path, or to stdout when no path is given.
    pub fn write(&self, out: Option<&Path>, format: Format) -> Result<(), RunError> {
        let text = self.render(format)?;
        match out {
            Some(path) => {
                if let Some(parent) = path.parent() {
                    if !parent.as_os_str().is_empty() {
                        std::fs::create_dir_all(parent)?;
                    }
                }
                std::fs::write(path, text)?;
            }
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
            }
        }
        Ok(())
    }
}
