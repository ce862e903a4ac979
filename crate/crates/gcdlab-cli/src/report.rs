//! Machine-readable experiment reports.
//!
//! JSON is the canonical format; CSV is a flat projection of the rows for
//! plotting; the human format is never parsed by tests. Identical run
//! configuration produces byte-identical json/csv output, which is why
//! wall-clock timing appears only in the human rendering.

use serde::Serialize;
use serde_json::{Map, Value};

pub type Row = Map<String, Value>;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub config: Value,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn render(&self, format: Format, elapsed_ms: f64) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.to_csv(),
            Format::Human => self.to_human(elapsed_ms),
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        if self.rows.is_empty() {
            return out;
        }
        let headers: Vec<&String> = self.rows[0].keys().collect();
        out.push_str(
            &headers
                .iter()
                .map(|h| csv_escape(h))
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = headers
                .iter()
                .map(|&h| csv_escape(&value_to_plain(row.get(h).unwrap_or(&Value::Null))))
                .collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    fn to_human(&self, elapsed_ms: f64) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# {} (schema v{})\n",
            self.command, self.schema_version
        ));
        out.push_str(&format!(
            "config: {}\n",
            serde_json::to_string(&self.config).expect("config serializes")
        ));
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(&format!("row {i}:\n"));
            for (k, v) in row {
                out.push_str(&format!("  {k}: {}\n", value_to_plain(v)));
            }
        }
        out.push_str(&format!("elapsed_ms: {elapsed_ms:.3}\n"));
        out
    }
}

fn value_to_plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
