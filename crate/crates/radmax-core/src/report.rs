//! Deterministic experiment reports: a named table of numeric rows plus
//! the parameters and provenance needed to recompute every cell from the
//! library API alone.
//!
//! CSV is the primary format (UTF-8, LF line endings, mandatory header,
//! decimal points); provenance travels as `#`-prefixed comment lines
//! before the header. JSON mirrors the same content with an explicit
//! schema version. Identical inputs produce byte-identical output:
//! parameters and provenance are sorted maps, and floats are printed
//! with Rust's shortest round-trip formatting.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Display;

/// Bumped whenever the JSON layout changes shape.
pub const SCHEMA_VERSION: u32 = 1;

/// A completed experiment: identifier, input parameters, a rectangular
/// numeric table, and a provenance block (resolutions, seeds,
/// tolerances, library version).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub experiment: String,
    /// Version tag of the producing library.
    pub version: String,
    pub parameters: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub provenance: BTreeMap<String, String>,
}

impl ExperimentReport {
    pub fn new(experiment: &str) -> Self {
        ExperimentReport {
            schema_version: SCHEMA_VERSION,
            experiment: experiment.to_owned(),
            version: format!("radmax-core {}", env!("CARGO_PKG_VERSION")),
            parameters: BTreeMap::new(),
            columns: Vec::new(),
            rows: Vec::new(),
            provenance: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: impl Display) -> Self {
        self.parameters.insert(key.to_owned(), value.to_string());
        self
    }

    pub fn with_provenance(mut self, key: &str, value: impl Display) -> Self {
        self.provenance.insert(key.to_owned(), value.to_string());
        self
    }

    pub fn set_columns(&mut self, columns: &[&str]) {
        assert!(
            self.rows.is_empty(),
            "columns must be fixed before rows are pushed"
        );
        self.columns = columns.iter().map(|c| (*c).to_owned()).collect();
    }

    /// Appends a row; the arity must match the column schema.
    pub fn push_row(&mut self, row: Vec<f64>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row arity must match the column schema"
        );
        self.rows.push(row);
    }

    /// Extracts one column by name.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// CSV rendering: `#` comment lines (experiment, version, sorted
    /// parameters and provenance), then the header, then the rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# experiment: {}\n", self.experiment));
        out.push_str(&format!("# schema_version: {}\n", self.schema_version));
        out.push_str(&format!("# version: {}\n", self.version));
        for (k, v) in &self.parameters {
            out.push_str(&format!("# param {k}: {v}\n"));
        }
        for (k, v) in &self.provenance {
            out.push_str(&format!("# provenance {k}: {v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// JSON mirror of the CSV content; infallible for this shape
    /// (non-finite floats serialize as `null`).
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization is total");
        s.push('\n');
        s
    }
}
