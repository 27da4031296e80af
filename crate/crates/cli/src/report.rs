//! Tabular command output, rendered as CSV or as a TOML tree.

use anyhow::Result;

use crate::config::Format;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub command: String,
    /// Scalar results, in insertion order.
    pub summary: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Human-readable notes; written to stderr by the binary.
    pub diagnostics: Vec<String>,
    /// False when a validation failed or a required result is inconclusive.
    pub ok: bool,
}

impl Report {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Report {
            command: command.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ok: true,
            ..Default::default()
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.diagnostics.push(text.into());
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.csv(),
            Format::Tree => self.tree(),
        }
    }

    fn csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    fn tree(&self) -> Result<String> {
        let mut root = toml::Table::new();
        root.insert("command".into(), self.command.clone().into());
        root.insert("ok".into(), self.ok.into());
        let mut summary = toml::Table::new();
        for (k, v) in &self.summary {
            summary.insert(k.clone(), v.clone().into());
        }
        root.insert("summary".into(), summary.into());
        let rows: Vec<toml::Value> = self
            .rows
            .iter()
            .map(|row| {
                let t: toml::Table = self.columns.iter().cloned().zip(row.iter().map(|c| c.clone().into())).collect();
                t.into()
            })
            .collect();
        root.insert("rows".into(), rows.into());
        let notes: Vec<toml::Value> = self.diagnostics.iter().map(|d| d.clone().into()).collect();
        root.insert("diagnostics".into(), notes.into());
        Ok(toml::to_string(&root)?)
    }
}
