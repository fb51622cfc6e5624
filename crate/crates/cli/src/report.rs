//! Machine-readable run outputs: one JSON report per run plus columnar TSV
//! series for anything figure-worthy. Files are written atomically
//! (temp-and-rename) so interrupted runs never leave partial outputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Info,
}

#[derive(Debug, Serialize)]
pub struct ConstantRecord {
    pub name: String,
    pub value: f64,
    /// exact | structural | user-certified | scan-estimated
    pub source: String,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub spec_version: u32,
    pub operation: String,
    pub verdict: Verdict,
    pub params: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub constants: Vec<ConstantRecord>,
    pub summary: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub outputs: Vec<String>,
}

impl Report {
    pub fn new(operation: &str) -> Report {
        Report {
            spec_version: crate::config::SPEC_VERSION,
            operation: operation.to_string(),
            verdict: Verdict::Info,
            params: BTreeMap::new(),
            constants: Vec::new(),
            summary: BTreeMap::new(),
            notes: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.params.insert(key.to_string(), value.to_string());
    }

    pub fn metric(&mut self, key: &str, value: f64) {
        self.summary.insert(key.to_string(), value);
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// Columnar TSV: header row, `\t` separators, `\n` line endings. Floats use
/// shortest-roundtrip formatting, so reruns are byte-identical.
pub struct Tsv {
    name: String,
    buffer: String,
    columns: usize,
}

impl Tsv {
    pub fn new(name: &str, header: &[&str]) -> Tsv {
        let mut buffer = String::new();
        buffer.push_str(&header.join("\t"));
        buffer.push('\n');
        Tsv {
            name: name.to_string(),
            buffer,
            columns: header.len(),
        }
    }

    pub fn row_display(&mut self, cells: &[&dyn std::fmt::Display]) {
        let mut line = String::new();
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                line.push('\t');
            }
            let _ = write!(line, "{c}");
        }
        assert_eq!(cells.len(), self.columns, "row width mismatch in {}", self.name);
        self.buffer.push_str(&line);
        self.buffer.push('\n');
    }

    pub fn save(self, out_dir: &Path, report: &mut Report) -> Result<PathBuf> {
        let path = out_dir.join(&self.name);
        write_atomic(&path, self.buffer.as_bytes())?;
        report.outputs.push(self.name);
        Ok(path)
    }
}

pub fn save_report(out_dir: &Path, mut report: Report) -> Result<Report> {
    report.outputs.push("report.json".to_string());
    report.outputs.sort();
    let json = serde_json::to_vec_pretty(&report).context("serializing report")?;
    write_atomic(&out_dir.join("report.json"), &json)?;
    Ok(report)
}
