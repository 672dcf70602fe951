//! CSV and JSON writers. Floating-point values are written with 17
//! significant digits so they round-trip exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use nehari_core::minimizer::GroundStateReport;

use crate::error::{CliError, CliResult};

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|source| CliError::Write {
        path: dir.to_path_buf(),
        source,
    })
}

pub fn write_file(path: PathBuf, contents: &str) -> CliResult<PathBuf> {
    fs::write(&path, contents).map_err(|source| CliError::Write {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

pub fn profile_csv(report: &GroundStateReport) -> String {
    let p = &report.params;
    let mut out = String::new();
    let _ = writeln!(out, "# n = {}", p.n);
    let _ = writeln!(out, "# q = {}", num(p.q));
    let _ = writeln!(out, "# b = {}", num(p.b));
    let _ = writeln!(out, "# omega = {}", num(p.omega));
    let _ = writeln!(out, "# m = {}", num(report.m));
    let _ = writeln!(out, "# tau_residual = {}", num(report.tau_residual));
    let _ = writeln!(out, "# classification = {}", report.classification);
    out.push_str("r,u,v\n");
    let s = &report.state;
    for ((r, u), v) in s.grid().nodes().iter().zip(s.u.values()).zip(s.v.values()) {
        let _ = writeln!(out, "{},{},{}", num(*r), num(*u), num(*v));
    }
    out
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// A CSV table with a fixed header.
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Space-aligned rendering for the terminal.
    pub fn to_text(&self) -> String {
        let widths: Vec<usize> = (0..self.header.len())
            .map(|j| self.rows.iter().map(|r| r[j].len()).chain([self.header[j].len()]).max().unwrap_or(0))
            .collect();
        let line = |cells: Vec<&str>| -> String {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        let mut out = line(self.header.clone());
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row.iter().map(String::as_str).collect()));
            out.push('\n');
        }
        out
    }
}

/// Commas and newlines would break the CSV layout of free-text cells.
pub fn cell(text: &str) -> String {
    text.replace([',', '\n'], ";")
}
