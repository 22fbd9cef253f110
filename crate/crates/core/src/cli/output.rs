//! CSV, gnuplot and manifest writers.

use crate::report::Verdict;
use serde::Serialize;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// Full-precision scientific notation.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

pub fn csv_text(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        let line: Vec<String> = r.iter().map(|&x| fmt_num(x)).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

/// Two columns per line; blocks separated by a blank line.
pub fn dat_text(blocks: &[Vec<(f64, f64)>]) -> String {
    let mut s = String::new();
    for (i, b) in blocks.iter().enumerate() {
        if i > 0 {
            s.push_str("\n\n");
        }
        for (x, y) in b {
            let _ = writeln!(s, "{} {}", fmt_num(*x), fmt_num(*y));
        }
    }
    s
}

/// One manifest line.
#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub command: String,
    pub check: String,
    pub id: String,
    /// absent for informational records
    pub verdict: Option<Verdict>,
    pub report: Value,
}

impl Record {
    pub fn new(command: &str, check: &str, id: impl Into<String>, verdict: Option<Verdict>, report: impl Serialize) -> Self {
        let report = serde_json::to_value(report).unwrap_or_else(|e| json!({ "serialization_error": e.to_string() }));
        Self { command: command.into(), check: check.into(), id: id.into(), verdict, report }
    }
}

/// Collects files and records for one output directory.
pub struct Output {
    dir: PathBuf,
    records: Vec<Record>,
    timings: Vec<Value>,
    pub quiet: bool,
}

impl Output {
    pub fn create(dir: &Path, quiet: bool) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), records: Vec::new(), timings: Vec::new(), quiet })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&self, name: &str, text: &str) -> io::Result<()> {
        fs::write(self.dir.join(name), text)
    }

    pub fn csv(&self, stem: &str, header: &[&str], rows: &[Vec<f64>]) -> io::Result<()> {
        self.write(&format!("{stem}.csv"), &csv_text(header, rows))
    }

    pub fn dat(&self, stem: &str, blocks: &[Vec<(f64, f64)>]) -> io::Result<()> {
        self.write(&format!("{stem}.dat"), &dat_text(blocks))
    }

    pub fn record(&mut self, r: Record) {
        if !self.quiet {
            let v = match r.verdict {
                Some(Verdict::Pass) => "pass",
                Some(Verdict::Fail) => "FAIL",
                Some(Verdict::Inconclusive) => "inconclusive",
                None => "info",
            };
            eprintln!("[{}] {} {}: {v}", r.command, r.check, r.id);
        }
        self.records.push(r);
    }

    pub fn timing(&mut self, command: &str, seconds: f64) {
        self.timings.push(json!({ "command": command, "wall_time_s": seconds }));
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    /// Combined verdict of all gated records.
    pub fn verdict(&self) -> Verdict {
        self.records.iter().filter_map(|r| r.verdict).fold(Verdict::Pass, Verdict::combine)
    }

    /// Write manifest.jsonl (config echo first, then the records) and timing.jsonl.
    pub fn finish(&self, config: &impl Serialize) -> io::Result<()> {
        let mut s = serde_json::to_string(&json!({ "config": config })).map_err(io::Error::other)?;
        s.push('\n');
        for r in &self.records {
            s.push_str(&serde_json::to_string(r).map_err(io::Error::other)?);
            s.push('\n');
        }
        s.push_str(&serde_json::to_string(&json!({ "summary": self.verdict() })).map_err(io::Error::other)?);
        s.push('\n');
        self.write("manifest.jsonl", &s)?;
        let mut t = String::new();
        for v in &self.timings {
            t.push_str(&v.to_string());
            t.push('\n');
        }
        self.write("timing.jsonl", &t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_num(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_num(f64::NAN), "NaN");
        let back: f64 = fmt_num(std::f64::consts::PI).parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }

    #[test]
    fn csv_and_dat_layout() {
        assert_eq!(csv_text(&["t", "s"], &[vec![1.0, 0.5]]), "t,s\n1.0000000000000000e0,5.0000000000000000e-1\n");
        let d = dat_text(&[vec![(0.0, 1.0)], vec![(1.0, 2.0)]]);
        assert_eq!(d.lines().count(), 4);
    }

    #[test]
    fn verdicts_combine_over_gated_records() {
        let dir = tempfile::tempdir().unwrap();
        let mut o = Output::create(dir.path(), true).unwrap();
        o.record(Record::new("x", "a", "1", Some(Verdict::Pass), 1.0));
        o.record(Record::new("x", "b", "2", None, 1.0));
        assert_eq!(o.verdict(), Verdict::Pass);
        o.record(Record::new("x", "c", "3", Some(Verdict::Inconclusive), 1.0));
        assert_eq!(o.verdict(), Verdict::Inconclusive);
        o.finish(&1).unwrap();
        let m = std::fs::read_to_string(dir.path().join("manifest.jsonl")).unwrap();
        assert_eq!(m.lines().count(), 5);
    }
}
