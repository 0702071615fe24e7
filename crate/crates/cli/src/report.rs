//! Report rows, metadata and the JSON and CSV writers.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::{CampaignConfig, Format};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub suite: String,
    pub case: String,
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
    pub method: String,
    pub pass: bool,
    pub runtime_ms: f64,
}

/// `|lhs − rhs| / |rhs|`, or the absolute difference when `rhs` is zero.
pub fn rel_err(lhs: f64, rhs: f64) -> f64 {
    let d = (lhs - rhs).abs();
    if rhs == 0.0 {
        d
    } else {
        d / rhs.abs()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub description: String,
    pub rows: usize,
    pub failed: usize,
    /// Cases not run, e.g. Monte Carlo rows above the variance cap.
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    pub group: String,
    pub hbar_list: Vec<f64>,
    pub max_level: i64,
    pub suites: BTreeMap<String, SuiteSummary>,
    pub rows: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub metadata: Metadata,
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn new(cfg: &CampaignConfig, suites: Vec<(String, SuiteSummary)>, rows: Vec<ReportRow>) -> Self {
        Report {
            metadata: Metadata {
                tool: "qcr".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                config_hash: cfg.hash(),
                seed: cfg.seed,
                group: format!("A{}", cfg.rank),
                hbar_list: cfg.hbar_list.clone(),
                max_level: cfg.max_level,
                suites: suites.into_iter().collect(),
                failed: rows.iter().filter(|r| !r.pass).count(),
                rows: rows.len(),
            },
            rows,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.metadata.failed == 0
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.to_csv(),
        }
    }

    fn to_csv(&self) -> String {
        let m = &self.metadata;
        let mut out = String::new();
        let hbars: Vec<String> = m.hbar_list.iter().map(|h| h.to_string()).collect();
        let _ = writeln!(out, "# tool: {}", m.tool);
        let _ = writeln!(out, "# version: {}", m.version);
        let _ = writeln!(out, "# config_hash: {}", m.config_hash);
        let _ = writeln!(out, "# seed: {}", m.seed);
        let _ = writeln!(out, "# group: {}", m.group);
        let _ = writeln!(out, "# hbar_list: {}", hbars.join(" "));
        let _ = writeln!(out, "# max_level: {}", m.max_level);
        for (id, s) in &m.suites {
            let _ = writeln!(
                out,
                "# suite {id}: {} (rows {}, failed {}, skipped {})",
                s.description, s.rows, s.failed, s.skipped
            );
        }
        let _ = writeln!(out, "# rows: {}, failed: {}", m.rows, m.failed);
        out.push_str("suite,case,lhs,rhs,rel_err,method,pass,runtime_ms\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:e},{:e},{:e},{},{},{}",
                csv_field(&r.suite),
                csv_field(&r.case),
                r.lhs,
                r.rhs,
                r.rel_err,
                csv_field(&r.method),
                r.pass,
                r.runtime_ms
            );
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
