//! Campaign configuration: a flat TOML document, every key optional.
//!
//! ```toml
//! group_type = "A"
//! rank = 2
//! hbar_list = [0.1, 0.5, 1.0]
//! max_level = 3
//! mc_samples = 200000
//! seed = 20240601
//! format = "json"
//! output = "report.json"
//! ```
//!
//! Command-line flags override file values.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub group_type: String,
    /// 1 to 3.
    pub rank: usize,
    pub hbar_list: Vec<f64>,
    /// Largest level of enumerated dominant weights.
    pub max_level: i64,
    /// Torus grid size; unset means the exact rule for each integrand.
    pub torus_points_per_dim: Option<usize>,
    /// Gauss–Hermite nodes per dimension; unset means the exact rule.
    pub hermite_nodes: Option<usize>,
    pub mc_samples: usize,
    /// Monte Carlo rows are emitted only when the log-variance `2ħ‖λ‖²` of
    /// the sampled weight is at most this.
    pub mc_max_log_variance: f64,
    pub mc_sigmas: f64,
    pub seed: u64,
    pub reduction_samples: usize,
    pub det_samples: usize,
    pub state_count: usize,
    pub state_terms: usize,
    pub sb_samples: usize,
    pub haar_max_k: u32,
    pub haar_grid: usize,
    /// Replaces every suite tolerance, including `mc_sigmas`.
    pub tolerance: Option<f64>,
    pub tol_closed_form: f64,
    pub tol_quadrature: f64,
    pub tol_unitarity: f64,
    pub tol_orthogonality: f64,
    pub tol_det: f64,
    pub tol_haar: f64,
    pub tol_isometry_torus: f64,
    /// Largest tolerated fraction of battery samples in the indeterminate
    /// band.
    pub tol_band_fraction: f64,
    pub output: Option<PathBuf>,
    pub format: Format,
    /// CSV dump of the reduction battery.
    pub sample_dump: Option<PathBuf>,
    /// Extra invariant state (JSON) for the round-trip suite.
    pub state_file: Option<PathBuf>,
    /// Record wall-clock time per row; reports are then not reproducible.
    pub timings: bool,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            group_type: "A".into(),
            rank: 2,
            hbar_list: vec![0.1, 0.5, 1.0],
            max_level: 3,
            torus_points_per_dim: None,
            hermite_nodes: None,
            mc_samples: 200_000,
            mc_max_log_variance: 2.0,
            mc_sigmas: 3.0,
            seed: 20_240_601,
            reduction_samples: 10_000,
            det_samples: 1_000,
            state_count: 100,
            state_terms: 10,
            sb_samples: 100,
            haar_max_k: 5,
            haar_grid: 96,
            tolerance: None,
            tol_closed_form: 1e-12,
            tol_quadrature: 1e-8,
            tol_unitarity: 1e-10,
            tol_orthogonality: 1e-10,
            tol_det: 1e-10,
            tol_haar: 1e-6,
            tol_isometry_torus: 1e-10,
            tol_band_fraction: 0.01,
            output: None,
            format: Format::Json,
            sample_dump: None,
            state_file: None,
            timings: false,
        }
    }
}

/// Values given on the command line.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub rank: Option<usize>,
    pub hbar: Option<Vec<f64>>,
    pub max_level: Option<i64>,
    pub mc_samples: Option<usize>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub tolerance: Option<f64>,
}

impl CampaignConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.rank {
            self.rank = v;
        }
        if let Some(v) = &o.hbar {
            self.hbar_list = v.clone();
        }
        if let Some(v) = o.max_level {
            self.max_level = v;
        }
        if let Some(v) = o.mc_samples {
            self.mc_samples = v;
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.format {
            self.format = v;
        }
        if let Some(v) = &o.out {
            self.output = Some(v.clone());
        }
        if let Some(v) = o.tolerance {
            self.tolerance = Some(v);
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.group_type != "A" && self.group_type != "a" {
            return bad(format!("unsupported group_type `{}`", self.group_type));
        }
        if !(1..=3).contains(&self.rank) {
            return bad(format!("rank must be 1, 2 or 3, got {}", self.rank));
        }
        if self.hbar_list.is_empty() {
            return bad("hbar_list is empty".into());
        }
        if let Some(h) = self.hbar_list.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
            return bad(format!("hbar values must be positive, got {h}"));
        }
        if self.max_level < 0 {
            return bad(format!("max_level must be nonnegative, got {}", self.max_level));
        }
        let counts = [
            ("torus_points_per_dim", self.torus_points_per_dim.unwrap_or(1)),
            ("hermite_nodes", self.hermite_nodes.unwrap_or(1)),
            ("reduction_samples", self.reduction_samples),
            ("det_samples", self.det_samples),
            ("state_count", self.state_count),
            ("state_terms", self.state_terms),
            ("sb_samples", self.sb_samples),
            ("haar_grid", self.haar_grid),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return bad(format!("{name} must be positive"));
        }
        if self.mc_samples < 2 {
            return bad("mc_samples must be at least 2".into());
        }
        let tols = [
            ("tolerance", self.tolerance.unwrap_or(0.0)),
            ("mc_sigmas", self.mc_sigmas),
            ("mc_max_log_variance", self.mc_max_log_variance),
            ("tol_closed_form", self.tol_closed_form),
            ("tol_quadrature", self.tol_quadrature),
            ("tol_unitarity", self.tol_unitarity),
            ("tol_orthogonality", self.tol_orthogonality),
            ("tol_det", self.tol_det),
            ("tol_haar", self.tol_haar),
            ("tol_isometry_torus", self.tol_isometry_torus),
            ("tol_band_fraction", self.tol_band_fraction),
        ];
        if let Some((name, v)) = tols.iter().find(|(_, v)| !(*v >= 0.0 && v.is_finite())) {
            return bad(format!("{name} must be a nonnegative number, got {v}"));
        }
        for p in [&self.output, &self.sample_dump].into_iter().flatten() {
            let parent = p.parent().filter(|d| !d.as_os_str().is_empty());
            if let Some(dir) = parent {
                if !dir.is_dir() {
                    return Err(CliError::Io(format!(
                        "output directory {} does not exist",
                        dir.display()
                    )));
                }
            }
        }
        Ok(())
    }

    /// The effective tolerance for a suite default.
    pub fn tol(&self, default: f64) -> f64 {
        self.tolerance.unwrap_or(default)
    }

    pub fn sigmas(&self) -> f64 {
        self.tolerance.unwrap_or(self.mc_sigmas)
    }

    /// SHA-256 of the configuration with output locations removed.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = None;
        c.sample_dump = None;
        c.format = Format::Json;
        let text = serde_json::to_string(&c).expect("config serializes");
        Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Parses a comma-separated list of reals; an empty string gives an empty
/// list.
pub fn parse_hbar_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect()
}
