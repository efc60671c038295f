//! JSON experiment configuration.
//!
//! ```json
//! {
//!   "name": "fig06_two_barriers",
//!   "process": { "type": "ladder", "half_count": 1, "half_width": 10.0,
//!                "psi": { "kind": "quadratic", "scale": 10.0 } },
//!   "mu": 0.0, "sigma": 1.0, "x0": 0.0,
//!   "increment_mode": "gaussian_unit",
//!   "n_paths": 10000, "n_steps": 1000, "horizon": 1000.0,
//!   "master_seed": 20200101,
//!   "outputs": ["paths_csv", "histogram_csv", "density_svg"]
//! }
//! ```
//!
//! Parsing reports the JSON path of the offending field together with the
//! line and column; semantic validation reports the field path only.

use serde::{Deserialize, Serialize};

use crate::coeffs::CoefficientField;
use crate::error::{Error, Result};
use crate::ladder::{build_ladder, BandRule, EstimateMethod, LadderSpec, Schedule};
use crate::rng::IncrementMode;
use crate::sde::{Placement, SdeSpec};
use crate::skew::{BarrierSpec, MsbmSpec, ReflectedSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProcessConfig {
    Unconstrained,
    Bgc {
        #[serde(default)]
        placement: Placement,
        psi: CoefficientField,
    },
    Msbm {
        barriers: Vec<BarrierSpec>,
    },
    Reflected {
        lower: f64,
        upper: f64,
    },
    Ladder {
        half_count: usize,
        half_width: f64,
        psi: CoefficientField,
        #[serde(default)]
        schedule: Schedule,
        #[serde(default)]
        rule: BandRule,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    /// `t` plus the first `display_paths` paths, one column each.
    PathsCsv,
    /// `path,x` for every path.
    TerminalCsv,
    /// `bin_low,bin_high,count`.
    HistogramCsv,
    DensitySvg,
    BarrierEstimateJson,
    /// Mean local times (M-SBM) or mean regulators (reflected) per step.
    LedgerCsv,
}

impl OutputKind {
    pub fn file_suffix(self) -> &'static str {
        match self {
            OutputKind::PathsCsv => "paths.csv",
            OutputKind::TerminalCsv => "terminal.csv",
            OutputKind::HistogramCsv => "histogram.csv",
            OutputKind::DensitySvg => "density.svg",
            OutputKind::BarrierEstimateJson => "barrier.json",
            OutputKind::LedgerCsv => "ledger.csv",
        }
    }
}

fn default_sigma() -> f64 {
    1.0
}

fn default_bins() -> usize {
    101
}

fn default_display() -> usize {
    1000
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub process: ProcessConfig,
    #[serde(default)]
    pub mu: f64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub increment_mode: IncrementMode,
    pub n_paths: usize,
    pub n_steps: usize,
    pub horizon: f64,
    pub master_seed: u64,
    #[serde(default)]
    pub outputs: Vec<OutputKind>,
    #[serde(default = "default_bins")]
    pub histogram_bins: usize,
    /// Fixed histogram range; by default `±1.2κ` or the data range.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub histogram_range: Option<[f64; 2]>,
    #[serde(default = "default_display")]
    pub display_paths: usize,
    #[serde(default)]
    pub estimate: EstimateMethod,
    /// Draw barrier positions on the density plot.
    #[serde(default = "default_true")]
    pub plot_barriers: bool,
}

/// A validated process, ready to simulate.
#[derive(Debug, Clone, PartialEq)]
pub enum Process {
    Sde(SdeSpec),
    Msbm(MsbmSpec),
    Reflected(ReflectedSpec),
    Ladder(LadderSpec),
}

impl Process {
    /// Barrier positions worth marking on a plot.
    pub fn barrier_positions(&self) -> Vec<f64> {
        match self {
            Process::Sde(_) => Vec::new(),
            Process::Msbm(m) => m.positions(),
            Process::Reflected(r) => vec![r.lower, r.upper],
            Process::Ladder(l) => l.ladder.positions.clone(),
        }
    }
}

fn under(prefix: &str, e: Error) -> Error {
    match e {
        Error::Config { field, message } => Error::Config {
            field: format!("{prefix}.{field}"),
            message,
        },
        Error::Argument(message) => Error::Config {
            field: prefix.to_string(),
            message,
        },
        other => other,
    }
}

impl ExperimentConfig {
    /// Parses and validates a JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(if path == "." { "<root>".to_string() } else { path }, e.into_inner().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Pretty-printed canonical form, newline terminated.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.n_steps as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::config("name", "must be a non-empty file-name stem"));
        }
        if self.n_paths < 1 {
            return Err(Error::config("n_paths", "must be at least 1"));
        }
        if self.n_steps < 1 {
            return Err(Error::config("n_steps", "must be at least 1"));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::config("horizon", "must be positive"));
        }
        if self.histogram_bins < 1 {
            return Err(Error::config("histogram_bins", "must be at least 1"));
        }
        if let Some([lo, hi]) = self.histogram_range {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::config("histogram_range", "must be finite with low < high"));
            }
        }
        if let EstimateMethod::Quantile(q) = self.estimate {
            if !(q > 0.0 && q < 0.5) {
                return Err(Error::config("estimate.quantile", "must lie in (0, 0.5)"));
            }
        }
        for (i, o) in self.outputs.iter().enumerate() {
            if self.outputs[..i].contains(o) {
                return Err(Error::config(format!("outputs[{i}]"), "listed twice"));
            }
            let ok = match o {
                OutputKind::BarrierEstimateJson => self.n_paths >= crate::ladder::MIN_ESTIMATE_PATHS,
                OutputKind::LedgerCsv => {
                    matches!(self.process, ProcessConfig::Msbm { .. } | ProcessConfig::Reflected { .. })
                }
                _ => true,
            };
            if !ok {
                return Err(Error::config(
                    format!("outputs[{i}]"),
                    match o {
                        OutputKind::LedgerCsv => "ledger output needs an msbm or reflected process".to_string(),
                        _ => format!("barrier estimate needs at least {} paths", crate::ladder::MIN_ESTIMATE_PATHS),
                    },
                ));
            }
        }
        self.build_process().map(|_| ())
    }

    /// Turns the process section into a validated simulation spec.
    pub fn build_process(&self) -> Result<Process> {
        let check = |v: f64, field: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(field, "must be finite"))
            }
        };
        check(self.mu, "mu")?;
        check(self.x0, "x0")?;
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::config("sigma", "must be finite and non-negative"));
        }
        let process = match &self.process {
            ProcessConfig::Unconstrained => {
                Process::Sde(SdeSpec::wiener(self.mu, self.sigma).with_x0(self.x0).with_mode(self.increment_mode))
            }
            ProcessConfig::Bgc { placement, psi } => Process::Sde(
                SdeSpec::wiener(self.mu, self.sigma)
                    .with_x0(self.x0)
                    .with_mode(self.increment_mode)
                    .with_bgc(psi.clone(), *placement),
            ),
            ProcessConfig::Msbm { barriers } => Process::Msbm(MsbmSpec {
                mu: self.mu,
                sigma: self.sigma,
                barriers: barriers.clone(),
                x0: self.x0,
                increment_mode: self.increment_mode,
            }),
            ProcessConfig::Reflected { lower, upper } => Process::Reflected(ReflectedSpec {
                mu: self.mu,
                sigma: self.sigma,
                lower: *lower,
                upper: *upper,
                x0: self.x0,
                increment_mode: self.increment_mode,
            }),
            ProcessConfig::Ladder {
                half_count,
                half_width,
                psi,
                schedule,
                rule,
            } => Process::Ladder(LadderSpec {
                ladder: build_ladder(psi, *half_width, *half_count, *schedule).map_err(|e| under("process", e))?,
                rule: *rule,
                mu: self.mu,
                sigma: self.sigma,
                x0: self.x0,
                increment_mode: self.increment_mode,
            }),
        };
        match &process {
            Process::Sde(s) => s.validate_at("process"),
            Process::Msbm(m) => m.validate().map_err(|e| under("process", e)),
            Process::Reflected(r) => r.validate().map_err(|e| under("process", e)),
            Process::Ladder(l) => l.validate().map_err(|e| under("process", e)),
        }?;
        Ok(process)
    }
}
