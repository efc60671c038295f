//! Parallel ensemble runner.
//!
//! Paths are split into fixed-size chunks by index. Each chunk is simulated
//! on one worker and reduced sequentially; chunk results are then combined
//! in chunk order. Since neither the chunking nor the reduction order
//! depends on how many workers run, the output is bit-identical for any
//! worker count.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, OutputKind, Process};
use crate::error::{Error, Result};
use crate::export::{fmt_real, write_csv};
use crate::histogram::{uniform_edges, Histogram};
use crate::ladder::{estimate_hidden_barriers, simulate_ladder, HiddenBarrierEstimate, PathExtremes, MIN_ESTIMATE_PATHS};
use crate::rng::PathStreams;
use crate::sde::simulate_validated;
use crate::skew::{simulate_msbm, simulate_reflected};
use crate::svg::density_svg;

const CHUNK: usize = 64;

/// Per-step running moments of a set of paths (Chan et al. pairwise merge).
#[derive(Debug, Clone)]
struct Moments {
    count: f64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    fn new(len: usize) -> Self {
        Moments {
            count: 0.0,
            mean: vec![0.0; len],
            m2: vec![0.0; len],
        }
    }

    fn push(&mut self, values: &[f64]) {
        self.count += 1.0;
        for ((m, s), v) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(values) {
            let delta = v - *m;
            *m += delta / self.count;
            *s += delta * (v - *m);
        }
    }

    fn merge(&mut self, other: &Moments) {
        if other.count == 0.0 {
            return;
        }
        if self.count == 0.0 {
            *self = other.clone();
            return;
        }
        let n = self.count + other.count;
        for i in 0..self.mean.len() {
            let delta = other.mean[i] - self.mean[i];
            self.mean[i] += delta * other.count / n;
            self.m2[i] += other.m2[i] + delta * delta * self.count * other.count / n;
        }
        self.count = n;
    }
}

struct PathOutcome {
    values: Vec<f64>,
    /// Local times per step (M-SBM) or `[A, B]` per step (reflected).
    ledger: Option<Vec<Vec<f64>>>,
}

fn simulate_one(process: &Process, config: &ExperimentConfig, index: usize) -> Result<PathOutcome> {
    let mut streams = PathStreams::new(config.master_seed, index as u64);
    let (n, horizon) = (config.n_steps, config.horizon);
    let outcome = match process {
        Process::Sde(spec) => simulate_validated(spec, n, config.dt(), &mut streams.increments).map(|r| PathOutcome {
            values: r.values,
            ledger: None,
        }),
        Process::Msbm(spec) => simulate_msbm(spec, n, horizon, &mut streams).map(|p| PathOutcome {
            values: p.record.values,
            ledger: Some(p.local_times),
        }),
        Process::Reflected(spec) => simulate_reflected(spec, n, horizon, &mut streams.increments).map(|p| PathOutcome {
            ledger: Some(
                p.regulators
                    .lower
                    .iter()
                    .zip(&p.regulators.upper)
                    .map(|(a, b)| vec![*a, *b])
                    .collect(),
            ),
            values: p.record.values,
        }),
        Process::Ladder(spec) => simulate_ladder(spec, n, horizon, &mut streams).map(|r| PathOutcome {
            values: r.values,
            ledger: None,
        }),
    };
    outcome.map_err(|e| match e {
        Error::Numeric { step, .. } => Error::Numeric { path: index, step },
        other => other,
    })
}

struct ChunkResult {
    terminal: Vec<f64>,
    extremes: Vec<PathExtremes>,
    display: Vec<Vec<f64>>,
    moments: Moments,
    ledger_sum: Option<Vec<Vec<f64>>>,
}

fn run_chunk(process: &Process, config: &ExperimentConfig, range: std::ops::Range<usize>) -> Result<ChunkResult> {
    let mut out = ChunkResult {
        terminal: Vec::with_capacity(range.len()),
        extremes: Vec::with_capacity(range.len()),
        display: Vec::new(),
        moments: Moments::new(config.n_steps + 1),
        ledger_sum: None,
    };
    for index in range {
        let path = simulate_one(process, config, index)?;
        out.terminal.push(*path.values.last().expect("path has a start point"));
        out.extremes.push(PathExtremes::from_values(&path.values));
        out.moments.push(&path.values);
        if let Some(ledger) = path.ledger {
            match &mut out.ledger_sum {
                None => out.ledger_sum = Some(ledger),
                Some(sum) => add_rows(sum, &ledger),
            }
        }
        if index < config.display_paths {
            out.display.push(path.values);
        }
    }
    Ok(out)
}

fn add_rows(sum: &mut [Vec<f64>], rows: &[Vec<f64>]) {
    for (s, r) in sum.iter_mut().zip(rows) {
        for (a, b) in s.iter_mut().zip(r) {
            *a += b;
        }
    }
}

/// Aggregates of one ensemble run.
#[derive(Debug, Clone)]
pub struct EnsembleResult {
    pub times: Vec<f64>,
    /// Terminal value of every path, by path index.
    pub terminal: Vec<f64>,
    pub extremes: Vec<PathExtremes>,
    /// The first `display_paths` paths, in full.
    pub display_paths: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    /// Per-step population variance across paths.
    pub variance: Vec<f64>,
    pub histogram: Histogram,
    pub estimate: Option<HiddenBarrierEstimate>,
    /// Mean local times (M-SBM) or mean `[A, B]` (reflected) per step.
    pub ledger_mean: Option<Vec<Vec<f64>>>,
    /// Barrier positions of the simulated process, for plotting.
    pub barriers: Vec<f64>,
    pub seconds: f64,
}

impl EnsembleResult {
    pub fn n_paths(&self) -> usize {
        self.terminal.len()
    }

    /// One-line human summary.
    pub fn summary(&self, name: &str) -> String {
        let mut s = format!(
            "{name}: {} paths x {} steps in {:.2}s",
            self.n_paths(),
            self.times.len() - 1,
            self.seconds
        );
        if let Some(e) = &self.estimate {
            s.push_str(&format!(
                "; hidden barriers [{:.4}, {:.4}], kappa {:.4} (stability {:.4}{})",
                e.lower,
                e.upper,
                e.kappa,
                e.stability,
                if e.diverged { ", diverged" } else { "" }
            ));
        }
        s
    }
}

/// Default histogram edges: `±1.2κ` when a non-divergent estimate exists,
/// otherwise the data range.
fn histogram_edges(config: &ExperimentConfig, terminal: &[f64], estimate: Option<&HiddenBarrierEstimate>) -> Result<Vec<f64>> {
    let (lo, hi) = match (config.histogram_range, estimate) {
        (Some([lo, hi]), _) => (lo, hi),
        (None, Some(e)) if !e.diverged && e.kappa > 0.0 => (-1.2 * e.kappa, 1.2 * e.kappa),
        _ => {
            let lo = terminal.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = terminal.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if lo < hi {
                (lo, hi)
            } else {
                (lo - 0.5, lo + 0.5)
            }
        }
    };
    uniform_edges(lo, hi, config.histogram_bins)
}

/// Runs the ensemble described by `config` on `workers` threads (`None`
/// uses all available cores).
pub fn run_ensemble(config: &ExperimentConfig, workers: Option<usize>) -> Result<EnsembleResult> {
    config.validate()?;
    let process = config.build_process()?;
    let start = Instant::now();

    let n = config.n_paths;
    let ranges: Vec<_> = (0..n.div_ceil(CHUNK)).map(|c| c * CHUNK..((c + 1) * CHUNK).min(n)).collect();
    let work = || -> Vec<Result<ChunkResult>> {
        ranges
            .par_iter()
            .map(|r| run_chunk(&process, config, r.clone()))
            .collect()
    };
    let chunks = match workers {
        Some(w) => {
            if w == 0 {
                return Err(Error::config("workers", "must be at least 1"));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::argument(format!("cannot start worker pool: {e}")))?
                .install(work)
        }
        None => work(),
    };

    let mut terminal = Vec::with_capacity(n);
    let mut extremes = Vec::with_capacity(n);
    let mut display_paths = Vec::new();
    let mut moments = Moments::new(config.n_steps + 1);
    let mut ledger_sum: Option<Vec<Vec<f64>>> = None;
    for chunk in chunks {
        let chunk = chunk?;
        terminal.extend(chunk.terminal);
        extremes.extend(chunk.extremes);
        display_paths.extend(chunk.display);
        moments.merge(&chunk.moments);
        if let Some(l) = chunk.ledger_sum {
            match &mut ledger_sum {
                None => ledger_sum = Some(l),
                Some(sum) => add_rows(sum, &l),
            }
        }
    }

    let estimate = if n >= MIN_ESTIMATE_PATHS {
        Some(estimate_hidden_barriers(&extremes, config.estimate)?)
    } else {
        None
    };
    let histogram = Histogram::from_values(&terminal, histogram_edges(config, &terminal, estimate.as_ref())?)?;
    let dt = config.dt();
    let times = (0..=config.n_steps).map(|k| k as f64 * dt).collect();
    let variance = moments.m2.iter().map(|s| (s / moments.count).max(0.0)).collect();
    let ledger_mean = ledger_sum.map(|mut rows| {
        for row in rows.iter_mut() {
            for v in row.iter_mut() {
                *v /= n as f64;
            }
        }
        rows
    });

    Ok(EnsembleResult {
        times,
        terminal,
        extremes,
        display_paths,
        mean: moments.mean,
        variance,
        histogram,
        estimate,
        ledger_mean,
        barriers: process.barrier_positions(),
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn io_at(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

#[derive(Serialize)]
struct EstimateJson {
    lower: f64,
    upper: f64,
    kappa: f64,
    stability: f64,
    diverged: bool,
}

/// Writes the outputs declared in `config` into `dir` as
/// `<name>_<suffix>` and returns the paths written.
pub fn write_outputs(config: &ExperimentConfig, result: &EnsembleResult, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_at(dir))?;
    let mut written = Vec::new();
    for kind in &config.outputs {
        let path = dir.join(format!("{}_{}", config.name, kind.file_suffix()));
        let mut out = create(&path)?;
        match kind {
            OutputKind::PathsCsv => {
                let names: Vec<String> = std::iter::once("t".to_string())
                    .chain((0..result.display_paths.len()).map(|i| format!("path_{i}")))
                    .collect();
                let header: Vec<&str> = names.iter().map(String::as_str).collect();
                let rows = result.times.iter().enumerate().map(|(k, t)| {
                    std::iter::once(*t).chain(result.display_paths.iter().map(|p| p[k])).collect::<Vec<f64>>()
                });
                write_csv(&mut out, &header, rows).map_err(io_at(&path))?;
            }
            OutputKind::TerminalCsv => {
                writeln!(out, "path,x").map_err(io_at(&path))?;
                for (i, x) in result.terminal.iter().enumerate() {
                    writeln!(out, "{i},{}", fmt_real(*x)).map_err(io_at(&path))?;
                }
            }
            OutputKind::HistogramCsv => result.histogram.write_csv(&mut out).map_err(io_at(&path))?,
            OutputKind::DensitySvg => {
                let markers = if config.plot_barriers {
                    if result.barriers.is_empty() {
                        result.estimate.iter().flat_map(|e| [e.lower, e.upper]).collect()
                    } else {
                        result.barriers.clone()
                    }
                } else {
                    Vec::new()
                };
                let title = format!("{}: terminal values of {} paths", config.name, result.n_paths());
                out.write_all(density_svg(&result.histogram, &title, &markers).as_bytes())
                    .map_err(io_at(&path))?;
            }
            OutputKind::BarrierEstimateJson => {
                let e = result
                    .estimate
                    .ok_or_else(|| Error::config("outputs", "no barrier estimate available"))?;
                let json = EstimateJson {
                    lower: e.lower,
                    upper: e.upper,
                    kappa: e.kappa,
                    stability: e.stability,
                    diverged: e.diverged,
                };
                let mut text = serde_json::to_string_pretty(&json)?;
                text.push('\n');
                out.write_all(text.as_bytes()).map_err(io_at(&path))?;
            }
            OutputKind::LedgerCsv => {
                let rows = result
                    .ledger_mean
                    .as_ref()
                    .ok_or_else(|| Error::config("outputs", "process has no ledger"))?;
                let width = rows.first().map_or(0, Vec::len);
                let names: Vec<String> = match config.process {
                    crate::config::ProcessConfig::Reflected { .. } => vec!["t".into(), "A".into(), "B".into()],
                    _ => std::iter::once("t".to_string())
                        .chain((1..=width).map(|j| format!("L_x{j}")))
                        .collect(),
                };
                let header: Vec<&str> = names.iter().map(String::as_str).collect();
                let body = result
                    .times
                    .iter()
                    .zip(rows)
                    .map(|(t, r)| std::iter::once(*t).chain(r.iter().copied()).collect::<Vec<f64>>());
                write_csv(&mut out, &header, body).map_err(io_at(&path))?;
            }
        }
        out.flush().map_err(io_at(&path))?;
        written.push(path);
    }
    Ok(written)
}
