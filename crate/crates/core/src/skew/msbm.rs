use std::io::{self, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::BarrierSpec;
use crate::error::{Error, Result};
use crate::export::write_csv;
use crate::rng::{coin, IncrementMode, PathStreams};
use crate::sde::{check_steps, PathRecord};

/// Parameters of an M-SBM: drift, diffusion and ordered barriers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MsbmSpec {
    pub mu: f64,
    pub sigma: f64,
    pub barriers: Vec<BarrierSpec>,
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub increment_mode: IncrementMode,
}

impl MsbmSpec {
    pub fn new(mu: f64, sigma: f64, barriers: Vec<BarrierSpec>, x0: f64) -> Result<Self> {
        let spec = MsbmSpec {
            mu,
            sigma,
            barriers,
            x0,
            increment_mode: IncrementMode::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_mode(mut self, mode: IncrementMode) -> Self {
        self.increment_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() {
            return Err(Error::config("mu", "must be finite"));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::config("sigma", "must be positive"));
        }
        if !self.x0.is_finite() {
            return Err(Error::config("x0", "must be finite"));
        }
        for (i, b) in self.barriers.iter().enumerate() {
            b.validate_at(&format!("barriers[{i}]"))?;
        }
        if self.barriers.windows(2).any(|w| w[1].position <= w[0].position) {
            return Err(Error::config("barriers", "positions must be strictly increasing"));
        }
        Ok(())
    }

    pub fn positions(&self) -> Vec<f64> {
        self.barriers.iter().map(|b| b.position).collect()
    }
}

/// Discrete local time accumulated at each barrier.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LocalTimeLedger {
    pub local_time: Vec<f64>,
    pub hits: Vec<u64>,
}

impl LocalTimeLedger {
    pub fn new(n_barriers: usize) -> Self {
        LocalTimeLedger {
            local_time: vec![0.0; n_barriers],
            hits: vec![0; n_barriers],
        }
    }

    /// Adds `other` entry-wise; ensemble ledgers are joined this way.
    pub fn merge(&mut self, other: &LocalTimeLedger) {
        for (a, b) in self.local_time.iter_mut().zip(&other.local_time) {
            *a += b;
        }
        for (a, b) in self.hits.iter_mut().zip(&other.hits) {
            *a += b;
        }
    }

    pub fn total_hits(&self) -> u64 {
        self.hits.iter().sum()
    }
}

/// Moves from `from` toward `to`, resolving every barrier met on the way
/// with a skew coin. The excess travel past a barrier is credited to its
/// local time and continues on the side the coin picks. Returns the final
/// position.
///
/// A barrier exactly at `from` counts as touched at the start of the step.
/// `beta_at` maps a barrier index to the skewness applied there.
pub(crate) fn resolve_crossings<R, F>(
    positions: &[f64],
    beta_at: F,
    from: f64,
    to: f64,
    mut ledger: Option<&mut LocalTimeLedger>,
    coins: &mut R,
) -> f64
where
    R: Rng + ?Sized,
    F: Fn(usize) -> f64,
{
    let mut pos = from;
    let mut dest = to;
    let mut inclusive = true;
    loop {
        let hit = if dest > pos {
            let i = if inclusive {
                positions.partition_point(|p| *p < pos)
            } else {
                positions.partition_point(|p| *p <= pos)
            };
            (i < positions.len() && positions[i] <= dest).then_some(i)
        } else if dest < pos {
            let i = if inclusive {
                positions.partition_point(|p| *p <= pos)
            } else {
                positions.partition_point(|p| *p < pos)
            };
            (i > 0 && positions[i - 1] >= dest).then(|| i - 1)
        } else {
            None
        };
        let Some(j) = hit else { break };
        let p = positions[j];
        let excess = (dest - p).abs();
        let upper = coin(coins) < (1.0 + beta_at(j)) / 2.0;
        if let Some(l) = ledger.as_deref_mut() {
            l.local_time[j] += excess;
            l.hits[j] += 1;
        }
        pos = p;
        dest = if upper { p + excess } else { p - excess };
        inclusive = false;
        if excess == 0.0 {
            break;
        }
    }
    dest
}

/// One M-SBM step: the Euler candidate `x + μ dt + σ dW`, with every
/// barrier crossed or touched along `[x, candidate]` resolved in order.
pub fn step_msbm<R: Rng + ?Sized>(
    x: f64,
    spec: &MsbmSpec,
    dw: f64,
    dt: f64,
    ledger: &mut LocalTimeLedger,
    coins: &mut R,
) -> f64 {
    let candidate = x + spec.mu * dt + spec.sigma * dw;
    let positions: Vec<f64> = spec.positions();
    resolve_crossings(&positions, |j| spec.barriers[j].beta, x, candidate, Some(ledger), coins)
}

/// A simulated M-SBM path with its local-time history.
#[derive(Debug, Clone, PartialEq)]
pub struct MsbmPath {
    pub record: PathRecord,
    /// `local_times[k][j]`: local time at barrier `j` up to `times[k]`.
    pub local_times: Vec<Vec<f64>>,
    pub ledger: LocalTimeLedger,
}

impl MsbmPath {
    /// CSV with header `t,L_x1,...,L_xn`.
    pub fn write_ledger_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        let n = self.ledger.local_time.len();
        let names: Vec<String> = std::iter::once("t".to_string())
            .chain((1..=n).map(|j| format!("L_x{j}")))
            .collect();
        let header: Vec<&str> = names.iter().map(String::as_str).collect();
        write_csv(
            out,
            &header,
            self.record.times.iter().zip(&self.local_times).map(|(t, l)| {
                let mut row = Vec::with_capacity(n + 1);
                row.push(*t);
                row.extend_from_slice(l);
                row
            }),
        )
    }
}

/// Simulates an M-SBM path. Increments come from `streams.increments`,
/// skew coins from `streams.coins`.
pub fn simulate_msbm(spec: &MsbmSpec, n_steps: usize, horizon: f64, streams: &mut PathStreams) -> Result<MsbmPath> {
    let dt = check_steps(n_steps, horizon)?;
    spec.validate()?;
    let positions = spec.positions();
    let mut ledger = LocalTimeLedger::new(positions.len());
    let mut record = PathRecord::start(spec.x0, dt, n_steps);
    let mut local_times = Vec::with_capacity(n_steps + 1);
    local_times.push(ledger.local_time.clone());
    let mut x = spec.x0;
    for k in 0..n_steps {
        let dw = spec.increment_mode.draw(&mut streams.increments, dt);
        let candidate = x + spec.mu * dt + spec.sigma * dw;
        x = resolve_crossings(
            &positions,
            |j| spec.barriers[j].beta,
            x,
            candidate,
            Some(&mut ledger),
            &mut streams.coins,
        );
        if !x.is_finite() {
            return Err(Error::Numeric { path: 0, step: k + 1 });
        }
        record.push(x);
        local_times.push(ledger.local_time.clone());
    }
    Ok(MsbmPath {
        record,
        local_times,
        ledger,
    })
}
