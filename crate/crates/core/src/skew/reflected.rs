use std::io::{self, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::write_csv;
use crate::rng::IncrementMode;
use crate::sde::{check_steps, PathRecord};

/// A diffusion confined to `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReflectedSpec {
    pub mu: f64,
    pub sigma: f64,
    pub lower: f64,
    pub upper: f64,
    pub x0: f64,
    #[serde(default)]
    pub increment_mode: IncrementMode,
}

impl ReflectedSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::config("sigma", "drift and diffusion must be finite, diffusion non-negative"));
        }
        if !(self.lower.is_finite() && self.upper.is_finite() && self.lower < self.upper) {
            return Err(Error::argument(format!(
                "reflecting barriers need lower < upper, got [{}, {}]",
                self.lower, self.upper
            )));
        }
        if !(self.x0 > self.lower && self.x0 < self.upper) {
            return Err(Error::argument(format!(
                "x0 = {} must lie strictly inside ({}, {})",
                self.x0, self.lower, self.upper
            )));
        }
        Ok(())
    }
}

/// Cumulative regulators: `lower` pushes up at the lower barrier, `upper`
/// pushes down at the upper one.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RegulatorPair {
    pub lower: f64,
    pub upper: f64,
}

/// Regulator values at every grid time, starting from zero.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RegulatorSeries {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl RegulatorSeries {
    pub fn terminal(&self) -> RegulatorPair {
        RegulatorPair {
            lower: *self.lower.last().unwrap_or(&0.0),
            upper: *self.upper.last().unwrap_or(&0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReflectedPath {
    pub record: PathRecord,
    pub regulators: RegulatorSeries,
}

impl ReflectedPath {
    /// CSV with header `t,A,B`.
    pub fn write_regulator_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        write_csv(
            out,
            &["t", "A", "B"],
            self.record
                .times
                .iter()
                .zip(self.regulators.lower.iter().zip(&self.regulators.upper))
                .map(|(t, (a, b))| vec![*t, *a, *b]),
        )
    }
}

/// Discrete Skorokhod construction: take the Euler candidate and clamp it
/// to `[lower, upper]`; the clamped-off amount is added to the regulator of
/// the barrier that was overshot. A regulator therefore grows only on steps
/// that end exactly on its barrier.
pub fn simulate_reflected<R: Rng + ?Sized>(
    spec: &ReflectedSpec,
    n_steps: usize,
    horizon: f64,
    rng: &mut R,
) -> Result<ReflectedPath> {
    let dt = check_steps(n_steps, horizon)?;
    spec.validate()?;
    let mut record = PathRecord::start(spec.x0, dt, n_steps);
    let mut regulators = RegulatorSeries {
        lower: Vec::with_capacity(n_steps + 1),
        upper: Vec::with_capacity(n_steps + 1),
    };
    regulators.lower.push(0.0);
    regulators.upper.push(0.0);
    let (mut a, mut b) = (0.0, 0.0);
    let mut x = spec.x0;
    for k in 0..n_steps {
        let dw = spec.increment_mode.draw(rng, dt);
        let candidate = x + spec.mu * dt + spec.sigma * dw;
        if !candidate.is_finite() {
            return Err(Error::Numeric { path: 0, step: k + 1 });
        }
        a += (spec.lower - candidate).max(0.0);
        b += (candidate - spec.upper).max(0.0);
        x = candidate.clamp(spec.lower, spec.upper);
        record.push(x);
        regulators.lower.push(a);
        regulators.upper.push(b);
    }
    Ok(ReflectedPath { record, regulators })
}
