use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::export::write_csv;

/// One simulated scalar path on a uniform time grid.
///
/// `values[k + 1] - values[k] == increments[k]` holds exactly: increments are
/// stored as the difference of consecutive states after every constraint
/// has been applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub dt: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub increments: Vec<f64>,
}

impl PathRecord {
    pub(crate) fn start(x0: f64, dt: f64, n_steps: usize) -> Self {
        let mut values = Vec::with_capacity(n_steps + 1);
        values.push(x0);
        PathRecord {
            dt,
            times: (0..=n_steps).map(|k| k as f64 * dt).collect(),
            values,
            increments: Vec::with_capacity(n_steps),
        }
    }

    #[inline]
    pub(crate) fn push(&mut self, next: f64) {
        let prev = *self.values.last().expect("record starts with x0");
        self.increments.push(next - prev);
        self.values.push(next);
    }

    pub fn x0(&self) -> f64 {
        self.values[0]
    }

    pub fn terminal(&self) -> f64 {
        *self.values.last().expect("record starts with x0")
    }

    pub fn n_steps(&self) -> usize {
        self.increments.len()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// CSV with header `t,x`, one row per grid point.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        write_csv(
            out,
            &["t", "x"],
            self.times.iter().zip(&self.values).map(|(t, x)| vec![*t, *x]),
        )
    }
}
