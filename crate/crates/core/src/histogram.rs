//! Raw-count histograms. Bins are half-open `[e_i, e_{i+1})` except the
//! last, which also holds its right edge. Values below or above the edges
//! and non-finite values are counted separately, so nothing is dropped.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::fmt_real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
    pub nan: u64,
}

/// `bins + 1` evenly spaced edges from `low` to `high`, both exact.
pub fn uniform_edges(low: f64, high: f64, bins: usize) -> Result<Vec<f64>> {
    if bins == 0 || !(low.is_finite() && high.is_finite() && low < high) {
        return Err(Error::argument(format!("cannot build {bins} bins over [{low}, {high}]")));
    }
    let width = (high - low) / bins as f64;
    Ok((0..=bins)
        .map(|i| if i == bins { high } else { low + width * i as f64 })
        .collect())
}

impl Histogram {
    pub fn new(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::argument("a histogram needs at least two edges"));
        }
        if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::argument("histogram edges must be finite and strictly increasing"));
        }
        let bins = edges.len() - 1;
        Ok(Histogram {
            edges,
            counts: vec![0; bins],
            underflow: 0,
            overflow: 0,
            nan: 0,
        })
    }

    pub fn from_values(values: &[f64], edges: Vec<f64>) -> Result<Self> {
        let mut h = Histogram::new(edges)?;
        for v in values {
            h.add(*v);
        }
        Ok(h)
    }

    /// Bin holding `x`, or `None` outside the edges.
    pub fn bin_of(&self, x: f64) -> Option<usize> {
        let last = *self.edges.last().expect("at least two edges");
        if !(x >= self.edges[0] && x <= last) {
            return None;
        }
        let i = self.edges.partition_point(|e| *e <= x);
        Some((i - 1).min(self.counts.len() - 1))
    }

    pub fn add(&mut self, x: f64) {
        if !x.is_finite() {
            self.nan += 1;
        } else if let Some(i) = self.bin_of(x) {
            self.counts[i] += 1;
        } else if x < self.edges[0] {
            self.underflow += 1;
        } else {
            self.overflow += 1;
        }
    }

    /// Everything counted, including out-of-range and non-finite values.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.underflow + self.overflow + self.nan
    }

    /// True when some bin is empty while bins on both sides of it are not.
    pub fn has_interior_gap(&self) -> bool {
        let occupied: Vec<usize> = (0..self.counts.len()).filter(|i| self.counts[*i] > 0).collect();
        occupied.windows(2).any(|w| w[1] > w[0] + 1)
    }

    /// CSV with header `bin_low,bin_high,count`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "bin_low,bin_high,count")?;
        for (w, c) in self.edges.windows(2).zip(&self.counts) {
            writeln!(out, "{},{},{}", fmt_real(w[0]), fmt_real(w[1]), c)?;
        }
        Ok(())
    }
}
