//! Multi-skew Brownian motion, two-sided reflected diffusions and the
//! algebra for merging skewness parameters of clustered barriers.
//!
//! Skewness follows the usual convention: a path that reaches barrier `x_j`
//! leaves on the upper side with probability `(1 + β_j) / 2`, so `β = 1`
//! forces the upper side, `β = -1` the lower side and `β = 0` leaves the
//! motion unaffected in law.

mod merge;
mod msbm;
mod reflected;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use merge::{bgcsp_merged_beta, merge_beta_pair, merge_beta_product, merge_beta_symmetric};
pub use msbm::{simulate_msbm, step_msbm, LocalTimeLedger, MsbmPath, MsbmSpec};
pub use reflected::{simulate_reflected, ReflectedPath, ReflectedSpec, RegulatorPair, RegulatorSeries};

pub(crate) use msbm::resolve_crossings;

/// A barrier at `position` with skewness `beta` in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierSpec {
    pub position: f64,
    pub beta: f64,
}

impl BarrierSpec {
    pub fn new(position: f64, beta: f64) -> Result<Self> {
        let b = BarrierSpec { position, beta };
        b.validate_at("barrier")?;
        Ok(b)
    }

    /// Zero permeability: the path always leaves on one side.
    pub fn is_fully_reflective(&self) -> bool {
        self.beta.abs() == 1.0
    }

    pub(crate) fn validate_at(&self, path: &str) -> Result<()> {
        if !self.position.is_finite() {
            return Err(Error::config(format!("{path}.position"), "must be finite"));
        }
        check_beta(self.beta).map_err(|_| Error::config(format!("{path}.beta"), "must lie in [-1, 1]"))
    }
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if (-1.0..=1.0).contains(&beta) {
        Ok(())
    } else {
        Err(Error::argument(format!("skewness {beta} outside [-1, 1]")))
    }
}
