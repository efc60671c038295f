//! Discrete-time simulation of Itô diffusions with and without a
//! bi-directional grid constraint (BGC).
//!
//! A BGC diffusion subtracts `sgn(X) * Ψ` from the unconstrained Euler
//! step. [`Placement`] selects where `Ψ` enters: as a drift, scaled by the
//! magnitude of the noise, or as the finite difference `Ψ(x*) - Ψ(x)` along
//! the step. In every placement the correction of a single step is capped at
//! `max(|raw increment|, |x|)`, so it can at most reverse the increment or
//! return the state to the origin, never amplify it.

mod multidim;
mod record;
mod scalar;

use serde::{Deserialize, Serialize};

use crate::coeffs::{check_convexity, uniform_grid, CoefficientField};
use crate::error::{Error, Result};
pub use crate::rng::IncrementMode;

pub use multidim::{simulate_multidim, PathRecordNd, SdeSpecNd};
pub use record::PathRecord;
pub use scalar::{simulate_path, step_bgc, step_ito};

pub(crate) use scalar::{bgc_correction, simulate_validated};

/// Half-width of the window around `x0` on which diffusion positivity and
/// BGC convexity are checked.
pub const VALIDATION_HALF_WIDTH: f64 = 100.0;
const VALIDATION_POINTS: usize = 401;

/// Where the grid-constraint function enters the step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// `x + (f - sgn(x) Ψ(x)) dt + g dW`
    DriftTerm,
    /// `x + f dt + g dW - sgn(x) Ψ(x) |dW|`
    #[default]
    DiffusionTerm,
    /// `x* - (Ψ(x*) - Ψ(x)) sgn(x* - x)` for `x != 0`, with `x*` the
    /// unconstrained candidate.
    Differential,
}

/// A one-dimensional diffusion, optionally grid constrained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdeSpec {
    pub drift: CoefficientField,
    pub diffusion: CoefficientField,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bgc: Option<CoefficientField>,
    #[serde(default)]
    pub placement: Placement,
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub increment_mode: IncrementMode,
}

impl SdeSpec {
    /// Constant drift `mu`, constant diffusion `sigma`, no constraint.
    pub fn wiener(mu: f64, sigma: f64) -> Self {
        SdeSpec {
            drift: CoefficientField::constant(mu),
            diffusion: CoefficientField::constant(sigma),
            bgc: None,
            placement: Placement::default(),
            x0: 0.0,
            increment_mode: IncrementMode::default(),
        }
    }

    pub fn with_bgc(mut self, psi: CoefficientField, placement: Placement) -> Self {
        self.bgc = Some(psi);
        self.placement = placement;
        self
    }

    pub fn with_mode(mut self, mode: IncrementMode) -> Self {
        self.increment_mode = mode;
        self
    }

    pub fn with_x0(mut self, x0: f64) -> Self {
        self.x0 = x0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_at("spec")
    }

    pub(crate) fn validate_at(&self, path: &str) -> Result<()> {
        if !self.x0.is_finite() {
            return Err(Error::config(format!("{path}.x0"), "must be finite"));
        }
        self.drift.validate_at(&format!("{path}.drift"))?;
        self.diffusion.validate_at(&format!("{path}.diffusion"))?;
        let grid = validation_grid(self.x0);
        check_diffusion_nonnegative(&self.diffusion, &grid, &format!("{path}.diffusion"))?;
        if let Some(psi) = &self.bgc {
            psi.validate_at(&format!("{path}.bgc"))?;
            check_bgc_convex(psi, &grid, &format!("{path}.bgc"))?;
        }
        Ok(())
    }
}

pub(crate) fn validation_grid(center: f64) -> Vec<f64> {
    uniform_grid(
        center - VALIDATION_HALF_WIDTH,
        center + VALIDATION_HALF_WIDTH,
        VALIDATION_POINTS,
    )
}

pub(crate) fn check_diffusion_nonnegative(g: &CoefficientField, grid: &[f64], path: &str) -> Result<()> {
    if let Some(x) = grid.iter().find(|x| g.value(**x, 0.0) < 0.0) {
        return Err(Error::config(path, format!("diffusion is negative at x = {x}")));
    }
    Ok(())
}

pub(crate) fn check_bgc_convex(psi: &CoefficientField, grid: &[f64], path: &str) -> Result<()> {
    if !check_convexity(psi, grid)? {
        return Err(Error::config(path, "BGC field is not convex on the simulation range"));
    }
    Ok(())
}

pub(crate) fn check_steps(n_steps: usize, horizon: f64) -> Result<f64> {
    if n_steps == 0 {
        return Err(Error::config("n_steps", "must be at least 1"));
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::config("horizon", "must be positive and finite"));
    }
    Ok(horizon / n_steps as f64)
}
