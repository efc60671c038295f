//! Barrier ladders: a finite, symmetric set of increasingly reflective
//! barriers standing in for the continuous grid constraint, together with
//! the estimators that read the effective (hidden) barriers off an
//! ensemble.
//!
//! A ladder with `n` barriers per side places them at `j * W / n` for
//! `j = 1..=n`. The outermost pair at `±W` is fully reflective; the inner
//! ones are semipermeable with skewness `β_j`, and the lower side mirrors
//! the upper one with `β₋ⱼ = -βⱼ`.

mod estimate;
mod step;

use serde::{Deserialize, Serialize};

use crate::coeffs::{check_convexity, uniform_grid, CoefficientField};
use crate::error::{Error, Result};

pub use estimate::{
    estimate_hidden_barriers, sup_difference, EstimateMethod, HiddenBarrierEstimate, PathExtremes,
    MIN_ESTIMATE_PATHS,
};
pub use step::{simulate_ladder, step_ladder, BandRule, LadderSpec};

/// How the skewness of the inner barriers is assigned.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// `β_j = ratio^(n - j)`, with `0 < ratio < 1`.
    Geometric { ratio: f64 },
    /// `β_j = Ψ(x_j) / Ψ(x_n)`.
    #[default]
    PsiProportional,
}

/// A symmetric ladder. `positions` and `betas` run from the lowest barrier
/// `x₋ₙ` to the highest `xₙ`; both are empty for `half_count == 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierLadder {
    pub psi: CoefficientField,
    pub half_count: usize,
    pub schedule: Schedule,
    pub positions: Vec<f64>,
    pub betas: Vec<f64>,
}

impl BarrierLadder {
    pub fn is_empty(&self) -> bool {
        self.half_count == 0
    }

    /// Position of the outermost upper barrier, `0` for an empty ladder.
    pub fn half_width(&self) -> f64 {
        self.positions.last().copied().unwrap_or(0.0)
    }

    /// `x_1 ..= x_n`
    pub fn upper_positions(&self) -> &[f64] {
        &self.positions[self.half_count..]
    }

    /// `β_1 ..= β_n`
    pub fn upper_betas(&self) -> &[f64] {
        &self.betas[self.half_count..]
    }

    /// The intervals cut out by the barriers and the origin, in increasing
    /// order: `(-inf, x₋ₙ)`, `[x₋ₙ, x₋ₙ₊₁)`, …, `[xₙ, +inf)`. Together they
    /// cover the real line without overlap.
    pub fn intervals(&self) -> Vec<(f64, f64)> {
        let mut cuts = self.positions.clone();
        cuts.insert(self.half_count, 0.0);
        let mut out = Vec::with_capacity(cuts.len() + 1);
        let mut low = f64::NEG_INFINITY;
        for c in cuts {
            out.push((low, c));
            low = c;
        }
        out.push((low, f64::INFINITY));
        out
    }

    /// Index into [`intervals`](Self::intervals) of the interval holding `x`.
    pub fn interval_of(&self, x: f64) -> usize {
        let below = self.positions[..self.half_count].partition_point(|p| *p <= x);
        if x < 0.0 {
            below
        } else {
            self.half_count + 1 + self.upper_positions().partition_point(|p| *p <= x)
        }
    }

    /// Checks the structural invariants: symmetric positions, antisymmetric
    /// betas, fully reflective ends and strictly increasing `|β|` outward.
    pub fn validate(&self) -> Result<()> {
        let n = self.half_count;
        if self.positions.len() != 2 * n || self.betas.len() != 2 * n {
            return Err(Error::config("ladder", format!("expected {} positions and betas", 2 * n)));
        }
        self.psi.validate_at("ladder.psi")?;
        if n == 0 {
            return Ok(());
        }
        for i in 0..n {
            let (lo, hi) = (self.positions[n - 1 - i], self.positions[n + i]);
            if !(hi > 0.0 && lo == -hi) {
                return Err(Error::config(format!("ladder.positions[{}]", n + i), "positions must be symmetric about 0"));
            }
            if self.betas[n - 1 - i] != -self.betas[n + i] {
                return Err(Error::config(format!("ladder.betas[{}]", n + i), "betas must be antisymmetric"));
            }
        }
        if self.positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("ladder.positions", "must be strictly increasing"));
        }
        let upper = self.upper_betas();
        if upper[n - 1] != 1.0 {
            return Err(Error::config("ladder.betas", "outermost barriers must be fully reflective"));
        }
        if upper[0] < 0.0 || upper.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("ladder.betas", "|β| must increase strictly away from the origin"));
        }
        Ok(())
    }
}

/// Builds a ladder of `n` barriers per side over `[-half_width, half_width]`.
/// `n == 0` yields the empty ladder, under which simulation is unconstrained.
pub fn build_ladder(psi: &CoefficientField, half_width: f64, n: usize, schedule: Schedule) -> Result<BarrierLadder> {
    psi.validate_at("psi")?;
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::argument(format!("half width must be positive, got {half_width}")));
    }
    if n == 0 {
        return Ok(BarrierLadder {
            psi: psi.clone(),
            half_count: 0,
            schedule,
            positions: Vec::new(),
            betas: Vec::new(),
        });
    }
    if !check_convexity(psi, &uniform_grid(-half_width, half_width, 201))? {
        return Err(Error::config("psi", "ladder generator must be convex"));
    }
    let upper: Vec<f64> = (1..=n)
        .map(|j| if j == n { half_width } else { half_width * j as f64 / n as f64 })
        .collect();
    let betas: Vec<f64> = match schedule {
        Schedule::Geometric { ratio } => {
            if !(ratio > 0.0 && ratio < 1.0) {
                return Err(Error::config("schedule.ratio", "must lie in (0, 1)"));
            }
            (1..=n).map(|j| ratio.powi((n - j) as i32)).collect()
        }
        Schedule::PsiProportional => {
            let top = psi.value(half_width, 0.0);
            if !(top > 0.0) {
                return Err(Error::config("psi", "Ψ must be positive at the outermost barrier"));
            }
            (1..=n)
                .map(|j| if j == n { 1.0 } else { psi.value(upper[j - 1], 0.0) / top })
                .collect()
        }
    };
    let ladder = BarrierLadder {
        psi: psi.clone(),
        half_count: n,
        schedule,
        positions: upper.iter().rev().map(|p| -p).chain(upper.iter().copied()).collect(),
        betas: betas.iter().rev().map(|b| -b).chain(betas.iter().copied()).collect(),
    };
    ladder.validate().map_err(|e| match e {
        Error::Config { field, message } => Error::config(
            field,
            format!("{message} (schedule {schedule:?} with this Ψ does not give a valid ladder)"),
        ),
        other => other,
    })?;
    Ok(ladder)
}
