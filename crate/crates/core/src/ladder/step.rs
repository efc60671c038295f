use rand::Rng;
use serde::{Deserialize, Serialize};

use super::BarrierLadder;
use crate::coeffs::sign_of;
use crate::error::{Error, Result};
use crate::rng::{IncrementMode, PathStreams};
use crate::sde::{check_steps, PathRecord};
use crate::skew::resolve_crossings;

/// How a ladder acts on the increment between its barriers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandRule {
    /// Each semipermeable barrier met along the step is resolved with a
    /// skew coin using that barrier's `β`.
    #[default]
    PositionBased,
    /// Between the innermost and outermost barriers the increment `δ` is
    /// damped to `δ - sgn(x)·Ψ(|δ|)`, independently of `β`. For
    /// `Ψ(x) = (x/10)²` this is `δ - sgn(x)·δ²/100`.
    PaperFaithful,
}

/// A drifted Brownian motion constrained by a barrier ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderSpec {
    pub ladder: BarrierLadder,
    #[serde(default)]
    pub rule: BandRule,
    pub mu: f64,
    pub sigma: f64,
    pub x0: f64,
    #[serde(default)]
    pub increment_mode: IncrementMode,
}

impl LadderSpec {
    pub fn validate(&self) -> Result<()> {
        self.ladder.validate()?;
        if !(self.mu.is_finite() && self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::config("sigma", "drift and diffusion must be finite, diffusion non-negative"));
        }
        if !self.x0.is_finite() {
            return Err(Error::config("x0", "must be finite"));
        }
        Ok(())
    }
}

/// One ladder step from `x` with raw increment `μ dt + σ dw`.
///
/// Inside the innermost band the increment passes through. Whenever the
/// resolved candidate lies beyond the outermost barrier, the increment's
/// sign is forced toward the origin: the step becomes `x - sgn·|δ|`.
#[allow(clippy::too_many_arguments)]
pub fn step_ladder<R: Rng + ?Sized>(
    x: f64,
    mu: f64,
    sigma: f64,
    ladder: &BarrierLadder,
    rule: BandRule,
    dw: f64,
    dt: f64,
    coins: &mut R,
) -> f64 {
    let raw = mu * dt + sigma * dw;
    let candidate = x + raw;
    if ladder.is_empty() {
        return candidate;
    }
    let width = ladder.half_width();
    let n = ladder.half_count;
    let resolved = match rule {
        BandRule::PositionBased => {
            let inner = &ladder.positions[1..2 * n - 1];
            resolve_crossings(inner, |j| ladder.betas[j + 1], x, candidate, None, coins)
        }
        BandRule::PaperFaithful => {
            let a = candidate.abs();
            if a <= ladder.upper_positions()[0] || a > width {
                candidate
            } else {
                x + (raw - f64::from(sign_of(candidate)) * ladder.psi.value(raw.abs(), 0.0))
            }
        }
    };
    if resolved.abs() > width {
        x - f64::from(sign_of(resolved)) * raw.abs()
    } else {
        resolved
    }
}

/// Simulates a ladder path. An empty ladder reproduces the unconstrained
/// walk drawn from the same increment stream.
pub fn simulate_ladder(spec: &LadderSpec, n_steps: usize, horizon: f64, streams: &mut PathStreams) -> Result<PathRecord> {
    let dt = check_steps(n_steps, horizon)?;
    spec.validate()?;
    let mut record = PathRecord::start(spec.x0, dt, n_steps);
    let mut x = spec.x0;
    for k in 0..n_steps {
        let dw = spec.increment_mode.draw(&mut streams.increments, dt);
        x = step_ladder(x, spec.mu, spec.sigma, &spec.ladder, spec.rule, dw, dt, &mut streams.coins);
        if !x.is_finite() {
            return Err(Error::Numeric { path: 0, step: k + 1 });
        }
        record.push(x);
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::CoefficientField;
    use crate::ladder::{build_ladder, Schedule};
    use crate::sde::{simulate_path, SdeSpec};
    use proptest::prelude::*;

    fn ladder(width: f64, n: usize) -> BarrierLadder {
        build_ladder(&CoefficientField::quadratic(10.0), width, n, Schedule::PsiProportional).unwrap()
    }

    fn coins() -> PathStreams {
        PathStreams::new(11, 0)
    }

    #[test]
    fn innermost_band_passes_through() {
        let l = ladder(20.0, 4);
        for rule in [BandRule::PositionBased, BandRule::PaperFaithful] {
            let x = step_ladder(1.0, 0.0, 1.0, &l, rule, 0.7, 1.0, &mut coins().coins);
            assert_eq!(x, 1.7);
        }
    }

    #[test]
    fn beyond_outermost_forces_sign_toward_origin() {
        let l = ladder(20.0, 4);
        for rule in [BandRule::PositionBased, BandRule::PaperFaithful] {
            assert_eq!(step_ladder(25.0, 0.0, 1.0, &l, rule, 0.8, 1.0, &mut coins().coins), 25.0 - 0.8);
            assert_eq!(step_ladder(25.0, 0.0, 1.0, &l, rule, -0.8, 1.0, &mut coins().coins), 25.0 - 0.8);
            assert_eq!(step_ladder(-25.0, 0.0, 1.0, &l, rule, 0.8, 1.0, &mut coins().coins), -25.0 + 0.8);
        }
    }

    #[test]
    fn paper_faithful_damping_in_intermediate_band() {
        let l = ladder(20.0, 4);
        let d = 0.6;
        let x = step_ladder(7.0, 0.0, 1.0, &l, BandRule::PaperFaithful, d, 1.0, &mut coins().coins);
        assert!((x - (7.0 + d - d * d / 100.0)).abs() < 1e-15);
        let y = step_ladder(-7.0, 0.0, 1.0, &l, BandRule::PaperFaithful, -d, 1.0, &mut coins().coins);
        assert!((y - (-7.0 - d + d * d / 100.0)).abs() < 1e-15);
    }

    #[test]
    fn empty_ladder_is_the_unconstrained_walk() {
        let spec = LadderSpec {
            ladder: ladder(20.0, 0),
            rule: BandRule::PositionBased,
            mu: 0.1,
            sigma: 1.3,
            x0: 0.5,
            increment_mode: IncrementMode::GaussianUnit,
        };
        let a = simulate_ladder(&spec, 500, 500.0, &mut PathStreams::new(9, 3)).unwrap();
        let sde = SdeSpec::wiener(0.1, 1.3).with_x0(0.5).with_mode(IncrementMode::GaussianUnit);
        let b = simulate_path(&sde, 500, 500.0, &mut PathStreams::new(9, 3).increments).unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn reflective_pair_keeps_paths_inside() {
        let spec = LadderSpec {
            ladder: ladder(10.0, 1),
            rule: BandRule::PositionBased,
            mu: 0.0,
            sigma: 1.0,
            x0: 0.0,
            increment_mode: IncrementMode::GaussianUnit,
        };
        let p = simulate_ladder(&spec, 5000, 5000.0, &mut PathStreams::new(2, 0)).unwrap();
        assert!(p.values.iter().all(|x| x.abs() <= 10.0));
    }

    proptest! {
        #[test]
        fn containment(seed in 0u64..500, n in 1usize..6, x0 in -30.0f64..30.0) {
            let l = ladder(20.0, n);
            let mut s = PathStreams::new(seed, 0);
            let mut x = x0;
            for _ in 0..200 {
                let dw = IncrementMode::GaussianUnit.draw(&mut s.increments, 1.0) * 4.0;
                let next = step_ladder(x, 0.0, 1.0, &l, BandRule::PositionBased, dw, 1.0, &mut s.coins);
                if x.abs() <= 20.0 {
                    prop_assert!(next.abs() - 20.0 <= dw.abs() + 1e-12);
                }
                x = next;
            }
        }
    }
}
