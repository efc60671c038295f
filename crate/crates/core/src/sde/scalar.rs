use rand::Rng;

use super::{check_steps, PathRecord, Placement, SdeSpec};
use crate::coeffs::{sign_of, CoefficientField};
use crate::error::{Error, Result};

#[inline]
pub(crate) fn unconstrained_increment(
    drift: &CoefficientField,
    diffusion: &CoefficientField,
    x: f64,
    t: f64,
    dw: f64,
    dt: f64,
) -> f64 {
    drift.value(x, t) * dt + diffusion.value(x, t) * dw
}

/// Signed amount the constraint subtracts from the candidate `x + raw`.
#[inline]
pub(crate) fn bgc_correction(
    psi: &CoefficientField,
    placement: Placement,
    x: f64,
    t: f64,
    raw: f64,
    dw: f64,
    dt: f64,
) -> f64 {
    let s = sign_of(x) as f64;
    if s == 0.0 {
        return 0.0;
    }
    let correction = match placement {
        Placement::DriftTerm => s * psi.value(x, t) * dt,
        Placement::DiffusionTerm => s * psi.value(x, t) * dw.abs(),
        Placement::Differential => {
            let candidate = x + raw;
            let d_psi = psi.value(candidate, t) - psi.value(x, t);
            s * d_psi * sign_of(raw) as f64 * s
        }
    };
    let cap = raw.abs().max(x.abs());
    correction.clamp(-cap, cap)
}

fn check_inputs(x: f64, t: f64, dw: f64, dt: f64) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::argument(format!("dt must be positive, got {dt}")));
    }
    if !(x.is_finite() && t.is_finite() && dw.is_finite()) {
        return Err(Error::Domain("step inputs must be finite".into()));
    }
    Ok(())
}

/// One Euler step `x + f dt + g dW`. Any constraint on `spec` is ignored.
pub fn step_ito(x: f64, t: f64, spec: &SdeSpec, dw: f64, dt: f64) -> Result<f64> {
    check_inputs(x, t, dw, dt)?;
    Ok(x + unconstrained_increment(&spec.drift, &spec.diffusion, x, t, dw, dt))
}

/// One constrained step according to `spec.placement`.
pub fn step_bgc(x: f64, t: f64, spec: &SdeSpec, dw: f64, dt: f64) -> Result<f64> {
    check_inputs(x, t, dw, dt)?;
    let psi = spec
        .bgc
        .as_ref()
        .ok_or_else(|| Error::config("bgc", "step_bgc needs a BGC field"))?;
    let raw = unconstrained_increment(&spec.drift, &spec.diffusion, x, t, dw, dt);
    Ok((x + raw) - bgc_correction(psi, spec.placement, x, t, raw, dw, dt))
}

#[inline]
pub(crate) fn advance(spec: &SdeSpec, x: f64, t: f64, dw: f64, dt: f64) -> f64 {
    let raw = unconstrained_increment(&spec.drift, &spec.diffusion, x, t, dw, dt);
    match &spec.bgc {
        None => x + raw,
        Some(psi) => (x + raw) - bgc_correction(psi, spec.placement, x, t, raw, dw, dt),
    }
}

/// Simulates `n_steps` steps of `spec` over `[0, horizon]`.
///
/// One increment is drawn from `rng` per step, so a given generator state
/// and spec always reproduce the same record bit for bit. A non-finite state
/// stops the simulation with [`Error::Numeric`] (path index 0; ensemble
/// callers substitute their own).
pub fn simulate_path<R: Rng + ?Sized>(spec: &SdeSpec, n_steps: usize, horizon: f64, rng: &mut R) -> Result<PathRecord> {
    let dt = check_steps(n_steps, horizon)?;
    spec.validate()?;
    simulate_validated(spec, n_steps, dt, rng)
}

pub(crate) fn simulate_validated<R: Rng + ?Sized>(spec: &SdeSpec, n_steps: usize, dt: f64, rng: &mut R) -> Result<PathRecord> {
    let mut record = PathRecord::start(spec.x0, dt, n_steps);
    let mut x = spec.x0;
    for k in 0..n_steps {
        let t = k as f64 * dt;
        let dw = spec.increment_mode.draw(rng, dt);
        x = advance(spec, x, t, dw, dt);
        if !x.is_finite() {
            return Err(Error::Numeric { path: 0, step: k + 1 });
        }
        record.push(x);
    }
    Ok(record)
}
