use std::io::{self, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    bgc_correction, check_bgc_convex, check_diffusion_nonnegative, check_steps, validation_grid, Placement,
};
use crate::coeffs::CoefficientField;
use crate::error::{Error, Result};
use crate::export::write_csv;
use crate::rng::IncrementMode;

/// An `n`-dimensional diffusion driven by an `m`-dimensional Wiener
/// process, with an optional constraint field per coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdeSpecNd {
    pub drift: Vec<CoefficientField>,
    /// Row `i` holds the `m` coefficients multiplying `dW_1 .. dW_m` in
    /// coordinate `i`.
    pub diffusion: Vec<Vec<CoefficientField>>,
    pub bgc: Vec<Option<CoefficientField>>,
    #[serde(default)]
    pub placement: Placement,
    pub x0: Vec<f64>,
    #[serde(default)]
    pub increment_mode: IncrementMode,
}

impl SdeSpecNd {
    pub fn dimension(&self) -> usize {
        self.x0.len()
    }

    pub fn wiener_dimension(&self) -> usize {
        self.diffusion.first().map_or(0, Vec::len)
    }

    /// Independent coordinates: diagonal diffusion `sigma`, drift `mu`.
    pub fn diagonal(n: usize, mu: f64, sigma: f64) -> Self {
        SdeSpecNd {
            drift: vec![CoefficientField::constant(mu); n],
            diffusion: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| CoefficientField::constant(if i == j { sigma } else { 0.0 }))
                        .collect()
                })
                .collect(),
            bgc: vec![None; n],
            placement: Placement::default(),
            x0: vec![0.0; n],
            increment_mode: IncrementMode::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dimension();
        if n == 0 {
            return Err(Error::config("x0", "dimension must be at least 1"));
        }
        if self.drift.len() != n {
            return Err(Error::config("drift", format!("expected {n} entries, got {}", self.drift.len())));
        }
        if self.bgc.len() != n {
            return Err(Error::config("bgc", format!("expected {n} entries, got {}", self.bgc.len())));
        }
        if self.diffusion.len() != n {
            return Err(Error::config("diffusion", format!("expected {n} rows, got {}", self.diffusion.len())));
        }
        let m = self.wiener_dimension();
        if m == 0 {
            return Err(Error::config("diffusion", "Wiener dimension must be at least 1"));
        }
        for (i, row) in self.diffusion.iter().enumerate() {
            if row.len() != m {
                return Err(Error::config(
                    format!("diffusion[{i}]"),
                    format!("expected {m} columns, got {}", row.len()),
                ));
            }
        }
        for i in 0..n {
            if !self.x0[i].is_finite() {
                return Err(Error::config(format!("x0[{i}]"), "must be finite"));
            }
            let grid = validation_grid(self.x0[i]);
            self.drift[i].validate_at(&format!("drift[{i}]"))?;
            for (j, g) in self.diffusion[i].iter().enumerate() {
                g.validate_at(&format!("diffusion[{i}][{j}]"))?;
            }
            // a single-column row is a plain scalar diffusion coefficient
            if m == 1 {
                check_diffusion_nonnegative(&self.diffusion[i][0], &grid, &format!("diffusion[{i}][0]"))?;
            }
            if let Some(psi) = &self.bgc[i] {
                psi.validate_at(&format!("bgc[{i}]"))?;
                check_bgc_convex(psi, &grid, &format!("bgc[{i}]"))?;
            }
        }
        Ok(())
    }
}

/// A vector-valued path: `values[k]` is the state at `times[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecordNd {
    pub dt: f64,
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub increments: Vec<Vec<f64>>,
}

impl PathRecordNd {
    pub fn terminal(&self) -> &[f64] {
        self.values.last().expect("record starts with x0")
    }

    /// Coordinate `i` of every state.
    pub fn coordinate(&self, i: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[i]).collect()
    }

    /// CSV with header `t,x1,...,xn`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        let n = self.values[0].len();
        let names: Vec<String> = std::iter::once("t".to_string())
            .chain((1..=n).map(|i| format!("x{i}")))
            .collect();
        let header: Vec<&str> = names.iter().map(String::as_str).collect();
        write_csv(
            out,
            &header,
            self.times.iter().zip(&self.values).map(|(t, v)| {
                let mut row = Vec::with_capacity(n + 1);
                row.push(*t);
                row.extend_from_slice(v);
                row
            }),
        )
    }
}

/// Magnitude of the noise driving coordinate `i`, used by the
/// diffusion-term placement. A row with a single non-zero coefficient is
/// driven by that Wiener component alone; otherwise the row's combined
/// increment is normalised by the row norm.
fn coordinate_noise(row: &[CoefficientField], x: f64, t: f64, dws: &[f64]) -> f64 {
    let mut nonzero = None;
    let mut count = 0;
    let mut combined = 0.0;
    let mut norm2 = 0.0;
    for (j, g) in row.iter().enumerate() {
        let gij = g.value(x, t);
        if gij != 0.0 {
            count += 1;
            nonzero = Some(j);
        }
        combined += gij * dws[j];
        norm2 += gij * gij;
    }
    match (count, nonzero) {
        (0, _) => 0.0,
        (1, Some(j)) => dws[j],
        _ => combined / norm2.sqrt(),
    }
}

/// Simulates the vector diffusion. The `m` Wiener increments of a step are
/// drawn in order from `rng` and shared by all coordinates; each coordinate
/// then follows the scalar placement rule against its own constraint field.
pub fn simulate_multidim<R: Rng + ?Sized>(
    spec: &SdeSpecNd,
    n_steps: usize,
    horizon: f64,
    rng: &mut R,
) -> Result<PathRecordNd> {
    let dt = check_steps(n_steps, horizon)?;
    spec.validate()?;
    let n = spec.dimension();
    let m = spec.wiener_dimension();
    let mut values = Vec::with_capacity(n_steps + 1);
    let mut increments = Vec::with_capacity(n_steps);
    let mut x = spec.x0.clone();
    values.push(x.clone());
    let mut dws = vec![0.0; m];
    for k in 0..n_steps {
        let t = k as f64 * dt;
        for dw in dws.iter_mut() {
            *dw = spec.increment_mode.draw(rng, dt);
        }
        let mut next = Vec::with_capacity(n);
        for i in 0..n {
            let xi = x[i];
            let row = &spec.diffusion[i];
            let noise: f64 = if m == 1 {
                row[0].value(xi, t) * dws[0]
            } else {
                row.iter().zip(&dws).map(|(g, dw)| g.value(xi, t) * dw).sum()
            };
            let raw = spec.drift[i].value(xi, t) * dt + noise;
            let xn = match &spec.bgc[i] {
                None => xi + raw,
                Some(psi) => {
                    let dw_i = if m == 1 { dws[0] } else { coordinate_noise(row, xi, t, &dws) };
                    (xi + raw) - bgc_correction(psi, spec.placement, xi, t, raw, dw_i, dt)
                }
            };
            if !xn.is_finite() {
                return Err(Error::Numeric { path: 0, step: k + 1 });
            }
            next.push(xn);
        }
        increments.push(next.iter().zip(&x).map(|(b, a)| b - a).collect());
        values.push(next.clone());
        x = next;
    }
    Ok(PathRecordNd {
        dt,
        times: (0..=n_steps).map(|k| k as f64 * dt).collect(),
        values,
        increments,
    })
}
