//! Scalar coefficient fields for drift, diffusion and the grid-constraint
//! function, plus the affine interval remap used to move results between
//! barrier coordinate systems.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance below which a negative second difference still counts as convex.
pub const CONVEXITY_TOLERANCE: f64 = 1e-12;

/// Sign of a finite real: `1`, `0` or `-1`.
pub fn sgn(x: f64) -> Result<i8> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("sgn of non-finite value {x}")));
    }
    Ok(sign_of(x))
}

/// Infallible sign used on the hot simulation paths, where states are
/// checked for finiteness separately.
#[inline]
pub(crate) fn sign_of(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// A real-valued coefficient `f(x, t)`.
///
/// Every built-in kind is time-independent. Time variation is expressed with
/// [`CoefficientField::Separable`], a product of a spatial field and a
/// tabulated function of time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientField {
    Constant {
        value: f64,
    },
    /// `slope * x + intercept`
    Linear {
        slope: f64,
        intercept: f64,
    },
    /// `(x / scale)^2`
    Quadratic {
        scale: f64,
    },
    /// `limit * (1 - exp(-rate * |x|))`, tending to `limit` as `|x|` grows.
    AsymptoticConstant {
        limit: f64,
        rate: f64,
    },
    /// Piecewise-linear through `(x, value)` knots, clamped outside them.
    Tabulated {
        points: Vec<(f64, f64)>,
    },
    /// `space(x) * time(t)` with `time` tabulated over t.
    Separable {
        space: Box<CoefficientField>,
        time: Box<CoefficientField>,
    },
}

impl CoefficientField {
    pub fn constant(value: f64) -> Self {
        CoefficientField::Constant { value }
    }

    pub fn linear(slope: f64, intercept: f64) -> Self {
        CoefficientField::Linear { slope, intercept }
    }

    pub fn quadratic(scale: f64) -> Self {
        CoefficientField::Quadratic { scale }
    }

    pub fn tabulated(points: Vec<(f64, f64)>) -> Self {
        CoefficientField::Tabulated { points }
    }

    /// Checks the structural invariants of the field. `path` prefixes the
    /// field names in the returned configuration error.
    pub fn validate_at(&self, path: &str) -> Result<()> {
        let finite = |name: &str, v: f64| -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(format!("{path}.{name}"), "must be finite"))
            }
        };
        match self {
            CoefficientField::Constant { value } => finite("value", *value),
            CoefficientField::Linear { slope, intercept } => {
                finite("slope", *slope)?;
                finite("intercept", *intercept)
            }
            CoefficientField::Quadratic { scale } => {
                finite("scale", *scale)?;
                if *scale == 0.0 {
                    return Err(Error::config(format!("{path}.scale"), "must be non-zero"));
                }
                Ok(())
            }
            CoefficientField::AsymptoticConstant { limit, rate } => {
                finite("limit", *limit)?;
                finite("rate", *rate)?;
                if *rate <= 0.0 {
                    return Err(Error::config(format!("{path}.rate"), "must be positive"));
                }
                Ok(())
            }
            CoefficientField::Tabulated { points } => {
                if points.is_empty() {
                    return Err(Error::config(format!("{path}.points"), "needs at least one knot"));
                }
                for (i, (x, v)) in points.iter().enumerate() {
                    if !x.is_finite() || !v.is_finite() {
                        return Err(Error::config(format!("{path}.points[{i}]"), "must be finite"));
                    }
                }
                if points.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::config(
                        format!("{path}.points"),
                        "knots must be strictly increasing in x",
                    ));
                }
                Ok(())
            }
            CoefficientField::Separable { space, time } => {
                if matches!(**space, CoefficientField::Separable { .. }) {
                    return Err(Error::config(format!("{path}.space"), "cannot itself be separable"));
                }
                if !matches!(**time, CoefficientField::Tabulated { .. }) {
                    return Err(Error::config(format!("{path}.time"), "must be a tabulated field of t"));
                }
                space.validate_at(&format!("{path}.space"))?;
                time.validate_at(&format!("{path}.time"))
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_at("field")
    }

    /// Evaluates without checking `x`; callers on the simulation path have
    /// already rejected non-finite states.
    #[inline]
    pub fn value(&self, x: f64, t: f64) -> f64 {
        match self {
            CoefficientField::Constant { value } => *value,
            CoefficientField::Linear { slope, intercept } => slope * x + intercept,
            CoefficientField::Quadratic { scale } => {
                let r = x / scale;
                r * r
            }
            CoefficientField::AsymptoticConstant { limit, rate } => {
                limit * (1.0 - (-rate * x.abs()).exp())
            }
            CoefficientField::Tabulated { points } => interpolate(points, x),
            CoefficientField::Separable { space, time } => space.value(x, t) * time.value(t, 0.0),
        }
    }

    /// True when the field is `Constant { value: 0.0 }`.
    pub fn is_zero(&self) -> bool {
        matches!(self, CoefficientField::Constant { value } if *value == 0.0)
    }
}

fn interpolate(points: &[(f64, f64)], x: f64) -> f64 {
    let first = points[0];
    let last = points[points.len() - 1];
    if x <= first.0 {
        return first.1;
    }
    if x >= last.0 {
        return last.1;
    }
    // first knot with knot.x > x; guaranteed in 1..len by the clamps above
    let hi = points.partition_point(|p| p.0 <= x);
    let (x0, y0) = points[hi - 1];
    let (x1, y1) = points[hi];
    let w = (x - x0) / (x1 - x0);
    y0 + w * (y1 - y0)
}

/// Evaluates `field` at `(x, t)`.
pub fn eval_field(field: &CoefficientField, x: f64, t: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("field evaluated at non-finite x = {x}")));
    }
    if !t.is_finite() {
        return Err(Error::Domain(format!("field evaluated at non-finite t = {t}")));
    }
    Ok(field.value(x, t))
}

/// Weak convexity check on a strictly increasing grid: every interior
/// second divided difference must be `>= -CONVEXITY_TOLERANCE`.
///
/// Separable fields are checked through their spatial factor, and the time
/// factor must be non-negative at every knot.
pub fn check_convexity(field: &CoefficientField, grid: &[f64]) -> Result<bool> {
    if grid.len() < 3 {
        return Err(Error::argument(format!(
            "convexity check needs at least 3 grid points, got {}",
            grid.len()
        )));
    }
    if grid.iter().any(|g| !g.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::argument("convexity grid must be finite and strictly increasing"));
    }
    if let CoefficientField::Separable { space, time } = field {
        if let CoefficientField::Tabulated { points } = &**time {
            if points.iter().any(|(_, v)| *v < 0.0) {
                return Ok(false);
            }
        }
        return check_convexity(space, grid);
    }
    let convex = grid.windows(3).all(|w| {
        let (x0, x1, x2) = (w[0], w[1], w[2]);
        let (f0, f1, f2) = (field.value(x0, 0.0), field.value(x1, 0.0), field.value(x2, 0.0));
        let left = (f1 - f0) / (x1 - x0);
        let right = (f2 - f1) / (x2 - x1);
        2.0 * (right - left) / (x2 - x0) >= -CONVEXITY_TOLERANCE
    });
    Ok(convex)
}

/// `n` equally spaced points covering `[low, high]`.
pub fn uniform_grid(low: f64, high: f64, n: usize) -> Vec<f64> {
    let step = (high - low) / (n as f64 - 1.0);
    (0..n).map(|i| if i + 1 == n { high } else { low + step * i as f64 }).collect()
}

/// Parses CLI shorthand such as `quadratic:10`, `constant:1`,
/// `linear:1,0` or `asymptotic:1,0.5`.
impl FromStr for CoefficientField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<f64> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|a| {
                    a.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::argument(format!("bad number `{a}` in field `{s}`")))
                })
                .collect::<Result<_>>()?
        };
        let field = match (kind.trim(), nums.as_slice()) {
            ("constant", [v]) => CoefficientField::constant(*v),
            ("linear", [a, b]) => CoefficientField::linear(*a, *b),
            ("quadratic", [scale]) => CoefficientField::quadratic(*scale),
            ("asymptotic" | "asymptotic_constant", [limit, rate]) => {
                CoefficientField::AsymptoticConstant { limit: *limit, rate: *rate }
            }
            _ => return Err(Error::argument(format!("unrecognised field shorthand `{s}`"))),
        };
        field.validate()?;
        Ok(field)
    }
}

/// Affine map of `[source_low, source_high]` onto `[target_low, target_high]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalMap {
    source_low: f64,
    source_high: f64,
    target_low: f64,
    target_high: f64,
}

impl IntervalMap {
    pub fn new(source_low: f64, source_high: f64, target_low: f64, target_high: f64) -> Result<Self> {
        let all_finite = [source_low, source_high, target_low, target_high]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::argument("interval endpoints must be finite"));
        }
        if source_high <= source_low {
            return Err(Error::argument(format!(
                "degenerate source interval [{source_low}, {source_high}]"
            )));
        }
        if target_high <= target_low {
            return Err(Error::argument(format!(
                "degenerate target interval [{target_low}, {target_high}]"
            )));
        }
        Ok(IntervalMap {
            source_low,
            source_high,
            target_low,
            target_high,
        })
    }

    pub fn slope(&self) -> f64 {
        (self.target_high - self.target_low) / (self.source_high - self.source_low)
    }

    pub fn offset(&self) -> f64 {
        self.target_low - self.slope() * self.source_low
    }

    pub fn apply(&self, x: f64) -> f64 {
        let w = (x - self.source_low) / (self.source_high - self.source_low);
        let span = self.target_high - self.target_low;
        // interpolate from the nearer endpoint so both endpoints map exactly
        if w < 0.5 {
            self.target_low + w * span
        } else {
            self.target_high - (1.0 - w) * span
        }
    }

    pub fn inverse(&self) -> IntervalMap {
        IntervalMap {
            source_low: self.target_low,
            source_high: self.target_high,
            target_low: self.source_low,
            target_high: self.source_high,
        }
    }
}

pub fn remap_interval(map: &IntervalMap, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("cannot remap non-finite value {x}")));
    }
    Ok(map.apply(x))
}
