use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum ensemble size accepted by [`estimate_hidden_barriers`].
pub const MIN_ESTIMATE_PATHS: usize = 100;

const STABILITY_BATCHES: usize = 10;

/// How the barrier pair is read off the per-path extremes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    /// Smallest minimum and largest maximum over all paths.
    EnsembleExtreme,
    /// `q`-quantile of the minima and `(1 - q)`-quantile of the maxima.
    Quantile(f64),
}

impl Default for EstimateMethod {
    fn default() -> Self {
        EstimateMethod::Quantile(0.001)
    }
}

/// Running extremes of one path over the full horizon and over its first half.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathExtremes {
    pub min: f64,
    pub max: f64,
    pub min_half: f64,
    pub max_half: f64,
}

impl PathExtremes {
    /// `values[0..=n/2]` is the first half of an `n`-step path.
    pub fn from_values(values: &[f64]) -> Self {
        let half = (values.len() - 1) / 2;
        let fold = |s: &[f64]| {
            s.iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)))
        };
        let (min_half, max_half) = fold(&values[..=half]);
        let (min, max) = fold(values);
        PathExtremes { min, max, min_half, max_half }
    }
}

/// Effective barriers `[lower, upper]` of an ensemble, with `κ` the larger
/// of their magnitudes.
///
/// `stability` is the spread of `κ` across ten contiguous batches of paths.
/// `diverged` is set when `κ` moves by more than twice the larger of that
/// spread and 1% of `κ`, either on halving the number of paths or on halving
/// the horizon: a genuinely constrained ensemble keeps its barriers fixed,
/// an unconstrained one keeps pushing them out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HiddenBarrierEstimate {
    pub lower: f64,
    pub upper: f64,
    pub kappa: f64,
    #[serde(skip, default)]
    pub method: EstimateMethod,
    pub stability: f64,
    pub diverged: bool,
}

fn quantile(values: &mut [f64], q: f64) -> f64 {
    values.sort_by(f64::total_cmp);
    let pos = q * (values.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < values.len() {
        values[i] + (values[i + 1] - values[i]) * frac
    } else {
        values[i]
    }
}

fn barrier_pair<I>(pairs: I, method: EstimateMethod) -> (f64, f64)
where
    I: Iterator<Item = (f64, f64)>,
{
    let (mut mins, mut maxs): (Vec<f64>, Vec<f64>) = pairs.unzip();
    let (lower, upper) = match method {
        EstimateMethod::EnsembleExtreme => (
            mins.iter().copied().fold(f64::INFINITY, f64::min),
            maxs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ),
        EstimateMethod::Quantile(q) => (quantile(&mut mins, q), quantile(&mut maxs, 1.0 - q)),
    };
    (lower.min(0.0), upper.max(0.0))
}

fn kappa(pair: (f64, f64)) -> f64 {
    pair.0.abs().max(pair.1)
}

pub fn estimate_hidden_barriers(extremes: &[PathExtremes], method: EstimateMethod) -> Result<HiddenBarrierEstimate> {
    if extremes.len() < MIN_ESTIMATE_PATHS {
        return Err(Error::argument(format!(
            "hidden-barrier estimation needs at least {MIN_ESTIMATE_PATHS} paths, got {}",
            extremes.len()
        )));
    }
    if let EstimateMethod::Quantile(q) = method {
        if !(q > 0.0 && q < 0.5) {
            return Err(Error::config("estimate.quantile", "must lie in (0, 0.5)"));
        }
    }
    if extremes.iter().any(|e| !(e.min.is_finite() && e.max.is_finite())) {
        return Err(Error::Domain("non-finite path extreme".into()));
    }
    let full = |e: &[PathExtremes]| barrier_pair(e.iter().map(|p| (p.min, p.max)), method);

    let (lower, upper) = full(extremes);
    let k = kappa((lower, upper));

    let n = extremes.len();
    let batch: Vec<f64> = (0..STABILITY_BATCHES)
        .map(|b| kappa(full(&extremes[b * n / STABILITY_BATCHES..(b + 1) * n / STABILITY_BATCHES])))
        .collect();
    let mean = batch.iter().sum::<f64>() / batch.len() as f64;
    let stability =
        (batch.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (batch.len() - 1) as f64).sqrt();

    let k_half_paths = kappa(full(&extremes[..n / 2]));
    let k_half_time = kappa(barrier_pair(extremes.iter().map(|p| (p.min_half, p.max_half)), method));
    let threshold = 2.0 * stability.max(0.01 * k);
    let diverged = (k - k_half_paths).abs() > threshold || (k - k_half_time).abs() > threshold;

    Ok(HiddenBarrierEstimate {
        lower,
        upper,
        kappa: k,
        method,
        stability,
        diverged,
    })
}

/// Mean over paths of `sup_t |x(t) - y(t)|`. Both ensembles must have the
/// same number of paths, and paired paths the same length.
pub fn sup_difference(xs: &[Vec<f64>], ys: &[Vec<f64>]) -> Result<f64> {
    if xs.is_empty() || xs.len() != ys.len() {
        return Err(Error::argument(format!(
            "ensembles must be non-empty and equal in size, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let mut total = 0.0;
    for (i, (x, y)) in xs.iter().zip(ys).enumerate() {
        if x.len() != y.len() {
            return Err(Error::argument(format!("path {i} has lengths {} and {}", x.len(), y.len())));
        }
        total += x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    }
    Ok(total / xs.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bounded(n: usize, seed: u64) -> Vec<PathExtremes> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let values: Vec<f64> = (0..201).map(|_| rng.random_range(-5.0..5.0)).collect();
                PathExtremes::from_values(&values)
            })
            .collect()
    }

    #[test]
    fn extremes_of_a_path() {
        let e = PathExtremes::from_values(&[0.0, 3.0, -1.0, -4.0, 2.0]);
        assert_eq!((e.min, e.max, e.min_half, e.max_half), (-4.0, 3.0, -1.0, 3.0));
    }

    #[test]
    fn clipped_ensemble_recovers_its_bounds() {
        let ext: Vec<PathExtremes> = (0..200)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                PathExtremes::from_values(&[0.0, 4.0 * s, 10.0 * s, -3.0 * s, -10.0 * s])
            })
            .collect();
        let est = estimate_hidden_barriers(&ext, EstimateMethod::EnsembleExtreme).unwrap();
        assert_eq!((est.lower, est.upper, est.kappa), (-10.0, 10.0, 10.0));
        assert!(!est.diverged);
    }

    #[test]
    fn bounded_noise_is_stable() {
        let est = estimate_hidden_barriers(&bounded(2000, 5), EstimateMethod::default()).unwrap();
        assert!(est.lower <= 0.0 && 0.0 <= est.upper);
        assert!(est.kappa > 4.9 && est.kappa < 5.0);
        assert!(!est.diverged);
        let v = serde_json::to_value(est).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys.len(), 5);
        for k in ["lower", "upper", "kappa", "stability", "diverged"] {
            assert!(keys.contains(&k));
        }
    }

    #[test]
    fn growing_extremes_are_flagged() {
        // a random walk: extremes keep growing with the horizon
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let ext: Vec<PathExtremes> = (0..500)
            .map(|_| {
                let mut x = 0.0;
                let values: Vec<f64> = std::iter::once(0.0)
                    .chain((0..400).map(|_| {
                        x += if rng.random::<bool>() { 1.0 } else { -1.0 };
                        x
                    }))
                    .collect();
                PathExtremes::from_values(&values)
            })
            .collect();
        assert!(estimate_hidden_barriers(&ext, EstimateMethod::default()).unwrap().diverged);
    }

    #[test]
    fn rejects_small_ensembles_and_bad_quantiles() {
        assert!(estimate_hidden_barriers(&bounded(99, 1), EstimateMethod::default()).is_err());
        assert!(estimate_hidden_barriers(&bounded(200, 1), EstimateMethod::Quantile(0.7)).is_err());
    }

    #[test]
    fn sup_difference_cases() {
        let a = vec![vec![0.0, 1.0, 2.0], vec![0.0, 0.0, 0.0]];
        let b = vec![vec![0.0, 3.0, 2.0], vec![0.0, -1.0, 0.0]];
        assert_eq!(sup_difference(&a, &b).unwrap(), 1.5);
        assert_eq!(sup_difference(&a, &a).unwrap(), 0.0);
        assert!(sup_difference(&a, &b[..1]).is_err());
        assert!(sup_difference(&a, &[vec![0.0], vec![0.0]]).is_err());
    }
}
