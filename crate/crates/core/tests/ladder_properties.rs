use bgcsp_core::ladder::EstimateMethod;
use bgcsp_core::{
    build_ladder, run_ensemble, sup_difference, CoefficientField, EnsembleResult, ExperimentConfig, Schedule,
};
use serde_json::json;

fn run(process: serde_json::Value, mode: &str, n_paths: usize, seed: u64, extra: serde_json::Value) -> EnsembleResult {
    let mut text = json!({
        "name": "ladder",
        "process": process,
        "increment_mode": mode,
        "n_paths": n_paths,
        "n_steps": 1000,
        "horizon": 1000.0,
        "master_seed": seed,
    });
    if let serde_json::Value::Object(extra) = extra {
        text.as_object_mut().unwrap().extend(extra);
    }
    run_ensemble(&ExperimentConfig::from_json(&text.to_string()).unwrap(), None).unwrap()
}

fn ladder(n: usize, width: f64) -> serde_json::Value {
    json!({"type": "ladder", "half_count": n, "half_width": width, "psi": {"kind": "quadratic", "scale": 10.0}})
}

fn bgc() -> serde_json::Value {
    json!({"type": "bgc", "placement": "diffusion_term", "psi": {"kind": "quadratic", "scale": 10.0}})
}

#[test]
fn ladders_converge_to_the_finest_one() {
    let keep = json!({"display_paths": 1000});
    let reference = run(ladder(16, 20.0), "gaussian_unit", 1000, 99, keep.clone());
    let diffs: Vec<f64> = [1, 2, 4, 8]
        .iter()
        .map(|n| {
            let r = run(ladder(*n, 20.0), "gaussian_unit", 1000, 99, keep.clone());
            sup_difference(&r.display_paths, &reference.display_paths).unwrap()
        })
        .collect();
    assert!(diffs.windows(2).all(|w| w[1] < w[0]), "{diffs:?}");
}

#[test]
fn finer_ladders_corrugate_the_density() {
    let psi = CoefficientField::quadratic(10.0);
    for n in [4, 8, 16] {
        let l = build_ladder(&psi, 20.0, n, Schedule::PsiProportional).unwrap();
        let r = run(ladder(n, 20.0), "gaussian_unit", 10_000, 7, json!({}));
        let mut bands = vec![0usize; l.intervals().len()];
        for x in &r.terminal {
            bands[l.interval_of(*x)] += 1;
        }
        let occupied: Vec<usize> = (0..bands.len()).filter(|i| bands[*i] > 0).collect();
        let outer = bands[occupied[0]] + bands[*occupied.last().unwrap()];
        let inner = bands[n] + bands[n + 1];
        assert!(outer > inner, "n={n}: bands {bands:?}");
    }
}

#[test]
fn binomial_increments_leave_gaps() {
    let r = run(bgc(), "binomial", 1000, 12, json!({}));
    assert!(r.histogram.has_interior_gap(), "{:?}", r.histogram.counts);
}

#[test]
fn ladder_and_direct_constraint_agree() {
    let direct = run(bgc(), "gaussian_unit", 10_000, 21, json!({})).estimate.unwrap();
    let ladder = run(ladder(16, 10.0), "gaussian_unit", 10_000, 21, json!({})).estimate.unwrap();
    let rel = (ladder.kappa - direct.kappa).abs() / direct.kappa;
    assert!(rel < 0.1, "ladder {} vs direct {}", ladder.kappa, direct.kappa);
}

/// Quantile(0.001) hidden barrier of the Ψ = (x/10)² diffusion-term
/// process, 10,000 paths × 1,000 unit steps, master seed 1.
const GOLDEN_KAPPA: f64 = 9.837665320312501;

#[test]
fn hidden_barrier_of_the_quadratic_constraint() {
    let r = run(bgc(), "gaussian_unit", 10_000, 1, json!({}));
    let e = r.estimate.unwrap();
    assert!(!e.diverged);
    assert!(e.lower <= 0.0 && 0.0 <= e.upper);
    assert!((e.lower + e.upper).abs() < e.stability, "{e:?}");
    assert!((e.kappa - GOLDEN_KAPPA).abs() < 1e-9, "kappa {}", e.kappa);

    let batch = |b: usize| {
        let ext = &r.extremes[b * 1000..(b + 1) * 1000];
        bgcsp_core::estimate_hidden_barriers(ext, EstimateMethod::default()).unwrap().kappa
    };
    for b in 0..10 {
        assert!((batch(b) - e.kappa).abs() / e.kappa < 0.1);
    }

    let big = run(bgc(), "gaussian_unit", 40_000, 1001, json!({})).estimate.unwrap();
    assert!((big.kappa - e.kappa).abs() / e.kappa < 0.02, "{} vs {}", big.kappa, e.kappa);
}

#[test]
fn unconstrained_ensemble_diverges() {
    let r = run(json!({"type": "unconstrained"}), "gaussian_unit", 10_000, 3, json!({}));
    assert!(r.estimate.unwrap().diverged);
}

#[test]
fn clipped_ensemble_has_exact_barriers() {
    let r = run(
        json!({"type": "reflected", "lower": -10.0, "upper": 10.0}),
        "gaussian_unit",
        1000,
        4,
        json!({"estimate": "ensemble_extreme"}),
    );
    let e = r.estimate.unwrap();
    assert_eq!((e.lower, e.upper, e.kappa), (-10.0, 10.0, 10.0));
}
