use std::hint::black_box;

use bgcsp_core::{
    build_ladder, merge_beta_product, run_ensemble, simulate_ladder, simulate_msbm, simulate_path, BandRule,
    BarrierSpec, CoefficientField, ExperimentConfig, IncrementMode, LadderSpec, MsbmSpec, PathStreams, Placement,
    Schedule, SdeSpec,
};
use criterion::{criterion_group, criterion_main, Criterion};

fn paths(c: &mut Criterion) {
    let mut g = c.benchmark_group("path_1000_steps");
    let wiener = SdeSpec::wiener(0.0, 1.0).with_mode(IncrementMode::GaussianUnit);
    g.bench_function("unconstrained", |b| {
        b.iter(|| simulate_path(&wiener, 1000, 1000.0, &mut PathStreams::new(1, 0).increments).unwrap())
    });
    for placement in [Placement::DriftTerm, Placement::DiffusionTerm, Placement::Differential] {
        let spec = wiener.clone().with_bgc(CoefficientField::quadratic(10.0), placement);
        g.bench_function(format!("bgc_{placement:?}"), |b| {
            b.iter(|| simulate_path(&spec, 1000, 1000.0, &mut PathStreams::new(1, 0).increments).unwrap())
        });
    }
    let msbm = MsbmSpec::new(
        0.0,
        1.0,
        (-5..=5).map(|i| BarrierSpec::new(i as f64, 0.1 * i as f64).unwrap()).collect(),
        0.0,
    )
    .unwrap()
    .with_mode(IncrementMode::GaussianUnit);
    g.bench_function("msbm_11_barriers", |b| {
        b.iter(|| simulate_msbm(&msbm, 1000, 1000.0, &mut PathStreams::new(1, 0)).unwrap())
    });
    let ladder = LadderSpec {
        ladder: build_ladder(&CoefficientField::quadratic(10.0), 20.0, 16, Schedule::PsiProportional).unwrap(),
        rule: BandRule::PositionBased,
        mu: 0.0,
        sigma: 1.0,
        x0: 0.0,
        increment_mode: IncrementMode::GaussianUnit,
    };
    g.bench_function("ladder_32_barriers", |b| {
        b.iter(|| simulate_ladder(&ladder, 1000, 1000.0, &mut PathStreams::new(1, 0)).unwrap())
    });
    g.finish();
}

fn merge(c: &mut Criterion) {
    let betas: Vec<f64> = (1..=16).map(|j| (j as f64 / 16.0).powi(2) * 0.99).collect();
    c.bench_function("merge_beta_product_16", |b| b.iter(|| merge_beta_product(black_box(&betas)).unwrap()));
}

fn ensemble(c: &mut Criterion) {
    let config = ExperimentConfig::from_json(
        r#"{"name": "bench", "process": {"type": "bgc", "psi": {"kind": "quadratic", "scale": 10.0}},
            "increment_mode": "gaussian_unit", "n_paths": 1000, "n_steps": 1000, "horizon": 1000.0,
            "master_seed": 1, "display_paths": 0}"#,
    )
    .unwrap();
    let mut g = c.benchmark_group("ensemble");
    g.sample_size(10);
    g.bench_function("bgc_1000x1000", |b| b.iter(|| run_ensemble(&config, None).unwrap()));
    g.finish();
}

criterion_group!(benches, paths, merge, ensemble);
criterion_main!(benches);
