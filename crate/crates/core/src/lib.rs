//! Simulation of bi-directional grid constrained (BGC) stochastic
//! processes, multi-skew Brownian motion and the barrier ladders that
//! connect the two.
//!
//! The crate is organised bottom-up:
//!
//! * [`coeffs`]: coefficient fields (drift, diffusion, constraint `Ψ`) and
//!   the sign and interval-remapping helpers.
//! * [`sde`]: Euler-Maruyama stepping, with or without the BGC correction,
//!   in one or several dimensions.
//! * [`skew`]: multi-skew Brownian motion, two-sided reflection and the
//!   algebra for merging barrier skewness.
//! * [`ladder`]: finite barrier ladders, hidden-barrier estimation and
//!   path comparison.
//! * [`config`], [`ensemble`], [`histogram`], [`svg`]: experiment plumbing
//!   shared by the command line tool.

pub mod coeffs;
pub mod config;
pub mod ensemble;
pub mod error;
pub mod export;
pub mod histogram;
pub mod ladder;
pub mod rng;
pub mod sde;
pub mod skew;
pub mod svg;

pub use coeffs::{remap_interval, sgn, CoefficientField, IntervalMap};
pub use config::{ExperimentConfig, OutputKind, Process, ProcessConfig};
pub use ensemble::{run_ensemble, write_outputs, EnsembleResult};
pub use error::{Error, Result};
pub use histogram::{uniform_edges, Histogram};
pub use ladder::{
    build_ladder, estimate_hidden_barriers, simulate_ladder, step_ladder, sup_difference, BandRule,
    BarrierLadder, EstimateMethod, HiddenBarrierEstimate, LadderSpec, PathExtremes, Schedule,
};
pub use rng::{IncrementMode, PathStreams};
pub use sde::{
    simulate_multidim, simulate_path, step_bgc, step_ito, PathRecord, PathRecordNd, Placement, SdeSpec,
    SdeSpecNd,
};
pub use skew::{
    bgcsp_merged_beta, merge_beta_pair, merge_beta_product, merge_beta_symmetric, simulate_msbm,
    simulate_reflected, step_msbm, BarrierSpec, LocalTimeLedger, MsbmPath, MsbmSpec, ReflectedPath,
    ReflectedSpec, RegulatorPair, RegulatorSeries,
};
