//! Fixtures for the kernel benchmarks.

use oldroyd_core::solver::{InitSpec, SimConfig};
use oldroyd_core::{Coeffs, FieldState, ModelParams};

pub fn coeffs() -> Coeffs {
    Coeffs::new(ModelParams::default()).expect("default parameters are valid")
}

/// Deterministic broadband real samples on an `n^3` grid.
pub fn samples(n: usize, phase: f64) -> Vec<f64> {
    (0..n * n * n)
        .map(|i| ((i as f64) * 0.618 + phase).sin() + 0.1 * ((i as f64) * 0.031).cos())
        .collect()
}

/// Simulation of `steps` steps of size 0.01 on an `n^3` grid of side `4 pi`.
pub fn sim_config(n: usize, steps: usize) -> SimConfig {
    SimConfig {
        n,
        length: 4.0 * std::f64::consts::PI,
        dt: 0.01,
        t_end: 0.01 * steps as f64,
        monitor_every: steps,
        init: InitSpec {
            h3: 1e-3,
            ..Default::default()
        },
        ..Default::default()
    }
}

pub fn initial_state(cfg: &SimConfig) -> FieldState {
    cfg.init
        .generate(cfg.grid().expect("valid grid"))
        .expect("valid initial data")
}
