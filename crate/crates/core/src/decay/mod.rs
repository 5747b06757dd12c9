//! Decay-series fitting, the convolution lemma check and the experiment driver.

mod convolution;
mod experiment;
mod fit;
mod lemmas;

pub use convolution::{convolution_decay_check, convolution_integral};
pub use experiment::{
    audit, driven_target, lowfreq_target, push_audit_checks, run_experiment, AuditConfig, Check,
    ExperimentConfig, ExperimentKind, ExperimentReport, SURROGATE_TARGET,
};
pub use fit::{fit_slope, log_times, DecaySeries, SlopeFit, MIN_SAMPLES};
pub use lemmas::{
    bernstein_sweep, convolution_bound, convolution_sweep, lemma_checks, random_field,
    BernsteinRow, ConvolutionRow, BERNSTEIN_TOL,
};
