//! Physical constants, scaled constants and the stress reformulation.

mod params;
mod stress;

pub use params::{derive_scaled, g_fn, h_fn, Coeffs, ModelParams, ScaledParams};
pub(crate) use params::{g_unchecked, h_unchecked};
pub use stress::{
    reformulate_stress, sym_index, sym_multiplicity, unreformulate_stress, StressTensor, SYM_PAIRS,
};
