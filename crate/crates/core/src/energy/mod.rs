//! Sobolev norms, the composite energy functionals and their audits.

mod audit;
mod functionals;
mod weights;

pub use audit::{
    audit_states, dissipation_audit, gronwall_constant, gronwall_form, gronwall_level,
    time_derivative, EnergyReport, EnergyRow, GronwallFit, FLAG_INCREASE, FLAG_OUT_OF_REGIME,
    FLAG_RESIDUAL1, FLAG_RESIDUAL2, FLAG_RESIDUAL3,
};
pub use functionals::{h_norm, sobolev_norm, Energy, EnergySample};
pub use weights::FunctionalWeights;
