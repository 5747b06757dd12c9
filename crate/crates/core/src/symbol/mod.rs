//! Fourier symbols of the linearized system and their decay analysis.

mod blocks;
mod bound;
mod expm;
mod lowfreq;
mod lyapunov;
mod modes;
mod quadrature;
mod scan;

pub use blocks::{
    block_defect, block_form, build_full_symbol, build_symbol, frame, hodge_basis, CMatrix8,
    FullSymbol8, SymbolMatrix2, SymbolMatrix4,
};
pub use bound::{bound_times, fit_bound, sample_norms, BoundFit};
pub use expm::{
    op_norm, rk4_flow, semigroup, semigroup_eigen, semigroup_pade, EXPM_TOL, MAX_EIGEN_COND,
};
pub use lowfreq::{
    angular_energy, driven_energy, driven_tau_decay, driven_tau_norms, duhamel_rows,
    duhamel_rows_quadrature, duhamel_rows_rk4, heat_decay_norms, lowfreq_decay_norm,
    lowfreq_decay_norms, DrivenProfile, DuhamelRows, Profile, QuadConfig,
};
pub use lyapunov::{
    certificate2, certificate4, lyapunov_rate, lyapunov_rate2, lyapunov_value, lyapunov_value2,
    two_block_admissible, two_block_coefficient, weight4, Certificate, Certificate2, Certificate4,
};
pub use modes::{
    a1, a1_denominator, a2, corrected_modes2, corrected_modes4, from_corrected2, from_corrected4,
    transform2, transform4, CorrectedModes2, CorrectedModes4, ModeState2, ModeState4,
};
pub use quadrature::{gauss_legendre, graded_breaks, CompositeRule};
pub use scan::{
    count_violations, random_states2, random_states4, scan_critical_radius, ScanConfig, ScanResult,
    ScanRow,
};
