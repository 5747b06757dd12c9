//! Numerical laboratory for the inviscid compressible Oldroyd-B system.
//!
//! The crate is organised in layers:
//!
//! * [`model`]: physical and scaled constants, pressure law, nonlinear
//!   coefficient functions and the `tau = T - k eta I` stress shift.
//! * [`spectral`]: periodic grids, FFTs, spectral derivatives, the smooth
//!   low/high frequency split, `Lambda^s`, Hodge projections and field I/O.
//! * [`symbol`]: Fourier symbols of the linearized operator, matrix
//!   exponentials, corrected modes, Lyapunov certificates and whole-space
//!   decay norms by radial quadrature.
//! * [`solver`]: integrating-factor pseudo-spectral integration of the
//!   reformulated system and of the original system used as an oracle.
//! * [`energy`]: Sobolev norms, the composite functionals and their audits.
//! * [`decay`]: decay-series fitting, the convolution lemma check and the
//!   experiment driver shared with the command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod decay;
pub mod energy;
pub mod error;
pub mod model;
pub mod solver;
pub mod spectral;
pub mod symbol;

pub use decay::{DecaySeries, ExperimentConfig};
pub use error::{Error, Result};
pub use model::{Coeffs, ModelParams, ScaledParams, StressTensor};
pub use solver::FieldState;
pub use spectral::{Field, FrequencySplit, Grid, SpectralField, Valence};
pub use symbol::{FullSymbol8, SymbolMatrix2, SymbolMatrix4};
