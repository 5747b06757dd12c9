//! Periodic grids, transforms and spectral operators.

mod fft;
mod field;
mod grid;
mod hodge;
pub mod io;
mod split;

pub use fft::Fft3;
pub use field::{inverse_transform, transform, Field, SpectralField, Valence};
pub use grid::Grid;
pub use hodge::{hodge, hodge_parts, lambda_op, reconstruct, Hodge};
pub use split::{bernstein_check, smooth_step, FrequencySplit};
