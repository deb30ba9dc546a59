//! Parameters, the one-body spectrum, interaction kernels, mass cutoffs and the
//! quintic soliton.

mod cutoff;
mod kernel;
mod params;
mod soliton;
mod spectrum;

pub use cutoff::{CutoffProfile, SmoothCutoff, TabulatedCutoff};
pub use kernel::KernelSpec;
pub use params::ModelParams;
pub use soliton::{critical_mass, gns_constant, shoot_soliton, soliton, ShootingReport, SolitonProfile};
pub use spectrum::{eigenvalue, mode_count, mode_index, mode_of_index, trace_h_inverse};
