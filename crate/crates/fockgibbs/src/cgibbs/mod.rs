//! Classical field measures on the Fourier window: free-field sampling, interaction
//! energies, importance-sampling estimators, the mass law and the line GNS ratio.

mod energy;
mod estimators;
mod gns;
mod masslaw;
mod sampling;

pub use energy::{default_grid_size, hartree_energy, local_energy, HartreeEnergy, LocalEnergy};
pub use estimators::{
    capped_partition, classical_moment_matrix, classical_partition, classical_relative_partition, mass_histogram,
    subcritical_moment, Interaction, MomentMatrixEstimate,
};
pub use gns::{gns_check, random_compact_profile};
pub use masslaw::{mass_density_charfn, MassLaw};
pub use sampling::{
    free_scales, sample_free_field, sample_with_scales, sharded_accumulate, sharded_fold, sharded_moments, FieldSample,
    MCEstimate, Merge, Moments, RatioMoments, SHARD_SIZE,
};
