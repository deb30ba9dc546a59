//! Free and interacting grand-canonical Gibbs states with particle-number cutoffs,
//! their partition functions, reduced density matrices and relative entropies.

mod free;
mod gibbs;
mod inequalities;
mod observables;

pub use free::{
    free_ratios, free_reference_cutoff, free_tail_bound, log_free_partition, log_free_partition_exact,
    log_free_sector_traces, log_sum_exp,
};
pub use gibbs::{
    build_gibbs, cutoff_relative_partition, log_free_partition_product, relative_partition, sector_hamiltonian,
    GibbsSector, GibbsStateBlocks, SectorSpectrum,
};
pub use inequalities::{bernoulli_product_bound, golden_thompson, hermitian_exp, peierls_bogoliubov};
pub use observables::{
    interaction_expectation, one_body_partial_trace, reduced_density_matrix, relative_entropy, variational_functional,
};
