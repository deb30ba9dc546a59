//! Coherent states and lower symbols linking block states to classical measures: the
//! Poisson expansion, radial anti-Wick scalars and tails, de Finetti and Berezin–Lieb.

mod antiwick;
mod berezin;
mod coherent;
mod definetti;
mod poisson;

pub use antiwick::{antiwick_radial_scalar, antiwick_sector_mc, block_masses, tail_moment, tail_moment_masses};
pub use berezin::{berezin_lieb_check, husimi_l1_distance, BerezinLiebReport, HusimiSampler};
pub use coherent::{
    coherent_vector, husimi_density, poisson_pmf, poisson_tail, poisson_truncation, CoherentVector, HusimiEvaluator,
    COHERENT_TAIL_TOL,
};
pub use definetti::definetti_gap;
pub use poisson::poisson_decomposition_check;
