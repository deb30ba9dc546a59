//! Occupation-number bases of truncated bosonic Fock sectors, ladder operators and
//! the second-quantized kinetic and three-body operators.

mod assemble;
mod basis;
mod cache;
mod ladder;
mod state;

pub use assemble::{assemble_interaction, assemble_kinetic, momentum_diagonal, SectorOperator};
pub use basis::{enumerate_sector, sector_dimension, OccupationVector, SectorBasis};
pub use cache::{read_sector_matrix, write_sector_matrix};
pub use ladder::{ladder_matrix, ladder_matrix_element, Ladder};
pub use state::{one_body_matrix, BlockState, StateSector};

pub(crate) use state::{annihilated, created};
