use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::{OccupationVector, SectorBasis};
use crate::model::mode_index;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Create,
    Annihilate,
}

/// Applies `a†_k` or `a_k` to a basis state, returning the image state and amplitude.
/// Annihilating an empty mode returns the input state with amplitude 0.
pub fn ladder_matrix_element(state: &OccupationVector, k: i64, kind: Ladder) -> (OccupationVector, f64) {
    let j = mode_index(k, state.k_max());
    let mut counts = state.counts().to_vec();
    let amp = apply(&mut counts, j, kind);
    if amp == 0.0 {
        return (state.clone(), 0.0);
    }
    (OccupationVector::from_counts(counts), amp)
}

/// In-place ladder action on a count vector indexed by window position.
#[inline]
pub(crate) fn apply(counts: &mut [u32], j: usize, kind: Ladder) -> f64 {
    match kind {
        Ladder::Create => {
            counts[j] += 1;
            (counts[j] as f64).sqrt()
        }
        Ladder::Annihilate => {
            if counts[j] == 0 {
                return 0.0;
            }
            let amp = (counts[j] as f64).sqrt();
            counts[j] -= 1;
            amp
        }
    }
}

/// Matrix of `a†_j` or `a_j` (window index `j`) between two adjacent sectors.
pub fn ladder_matrix(from: &SectorBasis, to: &SectorBasis, j: usize, kind: Ladder) -> Result<DMatrix<f64>> {
    let expected = match kind {
        Ladder::Create => from.n() + 1,
        Ladder::Annihilate => from.n().wrapping_sub(1),
    };
    if to.n() != expected || to.k_max() != from.k_max() {
        return Err(Error::InvalidConfig(format!("ladder from sector {} cannot land in sector {}", from.n(), to.n())));
    }
    let mut m = DMatrix::zeros(to.len(), from.len());
    let mut counts = vec![0u32; from.modes()];
    for (col, s) in from.states().iter().enumerate() {
        counts.copy_from_slice(s.counts());
        let amp = apply(&mut counts, j, kind);
        if amp != 0.0 {
            let row = to.index_of(&counts).expect("ladder image lies in the target sector");
            m[(row, col)] = amp;
        }
    }
    Ok(m)
}
