use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{mode_count, mode_of_index};

/// Occupation numbers of the modes `−k_max, …, k_max`, stored by window index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupationVector {
    counts: Box<[u32]>,
}

impl OccupationVector {
    pub fn vacuum(k_max: usize) -> Self {
        Self { counts: vec![0; mode_count(k_max)].into() }
    }

    pub fn from_counts(counts: Vec<u32>) -> Self {
        Self { counts: counts.into() }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn modes(&self) -> usize {
        self.counts.len()
    }

    pub fn k_max(&self) -> usize {
        (self.counts.len() - 1) / 2
    }

    pub fn total(&self) -> usize {
        self.counts.iter().map(|&c| c as usize).sum()
    }

    pub fn momentum(&self) -> i64 {
        let k_max = self.k_max();
        self.counts.iter().enumerate().map(|(j, &c)| mode_of_index(j, k_max) * c as i64).sum()
    }
}

/// Ordered basis of the `n`-particle sector with an inverse lookup table.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    n: usize,
    k_max: usize,
    states: Vec<OccupationVector>,
    lookup: HashMap<Box<[u32]>, usize>,
}

/// `C(n + J − 1, J − 1)`, saturating at `usize::MAX`.
pub fn sector_dimension(k_max: usize, n: usize) -> usize {
    let j = mode_count(k_max);
    let mut acc: u128 = 1;
    for i in 1..j as u128 {
        acc = acc * (n as u128 + i) / i;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// Enumerates all occupations with `n` particles in lexicographic order of the
/// count vectors (highest count in the first mode first).
pub fn enumerate_sector(k_max: usize, n: usize, cap: usize) -> Result<SectorBasis> {
    let dim = sector_dimension(k_max, n);
    if dim > cap {
        return Err(Error::ResourceLimit { dim, cap });
    }
    let j = mode_count(k_max);
    let mut states = Vec::with_capacity(dim);
    let mut counts = vec![0u32; j];
    fill(&mut counts, 0, n as u32, &mut states);
    let lookup = states.iter().enumerate().map(|(i, s)| (s.counts.clone(), i)).collect();
    Ok(SectorBasis { n, k_max, states, lookup })
}

fn fill(counts: &mut [u32], pos: usize, left: u32, out: &mut Vec<OccupationVector>) {
    if pos + 1 == counts.len() {
        counts[pos] = left;
        out.push(OccupationVector { counts: counts.to_vec().into() });
        return;
    }
    for c in (0..=left).rev() {
        counts[pos] = c;
        fill(counts, pos + 1, left - c, out);
    }
    counts[pos] = 0;
}

impl SectorBasis {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn modes(&self) -> usize {
        mode_count(self.k_max)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[OccupationVector] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &OccupationVector {
        &self.states[i]
    }

    pub fn index_of(&self, counts: &[u32]) -> Option<usize> {
        self.lookup.get(counts).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn sizes_follow_stars_and_bars() {
        assert_eq!(enumerate_sector(0, 3, 10).unwrap().len(), 1);
        assert_eq!(enumerate_sector(1, 2, 10).unwrap().len(), 6);
        assert_eq!(enumerate_sector(1, 0, 10).unwrap().len(), 1);
        for k_max in 0..3 {
            for n in 0..9 {
                let j = 2 * k_max + 1;
                let b = enumerate_sector(k_max, n, 100_000).unwrap();
                assert_eq!(b.len(), binomial(n + j - 1, j - 1));
                assert_eq!(sector_dimension(k_max, n), b.len());
            }
        }
    }

    #[test]
    fn lookup_inverts_enumeration() {
        let b = enumerate_sector(2, 5, 10_000).unwrap();
        for (i, s) in b.states().iter().enumerate() {
            assert_eq!(b.index_of(s.counts()), Some(i));
            assert_eq!(s.total(), 5);
        }
        let mut sorted = b.states().to_vec();
        sorted.sort_by(|a, b| b.cmp(a));
        assert_eq!(sorted, b.states());
    }

    #[test]
    fn cap_is_enforced() {
        let e = enumerate_sector(3, 30, 5000).unwrap_err();
        assert!(matches!(e, Error::ResourceLimit { cap: 5000, .. }));
    }

    #[test]
    fn momentum_and_modes() {
        let v = OccupationVector::from_counts(vec![2, 0, 1]);
        assert_eq!(v.k_max(), 1);
        assert_eq!(v.momentum(), -1);
        assert_eq!(v.total(), 3);
    }
}
