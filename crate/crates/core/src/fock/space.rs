use alloc::vec::Vec;

use crate::{Error, Result};

/// Truncated multimode bosonic Fock space.
///
/// Basis states are occupation tuples `(n_1, …, n_m)` with every `n_i ≤ n_max`,
/// enumerated lexicographically (first mode most significant).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockSpace {
    num_modes: usize,
    n_max: usize,
    dim: usize,
}

impl FockSpace {
    pub fn new(num_modes: usize, n_max: usize) -> Result<Self> {
        if !(2..=3).contains(&num_modes) {
            return Err(Error::InvalidModeCount(num_modes));
        }
        if n_max < 1 {
            return Err(Error::CutoffTooSmall(n_max));
        }
        Ok(Self { num_modes, n_max, dim: (n_max + 1).pow(num_modes as u32) })
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn stride(&self, mode: usize) -> usize {
        (self.n_max + 1).pow((self.num_modes - 1 - mode) as u32)
    }

    /// Occupation of `mode` in basis state `index`.
    pub fn occupation(&self, index: usize, mode: usize) -> usize {
        (index / self.stride(mode)) % (self.n_max + 1)
    }

    /// Occupation tuple of basis state `index`.
    pub fn occupations(&self, index: usize) -> Vec<usize> {
        (0..self.num_modes).map(|m| self.occupation(index, m)).collect()
    }

    /// Basis index of an occupation tuple, if it lies inside the cutoff.
    pub fn index_of(&self, occupations: &[usize]) -> Option<usize> {
        if occupations.len() != self.num_modes || occupations.iter().any(|&n| n > self.n_max) {
            return None;
        }
        Some(occupations.iter().enumerate().map(|(m, &n)| n * self.stride(m)).sum())
    }

    /// Index of the state with `mode` occupation changed by `delta`, if still in range.
    pub(crate) fn shifted(&self, index: usize, mode: usize, delta: isize) -> Option<usize> {
        let n = self.occupation(index, mode) as isize + delta;
        if n < 0 || n > self.n_max as isize {
            return None;
        }
        let stride = self.stride(mode) as isize;
        Some((index as isize + delta * stride) as usize)
    }

    pub fn photon_number(&self, index: usize) -> usize {
        (0..self.num_modes).map(|m| self.occupation(index, m)).sum()
    }

    /// Basis states with every occupation at most `n_max − 1`.
    pub fn bounded_indices(&self) -> Vec<usize> {
        (0..self.dim)
            .filter(|&i| (0..self.num_modes).all(|m| self.occupation(i, m) < self.n_max))
            .collect()
    }

    /// Basis states with total photon number at most `n_max`. Number-conserving
    /// operators act on these sectors without touching the cutoff.
    pub fn faithful_indices(&self) -> Vec<usize> {
        (0..self.dim).filter(|&i| self.photon_number(i) <= self.n_max).collect()
    }

    /// Basis states with exactly `n` photons.
    pub fn sector_indices(&self, n: usize) -> Vec<usize> {
        (0..self.dim).filter(|&i| self.photon_number(i) == n).collect()
    }
}
