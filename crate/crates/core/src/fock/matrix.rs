use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;
#[allow(unused_imports)] // float math comes from std when it is linked
use num_traits::Float;

use super::FockSpace;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix of an operator on a [`FockSpace`], row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    space: FockSpace,
    entries: Vec<Complex64>,
}

impl OperatorMatrix {
    pub fn zeros(space: FockSpace) -> Self {
        Self { space, entries: vec![ZERO; space.dim() * space.dim()] }
    }

    pub fn identity(space: FockSpace) -> Self {
        let mut m = Self::zeros(space);
        for i in 0..space.dim() {
            m.set(i, i, ONE);
        }
        m
    }

    /// Builds from row-major entries; the length must be `dim²`.
    pub fn from_entries(space: FockSpace, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != space.dim() * space.dim() {
            return Err(Error::SpaceMismatch);
        }
        Ok(Self { space, entries })
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        let d = self.dim();
        self.entries[row * d + col] = value;
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim();
        let mut out = Self::zeros(self.space);
        for r in 0..d {
            for c in 0..d {
                out.entries[c * d + r] = self.entries[r * d + c].conj();
            }
        }
        out
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self { space: self.space, entries: self.entries.iter().map(|z| z * factor).collect() }
    }

    pub fn scaled_real(&self, factor: f64) -> Self {
        self.scaled(Complex64::new(factor, 0.0))
    }

    /// `self += factor * other`.
    pub fn axpy(&mut self, factor: Complex64, other: &Self) {
        assert_eq!(self.space, other.space, "operators on different spaces");
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += factor * b;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.space, other.space, "operators on different spaces");
        let d = self.dim();
        let mut out = vec![ZERO; d * d];
        for r in 0..d {
            let row = &self.entries[r * d..(r + 1) * d];
            let out_row = &mut out[r * d..(r + 1) * d];
            for (k, a) in row.iter().enumerate() {
                if *a == ZERO {
                    continue;
                }
                let other_row = &other.entries[k * d..(k + 1) * d];
                for (o, b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        Self { space: self.space, entries: out }
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    pub fn apply(&self, state: &StateVector) -> StateVector {
        assert_eq!(self.space, state.space, "operator and state on different spaces");
        let d = self.dim();
        let amplitudes = (0..d)
            .map(|r| {
                self.entries[r * d..(r + 1) * d]
                    .iter()
                    .zip(&state.amplitudes)
                    .map(|(a, x)| a * x)
                    .sum()
            })
            .collect();
        StateVector { space: self.space, amplitudes }
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry modulus over rows and columns drawn from `indices`.
    pub fn restricted_max_norm(&self, indices: &[usize]) -> f64 {
        let mut m = 0.0f64;
        for &r in indices {
            for &c in indices {
                m = m.max(self.get(r, c).norm());
            }
        }
        m
    }

    /// Induced 1-norm (largest column sum).
    pub fn one_norm(&self) -> f64 {
        let d = self.dim();
        (0..d)
            .map(|c| (0..d).map(|r| self.get(r, c).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|r| (r..d).all(|c| (self.get(r, c) - self.get(c, r).conj()).norm() <= tol))
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        let mut out = self.clone();
        out.axpy(ONE, rhs);
        out
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        let mut out = self.clone();
        out.axpy(-ONE, rhs);
        out
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.matmul(rhs)
    }
}

/// Complex amplitude vector over the basis of a [`FockSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: FockSpace,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn zeros(space: FockSpace) -> Self {
        Self { space, amplitudes: vec![ZERO; space.dim()] }
    }

    /// The basis state at `index`.
    pub fn basis(space: FockSpace, index: usize) -> Self {
        let mut s = Self::zeros(space);
        s.amplitudes[index] = ONE;
        s
    }

    pub fn from_amplitudes(space: FockSpace, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::SpaceMismatch);
        }
        Ok(Self { space, amplitudes })
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        self.scaled(Complex64::new(1.0 / n, 0.0))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self { space: self.space, amplitudes: self.amplitudes.iter().map(|z| z * factor).collect() }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.space, other.space, "states on different spaces");
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// `⟨self|op|self⟩`.
    pub fn expectation(&self, op: &OperatorMatrix) -> Complex64 {
        self.inner(&op.apply(self))
    }

    /// Largest amplitude modulus of `self − other`.
    pub fn max_distance(&self, other: &Self) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for &StateVector {
    type Output = StateVector;
    fn add(self, rhs: &StateVector) -> StateVector {
        assert_eq!(self.space, rhs.space);
        StateVector {
            space: self.space,
            amplitudes: self.amplitudes.iter().zip(&rhs.amplitudes).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Compressed-row copy of an operator, used for repeated matrix-vector products.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseOperator {
    pub fn from_dense(op: &OperatorMatrix) -> Self {
        let d = op.dim();
        let mut row_start = Vec::with_capacity(d + 1);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        row_start.push(0);
        for r in 0..d {
            for c in 0..d {
                let v = op.get(r, c);
                if v != ZERO {
                    cols.push(c);
                    values.push(v);
                }
            }
            row_start.push(cols.len());
        }
        Self { dim: d, row_start, cols, values }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `out += factor * A x`.
    pub fn apply_add(&self, factor: Complex64, x: &[Complex64], out: &mut [Complex64]) {
        for (o, span) in out.iter_mut().zip(self.row_start.windows(2)) {
            let mut acc = ZERO;
            for k in span[0]..span[1] {
                acc += self.values[k] * x[self.cols[k]];
            }
            *o += factor * acc;
        }
    }

    /// Modulus of the entry-wise sum `Σ c_j A_j` row sums, i.e. the induced
    /// ∞-norm of a real combination of operators sharing one space.
    pub fn combination_inf_norm(ops: &[&SparseOperator], coeffs: &[f64]) -> f64 {
        let dim = ops[0].dim;
        let mut row = vec![ZERO; dim];
        let mut best = 0.0f64;
        for r in 0..dim {
            let mut touched = Vec::new();
            for (op, &c) in ops.iter().zip(coeffs) {
                for k in op.row_start[r]..op.row_start[r + 1] {
                    let col = op.cols[k];
                    if row[col] == ZERO {
                        touched.push(col);
                    }
                    row[col] += op.values[k] * c;
                }
            }
            let mut sum = 0.0;
            for &col in &touched {
                sum += row[col].norm();
                row[col] = ZERO;
            }
            best = best.max(sum);
        }
        best
    }
}
