//! Matrix exponentials for spin rotations.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // float math comes from std when it is linked
use num_traits::Float;

use crate::fock::OperatorMatrix;

/// Series terms below this (relative) size are dropped.
const SERIES_TAIL: f64 = 1e-16;
/// Scaled operators are brought below this 1-norm before the series.
const SCALED_NORM: f64 = 0.5;
const MAX_TERMS: usize = 64;

/// `exp(A)` by scaling and squaring around a Taylor series.
///
/// `A` is scaled by `2^-s` until its 1-norm is at most ½; with that bound the
/// truncated Taylor tail is below 1e-14 once the last kept term is under 1e-16.
pub fn expm(a: &OperatorMatrix) -> OperatorMatrix {
    let norm = a.one_norm();
    let squarings = if norm > SCALED_NORM { (norm / SCALED_NORM).log2().ceil() as u32 } else { 0 };
    let scaled = a.scaled_real(1.0 / 2f64.powi(squarings as i32));
    let mut result = OperatorMatrix::identity(a.space());
    let mut term = OperatorMatrix::identity(a.space());
    for k in 1..=MAX_TERMS {
        term = term.matmul(&scaled).scaled_real(1.0 / k as f64);
        result.axpy(Complex64::new(1.0, 0.0), &term);
        if term.one_norm() < SERIES_TAIL {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    result
}

/// `exp(A) x` for an operator given through its action `apply(x, out)`, which
/// must add `A x` into `out`. `norm_bound` is any upper bound on `‖A‖`.
pub fn expm_apply<F>(apply: F, norm_bound: f64, x: &[Complex64]) -> Vec<Complex64>
where
    F: Fn(&[Complex64], &mut [Complex64]),
{
    let substeps = (norm_bound / SCALED_NORM).ceil().max(1.0) as usize;
    let inv = 1.0 / substeps as f64;
    let mut v = x.to_vec();
    let mut term = vec![Complex64::new(0.0, 0.0); x.len()];
    let mut next = vec![Complex64::new(0.0, 0.0); x.len()];
    for _ in 0..substeps {
        term.copy_from_slice(&v);
        let mut acc = v.clone();
        let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        for k in 1..=MAX_TERMS {
            next.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            apply(&term, &mut next);
            let factor = inv / k as f64;
            let mut size = 0.0f64;
            for (t, n) in term.iter_mut().zip(&next) {
                *t = n * factor;
                size = size.max(t.norm());
            }
            for (a, t) in acc.iter_mut().zip(&term) {
                *a += t;
            }
            if size < SERIES_TAIL * scale {
                break;
            }
        }
        v = acc;
    }
    v
}
