//! Finite differences and quadrature on (possibly non-uniform) sample grids.
//!
//! Derivatives use five-point stencils with Fornberg weights, which gives
//! fourth-order accuracy on smooth data in the interior and at the ends.
//! Integrals use composite Simpson over sample pairs; a trailing odd interval
//! is closed with the parabola through the last three samples.

use alloc::vec;
use alloc::vec::Vec;

use crate::vec3::Vec3;

const STENCIL: usize = 5;

/// Weights `w` such that `f'(x0) ≈ Σ w_j f(xs_j)` (Fornberg 1988, first derivative).
pub fn derivative_weights(x0: f64, xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    // c[k][j]: weights of the k-th derivative, k = 0, 1.
    let mut c = vec![[0.0f64; 2]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|w| w[1]).collect()
}

fn stencil_window(i: usize, n: usize) -> core::ops::Range<usize> {
    let width = STENCIL.min(n);
    let start = i.saturating_sub(width / 2).min(n - width);
    start..start + width
}

/// Derivative of sampled scalar data. Requires at least two samples.
pub fn differentiate(times: &[f64], values: &[f64]) -> Vec<f64> {
    assert_eq!(times.len(), values.len());
    let n = times.len();
    assert!(n >= 2, "need at least two samples to differentiate");
    (0..n)
        .map(|i| {
            let win = stencil_window(i, n);
            let w = derivative_weights(times[i], &times[win.clone()]);
            w.iter().zip(&values[win]).map(|(w, f)| w * f).sum()
        })
        .collect()
}

/// Component-wise derivative of sampled 3-vectors.
pub fn differentiate_vec3(times: &[f64], values: &[Vec3]) -> Vec<Vec3> {
    let n = times.len();
    assert_eq!(n, values.len());
    assert!(n >= 2, "need at least two samples to differentiate");
    (0..n)
        .map(|i| {
            let win = stencil_window(i, n);
            let w = derivative_weights(times[i], &times[win.clone()]);
            let mut d = [0.0; 3];
            for (w, v) in w.iter().zip(&values[win]) {
                for a in 0..3 {
                    d[a] += w * v[a];
                }
            }
            d
        })
        .collect()
}

/// ∫ over `[a, b]` of the parabola interpolating `(x_j, f_j)`.
fn parabola_integral(x: [f64; 3], f: [f64; 3], a: f64, b: f64) -> f64 {
    let mut total = 0.0;
    for j in 0..3 {
        let (p, q) = match j {
            0 => (x[1], x[2]),
            1 => (x[0], x[2]),
            _ => (x[0], x[1]),
        };
        // (t - p)(t - q) = t² - (p + q) t + p q
        let antider = |t: f64| t * t * t / 3.0 - (p + q) * t * t / 2.0 + p * q * t;
        let denom = (x[j] - p) * (x[j] - q);
        total += f[j] * (antider(b) - antider(a)) / denom;
    }
    total
}

/// Simpson's rule over `[t0, t2]` with interior node `t1` (non-uniform form).
fn simpson_pair(t: [f64; 3], f: [f64; 3]) -> f64 {
    let h0 = t[1] - t[0];
    let h1 = t[2] - t[1];
    let h = h0 + h1;
    h / 6.0 * ((2.0 - h1 / h0) * f[0] + h * h / (h0 * h1) * f[1] + (2.0 - h0 / h1) * f[2])
}

/// Running integral `∫_{t_0}^{t_i} f dt` at every sample.
pub fn cumulative_integral(times: &[f64], values: &[f64]) -> Vec<f64> {
    let n = times.len();
    assert_eq!(n, values.len());
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = 0.5 * (times[1] - times[0]) * (values[0] + values[1]);
        return out;
    }
    let mut i = 2;
    while i < n {
        out[i] = out[i - 2]
            + simpson_pair(
                [times[i - 2], times[i - 1], times[i]],
                [values[i - 2], values[i - 1], values[i]],
            );
        i += 2;
    }
    // Odd indices: Simpson up to i-1 plus the last interval from a local parabola.
    out[1] = parabola_integral(
        [times[0], times[1], times[2]],
        [values[0], values[1], values[2]],
        times[0],
        times[1],
    );
    let mut i = 3;
    while i < n {
        out[i] = out[i - 1]
            + parabola_integral(
                [times[i - 2], times[i - 1], times[i]],
                [values[i - 2], values[i - 1], values[i]],
                times[i - 1],
                times[i],
            );
        i += 2;
    }
    out
}

/// `∫_{t_0}^{t_end} f dt` over the whole grid.
pub fn integrate(times: &[f64], values: &[f64]) -> f64 {
    cumulative_integral(times, values).last().copied().unwrap_or(0.0)
}
