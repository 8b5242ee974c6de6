//! Circular birefringence of a gyroelectric medium.
//!
//! The permittivity tensor is
//!
//! ```text
//!     | ε1   −iε2  0  |
//! ε = | iε2   ε1   0  |
//!     | 0     0    ε3 |
//! ```
//!
//! and for propagation along the gyration axis the circular combinations
//! `(E1 ± iE2)/√2` decouple with refractive indices `n±² = μ(ε1 ± ε2)`.
//! Units: c = 1, so propagation constants come out in units of ω.

use num_complex::Complex64;
#[allow(unused_imports)] // float math comes from std when it is linked
use num_traits::Float;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GyrotropicMedium {
    pub epsilon1: f64,
    pub epsilon2: f64,
    /// Axial component; not used for axial propagation.
    pub epsilon3: f64,
    pub mu: f64,
}

impl GyrotropicMedium {
    pub fn new(epsilon1: f64, epsilon2: f64, epsilon3: f64, mu: f64) -> Result<Self> {
        if ![epsilon1, epsilon2, epsilon3, mu].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidGeometry("medium parameters must be finite".into()));
        }
        Ok(Self { epsilon1, epsilon2, epsilon3, mu })
    }

    /// Full permittivity tensor, row-major.
    pub fn permittivity(&self) -> [[Complex64; 3]; 3] {
        let z = Complex64::new(0.0, 0.0);
        let e1 = Complex64::new(self.epsilon1, 0.0);
        let ie2 = Complex64::new(0.0, self.epsilon2);
        [[e1, -ie2, z], [ie2, e1, z], [z, z, Complex64::new(self.epsilon3, 0.0)]]
    }
}

/// The `±` branch of the circular dispersion relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Handedness {
    /// `(E1 + iE2)/√2`, carrying `a_L` and `a_R†` content.
    Plus,
    /// `(E1 − iE2)/√2`, carrying `a_R` and `a_L†` content.
    Minus,
}

impl Handedness {
    pub fn as_str(self) -> &'static str {
        match self {
            Handedness::Plus => "plus",
            Handedness::Minus => "minus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Propagation {
    Propagating,
    Evanescent,
}

impl Propagation {
    pub fn as_str(self) -> &'static str {
        match self {
            Propagation::Propagating => "propagating",
            Propagation::Evanescent => "evanescent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionVerdict {
    pub handedness: Handedness,
    pub n_squared: f64,
    pub status: Propagation,
    /// `√|n²| ω`: the wavenumber when propagating, the decay constant when evanescent.
    pub propagation_constant: f64,
}

/// `(n₊², n₋²) = (μ(ε1 + ε2), μ(ε1 − ε2))`.
pub fn refractive_indices(medium: &GyrotropicMedium) -> (f64, f64) {
    (medium.mu * (medium.epsilon1 + medium.epsilon2), medium.mu * (medium.epsilon1 - medium.epsilon2))
}

fn verdict(handedness: Handedness, n_squared: f64, omega: f64) -> DispersionVerdict {
    let status = if n_squared > 0.0 { Propagation::Propagating } else { Propagation::Evanescent };
    DispersionVerdict { handedness, n_squared, status, propagation_constant: n_squared.abs().sqrt() * omega }
}

/// Per-branch verdicts at angular frequency `omega` (c = 1).
pub fn classify(medium: &GyrotropicMedium, omega: f64) -> Result<(DispersionVerdict, DispersionVerdict)> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::NonPositiveFrequency(omega));
    }
    let (plus, minus) = refractive_indices(medium);
    Ok((verdict(Handedness::Plus, plus, omega), verdict(Handedness::Minus, minus, omega)))
}

/// `((E1 + iE2)/√2, (E1 − iE2)/√2)`.
///
/// The `+` combination obeys the `n₊` wave equation and carries the
/// `a_L e^{−ik·x} − a_R† e^{ik·x}` content; the `−` combination carries
/// `a_R e^{−ik·x} − a_L† e^{ik·x}` and obeys the `n₋` equation.
pub fn circular_combination_check(e1: Complex64, e2: Complex64) -> (Complex64, Complex64) {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let i = Complex64::new(0.0, 1.0);
    ((e1 + i * e2) * h, (e1 - i * e2) * h)
}
