use num_complex::Complex64;
#[allow(unused_imports)] // float math comes from std when it is linked
use num_traits::Float;

use super::{FockSpace, OperatorMatrix, StateVector};
use crate::vec3::{norm, Vec3};
use crate::{Error, Result};

const UNIT_TOL: f64 = 1e-12;

fn check_mode(space: FockSpace, mode: usize) -> Result<()> {
    if mode >= space.num_modes() {
        return Err(Error::ModeOutOfRange { mode, num_modes: space.num_modes() });
    }
    Ok(())
}

/// Annihilation operator `b` of `mode`, with `⟨n−1|b|n⟩ = √n`.
pub fn annihilation(space: FockSpace, mode: usize) -> Result<OperatorMatrix> {
    check_mode(space, mode)?;
    let mut b = OperatorMatrix::zeros(space);
    for col in 0..space.dim() {
        if let Some(row) = space.shifted(col, mode, -1) {
            let n = space.occupation(col, mode) as f64;
            b.set(row, col, Complex64::new(n.sqrt(), 0.0));
        }
    }
    Ok(b)
}

/// Creation operator `b†` of `mode`.
pub fn creation(space: FockSpace, mode: usize) -> Result<OperatorMatrix> {
    Ok(annihilation(space, mode)?.adjoint())
}

/// Ladder operators of the right- and left-handed circular modes.
#[derive(Debug, Clone)]
pub struct CircularOperators {
    pub a_r: OperatorMatrix,
    pub a_r_dag: OperatorMatrix,
    pub a_l: OperatorMatrix,
    pub a_l_dag: OperatorMatrix,
}

/// Circular-mode operators. In a 3-mode space `a_R† = (b1† + i b2†)/√2` and
/// `a_L† = (b1† − i b2†)/√2`; in a 2-mode space the modes are `(R, L)` themselves.
pub fn circular_operators(space: FockSpace) -> CircularOperators {
    if space.num_modes() == 2 {
        let a_r = annihilation(space, 0).expect("mode 0 exists");
        let a_l = annihilation(space, 1).expect("mode 1 exists");
        return CircularOperators { a_r_dag: a_r.adjoint(), a_l_dag: a_l.adjoint(), a_r, a_l };
    }
    let b1 = annihilation(space, 0).expect("mode 0 exists");
    let b2 = annihilation(space, 1).expect("mode 1 exists");
    let h = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    let ih = Complex64::new(0.0, core::f64::consts::FRAC_1_SQRT_2);
    let mut a_r = b1.scaled(h);
    a_r.axpy(-ih, &b2);
    let mut a_l = b1.scaled(h);
    a_l.axpy(ih, &b2);
    CircularOperators { a_r_dag: a_r.adjoint(), a_l_dag: a_l.adjoint(), a_r, a_l }
}

/// Fixed-frame photon spin `(S1, S2, S3)` on a 3-mode space.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    components: [OperatorMatrix; 3],
}

impl SpinOperators {
    pub fn space(&self) -> FockSpace {
        self.components[0].space()
    }

    pub fn component(&self, axis: usize) -> &OperatorMatrix {
        &self.components[axis]
    }

    pub fn components(&self) -> &[OperatorMatrix; 3] {
        &self.components
    }

    /// `v · S` for an arbitrary real vector.
    pub fn dot(&self, v: Vec3) -> OperatorMatrix {
        let mut out = OperatorMatrix::zeros(self.space());
        for (c, s) in v.iter().zip(&self.components) {
            if *c != 0.0 {
                out.axpy(Complex64::new(*c, 0.0), s);
            }
        }
        out
    }

    /// `S± = S1 ± i S2`.
    pub fn ladder(&self, sign: f64) -> OperatorMatrix {
        let mut out = self.components[0].clone();
        out.axpy(Complex64::new(0.0, sign), &self.components[1]);
        out
    }

    /// Helicity `k̂ · S`; `k̂` must be a unit vector.
    pub fn helicity(&self, k: Vec3) -> Result<OperatorMatrix> {
        check_unit(k)?;
        Ok(self.dot(k))
    }
}

pub(crate) fn check_unit(k: Vec3) -> Result<()> {
    let n = norm(k);
    if !((n - 1.0).abs() <= UNIT_TOL) {
        return Err(Error::NonUnitVector(n));
    }
    Ok(())
}

/// Spin components `S_i = −i(b_j† b_k − b_k† b_j)` for cyclic `(i, j, k)`.
pub fn spin_fixed(space: FockSpace) -> Result<SpinOperators> {
    if space.num_modes() != 3 {
        return Err(Error::RequiresThreeModes(space.num_modes()));
    }
    let b: [OperatorMatrix; 3] = core::array::from_fn(|m| annihilation(space, m).expect("mode"));
    let bd: [OperatorMatrix; 3] = core::array::from_fn(|m| b[m].adjoint());
    let minus_i = Complex64::new(0.0, -1.0);
    let component = |j: usize, k: usize| (&bd[j].matmul(&b[k]) - &bd[k].matmul(&b[j])).scaled(minus_i);
    Ok(SpinOperators { components: [component(1, 2), component(2, 0), component(0, 1)] })
}

/// Photon helicity `k̂ · S_fix` on a 3-mode space.
pub fn helicity_operator(space: FockSpace, k: Vec3) -> Result<OperatorMatrix> {
    check_unit(k)?;
    spin_fixed(space)?.helicity(k)
}

/// Per-handedness pieces of `S3` in normal and non-normal order.
///
/// Non-normal order keeps the zero-point terms:
/// `½(a_R a_R† + a_R† a_R) = a_R† a_R + ½` and `−½(a_L a_L† + a_L† a_L) = −(a_L† a_L + ½)`.
/// They are built in the reduced form so the two shifts cancel exactly.
#[derive(Debug, Clone)]
pub struct S3Split {
    pub r_nonnormal: OperatorMatrix,
    pub l_nonnormal: OperatorMatrix,
    pub r_normal: OperatorMatrix,
    pub l_normal: OperatorMatrix,
}

/// Which `S3` variant enters the phase expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ordering {
    /// `a_R†a_R − a_L†a_L`.
    Normal,
    /// Right-handed part with its `+½` vacuum term.
    NonNormalR,
    /// Left-handed part with its `−½` vacuum term.
    NonNormalL,
    /// Both non-normal parts; the vacuum terms cancel.
    NonNormalTotal,
}

impl Ordering {
    pub const ALL: [Ordering; 4] =
        [Ordering::Normal, Ordering::NonNormalR, Ordering::NonNormalL, Ordering::NonNormalTotal];

    pub fn as_str(self) -> &'static str {
        match self {
            Ordering::Normal => "normal",
            Ordering::NonNormalR => "nonnormal_R",
            Ordering::NonNormalL => "nonnormal_L",
            Ordering::NonNormalTotal => "nonnormal_total",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|o| o.as_str() == s)
    }

    /// The c-number vacuum contribution carried by this ordering.
    pub fn vacuum_offset(self) -> f64 {
        match self {
            Ordering::Normal | Ordering::NonNormalTotal => 0.0,
            Ordering::NonNormalR => 0.5,
            Ordering::NonNormalL => -0.5,
        }
    }
}

impl S3Split {
    pub fn select(&self, ordering: Ordering) -> OperatorMatrix {
        match ordering {
            Ordering::Normal => &self.r_normal + &self.l_normal,
            Ordering::NonNormalR => self.r_nonnormal.clone(),
            Ordering::NonNormalL => self.l_nonnormal.clone(),
            Ordering::NonNormalTotal => &self.r_nonnormal + &self.l_nonnormal,
        }
    }
}

pub fn s3_split(space: FockSpace) -> S3Split {
    let c = circular_operators(space);
    let r_normal = c.a_r_dag.matmul(&c.a_r);
    let l_normal = c.a_l_dag.matmul(&c.a_l).scaled_real(-1.0);
    let half = OperatorMatrix::identity(space).scaled_real(0.5);
    S3Split { r_nonnormal: &r_normal + &half, l_nonnormal: &l_normal - &half, r_normal, l_normal }
}

pub fn vacuum(space: FockSpace) -> StateVector {
    StateVector::basis(space, 0)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Monomode state `(a_R†)^{n_R} (a_L†)^{n_L} |0⟩ / √(n_R! n_L!)`.
pub fn build_photon_state(space: FockSpace, n_r: usize, n_l: usize) -> Result<StateVector> {
    let n_max = space.n_max();
    if space.num_modes() == 2 {
        if n_r > n_max || n_l > n_max {
            return Err(Error::CutoffOverflow { n_r, n_l, n_max });
        }
        let index = space.index_of(&[n_r, n_l]).expect("within cutoff");
        return Ok(StateVector::basis(space, index));
    }
    // Cartesian occupations of an N-photon state never exceed N.
    if n_r + n_l > n_max {
        return Err(Error::CutoffOverflow { n_r, n_l, n_max });
    }
    let c = circular_operators(space);
    let mut state = vacuum(space);
    for _ in 0..n_r {
        state = c.a_r_dag.apply(&state);
    }
    for _ in 0..n_l {
        state = c.a_l_dag.apply(&state);
    }
    let norm = (factorial(n_r) * factorial(n_l)).sqrt();
    Ok(state.scaled(Complex64::new(1.0 / norm, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn three(n_max: usize) -> FockSpace {
        FockSpace::new(3, n_max).unwrap()
    }

    #[test]
    fn annihilation_matrix_elements() {
        let s = FockSpace::new(2, 2).unwrap();
        let b = annihilation(s, 0).unwrap();
        let two = StateVector::basis(s, s.index_of(&[2, 0]).unwrap());
        let out = b.apply(&two);
        let expected = StateVector::basis(s, s.index_of(&[1, 0]).unwrap()).scaled(re(2f64.sqrt()));
        assert!(out.max_distance(&expected) < 1e-15);
        assert_eq!(b.apply(&vacuum(s)).norm(), 0.0);
        assert!(matches!(annihilation(s, 2), Err(Error::ModeOutOfRange { mode: 2, num_modes: 2 })));
    }

    #[test]
    fn canonical_commutators_on_bounded_subspace() {
        let s = three(2);
        let bounded = s.bounded_indices();
        let id = OperatorMatrix::identity(s);
        for i in 0..3 {
            for j in 0..3 {
                let c = annihilation(s, i).unwrap().commutator(&creation(s, j).unwrap());
                let target = if i == j { id.clone() } else { OperatorMatrix::zeros(s) };
                assert!((&c - &target).restricted_max_norm(&bounded) < 1e-14);
            }
        }
        // the top rung breaks the identity
        let c = annihilation(s, 0).unwrap().commutator(&creation(s, 0).unwrap());
        assert!((&c - &id).max_norm() > 1.0);
    }

    #[test]
    fn circular_creation_on_vacuum() {
        let s = three(1);
        let c = circular_operators(s);
        let out = c.a_r_dag.apply(&vacuum(s));
        let mut expected = StateVector::zeros(s);
        expected.amplitudes_mut()[s.index_of(&[1, 0, 0]).unwrap()] = re(core::f64::consts::FRAC_1_SQRT_2);
        expected.amplitudes_mut()[s.index_of(&[0, 1, 0]).unwrap()] = I * core::f64::consts::FRAC_1_SQRT_2;
        assert!(out.max_distance(&expected) < 1e-15);
        assert!(c.a_l.apply(&out).norm() < 1e-15);
    }

    #[test]
    fn circular_commutators() {
        for s in [three(2), FockSpace::new(2, 3).unwrap()] {
            let c = circular_operators(s);
            let bounded = s.bounded_indices();
            let id = OperatorMatrix::identity(s);
            let rr = c.a_r.commutator(&c.a_r_dag);
            let ll = c.a_l.commutator(&c.a_l_dag);
            let rl = c.a_r.commutator(&c.a_l_dag);
            assert!((&rr - &id).restricted_max_norm(&bounded) < 1e-14);
            assert!((&ll - &id).restricted_max_norm(&bounded) < 1e-14);
            assert!(rl.restricted_max_norm(&bounded) < 1e-14);
        }
    }

    #[test]
    fn spin_components_are_hermitian_and_close_the_algebra() {
        let s = three(3);
        let spin = spin_fixed(s).unwrap();
        let bounded = s.bounded_indices();
        for a in 0..3 {
            assert!(spin.component(a).is_hermitian(1e-12));
            let (b, c) = ((a + 1) % 3, (a + 2) % 3);
            let lhs = spin.component(a).commutator(spin.component(b));
            let rhs = spin.component(c).scaled(I);
            assert!((&lhs - &rhs).restricted_max_norm(&bounded) < 1e-12);
        }
    }

    #[test]
    fn s3_eigenstates() {
        let s = three(1);
        let spin = spin_fixed(s).unwrap();
        let plus = build_photon_state(s, 1, 0).unwrap();
        assert!(spin.component(2).apply(&plus).max_distance(&plus) < 1e-15);
        let minus = build_photon_state(s, 0, 1).unwrap();
        assert!(spin.component(2).apply(&minus).max_distance(&minus.scaled(re(-1.0))) < 1e-15);
        let axial = StateVector::basis(s, s.index_of(&[0, 0, 1]).unwrap());
        assert_eq!(spin.component(2).apply(&axial).norm(), 0.0);
        assert!(matches!(spin_fixed(FockSpace::new(2, 1).unwrap()), Err(Error::RequiresThreeModes(2))));
    }

    #[test]
    fn helicity_special_directions() {
        let s = three(2);
        let spin = spin_fixed(s).unwrap();
        assert_eq!(helicity_operator(s, [0.0, 0.0, 1.0]).unwrap(), *spin.component(2));
        let b2 = annihilation(s, 1).unwrap();
        let b3 = annihilation(s, 2).unwrap();
        let expected = (&b2.adjoint().matmul(&b3) - &b3.adjoint().matmul(&b2)).scaled(-I);
        assert!((&helicity_operator(s, [1.0, 0.0, 0.0]).unwrap() - &expected).max_norm() < 1e-15);
        assert!(matches!(helicity_operator(s, [1.0, 1.0, 0.0]), Err(Error::NonUnitVector(_))));
    }

    #[test]
    fn s3_split_identities() {
        let s = FockSpace::new(2, 3).unwrap();
        let split = s3_split(s);
        let v = vacuum(s);
        assert!((v.expectation(&split.r_nonnormal).re - 0.5).abs() < 1e-15);
        assert!((v.expectation(&split.l_nonnormal).re + 0.5).abs() < 1e-15);
        let pair = &split.r_nonnormal + &split.l_nonnormal;
        assert_eq!(v.expectation(&pair).re, 0.0);
        // sums of non-normal and normal pieces agree exactly
        assert_eq!(pair, &split.r_normal + &split.l_normal);
        let st = build_photon_state(s, 2, 1).unwrap();
        assert!((st.expectation(&split.select(Ordering::Normal)).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn nonnormal_pieces_match_symmetrized_products_on_bounded_subspace() {
        let s = three(3);
        let c = circular_operators(s);
        let split = s3_split(s);
        let bounded = s.bounded_indices();
        let sym_r = (&c.a_r.matmul(&c.a_r_dag) + &c.a_r_dag.matmul(&c.a_r)).scaled_real(0.5);
        let sym_l = (&c.a_l.matmul(&c.a_l_dag) + &c.a_l_dag.matmul(&c.a_l)).scaled_real(-0.5);
        assert!((&sym_r - &split.r_nonnormal).restricted_max_norm(&bounded) < 1e-14);
        assert!((&sym_l - &split.l_nonnormal).restricted_max_norm(&bounded) < 1e-14);
        // in the Cartesian space the normal pieces rebuild S3
        let s3 = spin_fixed(s).unwrap().component(2).clone();
        assert!((&(&split.r_normal + &split.l_normal) - &s3).max_norm() < 1e-14);
    }

    #[test]
    fn photon_states() {
        let s = three(4);
        let split = s3_split(s);
        let normal = split.select(Ordering::Normal);
        for (n_r, n_l) in [(0, 0), (1, 0), (2, 2), (3, 1), (0, 4)] {
            let st = build_photon_state(s, n_r, n_l).unwrap();
            assert!((st.norm() - 1.0).abs() < 1e-12);
            let eig = n_r as f64 - n_l as f64;
            assert!(normal.apply(&st).max_distance(&st.scaled(re(eig))) < 1e-12);
        }
        assert_eq!(
            build_photon_state(s, 3, 2),
            Err(Error::CutoffOverflow { n_r: 3, n_l: 2, n_max: 4 })
        );
        let two = FockSpace::new(2, 2).unwrap();
        assert!(build_photon_state(two, 2, 2).is_ok());
        assert!(build_photon_state(two, 3, 0).is_err());
    }

    #[test]
    fn ordering_names_round_trip() {
        let names: Vec<&str> = Ordering::ALL.iter().map(|o| o.as_str()).collect();
        for (o, n) in Ordering::ALL.iter().zip(names) {
            assert_eq!(Ordering::parse(n), Some(*o));
        }
        assert_eq!(Ordering::parse("weird"), None);
    }
}
