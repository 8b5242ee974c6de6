//! Truncated bosonic Fock spaces and the photon spin algebra as dense matrices.
//!
//! Three-mode spaces carry the fixed-frame Cartesian modes `b1, b2, b3`; the
//! circular modes are `a_R† = (b1† + i b2†)/√2` and `a_L† = (b1† − i b2†)/√2`.
//! Two-mode spaces carry `(a_R, a_L)` directly.
//!
//! Truncation at `n_max` breaks `[b, b†] = 1` on the top rung, so operator
//! identities are checked on [`FockSpace::bounded_indices`] (every occupation
//! at most `n_max − 1`). Exponentials of spin operators mix whole photon-number
//! sectors and are faithful only on [`FockSpace::faithful_indices`].

mod algebra;
mod matrix;
mod space;
mod triad;

pub use algebra::{
    annihilation, build_photon_state, circular_operators, creation, helicity_operator, s3_split,
    spin_fixed, vacuum, CircularOperators, Ordering, S3Split, SpinOperators,
};
pub use matrix::{OperatorMatrix, SparseOperator, StateVector};
pub use space::FockSpace;
pub use triad::polarization_triad;
