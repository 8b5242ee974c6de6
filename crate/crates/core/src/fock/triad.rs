#[allow(unused_imports)] // float math comes from std when it is linked
use num_traits::Float;

use super::algebra::check_unit;
use crate::vec3::Vec3;
use crate::Result;

/// Real transverse polarization pair `(ε1, ε2)` for propagation along `k̂`.
///
/// At `k̂ = ẑ` the pair is `(x̂, ŷ)`; elsewhere it is that pair carried by the
/// rotation `R_z(γ) R_y(λ)`, so `ε1 × ε2 = k̂` and the antisymmetric
/// combinations `e_i f_j − e_j f_i` are the components of `k̂`.
pub fn polarization_triad(k: Vec3) -> Result<(Vec3, Vec3)> {
    check_unit(k)?;
    let lambda = k[2].clamp(-1.0, 1.0).acos();
    let transverse = k[0].hypot(k[1]);
    let gamma = if transverse > 0.0 { k[1].atan2(k[0]) } else { 0.0 };
    let (sl, cl) = lambda.sin_cos();
    let (sg, cg) = gamma.sin_cos();
    Ok(([cl * cg, cl * sg, -sl], [-sg, cg, 0.0]))
}
