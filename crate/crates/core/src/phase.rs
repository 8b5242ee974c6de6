//! Geometric phases of photon states carried along a tangent trajectory.
//!
//! Two independent routes are provided:
//!
//! * closed form: `φ(t) = ⟨S3⟩ ∫₀ᵗ γ̇ (1 − cos λ) dt'`, by Simpson quadrature on
//!   the sampled angles;
//! * numerical: RK4 integration of `i ∂ψ/∂t = H_eff ψ` with
//!   `H_eff = (k × k̇)/k² · S`, followed by a split of the accumulated phase into
//!   dynamical and geometric parts.
//!
//! Phases follow the `exp[(1/i) φ]` convention: a positive `φ` shows up as an
//! amplitude factor `e^{−iφ}`. The numerical total phase at time `t` is read
//! against the instantaneous invariant eigenstate `V(t) χ`, where
//! `V = exp[β S₊ − β* S₋]`, `β = −(λ/2) e^{−iγ}`, and `χ = V(0)† ψ(0)`. For a
//! closed trace `V(T) = V(0)` and this is the Pancharatnam phase
//! `−arg⟨ψ(0)|ψ(T)⟩`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
#[allow(unused_imports)] // float math comes from std when it is linked
use num_traits::Float;

use crate::calculus::cumulative_integral;
use crate::fock::{OperatorMatrix, SparseOperator, SpinOperators, StateVector};
use crate::geometry::{spherical_angles, AngleTrajectory, TangentTrajectory};
use crate::linalg::{expm, expm_apply};
use crate::vec3::Vec3;
use crate::{Error, Result};

/// RK4 steps must satisfy `max ‖H_eff‖ Δt` below this.
pub const STEP_GUARD: f64 = 0.1;
/// Overlaps smaller than this make the extracted phase meaningless.
pub const MIN_OVERLAP: f64 = 1e-6;
const NORMALIZED_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

fn grid_index(angles: &AngleTrajectory, t_end: f64) -> Result<usize> {
    let times = &angles.times;
    let (first, last) = (times[0], times[times.len() - 1]);
    let tol = 1e-12 * (1.0 + first.abs().max(last.abs()));
    if !(t_end >= first - tol && t_end <= last + tol) {
        return Err(Error::TimeOutOfRange(t_end));
    }
    let i = times.partition_point(|&s| s < t_end - tol);
    if i < times.len() && (times[i] - t_end).abs() <= tol {
        Ok(i)
    } else {
        Err(Error::OffGrid(t_end))
    }
}

/// `∫₀^{t_i} γ̇ (1 − cos λ) dt` at every sample.
pub fn cumulative_anholonomy(angles: &AngleTrajectory) -> Vec<f64> {
    cumulative_integral(&angles.times, &angles.anholonomy_integrand())
}

/// `∫₀^{t_end} γ̇ (1 − cos λ) dt`; `t_end` must be a grid point.
pub fn anholonomy_integral(angles: &AngleTrajectory, t_end: f64) -> Result<f64> {
    let i = grid_index(angles, t_end)?;
    Ok(cumulative_anholonomy(angles)[i])
}

/// `⟨S3⟩ × anholonomy integral`, valid for states that are eigenstates of the
/// chosen `S3` variant in the initial invariant frame.
pub fn closed_form_phase(angles: &AngleTrajectory, s3_expectation: f64, t_end: f64) -> Result<f64> {
    Ok(s3_expectation * anholonomy_integral(angles, t_end)?)
}

/// Cyclic adiabatic value `2π (1 − cos λ) ⟨S3⟩`.
pub fn berry_phase_cyclic(lambda: f64, s3_expectation: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&lambda) {
        return Err(Error::AngleOutOfRange(lambda));
    }
    let s = (0.5 * lambda).sin();
    Ok(TAU * 2.0 * s * s * s3_expectation)
}

/// `H_eff(t) = (k × k̇)/k² · S` at grid time `t`.
pub fn effective_hamiltonian(traj: &TangentTrajectory, spin: &SpinOperators, t: f64) -> Result<OperatorMatrix> {
    let i = traj.index_of(t)?;
    Ok(spin.dot(traj.field(i)))
}

/// Evaluates the Liouville–von Neumann residual `∂I/∂t + (1/i)[I, H_eff]` for
/// `I = k̂ · S` on the bounded subspace, reusing precomputed commutators.
#[derive(Debug, Clone)]
pub struct LvnChecker {
    size: usize,
    spin: [Vec<Complex64>; 3],
    /// `[S1,S2]`, `[S1,S3]`, `[S2,S3]` restricted.
    commutators: [Vec<Complex64>; 3],
}

impl LvnChecker {
    pub fn new(spin: &SpinOperators) -> Self {
        let idx = spin.space().bounded_indices();
        let restrict = |m: &OperatorMatrix| -> Vec<Complex64> {
            idx.iter().flat_map(|&r| idx.iter().map(move |&c| m.get(r, c))).collect()
        };
        let s = spin.components();
        Self {
            size: idx.len(),
            spin: core::array::from_fn(|a| restrict(&s[a])),
            commutators: [
                restrict(&s[0].commutator(&s[1])),
                restrict(&s[0].commutator(&s[2])),
                restrict(&s[1].commutator(&s[2])),
            ],
        }
    }

    /// Max-norm of the residual at sample `i`.
    pub fn residual(&self, traj: &TangentTrajectory, i: usize) -> f64 {
        let k = traj.unit(i);
        let kd = traj.unit_derivative(i);
        let w = traj.field(i);
        let pair = |a: usize, b: usize| k[a] * w[b] - k[b] * w[a];
        let coeffs = [pair(0, 1), pair(0, 2), pair(1, 2)];
        let mut worst = 0.0f64;
        for e in 0..self.size * self.size {
            let mut acc = ZERO;
            for a in 0..3 {
                acc += self.spin[a][e] * kd[a];
                acc += MINUS_I * self.commutators[a][e] * coeffs[a];
            }
            worst = worst.max(acc.norm());
        }
        worst
    }
}

/// Liouville–von Neumann residual at grid time `t`.
pub fn lvn_residual(traj: &TangentTrajectory, spin: &SpinOperators, t: f64) -> Result<f64> {
    let i = traj.index_of(t)?;
    Ok(LvnChecker::new(spin).residual(traj, i))
}

/// `V = exp[β S₊ − β* S₋]` with `β = −(λ/2) e^{−iγ}`, as a dense matrix.
pub fn evolution_operator(lambda: f64, gamma: f64, spin: &SpinOperators) -> OperatorMatrix {
    let beta = Complex64::from_polar(-0.5 * lambda, -gamma);
    let mut generator = spin.ladder(1.0).scaled(beta);
    generator.axpy(-beta.conj(), &spin.ladder(-1.0));
    expm(&generator)
}

/// Sparse spin components for repeated `v · S` products.
#[derive(Debug, Clone)]
pub struct SpinAction {
    ops: [SparseOperator; 3],
}

impl SpinAction {
    pub fn new(spin: &SpinOperators) -> Self {
        Self { ops: core::array::from_fn(|a| SparseOperator::from_dense(spin.component(a))) }
    }

    /// `out += factor · (v · S) x`.
    pub fn apply_add(&self, v: Vec3, factor: Complex64, x: &[Complex64], out: &mut [Complex64]) {
        for (op, c) in self.ops.iter().zip(v) {
            if c != 0.0 {
                op.apply_add(factor * c, x, out);
            }
        }
    }

    /// Induced ∞-norm of `v · S`, an upper bound on its spectral norm.
    pub fn norm_bound(&self, v: Vec3) -> f64 {
        let ops = [&self.ops[0], &self.ops[1], &self.ops[2]];
        SparseOperator::combination_inf_norm(&ops, &v)
    }

    /// `exp(−i θ n̂·S) x` for the rotation vector `rotation = θ n̂`.
    pub fn rotate(&self, rotation: Vec3, x: &[Complex64]) -> Vec<Complex64> {
        let bound = self.norm_bound(rotation);
        expm_apply(|v, out| self.apply_add(rotation, MINUS_I, v, out), bound, x)
    }

    /// `V(λ, γ) x`. `V` rotates by `λ` about `(−sin γ, cos γ, 0)`.
    pub fn frame(&self, lambda: f64, gamma: f64, x: &[Complex64]) -> Vec<Complex64> {
        let (sg, cg) = gamma.sin_cos();
        self.rotate([-sg * lambda, cg * lambda, 0.0], x)
    }

    /// `V(λ, γ)† x`.
    pub fn frame_inverse(&self, lambda: f64, gamma: f64, x: &[Complex64]) -> Vec<Complex64> {
        self.frame(-lambda, gamma, x)
    }
}

/// Output of [`evolve_state`]: one entry per RK4 step boundary.
#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    /// Trajectory sample index of each reported time.
    pub sample_indices: Vec<usize>,
    pub states: Vec<StateVector>,
    pub norms: Vec<f64>,
    pub lvn_residuals: Vec<f64>,
    /// `max ‖H_eff‖ Δt` over the run.
    pub guard_metric: f64,
}

impl EvolutionResult {
    pub fn max_norm_drift(&self) -> f64 {
        self.norms.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn max_lvn_residual(&self) -> f64 {
        self.lvn_residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("at least one state")
    }
}

/// Integrates `i ∂ψ/∂t = H_eff ψ` with fixed-step RK4.
///
/// Each step spans two trajectory intervals and uses the middle sample as the
/// RK4 midpoint, so a trajectory of `2N + 1` samples gives `N` steps. No
/// renormalization is applied; the norm history is reported instead.
pub fn evolve_state(psi0: &StateVector, traj: &TangentTrajectory, spin: &SpinOperators) -> Result<EvolutionResult> {
    if psi0.space() != spin.space() {
        return Err(Error::SpaceMismatch);
    }
    let n0 = psi0.norm();
    if !((n0 - 1.0).abs() <= NORMALIZED_TOL) {
        return Err(Error::NotNormalized(n0));
    }
    let samples = traj.len();
    if samples < 3 || samples.is_multiple_of(2) {
        return Err(Error::GridParity(samples));
    }
    let times = traj.times();
    for j in (0..samples - 1).step_by(2) {
        let mid = 0.5 * (times[j] + times[j + 2]);
        if (times[j + 1] - mid).abs() > 1e-9 * (times[j + 2] - times[j]) {
            return Err(Error::InvalidGeometry(alloc::format!(
                "sample {} is not the midpoint of its neighbours",
                j + 1
            )));
        }
    }

    let action = SpinAction::new(spin);
    let fields: Vec<Vec3> = (0..samples).map(|i| traj.field(i)).collect();
    let norms_h: Vec<f64> = fields.iter().map(|w| action.norm_bound(*w)).collect();
    let mut guard = 0.0f64;
    for j in (0..samples - 1).step_by(2) {
        let dt = times[j + 2] - times[j];
        let h = norms_h[j].max(norms_h[j + 1]).max(norms_h[j + 2]);
        guard = guard.max(h * dt);
    }
    if !(guard < STEP_GUARD) {
        return Err(Error::StepGuard { metric: guard, limit: STEP_GUARD });
    }

    let lvn = LvnChecker::new(spin);
    let dim = psi0.space().dim();
    let steps = (samples - 1) / 2;
    let mut result = EvolutionResult {
        times: Vec::with_capacity(steps + 1),
        sample_indices: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        norms: Vec::with_capacity(steps + 1),
        lvn_residuals: Vec::with_capacity(steps + 1),
        guard_metric: guard,
    };
    let record = |result: &mut EvolutionResult, i: usize, psi: &[Complex64]| {
        let state = StateVector::from_amplitudes(psi0.space(), psi.to_vec()).expect("dimension");
        result.times.push(times[i]);
        result.sample_indices.push(i);
        result.norms.push(state.norm());
        result.lvn_residuals.push(lvn.residual(traj, i));
        result.states.push(state);
    };

    let mut psi = psi0.amplitudes().to_vec();
    record(&mut result, 0, &psi);
    let mut k = [vec![ZERO; dim], vec![ZERO; dim], vec![ZERO; dim], vec![ZERO; dim]];
    let mut trial = vec![ZERO; dim];
    for step in 0..steps {
        let i = 2 * step;
        let dt = times[i + 2] - times[i];
        let stage_fields = [fields[i], fields[i + 1], fields[i + 1], fields[i + 2]];
        let stage_offsets = [0.0, 0.5 * dt, 0.5 * dt, dt];
        for s in 0..4 {
            trial.copy_from_slice(&psi);
            if s > 0 {
                let (prev, _) = k.split_at(s);
                for (t, d) in trial.iter_mut().zip(&prev[s - 1]) {
                    *t += d * stage_offsets[s];
                }
            }
            let out = &mut k[s];
            out.iter_mut().for_each(|z| *z = ZERO);
            action.apply_add(stage_fields[s], MINUS_I, &trial, out);
        }
        let w = dt / 6.0;
        for (idx, p) in psi.iter_mut().enumerate() {
            *p += (k[0][idx] + 2.0 * k[1][idx] + 2.0 * k[2][idx] + k[3][idx]) * w;
        }
        record(&mut result, i + 2, &psi);
    }
    Ok(result)
}

/// Final phase decomposition of an evolution, in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseBreakdown {
    /// `−arg⟨V(T)χ|ψ(T)⟩`, unwrapped along the run.
    pub total_phase: f64,
    /// `∫ ⟨ψ|H_eff|ψ⟩ dt`.
    pub dynamical_phase: f64,
    /// `geometric_phase_raw` moved by a multiple of 2π onto the branch of the
    /// closed form (unchanged when no closed form applies).
    pub geometric_phase: f64,
    /// `total_phase − dynamical_phase`.
    pub geometric_phase_raw: f64,
    /// `geometric_phase_raw` wrapped into `(−π, π]`.
    pub geometric_phase_mod_2pi: f64,
    /// `⟨S3⟩ × anholonomy`, when the initial state is an `S3` eigenstate.
    pub closed_form_phase: Option<f64>,
    pub anholonomy_integral: f64,
    /// `+½ × anholonomy`: zero-point term of the right-handed mode.
    pub vacuum_phase_r: f64,
    /// `−½ × anholonomy`: zero-point term of the left-handed mode.
    pub vacuum_phase_l: f64,
    /// `−arg⟨ψ(0)|ψ(T)⟩`, when the overlap is not negligible.
    pub pancharatnam_phase: Option<f64>,
    /// `|⟨V(T)χ|ψ(T)⟩|`.
    pub final_overlap: f64,
}

/// Per-step phase histories matching [`EvolutionResult::times`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseHistory {
    pub lambda: Vec<f64>,
    pub gamma: Vec<f64>,
    pub total: Vec<f64>,
    pub dynamical: Vec<f64>,
    pub geometric: Vec<f64>,
    pub closed_form: Option<Vec<f64>>,
}

/// Wraps into `(−π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    let mut w = x - TAU * (x / TAU).round();
    if w <= -PI {
        w += TAU;
    }
    w
}

/// Splits the phase accumulated in `result` into dynamical and geometric parts.
///
/// `s3_expectation` is `⟨χ|S3|χ⟩` for the variant of `S3` that the closed form
/// should use, or `None` when `χ` is not an `S3` eigenstate.
pub fn extract_phases(
    result: &EvolutionResult,
    traj: &TangentTrajectory,
    spin: &SpinOperators,
    s3_expectation: Option<f64>,
) -> Result<(PhaseBreakdown, PhaseHistory)> {
    let angles = spherical_angles(traj);
    let anholonomy = cumulative_anholonomy(&angles);
    let action = SpinAction::new(spin);
    let psi0 = &result.states[0];
    let chi = action.frame_inverse(angles.lambda[0], angles.gamma[0], psi0.amplitudes());

    let steps = result.times.len();
    let mut history = PhaseHistory {
        lambda: Vec::with_capacity(steps),
        gamma: Vec::with_capacity(steps),
        total: Vec::with_capacity(steps),
        dynamical: Vec::new(),
        geometric: Vec::with_capacity(steps),
        closed_form: s3_expectation.map(|_| Vec::with_capacity(steps)),
    };
    let mut energies = Vec::with_capacity(steps);
    let mut scratch = vec![ZERO; psi0.space().dim()];
    let mut last_overlap = ZERO;
    let mut unwrapped = 0.0;
    for (j, (&i, state)) in result.sample_indices.iter().zip(&result.states).enumerate() {
        let (lambda, gamma) = (angles.lambda[i], angles.gamma[i]);
        let reference = action.frame(lambda, gamma, &chi);
        let overlap: Complex64 = reference.iter().zip(state.amplitudes()).map(|(r, p)| r.conj() * p).sum();
        let phase = -overlap.arg();
        unwrapped = if j == 0 { phase } else { unwrapped + wrap_phase(phase - unwrapped) };
        last_overlap = overlap;

        scratch.iter_mut().for_each(|z| *z = ZERO);
        action.apply_add(traj.field(i), ONE, state.amplitudes(), &mut scratch);
        let psi = state.amplitudes();
        let num: Complex64 = psi.iter().zip(&scratch).map(|(p, h)| p.conj() * h).sum();
        energies.push(num.re / state.norm().powi(2));

        history.lambda.push(lambda);
        history.gamma.push(gamma);
        history.total.push(unwrapped);
        if let (Some(c), Some(s3)) = (history.closed_form.as_mut(), s3_expectation) {
            c.push(s3 * anholonomy[i]);
        }
    }
    history.dynamical = cumulative_integral(&result.times, &energies);
    history.geometric = history.total.iter().zip(&history.dynamical).map(|(t, d)| t - d).collect();

    if last_overlap.norm() < MIN_OVERLAP {
        return Err(Error::IllConditioned(last_overlap.norm()));
    }
    let total_phase = history.total[steps - 1];
    let dynamical_phase = history.dynamical[steps - 1];
    let geometric_phase_raw = total_phase - dynamical_phase;
    let a = anholonomy[result.sample_indices[steps - 1]];
    let closed_form_phase = s3_expectation.map(|s3| s3 * a);
    let geometric_phase = match closed_form_phase {
        Some(c) => geometric_phase_raw + TAU * ((c - geometric_phase_raw) / TAU).round(),
        None => geometric_phase_raw,
    };
    let pancharatnam = psi0.inner(result.final_state());
    let breakdown = PhaseBreakdown {
        total_phase,
        dynamical_phase,
        geometric_phase,
        geometric_phase_raw,
        geometric_phase_mod_2pi: wrap_phase(geometric_phase_raw),
        closed_form_phase,
        anholonomy_integral: a,
        vacuum_phase_r: 0.5 * a,
        vacuum_phase_l: -0.5 * a,
        pancharatnam_phase: (pancharatnam.norm() >= MIN_OVERLAP).then(|| -pancharatnam.arg()),
        final_overlap: last_overlap.norm(),
    };
    Ok((breakdown, history))
}

/// `V(λ(0), γ(0)) x`: places a state prepared in the `S3` frame onto the
/// initial tangent of `traj`.
pub fn initial_state_on(traj: &TangentTrajectory, spin: &SpinOperators, chi: &StateVector) -> StateVector {
    let angles = spherical_angles(traj);
    let amps = SpinAction::new(spin).frame(angles.lambda[0], angles.gamma[0], chi.amplitudes());
    StateVector::from_amplitudes(chi.space(), amps).expect("dimension")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_photon_state, spin_fixed, FockSpace};
    use crate::geometry::{tangent_trajectory, FiberPath, Helix};
    use approx::assert_abs_diff_eq;

    /// 2π(1 − cos π/4), evaluated as 2π − π√2.
    const CAP_45: f64 = 1.840_302_369_021_220_4;

    fn helix(lambda: f64, turns: f64, samples: usize) -> TangentTrajectory {
        let h = Helix::with_tangent_angle(1.0, lambda, turns, samples).unwrap();
        tangent_trajectory(&FiberPath::Helix(h), false).unwrap()
    }

    fn spin(n_max: usize) -> SpinOperators {
        spin_fixed(FockSpace::new(3, n_max).unwrap()).unwrap()
    }

    #[test]
    fn anholonomy_values() {
        assert_eq!(anholonomy_integral(&spherical_angles(&helix(0.0, 1.0, 65)), TAU).unwrap(), 0.0);
        let circle = spherical_angles(&helix(PI / 2.0, 1.0, 129));
        assert_abs_diff_eq!(anholonomy_integral(&circle, TAU).unwrap(), TAU, epsilon = 1e-12);
        let cone = spherical_angles(&helix(PI / 4.0, 1.0, 129));
        assert_abs_diff_eq!(anholonomy_integral(&cone, TAU).unwrap(), CAP_45, epsilon = 1e-12);
        assert!(matches!(anholonomy_integral(&cone, 10.0), Err(Error::TimeOutOfRange(_))));
        assert!(matches!(anholonomy_integral(&cone, 0.01), Err(Error::OffGrid(_))));
    }

    #[test]
    fn closed_form_examples() {
        let angles = spherical_angles(&helix(PI / 3.0, 1.0, 257));
        // vacuum, right-handed: ½ · 2π(1 − ½) = π/2
        assert_abs_diff_eq!(closed_form_phase(&angles, 0.5, TAU).unwrap(), PI / 2.0, epsilon = 1e-12);
        // n_R − n_L = 1
        assert_abs_diff_eq!(closed_form_phase(&angles, 1.0, TAU).unwrap(), PI, epsilon = 1e-12);
        let r = closed_form_phase(&angles, 0.5, TAU).unwrap();
        let l = closed_form_phase(&angles, -0.5, TAU).unwrap();
        assert_eq!(r + l, 0.0);
    }

    #[test]
    fn berry_examples() {
        assert_eq!(berry_phase_cyclic(0.0, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(berry_phase_cyclic(PI / 2.0, 1.0).unwrap(), TAU, epsilon = 1e-15);
        assert_abs_diff_eq!(berry_phase_cyclic(PI / 4.0, -1.0).unwrap(), -CAP_45, epsilon = 1e-15);
        assert!(matches!(berry_phase_cyclic(-0.1, 1.0), Err(Error::AngleOutOfRange(_))));
        assert!(berry_phase_cyclic(3.2, 1.0).is_err());
    }

    #[test]
    fn hamiltonian_properties() {
        let s = spin(2);
        let straight = helix(0.0, 1.0, 65);
        for &t in straight.times().iter().step_by(8) {
            assert_eq!(effective_hamiltonian(&straight, &s, t).unwrap().max_norm(), 0.0);
        }
        // equator circle at unit rate: k × k̇ = ẑ, so H_eff = S3
        let circle = helix(PI / 2.0, 1.0, 65);
        let t = circle.times()[10];
        let h = effective_hamiltonian(&circle, &s, t).unwrap();
        assert!(h.is_hermitian(1e-15));
        assert!((&h - s.component(2)).max_norm() < 1e-15);
        let cone = helix(0.6, 1.0, 65);
        let h1 = effective_hamiltonian(&cone, &s, cone.times()[5]).unwrap();
        let h5 = effective_hamiltonian(&cone.scaled(5.0), &s, cone.times()[5]).unwrap();
        assert!((&h1 - &h5).max_norm() < 1e-12);
        assert!(matches!(effective_hamiltonian(&cone, &s, 0.123), Err(Error::OffGrid(_))));
    }

    #[test]
    fn lvn_residual_vanishes() {
        let s = spin(2);
        let traj = helix(PI / 4.0, 1.0, 4096);
        let checker = LvnChecker::new(&s);
        let worst = (0..traj.len()).step_by(97).map(|i| checker.residual(&traj, i)).fold(0.0, f64::max);
        assert!(worst < 1e-6, "{worst}");
        let straight = helix(0.0, 1.0, 64);
        assert_eq!(lvn_residual(&straight, &s, straight.times()[3]).unwrap(), 0.0);
    }

    #[test]
    fn evolution_operator_properties() {
        let s = spin(3);
        let space = s.space();
        let id = OperatorMatrix::identity(space);
        assert!((&evolution_operator(0.0, 1.3, &s) - &id).max_norm() < 1e-15);
        let faithful = space.faithful_indices();
        let v = evolution_operator(PI / 4.0, 0.0, &s);
        let k = crate::vec3::from_angles(PI / 4.0, 0.0);
        let iv = v.adjoint().matmul(&s.helicity(k).unwrap()).matmul(&v);
        assert!((&iv - s.component(2)).restricted_max_norm(&faithful) < 1e-9);
        assert!((&v.adjoint().matmul(&v) - &id).max_norm() < 1e-10);
    }

    #[test]
    fn sparse_frame_matches_dense_operator() {
        let s = spin(2);
        let action = SpinAction::new(&s);
        let chi = build_photon_state(s.space(), 1, 1).unwrap();
        for (l, g) in [(0.3, 0.0), (1.2, -2.0), (2.9, 4.0)] {
            let dense = evolution_operator(l, g, &s).apply(&chi);
            let sparse = StateVector::from_amplitudes(s.space(), action.frame(l, g, chi.amplitudes())).unwrap();
            assert!(dense.max_distance(&sparse) < 1e-12);
            let back = action.frame_inverse(l, g, sparse.amplitudes());
            assert!(StateVector::from_amplitudes(s.space(), back).unwrap().max_distance(&chi) < 1e-12);
        }
    }

    #[test]
    fn free_evolution_is_trivial() {
        let s = spin(1);
        let traj = helix(0.0, 1.0, 129);
        let chi = build_photon_state(s.space(), 1, 0).unwrap();
        let psi0 = initial_state_on(&traj, &s, &chi);
        let run = evolve_state(&psi0, &traj, &s).unwrap();
        assert_eq!(run.times.len(), 65);
        assert!(run.final_state().max_distance(&psi0) == 0.0);
        let (b, _) = extract_phases(&run, &traj, &s, Some(1.0)).unwrap();
        assert_eq!(b.total_phase, 0.0);
        assert_eq!(b.dynamical_phase, 0.0);
        assert_eq!(b.geometric_phase, 0.0);
        assert_eq!(b.closed_form_phase, Some(0.0));
    }

    #[test]
    fn helicity_eigenstates_pick_up_signed_cap_phase() {
        let s = spin(1);
        let traj = helix(PI / 4.0, 1.0, 2 * 2048 + 1);
        for sigma in [1.0, -1.0] {
            let chi = if sigma > 0.0 {
                build_photon_state(s.space(), 1, 0)
            } else {
                build_photon_state(s.space(), 0, 1)
            }
            .unwrap();
            let psi0 = initial_state_on(&traj, &s, &chi);
            // the prepared state is a helicity eigenstate along k̂(0)
            let hel = s.helicity(traj.unit(0)).unwrap();
            assert!(hel.apply(&psi0).max_distance(&psi0.scaled(Complex64::new(sigma, 0.0))) < 1e-12);
            let run = evolve_state(&psi0, &traj, &s).unwrap();
            assert!(run.max_norm_drift() < 1e-9);
            let (b, hist) = extract_phases(&run, &traj, &s, Some(sigma)).unwrap();
            assert_abs_diff_eq!(b.geometric_phase, sigma * CAP_45, epsilon = 1e-6);
            assert_abs_diff_eq!(b.dynamical_phase, 0.0, epsilon = 1e-10);
            let p = b.pancharatnam_phase.unwrap();
            assert_abs_diff_eq!(wrap_phase(p - b.total_phase), 0.0, epsilon = 1e-8);
            // the invariant-frame phase tracks the closed form at every step
            let closed = hist.closed_form.unwrap();
            for (g, c) in hist.geometric.iter().zip(&closed) {
                assert!((g - c).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn evolution_rejects_bad_inputs() {
        let s = spin(1);
        let traj = helix(PI / 4.0, 1.0, 129);
        let chi = build_photon_state(s.space(), 1, 0).unwrap();
        let unnormalized = chi.scaled(Complex64::new(2.0, 0.0));
        assert!(matches!(evolve_state(&unnormalized, &traj, &s), Err(Error::NotNormalized(_))));
        let even = helix(PI / 4.0, 1.0, 128);
        assert_eq!(evolve_state(&chi, &even, &s).unwrap_err(), Error::GridParity(128));
        // 64 samples per 10 turns: far too coarse
        let coarse = helix(PI / 4.0, 40.0, 65);
        assert!(matches!(evolve_state(&chi, &coarse, &s), Err(Error::StepGuard { .. })));
    }

    #[test]
    fn superposition_reports_no_closed_form_branch() {
        let s = spin(1);
        let traj = helix(0.8, 1.0, 513);
        let plus = build_photon_state(s.space(), 1, 0).unwrap();
        let minus = build_photon_state(s.space(), 0, 1).unwrap();
        let chi = &plus.scaled(Complex64::new(0.6, 0.0)) + &minus.scaled(Complex64::new(0.0, 0.8));
        let psi0 = initial_state_on(&traj, &s, &chi);
        let run = evolve_state(&psi0, &traj, &s).unwrap();
        let (b, hist) = extract_phases(&run, &traj, &s, None).unwrap();
        assert!(b.closed_form_phase.is_none());
        assert!(hist.closed_form.is_none());
        assert_eq!(b.geometric_phase, b.geometric_phase_raw);
    }
}
