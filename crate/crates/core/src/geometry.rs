//! Fibre paths, their unit tangent trajectories, and spherical angles of the tangent.
//!
//! The tangent `k̂(t)` is the photon propagation direction. Its polar angle `λ`
//! is measured from the fixed 3-axis and its azimuth `γ` is unwrapped so that
//! multi-turn traces accumulate beyond 2π.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

#[allow(unused_imports)] // float math comes from std when it is linked
use num_traits::Float;

use crate::calculus::{differentiate_vec3, integrate};
use crate::vec3::{self, cross, dot, norm, normalize, scale, sub, Mat3, Vec3};
use crate::{Error, Result};

/// Below this `sin λ` the azimuth is frozen (pole convention).
pub const POLE_EPS: f64 = 1e-9;
/// Largest `‖k̂(T) − k̂(0)‖` accepted for a closed trace.
pub const CLOSURE_TOL: f64 = 1e-6;
const MIN_PATH_SAMPLES: usize = 8;
const MIN_HELIX_SAMPLES: usize = 64;

/// Circular helix about the 3-axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Helix {
    pub radius: f64,
    /// Rise per turn; `+∞` is the straight-fibre limit and 0 a planar circle.
    pub pitch_per_turn: f64,
    pub turns: f64,
    pub samples: usize,
}

impl Helix {
    /// Polar angle of the tangent, `atan2(2π r, p)`.
    pub fn tangent_angle(&self) -> f64 {
        (TAU * self.radius).atan2(self.pitch_per_turn)
    }

    /// Helix whose tangent makes the polar angle `lambda ∈ [0, π/2]` with the axis.
    pub fn with_tangent_angle(radius: f64, lambda: f64, turns: f64, samples: usize) -> Result<Self> {
        if !(0.0..=PI / 2.0).contains(&lambda) {
            return Err(Error::InvalidGeometry(format!("helix tangent angle {lambda} outside [0, pi/2]")));
        }
        let pitch = if lambda == 0.0 {
            f64::INFINITY
        } else if lambda == PI / 2.0 {
            0.0
        } else {
            TAU * radius / lambda.tan()
        };
        let helix = Self { radius, pitch_per_turn: pitch, turns, samples };
        helix.validate()?;
        Ok(helix)
    }

    fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::InvalidGeometry(format!("helix radius must be positive, got {}", self.radius)));
        }
        if !(self.turns > 0.0 && self.turns.is_finite()) {
            return Err(Error::InvalidGeometry(format!("helix turns must be positive, got {}", self.turns)));
        }
        if !(self.pitch_per_turn >= 0.0) {
            return Err(Error::InvalidGeometry(format!("helix pitch must be non-negative, got {}", self.pitch_per_turn)));
        }
        if self.samples < MIN_HELIX_SAMPLES {
            return Err(Error::InvalidGeometry(format!(
                "helix needs at least {MIN_HELIX_SAMPLES} samples, got {}",
                self.samples
            )));
        }
        Ok(())
    }

    /// Winding-angle grid `θ_i ∈ [0, 2π·turns]`, used as the evolution parameter.
    pub fn times(&self) -> Vec<f64> {
        let end = TAU * self.turns;
        let last = (self.samples - 1) as f64;
        (0..self.samples).map(|i| end * i as f64 / last).collect()
    }

    /// Point at winding angle `theta`. Not available in the straight limit.
    pub fn point(&self, theta: f64) -> Option<Vec3> {
        self.pitch_per_turn.is_finite().then(|| {
            let (s, c) = theta.sin_cos();
            [self.radius * c, self.radius * s, self.pitch_per_turn * theta / TAU]
        })
    }

    /// Unit tangent and its derivative with respect to `theta`.
    pub fn tangent(&self, theta: f64) -> (Vec3, Vec3) {
        let (sl, cl) = self.tangent_angle().sin_cos();
        let (s, c) = theta.sin_cos();
        ([-sl * s, sl * c, cl], [-sl * c, -sl * s, 0.0])
    }
}

/// Ordered 3-D samples of a fibre against a strictly increasing parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    times: Vec<f64>,
    points: Vec<Vec3>,
}

impl SampledPath {
    pub fn new(times: Vec<f64>, points: Vec<Vec3>) -> Result<Self> {
        if times.len() != points.len() {
            return Err(Error::InvalidGeometry(format!(
                "{} times but {} points",
                times.len(),
                points.len()
            )));
        }
        if times.len() < MIN_PATH_SAMPLES {
            return Err(Error::InvalidGeometry(format!(
                "path needs at least {MIN_PATH_SAMPLES} samples, got {}",
                times.len()
            )));
        }
        check_increasing(&times)?;
        for (i, w) in points.windows(2).enumerate() {
            if w[0] == w[1] {
                return Err(Error::DegeneratePath(i, i + 1));
            }
        }
        Ok(Self { times, points })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }
}

fn check_increasing(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidGeometry("non-finite time sample".into()));
    }
    if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGeometry(format!("times not strictly increasing at sample {}", i + 1)));
    }
    Ok(())
}

/// Geometry of a fibre.
#[derive(Debug, Clone, PartialEq)]
pub enum FiberPath {
    Helix(Helix),
    Sampled(SampledPath),
}

/// Helix about the 3-axis with `samples` points over `turns` windings.
pub fn make_helix(radius: f64, pitch_per_turn: f64, turns: f64, samples: usize) -> Result<FiberPath> {
    let helix = Helix { radius, pitch_per_turn, turns, samples };
    helix.validate()?;
    Ok(FiberPath::Helix(helix))
}

impl FiberPath {
    pub fn sampled(times: Vec<f64>, points: Vec<Vec3>) -> Result<Self> {
        Ok(FiberPath::Sampled(SampledPath::new(times, points)?))
    }

    pub fn len(&self) -> usize {
        match self {
            FiberPath::Helix(h) => h.samples,
            FiberPath::Sampled(p) => p.times.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Sampled propagation vectors `k(t)` with their time derivatives.
///
/// Vectors produced by [`tangent_trajectory`] are unit length; [`Self::scaled`]
/// and [`Self::from_fn`] allow other magnitudes, which the phase formulas are
/// insensitive to.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentTrajectory {
    times: Vec<f64>,
    vectors: Vec<Vec3>,
    derivatives: Vec<Vec3>,
}

impl TangentTrajectory {
    pub fn new(times: Vec<f64>, vectors: Vec<Vec3>, derivatives: Vec<Vec3>) -> Result<Self> {
        if times.len() != vectors.len() || times.len() != derivatives.len() || times.len() < 2 {
            return Err(Error::InvalidGeometry("trajectory arrays must share a length of at least 2".into()));
        }
        check_increasing(&times)?;
        if let Some(i) = vectors.iter().position(|v| !(norm(*v) > 0.0 && norm(*v).is_finite())) {
            return Err(Error::InvalidGeometry(format!("zero or non-finite propagation vector at sample {i}")));
        }
        Ok(Self { times, vectors, derivatives })
    }

    /// Samples `k(t)` and `dk/dt` from a closure.
    pub fn from_fn<F>(times: Vec<f64>, f: F) -> Result<Self>
    where
        F: Fn(f64) -> (Vec3, Vec3),
    {
        let (vectors, derivatives) = times.iter().map(|&t| f(t)).unzip();
        Self::new(times, vectors, derivatives)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn vectors(&self) -> &[Vec3] {
        &self.vectors
    }

    pub fn derivatives(&self) -> &[Vec3] {
        &self.derivatives
    }

    /// Same direction history with every `k` multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            times: self.times.clone(),
            vectors: self.vectors.iter().map(|v| scale(*v, factor)).collect(),
            derivatives: self.derivatives.iter().map(|v| scale(*v, factor)).collect(),
        }
    }

    /// Same trajectory seen from a rotated frame.
    pub fn rotated(&self, rotation: &Mat3) -> Self {
        Self {
            times: self.times.clone(),
            vectors: self.vectors.iter().map(|v| vec3::mat_vec(rotation, *v)).collect(),
            derivatives: self.derivatives.iter().map(|v| vec3::mat_vec(rotation, *v)).collect(),
        }
    }

    /// Rotated so that `k̂(0) = ẑ`.
    pub fn aligned(&self) -> Self {
        self.rotated(&alignment_rotation(self.unit(0)))
    }

    /// Index of the grid point at `t`.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let (first, last) = (self.times[0], self.times[self.len() - 1]);
        let tol = 1e-12 * (1.0 + first.abs().max(last.abs()));
        if t < first - tol || t > last + tol || !t.is_finite() {
            return Err(Error::TimeOutOfRange(t));
        }
        let i = self.times.partition_point(|&s| s < t - tol);
        if i < self.len() && (self.times[i] - t).abs() <= tol {
            Ok(i)
        } else {
            Err(Error::OffGrid(t))
        }
    }

    /// `k̂` at sample `i`.
    pub fn unit(&self, i: usize) -> Vec3 {
        scale(self.vectors[i], 1.0 / norm(self.vectors[i]))
    }

    /// `dk̂/dt = k̇/|k| − k (k·k̇)/|k|³` at sample `i`.
    pub fn unit_derivative(&self, i: usize) -> Vec3 {
        let k = self.vectors[i];
        let kd = self.derivatives[i];
        let n = norm(k);
        sub(scale(kd, 1.0 / n), scale(k, dot(k, kd) / (n * n * n)))
    }

    /// `(k × k̇)/k²`, the field that multiplies `S` in the effective Hamiltonian.
    pub fn field(&self, i: usize) -> Vec3 {
        let k = self.vectors[i];
        scale(cross(k, self.derivatives[i]), 1.0 / dot(k, k))
    }
}

/// Minimal rotation taking `k0` to `ẑ`; a half turn about `x̂` when `k0 = −ẑ`.
pub fn alignment_rotation(k0: Vec3) -> Mat3 {
    let z = [0.0, 0.0, 1.0];
    let axis = cross(k0, z);
    let s = norm(axis);
    let c = dot(k0, z);
    if s < 1e-15 {
        let angle = if c > 0.0 { 0.0 } else { PI };
        return vec3::rotation([1.0, 0.0, 0.0], angle);
    }
    vec3::rotation(scale(axis, 1.0 / s), s.atan2(c))
}

/// Unit tangent trajectory of a fibre, optionally rotated so that `k̂(0) = ẑ`.
///
/// Helices use their closed-form tangent; sampled paths use five-point
/// differences of the points and then of the normalized tangents.
pub fn tangent_trajectory(path: &FiberPath, frame_align: bool) -> Result<TangentTrajectory> {
    let traj = match path {
        FiberPath::Helix(h) => TangentTrajectory::from_fn(h.times(), |t| h.tangent(t))?,
        FiberPath::Sampled(p) => {
            let raw = differentiate_vec3(&p.times, &p.points);
            let mut units = Vec::with_capacity(raw.len());
            for (i, d) in raw.iter().enumerate() {
                let u = normalize(*d).ok_or(Error::DegeneratePath(i, i))?;
                units.push(u);
            }
            let derivatives = differentiate_vec3(&p.times, &units);
            TangentTrajectory::new(p.times.clone(), units, derivatives)?
        }
    };
    Ok(if frame_align { traj.aligned() } else { traj })
}

/// `max_t ‖k̇ + k × ((k × k̇)/k²)‖` over the samples.
pub fn motion_identity_residual(traj: &TangentTrajectory) -> f64 {
    (0..traj.len())
        .map(|i| {
            let kd = traj.derivatives[i];
            norm(vec3::add(kd, cross(traj.vectors[i], traj.field(i))))
        })
        .fold(0.0, f64::max)
}

/// Polar angle `λ(t)`, unwrapped azimuth `γ(t)` and `γ̇(t)` of a tangent trace.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleTrajectory {
    pub times: Vec<f64>,
    pub lambda: Vec<f64>,
    pub gamma: Vec<f64>,
    pub gamma_dot: Vec<f64>,
}

impl AngleTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `(sin λ cos γ, sin λ sin γ, cos λ)` at sample `i`.
    pub fn tangent(&self, i: usize) -> Vec3 {
        vec3::from_angles(self.lambda[i], self.gamma[i])
    }

    /// `‖k̂(T) − k̂(0)‖`.
    pub fn closure_gap(&self) -> f64 {
        norm(sub(self.tangent(self.len() - 1), self.tangent(0)))
    }

    /// `γ̇ (1 − cos λ)` at every sample, with `1 − cos λ` as `2 sin²(λ/2)`.
    pub fn anholonomy_integrand(&self) -> Vec<f64> {
        self.lambda
            .iter()
            .zip(&self.gamma_dot)
            .map(|(l, gd)| {
                let s = (0.5 * l).sin();
                gd * 2.0 * s * s
            })
            .collect()
    }
}

/// Wraps an angle increment into `(−π, π]`.
fn wrap_increment(d: f64) -> f64 {
    let mut w = d - TAU * (d / TAU).round();
    if w <= -PI {
        w += TAU;
    }
    w
}

pub fn spherical_angles(traj: &TangentTrajectory) -> AngleTrajectory {
    let n = traj.len();
    let mut lambda = Vec::with_capacity(n);
    let mut gamma = Vec::with_capacity(n);
    let mut gamma_dot = Vec::with_capacity(n);
    let mut current = 0.0f64;
    let mut started = false;
    for i in 0..n {
        let k = traj.unit(i);
        let kd = traj.unit_derivative(i);
        let rho = k[0].hypot(k[1]);
        lambda.push(rho.atan2(k[2]));
        if rho < POLE_EPS {
            gamma.push(current);
            gamma_dot.push(0.0);
            continue;
        }
        let raw = k[1].atan2(k[0]);
        current = if started { current + wrap_increment(raw - current) } else { raw };
        started = true;
        gamma.push(current);
        gamma_dot.push((k[0] * kd[1] - k[1] * kd[0]) / (rho * rho));
    }
    AngleTrajectory { times: traj.times.clone(), lambda, gamma, gamma_dot }
}

/// Solid angle `∮ γ̇ (1 − cos λ) dt` of a closed tangent trace.
pub fn solid_angle(angles: &AngleTrajectory) -> Result<f64> {
    let gap = angles.closure_gap();
    if !(gap < CLOSURE_TOL) {
        return Err(Error::OpenTrace(gap));
    }
    Ok(integrate(&angles.times, &angles.anholonomy_integrand()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn helix_traj(lambda: f64, turns: f64, samples: usize) -> TangentTrajectory {
        let h = Helix::with_tangent_angle(1.0, lambda, turns, samples).unwrap();
        tangent_trajectory(&FiberPath::Helix(h), false).unwrap()
    }

    fn sampled_curve(n: usize) -> FiberPath {
        // a closed, non-planar curve with varying curvature
        let times: Vec<f64> = (0..n).map(|i| TAU * i as f64 / (n - 1) as f64).collect();
        let points = times
            .iter()
            .map(|&t| [t.cos() + 0.3 * (2.0 * t).cos(), t.sin() - 0.2 * (3.0 * t).sin(), 0.5 * (2.0 * t).sin()])
            .collect();
        FiberPath::sampled(times, points).unwrap()
    }

    #[test]
    fn helix_tangent_angle() {
        let h = match make_helix(1.0, TAU, 1.0, 128).unwrap() {
            FiberPath::Helix(h) => h,
            _ => unreachable!(),
        };
        // tan λ = 2πr / p = 1
        assert_abs_diff_eq!(h.tangent_angle(), PI / 4.0, epsilon = 1e-15);
        let straightish = Helix { radius: 1.0, pitch_per_turn: 1e6, turns: 1.0, samples: 64 };
        assert!(straightish.tangent_angle() < 1e-5);
        let flat = Helix { radius: 1.0, pitch_per_turn: 0.0, turns: 1.0, samples: 64 };
        assert_eq!(flat.tangent_angle(), PI / 2.0);
    }

    #[test]
    fn helix_rejects_bad_geometry() {
        assert!(make_helix(0.0, 1.0, 1.0, 64).is_err());
        assert!(make_helix(1.0, -1.0, 1.0, 64).is_err());
        assert!(make_helix(1.0, 1.0, 0.0, 64).is_err());
        assert!(make_helix(1.0, 1.0, 1.0, 10).is_err());
        assert!(make_helix(1.0, f64::NAN, 1.0, 64).is_err());
    }

    #[test]
    fn sampled_path_validation() {
        let t: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let mut p: Vec<Vec3> = t.iter().map(|&x| [x, 0.0, 0.0]).collect();
        assert!(FiberPath::sampled(t.clone(), p.clone()).is_ok());
        p[4] = p[3];
        assert_eq!(FiberPath::sampled(t.clone(), p), Err(Error::DegeneratePath(3, 4)));
        let short: Vec<f64> = (0..5).map(|i| i as f64).collect();
        assert!(FiberPath::sampled(short.clone(), short.iter().map(|&x| [x, 0.0, 0.0]).collect()).is_err());
        let mut bad_t = t.clone();
        bad_t[2] = bad_t[1];
        assert!(FiberPath::sampled(bad_t, t.iter().map(|&x| [x, 0.0, 0.0]).collect()).is_err());
    }

    #[test]
    fn straight_segment_along_z() {
        let t: Vec<f64> = (0..16).map(|i| i as f64 * 0.1).collect();
        let path = FiberPath::sampled(t.clone(), t.iter().map(|&z| [0.0, 0.0, 2.0 * z]).collect()).unwrap();
        let traj = tangent_trajectory(&path, false).unwrap();
        for i in 0..traj.len() {
            assert!(norm(sub(traj.unit(i), [0.0, 0.0, 1.0])) < 1e-14);
        }
        let angles = spherical_angles(&traj);
        assert!(angles.lambda.iter().all(|&l| l == 0.0));
        assert!(angles.gamma.iter().all(|&g| g == 0.0));
        assert!(angles.gamma_dot.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn frame_alignment_puts_initial_tangent_on_axis() {
        let h = Helix::with_tangent_angle(1.0, PI / 4.0, 1.0, 256).unwrap();
        let traj = tangent_trajectory(&FiberPath::Helix(h), true).unwrap();
        assert!(norm(sub(traj.unit(0), [0.0, 0.0, 1.0])) < 1e-12);
        for k0 in [[0.0, 0.0, -1.0], [0.0, 0.0, 1.0], [0.6, 0.0, 0.8]] {
            let r = alignment_rotation(k0);
            assert!(norm(sub(vec3::mat_vec(&r, k0), [0.0, 0.0, 1.0])) < 1e-15);
        }
    }

    #[test]
    fn equator_circle() {
        let traj = helix_traj(PI / 2.0, 1.0, 257);
        let angles = spherical_angles(&traj);
        assert!(angles.lambda.iter().all(|&l| (l - PI / 2.0).abs() < 1e-15));
        let span = angles.gamma[angles.len() - 1] - angles.gamma[0];
        assert_abs_diff_eq!(span, TAU, epsilon = 1e-12);
        assert_abs_diff_eq!(solid_angle(&angles).unwrap(), TAU, epsilon = 1e-12);
        assert!(motion_identity_residual(&traj) < 1e-6);
    }

    #[test]
    fn two_turn_helix_azimuth() {
        let angles = spherical_angles(&helix_traj(PI / 4.0, 2.0, 513));
        assert!(angles.gamma.windows(2).all(|w| w[1] > w[0]));
        assert_abs_diff_eq!(angles.gamma[512] - angles.gamma[0], 2.0 * TAU, epsilon = 1e-12);
        assert!(angles.lambda.iter().all(|&l| (l - PI / 4.0).abs() < 1e-15));
    }

    #[test]
    fn solid_angle_values() {
        // 2π(1 − √2/2)
        let cap = solid_angle(&spherical_angles(&helix_traj(PI / 4.0, 1.0, 1025))).unwrap();
        assert_abs_diff_eq!(cap, 1.840_302_369_021_220_4, epsilon = 1e-12);
        let nil = solid_angle(&spherical_angles(&helix_traj(0.0, 1.0, 65))).unwrap();
        assert_eq!(nil, 0.0);
        let tiny = solid_angle(&spherical_angles(&helix_traj(1e-4, 1.0, 65))).unwrap();
        assert!(tiny < 1e-7);
    }

    #[test]
    fn open_trace_is_rejected() {
        let angles = spherical_angles(&helix_traj(PI / 4.0, 0.75, 129));
        match solid_angle(&angles) {
            Err(Error::OpenTrace(gap)) => assert!(gap > 0.5),
            other => panic!("expected open trace, got {other:?}"),
        }
    }

    #[test]
    fn double_traversal_doubles_solid_angle() {
        let one = solid_angle(&spherical_angles(&helix_traj(0.9, 1.0, 1025))).unwrap();
        let two = solid_angle(&spherical_angles(&helix_traj(0.9, 2.0, 2049))).unwrap();
        assert_abs_diff_eq!(two, 2.0 * one, epsilon = 1e-8);
    }

    #[test]
    fn sampled_path_residual_converges() {
        let coarse = motion_identity_residual(&tangent_trajectory(&sampled_curve(65), false).unwrap());
        let fine = motion_identity_residual(&tangent_trajectory(&sampled_curve(129), false).unwrap());
        assert!(fine > 0.0 && coarse / fine >= 2.0, "coarse {coarse}, fine {fine}");
        let dense = motion_identity_residual(&tangent_trajectory(&sampled_curve(4097), false).unwrap());
        assert!(dense < 1e-6);
    }

    #[test]
    fn helix_residual_is_tiny() {
        assert!(motion_identity_residual(&helix_traj(PI / 4.0, 1.0, 4096)) < 1e-6);
    }

    #[test]
    fn non_unit_tangents_violate_motion_identity() {
        let times: Vec<f64> = (0..64).map(|i| i as f64 / 63.0).collect();
        let traj = TangentTrajectory::from_fn(times, |t| {
            let (k, kd) = Helix::with_tangent_angle(1.0, 0.7, 1.0, 64).unwrap().tangent(t);
            let m = 1.0 + t;
            // d/dt (m k) = k + m k'
            (scale(k, m), vec3::add(k, scale(kd, m)))
        })
        .unwrap();
        assert!(motion_identity_residual(&traj) > 0.5);
    }

    #[test]
    fn index_lookup() {
        let traj = helix_traj(0.5, 1.0, 65);
        assert_eq!(traj.index_of(0.0), Ok(0));
        assert_eq!(traj.index_of(traj.times()[17]), Ok(17));
        assert_eq!(traj.index_of(TAU), Ok(64));
        assert!(matches!(traj.index_of(0.05), Err(Error::OffGrid(_))));
        assert!(matches!(traj.index_of(7.0), Err(Error::TimeOutOfRange(_))));
    }

    #[test]
    fn wrap_tie_goes_to_plus_pi() {
        assert_eq!(wrap_increment(PI), PI);
        assert_eq!(wrap_increment(-PI), PI);
        assert_abs_diff_eq!(wrap_increment(3.0 * PI / 2.0), -PI / 2.0, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn angles_reconstruct_tangents(lambda in 0.05f64..1.5, turns in 0.3f64..3.0, tilt in 0.0f64..3.0) {
            let traj = helix_traj(lambda, turns, 129).rotated(&vec3::rotation([1.0, 0.0, 0.0], tilt));
            let angles = spherical_angles(&traj);
            for i in 0..traj.len() {
                prop_assert!(norm(sub(angles.tangent(i), traj.unit(i))) < 1e-9);
            }
            prop_assert!(angles.gamma.windows(2).all(|w| (w[1] - w[0]).abs() < PI));
            // angle -> tangent -> angle
            let again = spherical_angles(&TangentTrajectory::new(
                angles.times.clone(),
                (0..angles.len()).map(|i| angles.tangent(i)).collect(),
                traj.derivatives().to_vec(),
            ).unwrap());
            for i in 0..angles.len() {
                prop_assert!((again.lambda[i] - angles.lambda[i]).abs() < 1e-9);
                prop_assert!((again.gamma[i] - angles.gamma[i]).abs() < 1e-9);
            }
        }

        #[test]
        fn solid_angle_invariant_under_axial_rotation(lambda in 0.05f64..1.5, phi in -3.0f64..3.0) {
            let traj = helix_traj(lambda, 1.0, 513);
            let base = solid_angle(&spherical_angles(&traj)).unwrap();
            let turned = solid_angle(&spherical_angles(&traj.rotated(&vec3::rotation([0.0, 0.0, 1.0], phi)))).unwrap();
            prop_assert!((base - turned).abs() < 1e-9);
        }
    }
}
