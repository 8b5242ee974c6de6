//! Scenario configuration: a strict TOML schema plus range validation.
//!
//! ```toml
//! name = "my-run"
//! ordering = "normal"        # normal | nonnormal_R | nonnormal_L | nonnormal_total
//! n_max = 2                  # optional, defaults to the largest photon count (at least 1)
//! steps = 4096               # RK4 steps for generated paths
//! out = "runs/my-run"        # optional, relative to the config file
//!
//! [geometry]
//! kind = "helix"             # helix | torus_knot | sampled
//! radius = 1.0
//! lambda = 0.7853981633974483   # or pitch_per_turn
//! turns = 1.0
//! frame_align = false
//!
//! [state]
//! n_r = 1
//! n_l = 0
//! # or: amplitudes = [{ n_r = 1, n_l = 0, re = 0.6, im = 0.0 }, ...]
//!
//! [tolerance]                # all optional
//! phase = 1e-4
//!
//! [medium]                   # optional
//! epsilon1 = -1.0
//! epsilon2 = 2.0
//! ```

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fs;
use std::path::{Path, PathBuf};

use gphase_core::fock::Ordering;
use gphase_core::geometry::{make_helix, FiberPath, Helix};
use gphase_core::media::GyrotropicMedium;
use serde::{Deserialize, Serialize};

use crate::formats::read_path_csv;
use crate::RunError;

pub const DEFAULT_STEPS: i64 = 4096;
/// Fewer steps cannot give a helix its 64-sample minimum.
pub const MIN_STEPS: i64 = 32;
/// Each RK4 step spans two trajectory intervals.
pub fn samples_for_steps(steps: usize) -> usize {
    2 * steps + 1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default = "default_ordering")]
    pub ordering: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub geometry: GeometrySpec,
    #[serde(default)]
    pub state: StateSpec,
    #[serde(default)]
    pub tolerance: ToleranceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub medium: Option<MediumSpec>,
    /// Directory that relative paths resolve against; set by [`ScenarioConfig::load`].
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_ordering() -> String {
    "normal".into()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pitch_per_turn: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub turns: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub major_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minor_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub frame_align: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_r: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_l: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<AmplitudeSpec>>,
}

impl Default for StateSpec {
    fn default() -> Self {
        Self { n_r: Some(1), n_l: Some(0), amplitudes: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeSpec {
    pub n_r: i64,
    pub n_l: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default = "default_phase_tol")]
    pub phase: f64,
    #[serde(default = "default_norm_tol")]
    pub norm: f64,
    #[serde(default = "default_lvn_tol")]
    pub lvn: f64,
    #[serde(default = "default_motion_tol")]
    pub motion: f64,
}

fn default_phase_tol() -> f64 {
    1e-4
}
fn default_norm_tol() -> f64 {
    1e-9
}
fn default_lvn_tol() -> f64 {
    1e-6
}
fn default_motion_tol() -> f64 {
    1e-6
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        Self { phase: default_phase_tol(), norm: default_norm_tol(), lvn: default_lvn_tol(), motion: default_motion_tol() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumSpec {
    pub epsilon1: f64,
    pub epsilon2: f64,
    #[serde(default = "one")]
    pub epsilon3: f64,
    #[serde(default = "one")]
    pub mu: f64,
    #[serde(default = "one")]
    pub omega: f64,
}

fn one() -> f64 {
    1.0
}

/// Closed parametric torus knot wound `p` times around the axis and `q` times
/// through the hole; its tangent goes through the numerical-derivative path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusKnot {
    pub p: u32,
    pub q: u32,
    pub major_radius: f64,
    pub minor_radius: f64,
}

impl TorusKnot {
    pub fn point(&self, t: f64) -> [f64; 3] {
        let (p, q) = (self.p as f64, self.q as f64);
        let rho = self.major_radius + self.minor_radius * (q * t).cos();
        [rho * (p * t).cos(), rho * (p * t).sin(), self.minor_radius * (q * t).sin()]
    }

    /// `samples` points over one closed period `t ∈ [0, 2π]`.
    pub fn sample(&self, samples: usize) -> (Vec<f64>, Vec<[f64; 3]>) {
        let last = (samples - 1) as f64;
        let times: Vec<f64> = (0..samples).map(|i| TAU * i as f64 / last).collect();
        let points = times.iter().map(|&t| self.point(t)).collect();
        (times, points)
    }
}

/// A validated geometry, before sampling.
#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Helix { radius: f64, pitch_per_turn: f64, turns: f64 },
    TorusKnot(TorusKnot),
    Sampled(PathBuf),
}

/// A single photon-number component `c |n_R, n_L⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub n_r: usize,
    pub n_l: usize,
    pub re: f64,
    pub im: f64,
}

/// Fully validated scenario, ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub ordering: Ordering,
    pub n_max: usize,
    pub steps: usize,
    pub geometry: Geometry,
    pub frame_align: bool,
    pub components: Vec<Component>,
    pub tolerance: ToleranceSpec,
    pub medium: Option<(GyrotropicMedium, f64)>,
}

fn invalid(msg: impl Into<String>) -> RunError {
    RunError::Config(msg.into())
}

fn positive(field: &str, value: f64) -> Result<f64, RunError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(invalid(format!("{field} must be a positive finite number, got {value}")))
    }
}

fn count(field: &str, value: i64, min: i64) -> Result<usize, RunError> {
    if value >= min {
        usize::try_from(value).map_err(|_| invalid(format!("{field} is too large: {value}")))
    } else if min == 0 {
        Err(invalid(format!("{field} must be a non-negative integer, got {value}")))
    } else {
        Err(invalid(format!("{field} must be an integer >= {min}, got {value}")))
    }
}

fn required<T>(field: &str, kind: &str, value: Option<T>) -> Result<T, RunError> {
    value.ok_or_else(|| invalid(format!("{field} is required for geometry kind \"{kind}\"")))
}

fn unused<T>(field: &str, kind: &str, value: &Option<T>) -> Result<(), RunError> {
    match value {
        Some(_) => Err(invalid(format!("{field} is not used by geometry kind \"{kind}\""))),
        None => Ok(()),
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, RunError> {
        let mut config: ScenarioConfig = toml::from_str(text).map_err(|e| invalid(e.to_string()))?;
        config.base_dir = base_dir.to_path_buf();
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml(&text, &base).map_err(|e| match e {
            RunError::Config(m) => RunError::Parse { path: path.into(), message: m },
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Command-line overrides: RK4 steps, Fock cutoff and phase tolerance.
    pub fn apply_overrides(&mut self, steps: Option<usize>, n_max: Option<usize>, phase_tol: Option<f64>) {
        if let Some(s) = steps {
            self.steps = Some(s as i64);
        }
        if let Some(n) = n_max {
            self.n_max = Some(n as i64);
        }
        if let Some(t) = phase_tol {
            self.tolerance.phase = t;
        }
    }

    /// Output directory: `out` resolved against the config directory, else `fallback/<name>`.
    pub fn output_dir(&self, fallback: &Path) -> PathBuf {
        match &self.out {
            Some(p) if p.is_absolute() => p.clone(),
            Some(p) => self.base_dir.join(p),
            None => fallback.join(&self.name),
        }
    }

    pub fn validate(&self) -> Result<Scenario, RunError> {
        if self.name.is_empty()
            || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.')
            || self.name.starts_with('.')
        {
            return Err(invalid(format!(
                "name must be non-empty and use only letters, digits, '-', '_' or '.', got {:?}",
                self.name
            )));
        }
        let ordering = Ordering::parse(&self.ordering).ok_or_else(|| {
            invalid(format!(
                "ordering must be one of normal, nonnormal_R, nonnormal_L, nonnormal_total; got {:?}",
                self.ordering
            ))
        })?;
        let steps = count("steps", self.steps.unwrap_or(DEFAULT_STEPS), MIN_STEPS)?;
        let geometry = self.geometry.validate()?;
        if matches!(geometry, Geometry::Sampled(_)) && self.steps.is_some() {
            return Err(invalid("steps is not used by geometry kind \"sampled\"; the file's samples are the grid"));
        }
        let components = self.state.validate()?;
        let photons = components.iter().map(|c| c.n_r + c.n_l).max().unwrap_or(0);
        let n_max = match self.n_max {
            Some(n) => count("n_max", n, 1)?,
            None => photons.max(1),
        };
        if photons > n_max {
            return Err(invalid(format!(
                "n_max = {n_max} cannot hold a {photons}-photon state (needs n_r + n_l <= n_max)"
            )));
        }
        let t = &self.tolerance;
        positive("tolerance.phase", t.phase)?;
        positive("tolerance.norm", t.norm)?;
        positive("tolerance.lvn", t.lvn)?;
        positive("tolerance.motion", t.motion)?;
        let medium = match &self.medium {
            None => None,
            Some(m) => Some(m.validate()?),
        };
        Ok(Scenario {
            name: self.name.clone(),
            ordering,
            n_max,
            steps,
            geometry: match geometry {
                Geometry::Sampled(p) if p.is_relative() => Geometry::Sampled(self.base_dir.join(p)),
                g => g,
            },
            frame_align: self.geometry.frame_align,
            components,
            tolerance: *t,
            medium,
        })
    }
}

impl GeometrySpec {
    fn validate(&self) -> Result<Geometry, RunError> {
        let kind = self.kind.as_str();
        match kind {
            "helix" => {
                unused("geometry.p", kind, &self.p)?;
                unused("geometry.q", kind, &self.q)?;
                unused("geometry.major_radius", kind, &self.major_radius)?;
                unused("geometry.minor_radius", kind, &self.minor_radius)?;
                unused("geometry.path", kind, &self.path)?;
                let radius = positive("geometry.radius", required("geometry.radius", kind, self.radius)?)?;
                let turns = positive("geometry.turns", required("geometry.turns", kind, self.turns)?)?;
                let pitch = match (self.lambda, self.pitch_per_turn) {
                    (Some(_), Some(_)) => {
                        return Err(invalid("geometry.lambda and geometry.pitch_per_turn are mutually exclusive"))
                    }
                    (None, None) => {
                        return Err(invalid("geometry.lambda or geometry.pitch_per_turn is required for a helix"))
                    }
                    (Some(l), None) => {
                        if !(0.0..=FRAC_PI_2).contains(&l) {
                            return Err(invalid(format!("geometry.lambda must lie in [0, pi/2], got {l}")));
                        }
                        Helix::with_tangent_angle(radius, l, turns, 64)?.pitch_per_turn
                    }
                    (None, Some(p)) => {
                        if !(p >= 0.0) {
                            return Err(invalid(format!("geometry.pitch_per_turn must be >= 0, got {p}")));
                        }
                        p
                    }
                };
                Ok(Geometry::Helix { radius, pitch_per_turn: pitch, turns })
            }
            "torus_knot" => {
                unused("geometry.radius", kind, &self.radius)?;
                unused("geometry.lambda", kind, &self.lambda)?;
                unused("geometry.pitch_per_turn", kind, &self.pitch_per_turn)?;
                unused("geometry.turns", kind, &self.turns)?;
                unused("geometry.path", kind, &self.path)?;
                let p = count("geometry.p", required("geometry.p", kind, self.p)?, 1)? as u32;
                let q = count("geometry.q", required("geometry.q", kind, self.q)?, 1)? as u32;
                let major = positive("geometry.major_radius", required("geometry.major_radius", kind, self.major_radius)?)?;
                let minor = positive("geometry.minor_radius", required("geometry.minor_radius", kind, self.minor_radius)?)?;
                if minor >= major {
                    return Err(invalid(format!(
                        "geometry.minor_radius ({minor}) must be smaller than geometry.major_radius ({major})"
                    )));
                }
                Ok(Geometry::TorusKnot(TorusKnot { p, q, major_radius: major, minor_radius: minor }))
            }
            "sampled" => {
                unused("geometry.radius", kind, &self.radius)?;
                unused("geometry.lambda", kind, &self.lambda)?;
                unused("geometry.pitch_per_turn", kind, &self.pitch_per_turn)?;
                unused("geometry.turns", kind, &self.turns)?;
                unused("geometry.p", kind, &self.p)?;
                unused("geometry.q", kind, &self.q)?;
                unused("geometry.major_radius", kind, &self.major_radius)?;
                unused("geometry.minor_radius", kind, &self.minor_radius)?;
                Ok(Geometry::Sampled(required("geometry.path", kind, self.path.clone())?))
            }
            other => Err(invalid(format!("geometry.kind must be helix, torus_knot or sampled; got {other:?}"))),
        }
    }
}

impl StateSpec {
    fn validate(&self) -> Result<Vec<Component>, RunError> {
        match (&self.amplitudes, self.n_r, self.n_l) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                Err(invalid("state.amplitudes cannot be combined with state.n_r / state.n_l"))
            }
            (Some(list), None, None) => {
                if list.is_empty() {
                    return Err(invalid("state.amplitudes must not be empty"));
                }
                let mut out: Vec<Component> = Vec::with_capacity(list.len());
                for (i, a) in list.iter().enumerate() {
                    let n_r = count(&format!("state.amplitudes[{i}].n_r"), a.n_r, 0)?;
                    let n_l = count(&format!("state.amplitudes[{i}].n_l"), a.n_l, 0)?;
                    if !(a.re.is_finite() && a.im.is_finite()) {
                        return Err(invalid(format!("state.amplitudes[{i}] must be finite")));
                    }
                    if out.iter().any(|c| c.n_r == n_r && c.n_l == n_l) {
                        return Err(invalid(format!("state.amplitudes[{i}] repeats (n_r, n_l) = ({n_r}, {n_l})")));
                    }
                    out.push(Component { n_r, n_l, re: a.re, im: a.im });
                }
                let norm2: f64 = out.iter().map(|c| c.re * c.re + c.im * c.im).sum();
                if !(norm2 > 0.0) {
                    return Err(invalid("state.amplitudes has zero norm"));
                }
                Ok(out)
            }
            (None, n_r, n_l) => {
                let n_r = count("state.n_r", n_r.unwrap_or(0), 0)?;
                let n_l = count("state.n_l", n_l.unwrap_or(0), 0)?;
                Ok(vec![Component { n_r, n_l, re: 1.0, im: 0.0 }])
            }
        }
    }
}

impl MediumSpec {
    fn validate(&self) -> Result<(GyrotropicMedium, f64), RunError> {
        for (field, v) in [
            ("medium.epsilon1", self.epsilon1),
            ("medium.epsilon2", self.epsilon2),
            ("medium.epsilon3", self.epsilon3),
            ("medium.mu", self.mu),
        ] {
            if !v.is_finite() {
                return Err(invalid(format!("{field} must be finite, got {v}")));
            }
        }
        positive("medium.mu", self.mu)?;
        positive("medium.omega", self.omega)?;
        Ok((GyrotropicMedium::new(self.epsilon1, self.epsilon2, self.epsilon3, self.mu)?, self.omega))
    }
}

impl Scenario {
    /// Samples the geometry. Generated paths get `2·steps + 1` samples.
    pub fn fiber_path(&self) -> Result<FiberPath, RunError> {
        let samples = samples_for_steps(self.steps);
        match &self.geometry {
            Geometry::Helix { radius, pitch_per_turn, turns } => {
                Ok(make_helix(*radius, *pitch_per_turn, *turns, samples)?)
            }
            Geometry::TorusKnot(k) => {
                let (times, points) = k.sample(samples);
                Ok(FiberPath::sampled(times, points)?)
            }
            Geometry::Sampled(path) => read_path_csv(path),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HELIX: &str = r#"
name = "h"
[geometry]
kind = "helix"
radius = 1.0
lambda = 0.5
turns = 1.0
"#;

    fn parse(text: &str) -> Result<ScenarioConfig, RunError> {
        ScenarioConfig::from_toml(text, Path::new("."))
    }

    fn err(text: &str) -> String {
        parse(text).unwrap_err().to_string()
    }

    #[test]
    fn defaults_fill_in() {
        let s = parse(HELIX).unwrap().validate().unwrap();
        assert_eq!(s.ordering, Ordering::Normal);
        assert_eq!(s.n_max, 1);
        assert_eq!(s.steps, 4096);
        assert_eq!(s.components, vec![Component { n_r: 1, n_l: 0, re: 1.0, im: 0.0 }]);
        assert_eq!(s.tolerance, ToleranceSpec::default());
        assert!(s.medium.is_none());
    }

    #[test]
    fn negative_n_max_names_the_field() {
        let e = err(&format!("n_max = -1\n{HELIX}"));
        assert!(e.contains("n_max"), "{e}");
        assert!(e.contains("-1"), "{e}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(err(&format!("colour = 3\n{HELIX}")).contains("colour"));
        let e = err(&HELIX.replace("turns = 1.0", "turns = 1.0\nwobble = 2"));
        assert!(e.contains("wobble"), "{e}");
    }

    #[test]
    fn range_errors_name_fields() {
        assert!(err(&HELIX.replace("radius = 1.0", "radius = -2.0")).contains("geometry.radius"));
        assert!(err(&HELIX.replace("lambda = 0.5", "lambda = 2.0")).contains("geometry.lambda"));
        assert!(err(&format!("steps = 4\n{HELIX}")).contains("steps"));
        assert!(err(&format!("ordering = \"weird\"\n{HELIX}")).contains("ordering"));
        assert!(err(&format!("{HELIX}[tolerance]\nphase = 0.0\n")).contains("tolerance.phase"));
        assert!(err(&format!("{HELIX}[medium]\nepsilon1 = 1.0\nepsilon2 = 0.0\nomega = -1.0\n")).contains("medium.omega"));
        assert!(err(&format!("n_max = 1\n{HELIX}[state]\nn_r = 1\nn_l = 1\n")).contains("n_max"));
        assert!(err(&HELIX.replace("lambda = 0.5", "lambda = 0.5\npath = \"x.csv\"")).contains("geometry.path"));
    }

    #[test]
    fn amplitude_lists() {
        let text = format!(
            "{HELIX}[state]\namplitudes = [{{ n_r = 1, n_l = 0, re = 0.6 }}, {{ n_r = 0, n_l = 1, re = 0.0, im = 0.8 }}]\n"
        );
        let s = parse(&text).unwrap().validate().unwrap();
        assert_eq!(s.components.len(), 2);
        assert_eq!(s.n_max, 1);
        let dup = text.replace("n_r = 0, n_l = 1", "n_r = 1, n_l = 0");
        assert!(err(&dup).contains("repeats"));
        let mixed = format!("{HELIX}[state]\nn_r = 1\namplitudes = [{{ n_r = 1, n_l = 0, re = 1.0 }}]\n");
        assert!(err(&mixed).contains("cannot be combined"));
    }

    #[test]
    fn overrides_and_round_trip() {
        let mut c = parse(HELIX).unwrap();
        c.apply_overrides(Some(64), Some(3), Some(1e-6));
        let s = c.validate().unwrap();
        assert_eq!((s.steps, s.n_max, s.tolerance.phase), (64, 3, 1e-6));
        let back = parse(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn output_dir_resolution() {
        let mut c = ScenarioConfig::from_toml(HELIX, Path::new("/cfg")).unwrap();
        assert_eq!(c.output_dir(Path::new("/runs")), PathBuf::from("/runs/h"));
        c.out = Some("out".into());
        assert_eq!(c.output_dir(Path::new("/runs")), PathBuf::from("/cfg/out"));
    }

    #[test]
    fn torus_knot_is_closed() {
        let k = TorusKnot { p: 2, q: 3, major_radius: 2.0, minor_radius: 0.5 };
        let (_, pts) = k.sample(65);
        let d: f64 = (0..3).map(|a| (pts[0][a] - pts[64][a]).abs()).sum();
        assert!(d < 1e-12);
    }
}
