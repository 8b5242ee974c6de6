//! Runs one scenario end to end and writes its artifacts.
//!
//! Output directory layout:
//!
//! * `run.csv`: `t,lambda,gamma,phi_closed,phi_total,phi_dyn,phi_geo,norm,lvn_residual`,
//!   one row per RK4 step boundary (`phi_closed` empty when no closed form applies);
//! * `angles.csv`: `t,lambda,gamma,gamma_dot` at every trajectory sample;
//! * `initial_state.json`, `final_state.json`: state dumps (see [`crate::formats`]);
//! * `config.toml`: the effective configuration;
//! * `summary.json`: a [`RunReport`].

use std::path::Path;

use gphase_core::fock::{build_photon_state, s3_split, spin_fixed, FockSpace, Ordering, StateVector};
use gphase_core::geometry::{
    motion_identity_residual, spherical_angles, tangent_trajectory, TangentTrajectory, CLOSURE_TOL,
};
use gphase_core::media::{classify, refractive_indices};
use gphase_core::phase::{
    berry_phase_cyclic, cumulative_anholonomy, evolve_state, extract_phases, initial_state_on, LvnChecker,
    PhaseBreakdown, PhaseHistory, STEP_GUARD,
};
use gphase_core::Complex64;
use serde::Serialize;

use crate::config::{Geometry, Scenario, ScenarioConfig};
use crate::formats::{angles_csv, fmt_f64, to_json, write_atomic, StateDump};
use crate::RunError;

/// `χ` counts as an `S3` eigenstate when `‖S3 χ − s χ‖_max` is below this.
pub const EIGEN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub name: String,
    pub ordering: &'static str,
    pub n_max: usize,
    pub dimension: usize,
    pub rk4_steps: usize,
    pub samples: usize,
    pub geometry: GeometrySummary,
    pub state: StateSummary,
    pub phases: PhaseSummary,
    pub guards: GuardSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub medium: Option<MediumSummary>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometrySummary {
    pub kind: &'static str,
    pub frame_align: bool,
    pub t_start: f64,
    pub t_end: f64,
    pub closure_gap: f64,
    pub closed: bool,
    pub anholonomy_integral: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateSummary {
    /// `[n_r, n_l, re, im]` per component, after normalization.
    pub components: Vec<(usize, usize, f64, f64)>,
    /// `⟨χ|S3|χ⟩` in normal order, when `χ` is an eigenstate.
    pub s3_normal: Option<f64>,
    /// Same for the configured ordering.
    pub s3_selected: Option<f64>,
    pub eigen_residual_normal: f64,
    pub eigen_residual_selected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseSummary {
    pub total_phase: f64,
    pub dynamical_phase: f64,
    pub geometric_phase: f64,
    pub geometric_phase_raw: f64,
    pub geometric_phase_mod_2pi: f64,
    /// Closed form with the configured ordering.
    pub closed_form_phase: Option<f64>,
    /// Closed form with normal order: the value the numerical route reproduces.
    pub closed_form_normal: Option<f64>,
    /// `|geometric_phase − closed_form_normal|`.
    pub closed_form_gap: Option<f64>,
    pub anholonomy_integral: f64,
    pub vacuum_phase_r: f64,
    pub vacuum_phase_l: f64,
    pub pancharatnam_phase: Option<f64>,
    pub final_overlap: f64,
    /// `turns × 2π(1 − cos λ) × ⟨S3⟩` for whole-turn helices.
    pub berry_reference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GuardSummary {
    pub max_h_dt: f64,
    pub max_h_dt_limit: f64,
    pub norm_drift: f64,
    pub lvn_residual_max: f64,
    pub motion_identity_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MediumSummary {
    pub epsilon1: f64,
    pub epsilon2: f64,
    pub epsilon3: f64,
    pub mu: f64,
    pub omega: f64,
    pub n_plus_squared: f64,
    pub n_minus_squared: f64,
    /// `n₊² + n₋² − 2μ ε1`.
    pub sum_identity_residual: f64,
    /// `n₊² − n₋² − 2μ ε2`.
    pub difference_identity_residual: f64,
    pub verdicts: Vec<VerdictSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictSummary {
    pub handedness: &'static str,
    pub n_squared: f64,
    pub status: &'static str,
    pub propagation_constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: &'static str, value: f64, limit: f64) -> Self {
        Self { name, value, limit, passed: value <= limit }
    }
}

/// A computed run, before anything touches the disk.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub run_csv: String,
    pub angles_csv: String,
    pub initial_state: StateVector,
    pub final_state: StateVector,
}

fn kind_name(g: &Geometry) -> &'static str {
    match g {
        Geometry::Helix { .. } => "helix",
        Geometry::TorusKnot(_) => "torus_knot",
        Geometry::Sampled(_) => "sampled",
    }
}

/// Samples the scenario's path and returns its unit-tangent trajectory.
pub fn scenario_trajectory(scenario: &Scenario) -> Result<TangentTrajectory, RunError> {
    Ok(tangent_trajectory(&scenario.fiber_path()?, scenario.frame_align)?)
}

fn eigen_expectation(chi: &StateVector, op: &gphase_core::fock::OperatorMatrix) -> (f64, f64) {
    let s = chi.expectation(op).re;
    let image = op.apply(chi);
    let residual = image.max_distance(&chi.scaled(Complex64::new(s, 0.0)));
    (s, residual)
}

/// The prepared state `χ` in the `S3` frame, normalized.
pub fn prepare_state(scenario: &Scenario, space: FockSpace) -> Result<StateVector, RunError> {
    let norm = scenario.components.iter().map(|c| c.re * c.re + c.im * c.im).sum::<f64>().sqrt();
    let mut chi = StateVector::zeros(space);
    for c in &scenario.components {
        let basis = build_photon_state(space, c.n_r, c.n_l)?;
        chi = &chi + &basis.scaled(Complex64::new(c.re / norm, c.im / norm));
    }
    Ok(chi)
}

/// Runs `scenario` on an explicit trajectory. Phases are insensitive to the
/// magnitude of the trajectory's vectors.
pub fn run_on_trajectory(scenario: &Scenario, traj: &TangentTrajectory) -> Result<RunOutput, RunError> {
    let space = FockSpace::new(3, scenario.n_max)?;
    let spin = spin_fixed(space)?;
    let split = s3_split(space);
    let chi = prepare_state(scenario, space)?;
    let (s_norm, r_norm) = eigen_expectation(&chi, &split.select(Ordering::Normal));
    let (s_sel, r_sel) = eigen_expectation(&chi, &split.select(scenario.ordering));
    let s3_normal = (r_norm < EIGEN_TOL).then_some(s_norm);
    let s3_selected = (r_sel < EIGEN_TOL).then_some(s_sel);

    let psi0 = initial_state_on(traj, &spin, &chi);
    let mut evolution = evolve_state(&psi0, traj, &spin)?;
    if scenario.n_max < 2 {
        // The bounded subspace of an n_max = 1 space is the vacuum alone; the
        // operator identity is checked one rung higher instead.
        let checker = LvnChecker::new(&spin_fixed(FockSpace::new(3, 2)?)?);
        evolution.lvn_residuals = evolution.sample_indices.iter().map(|&i| checker.residual(traj, i)).collect();
    }
    let (breakdown, history) = extract_phases(&evolution, traj, &spin, s3_normal)?;

    let angles = spherical_angles(traj);
    let anholonomy = cumulative_anholonomy(&angles);
    let motion = motion_identity_residual(traj);
    let closure_gap = angles.closure_gap();
    let berry_reference = match (&scenario.geometry, s3_selected) {
        (Geometry::Helix { turns, .. }, Some(s)) if turns.fract() == 0.0 && !scenario.frame_align => {
            Some(turns * berry_phase_cyclic(angles.lambda[0], s)?)
        }
        _ => None,
    };

    let phases = phase_summary(&breakdown, s_sel, s3_selected, berry_reference);
    let guards = GuardSummary {
        max_h_dt: evolution.guard_metric,
        max_h_dt_limit: STEP_GUARD,
        norm_drift: evolution.max_norm_drift(),
        lvn_residual_max: evolution.max_lvn_residual(),
        motion_identity_residual: motion,
    };
    let tol = &scenario.tolerance;
    let mut checks = Vec::new();
    if let Some(gap) = phases.closed_form_gap {
        checks.push(Check::at_most("geometric_phase_vs_closed_form", gap, tol.phase));
    }
    checks.push(Check::at_most("norm_drift", guards.norm_drift, tol.norm));
    checks.push(Check::at_most("lvn_residual", guards.lvn_residual_max, tol.lvn));
    checks.push(Check::at_most("motion_identity_residual", motion, tol.motion));
    let passed = checks.iter().all(|c| c.passed);

    let medium = match scenario.medium {
        None => None,
        Some((m, omega)) => {
            let (np, nm) = refractive_indices(&m);
            let (vp, vm) = classify(&m, omega)?;
            let verdicts = [vp, vm]
                .iter()
                .map(|v| VerdictSummary {
                    handedness: v.handedness.as_str(),
                    n_squared: v.n_squared,
                    status: v.status.as_str(),
                    propagation_constant: v.propagation_constant,
                })
                .collect();
            Some(MediumSummary {
                epsilon1: m.epsilon1,
                epsilon2: m.epsilon2,
                epsilon3: m.epsilon3,
                mu: m.mu,
                omega,
                n_plus_squared: np,
                n_minus_squared: nm,
                sum_identity_residual: np + nm - 2.0 * m.mu * m.epsilon1,
                difference_identity_residual: np - nm - 2.0 * m.mu * m.epsilon2,
                verdicts,
            })
        }
    };

    let last = angles.len() - 1;
    let report = RunReport {
        name: scenario.name.clone(),
        ordering: scenario.ordering.as_str(),
        n_max: scenario.n_max,
        dimension: space.dim(),
        rk4_steps: evolution.times.len() - 1,
        samples: traj.len(),
        geometry: GeometrySummary {
            kind: kind_name(&scenario.geometry),
            frame_align: scenario.frame_align,
            t_start: angles.times[0],
            t_end: angles.times[last],
            closure_gap,
            closed: closure_gap < CLOSURE_TOL,
            anholonomy_integral: anholonomy[last],
        },
        state: StateSummary {
            components: scenario
                .components
                .iter()
                .zip(component_amplitudes(scenario))
                .map(|(c, z)| (c.n_r, c.n_l, z.re, z.im))
                .collect(),
            s3_normal,
            s3_selected,
            eigen_residual_normal: r_norm,
            eigen_residual_selected: r_sel,
        },
        phases,
        guards,
        medium,
        checks,
        passed,
    };
    let run_csv = run_table(&evolution.times, &evolution.sample_indices, &evolution.norms, &evolution.lvn_residuals, &history, &anholonomy, s3_selected);
    Ok(RunOutput {
        report,
        run_csv,
        angles_csv: angles_csv(&angles),
        initial_state: psi0,
        final_state: evolution.final_state().clone(),
    })
}

fn component_amplitudes(scenario: &Scenario) -> Vec<Complex64> {
    let norm = scenario.components.iter().map(|c| c.re * c.re + c.im * c.im).sum::<f64>().sqrt();
    scenario.components.iter().map(|c| Complex64::new(c.re / norm, c.im / norm)).collect()
}

fn phase_summary(b: &PhaseBreakdown, s_sel: f64, s3_selected: Option<f64>, berry: Option<f64>) -> PhaseSummary {
    let a = b.anholonomy_integral;
    let closed_form_phase = s3_selected.map(|_| s_sel * a);
    PhaseSummary {
        total_phase: b.total_phase,
        dynamical_phase: b.dynamical_phase,
        geometric_phase: b.geometric_phase,
        geometric_phase_raw: b.geometric_phase_raw,
        geometric_phase_mod_2pi: b.geometric_phase_mod_2pi,
        closed_form_phase,
        closed_form_normal: b.closed_form_phase,
        closed_form_gap: b.closed_form_phase.map(|c| (b.geometric_phase - c).abs()),
        anholonomy_integral: a,
        vacuum_phase_r: b.vacuum_phase_r,
        vacuum_phase_l: b.vacuum_phase_l,
        pancharatnam_phase: b.pancharatnam_phase,
        final_overlap: b.final_overlap,
        berry_reference: berry,
    }
}

#[allow(clippy::too_many_arguments)]
fn run_table(
    times: &[f64],
    indices: &[usize],
    norms: &[f64],
    lvn: &[f64],
    history: &PhaseHistory,
    anholonomy: &[f64],
    s3_selected: Option<f64>,
) -> String {
    let mut out = String::from("t,lambda,gamma,phi_closed,phi_total,phi_dyn,phi_geo,norm,lvn_residual\n");
    for (j, &i) in indices.iter().enumerate() {
        let closed = s3_selected.map(|s| fmt_f64(s * anholonomy[i])).unwrap_or_default();
        let row = [
            fmt_f64(times[j]),
            fmt_f64(history.lambda[j]),
            fmt_f64(history.gamma[j]),
            closed,
            fmt_f64(history.total[j]),
            fmt_f64(history.dynamical[j]),
            fmt_f64(history.geometric[j]),
            fmt_f64(norms[j]),
            fmt_f64(lvn[j]),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Writes every artifact of `output` into `dir`.
pub fn write_outputs(dir: &Path, config: &ScenarioConfig, output: &RunOutput) -> Result<(), RunError> {
    write_atomic(&dir.join("run.csv"), &output.run_csv)?;
    write_atomic(&dir.join("angles.csv"), &output.angles_csv)?;
    write_atomic(&dir.join("initial_state.json"), &to_json(&StateDump::from_state(&output.initial_state)))?;
    write_atomic(&dir.join("final_state.json"), &to_json(&StateDump::from_state(&output.final_state)))?;
    let mut effective = config.clone();
    effective.out = None;
    write_atomic(&dir.join("config.toml"), &effective.to_toml())?;
    write_atomic(&dir.join("summary.json"), &to_json(&output.report))
}

/// Validates, runs and writes one scenario under `dir`.
pub fn run_scenario(config: &ScenarioConfig, dir: &Path) -> Result<RunReport, RunError> {
    let scenario = config.validate()?;
    let traj = scenario_trajectory(&scenario)?;
    let output = run_on_trajectory(&scenario, &traj)?;
    write_outputs(dir, config, &output)?;
    Ok(output.report)
}

/// Summary of a multi-member built-in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupReport {
    pub name: String,
    pub members: Vec<GroupMember>,
    /// Sum of the members' configured-ordering closed forms.
    pub closed_form_sum: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupMember {
    pub name: String,
    pub ordering: &'static str,
    pub closed_form_phase: Option<f64>,
    pub geometric_phase: f64,
    pub passed: bool,
}

pub fn group_report(name: &str, reports: &[RunReport]) -> GroupReport {
    let members: Vec<GroupMember> = reports
        .iter()
        .map(|r| GroupMember {
            name: r.name.clone(),
            ordering: r.ordering,
            closed_form_phase: r.phases.closed_form_phase,
            geometric_phase: r.phases.geometric_phase,
            passed: r.passed,
        })
        .collect();
    let closed_form_sum = members.iter().map(|m| m.closed_form_phase).sum::<Option<f64>>();
    GroupReport { name: name.into(), passed: members.iter().all(|m| m.passed), members, closed_form_sum }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use std::f64::consts::{FRAC_PI_3, PI, TAU};

    fn small(name: &str) -> Scenario {
        let mut c = builtin::find(name).unwrap().members.remove(0);
        c.steps = Some(512);
        c.validate().unwrap()
    }

    fn run(s: &Scenario) -> RunOutput {
        run_on_trajectory(s, &scenario_trajectory(s).unwrap()).unwrap()
    }

    #[test]
    fn helix_run_reports_consistent_phases() {
        let out = run(&small("chiao-helix-45"));
        let p = &out.report.phases;
        let cap = TAU * (1.0 - (PI / 4.0).cos());
        assert!((p.closed_form_phase.unwrap() - cap).abs() < 1e-12);
        assert!(p.closed_form_gap.unwrap() < 1e-4);
        assert!(p.dynamical_phase.abs() < 1e-8, "{}", p.dynamical_phase);
        assert!((p.berry_reference.unwrap() - cap).abs() < 1e-12);
        assert!(out.report.passed);
        assert_eq!(out.run_csv.lines().count(), 514);
        assert_eq!(out.angles_csv.lines().count(), 1026);
    }

    #[test]
    fn vacuum_orderings_report_half_anholonomy() {
        let mut s = small("chiao-helix-45");
        s.components = vec![crate::config::Component { n_r: 0, n_l: 0, re: 1.0, im: 0.0 }];
        s.ordering = Ordering::NonNormalR;
        let r = run(&s).report;
        let a = r.phases.anholonomy_integral;
        assert_eq!(r.phases.closed_form_phase, Some(0.5 * a));
        assert_eq!(r.phases.closed_form_normal, Some(0.0));
        s.ordering = Ordering::NonNormalL;
        assert_eq!(run(&s).report.phases.closed_form_phase, Some(-0.5 * a));
    }

    #[test]
    fn superposition_has_no_closed_form() {
        let mut s = small("chiao-helix-45");
        s.components = vec![
            crate::config::Component { n_r: 1, n_l: 0, re: 0.6, im: 0.0 },
            crate::config::Component { n_r: 0, n_l: 1, re: 0.0, im: 0.8 },
        ];
        let out = run(&s);
        assert_eq!(out.report.phases.closed_form_phase, None);
        assert!(!out.report.checks.iter().any(|c| c.name == "geometric_phase_vs_closed_form"));
        assert!(out.run_csv.lines().nth(1).unwrap().contains(",,"));
    }

    #[test]
    fn step_guard_trips_on_coarse_grid() {
        let mut s = small("multiphoton-21");
        s.steps = 32;
        s.geometry = Geometry::Helix { radius: 1.0, pitch_per_turn: 0.0, turns: 8.0 };
        let err = run_on_trajectory(&s, &scenario_trajectory(&s).unwrap()).unwrap_err();
        assert_eq!(err.kind(), "step_guard");
    }

    #[test]
    fn gyro_summary() {
        let r = run(&small("gyro-plus")).report;
        let m = r.medium.unwrap();
        assert_eq!((m.n_plus_squared, m.n_minus_squared), (1.0, -3.0));
        assert_eq!(m.sum_identity_residual, 0.0);
        assert_eq!(m.difference_identity_residual, 0.0);
        assert_eq!(m.verdicts[0].status, "propagating");
        assert_eq!(m.verdicts[1].status, "evanescent");
        assert!((m.verdicts[1].propagation_constant - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn multiphoton_is_linear() {
        let r = run(&small("multiphoton-21")).report;
        let cap = TAU * (1.0 - FRAC_PI_3.cos());
        assert!((r.phases.closed_form_phase.unwrap() - cap).abs() < 1e-12);
        assert!(r.phases.closed_form_gap.unwrap() < 1e-4);
    }

    #[test]
    fn group_sum() {
        let r = run(&small("vacuum-pair")).report;
        let mut l = r.clone();
        l.phases.closed_form_phase = r.phases.closed_form_phase.map(|x| -x);
        let g = group_report("pair", &[r, l]);
        assert_eq!(g.closed_form_sum, Some(0.0));
    }
}
