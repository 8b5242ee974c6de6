//! Named scenarios shipped with the binary.
//!
//! A built-in is a group of one or more member scenarios. Single-member groups
//! share the member's name; `vacuum-pair` runs the right- and left-handed
//! vacuum orderings side by side.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

use crate::config::{GeometrySpec, MediumSpec, ScenarioConfig, StateSpec, ToleranceSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct Builtin {
    pub name: &'static str,
    pub description: &'static str,
    pub members: Vec<ScenarioConfig>,
}

fn helix(lambda: f64, turns: f64) -> GeometrySpec {
    GeometrySpec {
        kind: "helix".into(),
        radius: Some(1.0),
        lambda: Some(lambda),
        turns: Some(turns),
        ..GeometrySpec::default()
    }
}

fn photons(n_r: i64, n_l: i64) -> StateSpec {
    StateSpec { n_r: Some(n_r), n_l: Some(n_l), amplitudes: None }
}

fn scenario(name: &str, ordering: &str, steps: i64, geometry: GeometrySpec, state: StateSpec) -> ScenarioConfig {
    ScenarioConfig {
        name: name.into(),
        ordering: ordering.into(),
        n_max: None,
        steps: Some(steps),
        out: None,
        geometry,
        state,
        tolerance: ToleranceSpec::default(),
        medium: None,
        base_dir: Default::default(),
    }
}

fn single(name: &'static str, description: &'static str, config: ScenarioConfig) -> Builtin {
    Builtin { name, description, members: vec![config] }
}

fn gyro(name: &'static str, description: &'static str, epsilon2: f64) -> Builtin {
    let mut c = scenario(name, "normal", 2048, helix(FRAC_PI_4, 1.0), photons(1, 0));
    c.medium = Some(MediumSpec { epsilon1: -1.0, epsilon2, epsilon3: 1.0, mu: 1.0, omega: 1.0 });
    single(name, description, c)
}

/// All built-ins, in listing order.
pub fn catalog() -> Vec<Builtin> {
    let mut aligned = scenario("aligned-helix", "normal", 4096, helix(FRAC_PI_4, 1.0), photons(1, 0));
    aligned.geometry.frame_align = true;
    let knot = GeometrySpec {
        kind: "torus_knot".into(),
        p: Some(2),
        q: Some(3),
        major_radius: Some(2.0),
        minor_radius: Some(0.5),
        ..GeometrySpec::default()
    };
    vec![
        single(
            "chiao-helix-45",
            "one-turn helix at 45 degrees, one right-handed photon",
            scenario("chiao-helix-45", "normal", 8192, helix(FRAC_PI_4, 1.0), photons(1, 0)),
        ),
        single(
            "chiao-helix-45-left",
            "same helix, one left-handed photon",
            scenario("chiao-helix-45-left", "normal", 8192, helix(FRAC_PI_4, 1.0), photons(0, 1)),
        ),
        Builtin {
            name: "vacuum-pair",
            description: "vacuum at 60 degrees, right- and left-handed zero-point terms",
            members: vec![
                scenario("vacuum-pair-R", "nonnormal_R", 4096, helix(FRAC_PI_3, 1.0), photons(0, 0)),
                scenario("vacuum-pair-L", "nonnormal_L", 4096, helix(FRAC_PI_3, 1.0), photons(0, 0)),
            ],
        },
        single(
            "multiphoton-21",
            "two right- and one left-handed photon at 60 degrees",
            scenario("multiphoton-21", "normal", 4096, helix(FRAC_PI_3, 1.0), photons(2, 1)),
        ),
        single(
            "circle-equator",
            "planar circle, tangent on the equator",
            scenario("circle-equator", "normal", 4096, helix(FRAC_PI_2, 1.0), photons(1, 0)),
        ),
        single(
            "helix-two-turns",
            "two turns at 30 degrees",
            scenario("helix-two-turns", "normal", 4096, helix(FRAC_PI_6, 2.0), photons(1, 0)),
        ),
        single("aligned-helix", "45 degree helix rotated so the trace starts at the pole", aligned),
        single(
            "torus-knot-23",
            "(2,3) torus knot through the numerical-derivative path",
            scenario("torus-knot-23", "normal", 4096, knot, photons(1, 0)),
        ),
        gyro("gyro-plus", "45 degree helix with a gyrotropic medium, epsilon2 = +2", 2.0),
        gyro("gyro-minus", "45 degree helix with a gyrotropic medium, epsilon2 = -2", -2.0),
    ]
}

pub fn find(name: &str) -> Option<Builtin> {
    catalog().into_iter().find(|b| b.name == name)
}
