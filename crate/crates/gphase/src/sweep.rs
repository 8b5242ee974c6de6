//! One-parameter sweeps over a scenario template.
//!
//! Entries run in parallel, each into its own `entry-NNN` directory, and the
//! table `sweep.csv` is assembled afterwards in value order:
//!
//! `index,value,closed_form,geometric_phase,total_phase,dynamical_phase,anholonomy_integral,
//! berry_reference,norm_drift,lvn_residual,passed,plus_n_squared,plus_status,minus_n_squared,minus_status`

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::config::{MediumSpec, ScenarioConfig};
use crate::formats::{fmt_f64, write_atomic};
use crate::runner::{run_scenario, RunReport};
use crate::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Lambda,
    Turns,
    NR,
    NL,
    Epsilon2,
}

impl SweepParam {
    pub const ALL: [SweepParam; 5] =
        [SweepParam::Lambda, SweepParam::Turns, SweepParam::NR, SweepParam::NL, SweepParam::Epsilon2];

    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::Lambda => "lambda",
            SweepParam::Turns => "turns",
            SweepParam::NR => "n_R",
            SweepParam::NL => "n_L",
            SweepParam::Epsilon2 => "epsilon2",
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepParam {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, RunError> {
        Self::ALL.into_iter().find(|p| p.as_str() == s).ok_or_else(|| {
            RunError::Config(format!("unknown sweep parameter {s:?}; expected lambda, turns, n_R, n_L or epsilon2"))
        })
    }
}

/// Parses `x`, `pi`, `pi/N`, `k*pi`, `k*pi/N` (optionally signed) or a plain float.
pub fn parse_value(text: &str) -> Result<f64, RunError> {
    let bad = || RunError::Config(format!("cannot parse sweep value {text:?}"));
    let t = text.trim();
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest.trim()),
        None => (1.0, t),
    };
    if !body.contains("pi") {
        let v: f64 = t.parse().map_err(|_| bad())?;
        return if v.is_finite() { Ok(v) } else { Err(bad()) };
    }
    let (numer, denom) = match body.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().map_err(|_| bad())?),
        None => (body, 1.0),
    };
    let factor = match numer.strip_suffix("pi") {
        Some("") => 1.0,
        Some(k) => k.trim().strip_suffix('*').ok_or_else(bad)?.trim().parse::<f64>().map_err(|_| bad())?,
        None => return Err(bad()),
    };
    if !(denom != 0.0 && denom.is_finite() && factor.is_finite()) {
        return Err(bad());
    }
    Ok(sign * factor * PI / denom)
}

/// Parses `PARAM=v1,v2,...`.
pub fn parse_spec(spec: &str) -> Result<(SweepParam, Vec<(String, f64)>), RunError> {
    let (name, list) = spec
        .split_once('=')
        .ok_or_else(|| RunError::Config(format!("sweep must look like PARAM=v1,v2,..., got {spec:?}")))?;
    let param: SweepParam = name.trim().parse()?;
    let values = list
        .split(',')
        .map(|v| parse_value(v).map(|x| (v.trim().to_string(), x)))
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(RunError::Config("sweep needs at least one value".into()));
    }
    Ok((param, values))
}

fn whole(param: SweepParam, value: f64) -> Result<i64, RunError> {
    if value.fract() == 0.0 && value >= 0.0 && value <= i64::MAX as f64 {
        Ok(value as i64)
    } else {
        Err(RunError::Config(format!("{param} takes non-negative integers, got {value}")))
    }
}

/// The template with `param` set to `value`.
pub fn apply(template: &ScenarioConfig, param: SweepParam, value: f64) -> Result<ScenarioConfig, RunError> {
    let mut c = template.clone();
    match param {
        SweepParam::Lambda => {
            if c.geometry.kind != "helix" {
                return Err(RunError::Config("lambda sweeps need a helix geometry".into()));
            }
            c.geometry.lambda = Some(value);
            c.geometry.pitch_per_turn = None;
        }
        SweepParam::Turns => {
            if c.geometry.kind != "helix" {
                return Err(RunError::Config("turns sweeps need a helix geometry".into()));
            }
            c.geometry.turns = Some(value);
        }
        SweepParam::NR | SweepParam::NL => {
            if c.state.amplitudes.is_some() {
                return Err(RunError::Config(format!("{param} sweeps need a state given by n_r / n_l")));
            }
            let n = whole(param, value)?;
            if param == SweepParam::NR {
                c.state.n_r = Some(n);
                c.state.n_l.get_or_insert(0);
            } else {
                c.state.n_l = Some(n);
                c.state.n_r.get_or_insert(0);
            }
        }
        SweepParam::Epsilon2 => {
            let m = c.medium.get_or_insert(MediumSpec { epsilon1: -1.0, epsilon2: 0.0, epsilon3: 1.0, mu: 1.0, omega: 1.0 });
            m.epsilon2 = value;
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub index: usize,
    pub text: String,
    pub value: f64,
    pub report: RunReport,
}

/// Directory a sweep of `template` over `param` writes into.
pub fn sweep_dir(template: &ScenarioConfig, param: SweepParam, out: &Path) -> PathBuf {
    out.join(format!("{}-sweep-{}", template.name, param))
}

/// Runs every value and writes `sweep.csv`; the first failing entry (in value
/// order) aborts the sweep before the table is written.
pub fn sweep(
    template: &ScenarioConfig,
    param: SweepParam,
    values: &[(String, f64)],
    out: &Path,
) -> Result<Vec<SweepRow>, RunError> {
    let dir = sweep_dir(template, param, out);
    let configs = values
        .iter()
        .enumerate()
        .map(|(i, (_, v))| {
            let mut c = apply(template, param, *v)?;
            c.name = format!("{}-{}-{i:03}", template.name, param);
            c.validate()?;
            Ok(c)
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    let reports: Vec<Result<RunReport, RunError>> = configs
        .par_iter()
        .enumerate()
        .map(|(i, c)| run_scenario(c, &dir.join(format!("entry-{i:03}"))))
        .collect();
    let mut rows = Vec::with_capacity(values.len());
    for (i, (r, (text, value))) in reports.into_iter().zip(values).enumerate() {
        rows.push(SweepRow { index: i, text: text.clone(), value: *value, report: r? });
    }
    write_atomic(&dir.join("sweep.csv"), &table(&rows))?;
    Ok(rows)
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn table(rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "index,value,closed_form,geometric_phase,total_phase,dynamical_phase,anholonomy_integral,\
         berry_reference,norm_drift,lvn_residual,passed,plus_n_squared,plus_status,minus_n_squared,minus_status\n",
    );
    for row in rows {
        let r = &row.report;
        let p = &r.phases;
        let mut fields = vec![
            row.index.to_string(),
            fmt_f64(row.value),
            opt(p.closed_form_phase),
            fmt_f64(p.geometric_phase),
            fmt_f64(p.total_phase),
            fmt_f64(p.dynamical_phase),
            fmt_f64(p.anholonomy_integral),
            opt(p.berry_reference),
            fmt_f64(r.guards.norm_drift),
            fmt_f64(r.guards.lvn_residual_max),
            r.passed.to_string(),
        ];
        match &r.medium {
            Some(m) => {
                for v in &m.verdicts {
                    fields.push(fmt_f64(v.n_squared));
                    fields.push(v.status.to_string());
                }
            }
            None => fields.extend(std::iter::repeat_n(String::new(), 4)),
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    #[test]
    fn value_expressions() {
        assert_eq!(parse_value("pi").unwrap(), PI);
        assert_eq!(parse_value("pi/6").unwrap(), PI / 6.0);
        assert_eq!(parse_value(" 2*pi/3 ").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse_value("-pi/4").unwrap(), -PI / 4.0);
        assert_eq!(parse_value("0.5").unwrap(), 0.5);
        assert_eq!(parse_value("-2").unwrap(), -2.0);
        for bad in ["", "pie", "pi/0", "2pi", "x*pi", "nan", "inf"] {
            assert!(parse_value(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn spec_parsing() {
        let (p, v) = parse_spec("n_R=0,1,2").unwrap();
        assert_eq!(p, SweepParam::NR);
        assert_eq!(v.iter().map(|x| x.1).collect::<Vec<_>>(), vec![0.0, 1.0, 2.0]);
        let err = parse_spec("colour=1,2").unwrap_err().to_string();
        assert!(err.contains("unknown sweep parameter"), "{err}");
        assert!(parse_spec("lambda").is_err());
    }

    #[test]
    fn apply_rejects_mismatches() {
        let knot = builtin::find("torus-knot-23").unwrap().members.remove(0);
        assert!(apply(&knot, SweepParam::Lambda, 0.3).is_err());
        let helix = builtin::find("chiao-helix-45").unwrap().members.remove(0);
        assert!(apply(&helix, SweepParam::NR, 1.5).is_err());
        let c = apply(&helix, SweepParam::NL, 2.0).unwrap();
        assert_eq!((c.state.n_r, c.state.n_l), (Some(1), Some(2)));
        let c = apply(&helix, SweepParam::Epsilon2, 3.0).unwrap();
        assert_eq!(c.medium.unwrap().epsilon2, 3.0);
    }
}
