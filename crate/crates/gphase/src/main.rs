use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use gphase::builtin::{self, Builtin};
use gphase::formats::{to_json, write_atomic};
use gphase::runner::{group_report, run_scenario};
use gphase::sweep::{parse_spec, sweep, sweep_dir};
use gphase::{RunError, ScenarioConfig};
use serde::Serialize;

/// Geometric phases of photon states carried along a fibre.
///
/// Exit status: 0 when every check passes, 1 on a tolerance failure,
/// 2 on validation, guard or IO errors.
#[derive(Debug, Parser)]
#[command(name = "gphase", version)]
struct Cli {
    /// Scenario config file (TOML).
    #[arg(long, value_name = "PATH", conflicts_with_all = ["scenario", "all"])]
    config: Option<PathBuf>,
    /// Built-in scenario name (see --list).
    #[arg(long, value_name = "NAME", conflicts_with = "all")]
    scenario: Option<String>,
    /// Run every built-in scenario.
    #[arg(long)]
    all: bool,
    /// List the built-in scenarios and exit.
    #[arg(long)]
    list: bool,
    /// Output root; each run writes into a subdirectory named after it.
    #[arg(long, value_name = "DIR", default_value = "runs")]
    out: PathBuf,
    /// Override the number of RK4 steps.
    #[arg(long, value_name = "N")]
    steps: Option<usize>,
    /// Override the Fock cutoff.
    #[arg(long, value_name = "N")]
    nmax: Option<usize>,
    /// Override the phase tolerance.
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
    /// Sweep one parameter: lambda, turns, n_R, n_L or epsilon2.
    #[arg(long, value_name = "PARAM=v1,v2,...", conflicts_with = "all")]
    sweep: Option<String>,
}

#[derive(Serialize)]
struct ErrorReport {
    status: &'static str,
    kind: &'static str,
    message: String,
}

fn report_error(err: &RunError) {
    let report = ErrorReport { status: "error", kind: err.kind(), message: err.to_string() };
    eprint!("{}", to_json(&report));
}

fn with_overrides(mut c: ScenarioConfig, cli: &Cli) -> ScenarioConfig {
    c.apply_overrides(cli.steps, cli.nmax, cli.tol);
    c
}

fn print_status(name: &str, passed: bool, dir: &Path) {
    println!("{} {name} -> {}", if passed { "PASS" } else { "FAIL" }, dir.display());
}

/// Runs the members of a built-in; groups also get a `group.json`.
fn run_builtin(b: &Builtin, cli: &Cli) -> Result<bool, RunError> {
    let mut reports = Vec::with_capacity(b.members.len());
    for member in &b.members {
        let config = with_overrides(member.clone(), cli);
        let dir = config.output_dir(&cli.out);
        let report = run_scenario(&config, &dir)?;
        print_status(&report.name, report.passed, &dir);
        reports.push(report);
    }
    if b.members.len() > 1 {
        let group = group_report(b.name, &reports);
        let path = cli.out.join(b.name).join("group.json");
        write_atomic(&path, &to_json(&group))?;
        print_status(b.name, group.passed, &path);
        return Ok(group.passed);
    }
    Ok(reports.iter().all(|r| r.passed))
}

fn execute(cli: &Cli) -> Result<bool, RunError> {
    if cli.list {
        for b in builtin::catalog() {
            println!("{:<22} {}", b.name, b.description);
        }
        return Ok(true);
    }
    if cli.all {
        let mut passed = true;
        for b in builtin::catalog() {
            passed &= run_builtin(&b, cli)?;
        }
        return Ok(passed);
    }
    let template = match (&cli.config, &cli.scenario) {
        (Some(path), None) => ScenarioConfig::load(path)?,
        (None, Some(name)) => {
            let b = builtin::find(name).ok_or_else(|| {
                RunError::Config(format!("unknown built-in scenario {name:?}; try --list"))
            })?;
            if cli.sweep.is_none() || b.members.len() > 1 {
                if cli.sweep.is_some() {
                    return Err(RunError::Config(format!("{name} is a group; sweep one of its members via --config")));
                }
                return run_builtin(&b, cli);
            }
            b.members.into_iter().next().expect("non-empty group")
        }
        _ => return Err(RunError::Config("give one of --config, --scenario, --all or --list".into())),
    };
    let template = with_overrides(template, cli);
    match &cli.sweep {
        Some(spec) => {
            let (param, values) = parse_spec(spec)?;
            let rows = sweep(&template, param, &values, &cli.out)?;
            let passed = rows.iter().all(|r| r.report.passed);
            print_status(&format!("{} sweep over {param}", template.name), passed, &sweep_dir(&template, param, &cli.out));
            Ok(passed)
        }
        None => {
            let dir = template.output_dir(&cli.out);
            let report = run_scenario(&template, &dir)?;
            print_status(&report.name, report.passed, &dir);
            Ok(report.passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            report_error(&e);
            ExitCode::from(2)
        }
    }
}
