//! CSV and JSON layouts.
//!
//! * Sampled paths: CSV with header `t,x,y,z`.
//! * Angle traces: CSV `t,lambda,gamma,gamma_dot`.
//! * Run traces: CSV `t,lambda,gamma,phi_closed,phi_total,phi_dyn,phi_geo,norm,lvn_residual`.
//! * Operators and states: JSON `{"num_modes", "n_max", "basis": [[n1, ...], ...],
//!   "entries"/"amplitudes": [[re, im], ...]}` with matrix entries row-major.
//!
//! Every float is written with 17 significant digits (`{:.16e}`), so output
//! is byte-stable across runs.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use gphase_core::fock::{FockSpace, OperatorMatrix, StateVector};
use gphase_core::geometry::{AngleTrajectory, FiberPath};
use gphase_core::Complex64;
use serde::{Deserialize, Serialize};

use crate::RunError;

/// Fixed 17-significant-digit rendering; non-finite values as `NaN`/`inf`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

struct FixedDigits;

impl serde_json::ser::Formatter for FixedDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }
}

/// Pretty-ish JSON (one line per value is not needed) with fixed float digits.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits);
    value.serialize(&mut ser).expect("in-memory serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

/// Writes through a temporary sibling and renames, so readers never see partial files.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), RunError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| RunError::io(dir, e))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(|e| RunError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| RunError::io(path, e))
}

#[derive(Debug, Deserialize)]
struct PathRow {
    t: f64,
    x: f64,
    y: f64,
    z: f64,
}

/// Reads a sampled fibre path from CSV text with columns `t,x,y,z`.
pub fn parse_path_csv(text: &str, origin: &Path) -> Result<FiberPath, RunError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| RunError::Parse { path: origin.into(), message: e.to_string() })?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["t", "x", "y", "z"] {
        return Err(RunError::Parse {
            path: origin.into(),
            message: format!("expected header t,x,y,z, found {}", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut times = Vec::new();
    let mut points = Vec::new();
    for (line, row) in reader.deserialize::<PathRow>().enumerate() {
        let row = row.map_err(|e| RunError::Parse { path: origin.into(), message: format!("row {}: {e}", line + 1) })?;
        times.push(row.t);
        points.push([row.x, row.y, row.z]);
    }
    Ok(FiberPath::sampled(times, points)?)
}

pub fn read_path_csv(path: &Path) -> Result<FiberPath, RunError> {
    let text = fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
    parse_path_csv(&text, path)
}

/// Path samples as CSV text.
pub fn path_csv(times: &[f64], points: &[[f64; 3]]) -> String {
    let mut out = String::from("t,x,y,z\n");
    for (t, p) in times.iter().zip(points) {
        out.push_str(&format!("{},{},{},{}\n", fmt_f64(*t), fmt_f64(p[0]), fmt_f64(p[1]), fmt_f64(p[2])));
    }
    out
}

/// Angle trace as CSV text.
pub fn angles_csv(angles: &AngleTrajectory) -> String {
    let mut out = String::from("t,lambda,gamma,gamma_dot\n");
    for i in 0..angles.len() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(angles.times[i]),
            fmt_f64(angles.lambda[i]),
            fmt_f64(angles.gamma[i]),
            fmt_f64(angles.gamma_dot[i])
        ));
    }
    out
}

fn pairs(values: &[Complex64]) -> Vec<[f64; 2]> {
    values.iter().map(|z| [z.re, z.im]).collect()
}

fn basis(space: FockSpace) -> Vec<Vec<usize>> {
    (0..space.dim()).map(|i| space.occupations(i)).collect()
}

/// JSON layout of an operator matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorDump {
    pub num_modes: usize,
    pub n_max: usize,
    pub basis: Vec<Vec<usize>>,
    pub entries: Vec<[f64; 2]>,
}

/// JSON layout of a state vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDump {
    pub num_modes: usize,
    pub n_max: usize,
    pub basis: Vec<Vec<usize>>,
    pub amplitudes: Vec<[f64; 2]>,
}

impl OperatorDump {
    pub fn from_operator(op: &OperatorMatrix) -> Self {
        let s = op.space();
        Self { num_modes: s.num_modes(), n_max: s.n_max(), basis: basis(s), entries: pairs(op.entries()) }
    }

    pub fn to_operator(&self) -> Result<OperatorMatrix, RunError> {
        let space = FockSpace::new(self.num_modes, self.n_max)?;
        check_basis(space, &self.basis)?;
        let entries = self.entries.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        Ok(OperatorMatrix::from_entries(space, entries)?)
    }
}

impl StateDump {
    pub fn from_state(state: &StateVector) -> Self {
        let s = state.space();
        Self { num_modes: s.num_modes(), n_max: s.n_max(), basis: basis(s), amplitudes: pairs(state.amplitudes()) }
    }

    pub fn to_state(&self) -> Result<StateVector, RunError> {
        let space = FockSpace::new(self.num_modes, self.n_max)?;
        check_basis(space, &self.basis)?;
        let amps = self.amplitudes.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        Ok(StateVector::from_amplitudes(space, amps)?)
    }
}

fn check_basis(space: FockSpace, listed: &[Vec<usize>]) -> Result<(), RunError> {
    if listed != basis(space) {
        return Err(RunError::Config("basis listing does not match the lexicographic enumeration".into()));
    }
    Ok(())
}
