//! Problem files, run reports, trajectories and result documents.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use hzplan::reach::LiftedLayout;
use hzplan::sets::Form;
use hzplan::{HybridZonotope, SetComplexity, SolverResult, SparseMatrix};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Version tag written in the comment row of every run report.
pub const REPORT_VERSION: &str = "hzplan-run-report v1";
pub const REPORT_HEADER: [&str; 9] = ["instance_id", "seed", "status", "iters", "iters_ph1", "wall_s", "r_p", "objective", "verified"];

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: line {line}, column {column}: {message}")]
    Parse { path: PathBuf, line: usize, column: usize, message: String },
    #[error("{path}: invalid problem: {source}")]
    Invalid { path: PathBuf, source: hzplan::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl IoError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io { path: path.to_path_buf(), source }
    }
}

/// Sparse matrix as a triplet list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripletMatrix {
    pub rows: usize,
    pub cols: usize,
    pub triplets: Vec<(usize, usize, f64)>,
}

impl TripletMatrix {
    pub fn from_sparse(m: &SparseMatrix) -> Self {
        Self { rows: m.rows(), cols: m.cols(), triplets: m.triplets().collect() }
    }

    pub fn to_sparse(&self) -> hzplan::Result<SparseMatrix> {
        SparseMatrix::from_triplets(self.rows, self.cols, self.triplets.iter().copied())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormTag {
    #[serde(rename = "canonical")]
    Canonical,
    #[serde(rename = "01")]
    ZeroOne,
}

impl From<Form> for FormTag {
    fn from(f: Form) -> Self {
        match f {
            Form::Canonical => FormTag::Canonical,
            Form::ZeroOne => FormTag::ZeroOne,
        }
    }
}

impl From<FormTag> for Form {
    fn from(f: FormTag) -> Self {
        match f {
            FormTag::Canonical => Form::Canonical,
            FormTag::ZeroOne => Form::ZeroOne,
        }
    }
}

/// A hybrid zonotope with an optional quadratic cost. Floats are written
/// in shortest round-trip form, so values survive a save and load bit for bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub form: FormTag,
    pub n: usize,
    #[serde(rename = "Gc")]
    pub gc: TripletMatrix,
    #[serde(rename = "Gb")]
    pub gb: TripletMatrix,
    pub c: Vec<f64>,
    #[serde(rename = "Ac")]
    pub ac: TripletMatrix,
    #[serde(rename = "Ab")]
    pub ab: TripletMatrix,
    pub b: Vec<f64>,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub p: Option<TripletMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
}

impl ProblemFile {
    pub fn from_set(z: &HybridZonotope, cost: Option<(&SparseMatrix, &[f64])>) -> Self {
        Self {
            form: z.form().into(),
            n: z.dim(),
            gc: TripletMatrix::from_sparse(z.gc()),
            gb: TripletMatrix::from_sparse(z.gb()),
            c: z.c().to_vec(),
            ac: TripletMatrix::from_sparse(z.ac()),
            ab: TripletMatrix::from_sparse(z.ab()),
            b: z.b().to_vec(),
            p: cost.map(|(p, _)| TripletMatrix::from_sparse(p)),
            q: cost.map(|(_, q)| q.to_vec()),
        }
    }

    pub fn to_set(&self) -> hzplan::Result<HybridZonotope> {
        if self.c.len() != self.n {
            return Err(hzplan::Error::DimensionMismatch(format!("n = {} but c has {} entries", self.n, self.c.len())));
        }
        HybridZonotope::new(
            self.gc.to_sparse()?,
            self.gb.to_sparse()?,
            self.c.clone(),
            self.ac.to_sparse()?,
            self.ab.to_sparse()?,
            self.b.clone(),
            self.form.into(),
        )
    }

    /// `(P, q)`, zero where absent.
    pub fn cost(&self) -> hzplan::Result<(SparseMatrix, Vec<f64>)> {
        let p = match &self.p {
            Some(p) => p.to_sparse()?,
            None => SparseMatrix::zeros(self.n, self.n),
        };
        let q = self.q.clone().unwrap_or_else(|| vec![0.0; self.n]);
        if p.shape() != (self.n, self.n) || q.len() != self.n {
            return Err(hzplan::Error::DimensionMismatch("cost does not match n".into()));
        }
        Ok((p, q))
    }
}

fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|e| IoError::io(path, e))
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Reads and validates a problem file.
pub fn load_problem(path: &Path) -> Result<(ProblemFile, HybridZonotope), IoError> {
    let pf: ProblemFile = parse(path, &read(path)?)?;
    let z = pf.to_set().map_err(|source| IoError::Invalid { path: path.to_path_buf(), source })?;
    pf.cost().map_err(|source| IoError::Invalid { path: path.to_path_buf(), source })?;
    Ok((pf, z))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| IoError::io(path, e))
}

/// One row of a run report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRow {
    pub instance_id: String,
    pub seed: u64,
    pub status: String,
    pub iters: usize,
    pub iters_ph1: usize,
    pub wall_s: f64,
    pub r_p: f64,
    pub objective: f64,
    pub verified: bool,
}

impl RunRow {
    pub fn new(instance_id: impl Into<String>, seed: u64, r: &SolverResult, verified: bool) -> Self {
        Self {
            instance_id: instance_id.into(),
            seed,
            status: r.status.to_string(),
            iters: r.iterations,
            iters_ph1: r.phase1_iterations,
            wall_s: r.wall_time.as_secs_f64(),
            r_p: r.r_p,
            objective: r.objective,
            verified,
        }
    }
}

/// Writes the versioned comment row, the fixed header and the rows in order.
pub fn write_report(path: &Path, rows: &[RunRow]) -> Result<(), IoError> {
    let mut file = fs::File::create(path).map_err(|e| IoError::io(path, e))?;
    writeln!(file, "# {REPORT_VERSION}").map_err(|e| IoError::io(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    w.write_record(REPORT_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| IoError::io(path, e))?;
    Ok(())
}

/// One stage of a planned trajectory; `u` is empty at the final stage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub k: usize,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
}

pub fn trajectory(layout: &LiftedLayout, z: &[f64]) -> Vec<Stage> {
    let (xs, us) = layout.split(z);
    xs.into_iter()
        .enumerate()
        .map(|(k, x)| Stage { k, x, u: us.get(k).cloned().unwrap_or_default() })
        .collect()
}

/// Flattens a trajectory back to the lifted vector layout.
pub fn flatten(stages: &[Stage]) -> Vec<f64> {
    stages.iter().flat_map(|s| s.x.iter().chain(&s.u).copied()).collect()
}

pub fn load_trajectory(path: &Path) -> Result<Vec<Stage>, IoError> {
    parse(path, &read(path)?)
}

/// Loads a warm-start point: either a trajectory document or a bare array.
pub fn load_point(path: &Path) -> Result<Vec<f64>, IoError> {
    let text = read(path)?;
    if let Ok(v) = serde_json::from_str::<Vec<f64>>(&text) {
        return Ok(v);
    }
    Ok(flatten(&parse::<Vec<Stage>>(path, &text)?))
}

/// Timing kept apart from the data fields of a result document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub wall_s: f64,
}

/// Solver output document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub status: String,
    pub iterations: usize,
    pub phase1_iterations: usize,
    pub warm_start_iterations: usize,
    pub perturbations: usize,
    pub restarts: usize,
    pub rejections: usize,
    pub polished: bool,
    pub r_p: f64,
    pub objective: f64,
    pub z: Vec<f64>,
    pub xi: Vec<f64>,
    pub zeta: Vec<f64>,
    pub u: Vec<f64>,
    pub diagnostic: Option<String>,
    pub meta: Meta,
}

impl From<&SolverResult> for ResultFile {
    fn from(r: &SolverResult) -> Self {
        Self {
            status: r.status.to_string(),
            iterations: r.iterations,
            phase1_iterations: r.phase1_iterations,
            warm_start_iterations: r.warm_start_iterations,
            perturbations: r.perturbations,
            restarts: r.restarts,
            rejections: r.rejections,
            polished: r.polished,
            r_p: r.r_p,
            objective: r.objective,
            z: r.z.clone(),
            xi: r.xi.clone(),
            zeta: r.zeta.clone(),
            u: r.u.clone(),
            diagnostic: r.diagnostic.clone(),
            meta: Meta { wall_s: r.wall_time.as_secs_f64() },
        }
    }
}

/// Complexity table with one labelled row per set.
pub fn write_complexity(path: &Path, rows: &[(String, SetComplexity)]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["set", "n", "n_gc", "n_gb", "n_c", "nnz_g", "nnz_a"])?;
    for (label, c) in rows {
        let (n, gc, gb, nc, ng, na) = c.as_tuple();
        w.write_record([label.clone(), n.to_string(), gc.to_string(), gb.to_string(), nc.to_string(), ng.to_string(), na.to_string()])?;
    }
    w.flush().map_err(|e| IoError::io(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn problem_round_trip_is_bit_exact() {
        let z = HybridZonotope::new(
            SparseMatrix::from_dense(&[vec![0.1, 1.0 / 3.0], vec![0.0, -2.5e-3]]).unwrap(),
            SparseMatrix::from_dense(&[vec![std::f64::consts::PI], vec![1e-11]]).unwrap(),
            vec![0.7, -0.30000000000000004],
            SparseMatrix::from_dense(&[vec![1.0, 2.0 / 7.0]]).unwrap(),
            SparseMatrix::from_dense(&[vec![-1.0]]).unwrap(),
            vec![0.125],
            Form::ZeroOne,
        )
        .unwrap();
        let pf = ProblemFile::from_set(&z, None);
        let text = serde_json::to_string(&pf).unwrap();
        let back: ProblemFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, pf);
        assert_eq!(back.to_set().unwrap(), z);
        assert!(text.contains("\"form\":\"01\""));
        assert!(!text.contains("\"P\""));
    }
}
