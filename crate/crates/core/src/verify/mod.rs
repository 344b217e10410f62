//! Error metrics, analytic oracles and the benchmark drivers.

mod lshape;
mod plate;
mod ring;

pub use lshape::{bench_lshape, run_lshape, HistoryRow, LShapeHistory, LShapeOptions, LShapeStudy};
pub use plate::{bench_plate, plate_mesh, write_plate_rows, PlateOptions, PlateRow, PlateStudy, PlateVariant};
pub use ring::{bench_ring, solve_ring, AnalyticRing, RadialProfile, RingOptions, RingRun, RingStudy};

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::element::ElementError;
use crate::geom::Vec2;
use crate::mesh::{Mesh, MeshError};
use crate::solver::SolveError;
use crate::wachspress::{Wachspress, WachspressError};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("reference field has zero norm")]
    ZeroReference,
    #[error("field length {num} does not match reference length {reference}")]
    LengthMismatch { num: usize, reference: usize },
    #[error("probe point ({x}, {y}) lies outside the mesh")]
    ProbeOutside { x: f64, y: f64 },
    #[error("reference mesh has no node at ({x}, {y})")]
    MissingReferenceNode { x: f64, y: f64 },
    #[error("invalid benchmark parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Element(#[from] ElementError),
    #[error(transparent)]
    Shape(#[from] WachspressError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Relative error `|num - ref| / |ref|` in the Euclidean norm.
pub fn l2_error(num: &[f64], reference: &[f64]) -> Result<f64, VerifyError> {
    if num.len() != reference.len() {
        return Err(VerifyError::LengthMismatch {
            num: num.len(),
            reference: reference.len(),
        });
    }
    let rn = reference.iter().map(|v| v * v).sum::<f64>().sqrt();
    if rn == 0.0 {
        return Err(VerifyError::ZeroReference);
    }
    let en = num
        .iter()
        .zip(reference)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Ok(en / rn)
}

/// Least-squares slope of `log e` against `log h`.
pub fn convergence_order(h: &[f64], e: &[f64]) -> f64 {
    assert_eq!(h.len(), e.len());
    let n = h.len() as f64;
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// One row of a convergence table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub h: f64,
    pub elements: usize,
    pub nodes: usize,
    #[serde(rename = "e_L2_T")]
    pub e_l2_t: f64,
    #[serde(rename = "e_L2_U")]
    pub e_l2_u: f64,
    pub time_s: f64,
    pub accel: bool,
}

/// Writes reports as CSV with columns
/// `h,elements,nodes,e_L2_T,e_L2_U,time_s,accel`.
pub fn write_reports<W: Write>(out: W, reports: &[ErrorReport]) -> Result<(), VerifyError> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_reports_file(path: impl AsRef<Path>, reports: &[ErrorReport]) -> Result<(), VerifyError> {
    write_reports(std::fs::File::create(path)?, reports)
}

/// Interpolates a nodal field with `comps` interleaved components at `p`.
pub fn probe(mesh: &Mesh, field: &[f64], comps: usize, p: &Vec2) -> Result<Vec<f64>, VerifyError> {
    let e = mesh.locate(p).ok_or(VerifyError::ProbeOutside { x: p.x, y: p.y })?;
    let poly = mesh.coords(e);
    let n = Wachspress::new(&poly)?.values(p)?;
    let mut out = vec![0.0; comps];
    for (i, &node) in mesh.elements[e].nodes.iter().enumerate() {
        for (c, o) in out.iter_mut().enumerate() {
            *o += n[i] * field[comps * node + c];
        }
    }
    Ok(out)
}
