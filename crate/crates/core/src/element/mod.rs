//! Element matrices for conduction, heat capacity, plane elasticity and the
//! thermo-elastic coupling block.
//!
//! Every matrix is computed from a [`ShapeSamples`] table (shape values and
//! gradients at quadrature points), so the same kernels serve Wachspress
//! polygons and bilinear quadrilaterals.

mod bilinear;
mod boundary;
mod stress;

pub use bilinear::bilinear_samples;
pub use boundary::{convection_edge, flux_edge, traction_edge};
pub use stress::{element_stress, stress_recover, StressSample};

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{self, Vec2};
use crate::quadrature::{self, QuadratureError};
use crate::wachspress::{Wachspress, WachspressError};

#[derive(Debug, Error, PartialEq)]
pub enum ElementError {
    #[error(transparent)]
    Shape(#[from] WachspressError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("invalid material: {0}")]
    InvalidMaterial(String),
    #[error("bilinear elements need 4 vertices, got {0}")]
    NotQuadrilateral(usize),
    #[error("non-positive Jacobian {0:e} in bilinear element")]
    BadJacobian(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Plane {
    #[default]
    Stress,
    Strain,
}

fn one() -> f64 {
    1.0
}

/// Isotropic elastic, anisotropic (axis-aligned) conducting material.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    #[serde(rename = "E")]
    pub e: f64,
    pub nu: f64,
    pub alpha: f64,
    pub kx: f64,
    pub ky: f64,
    pub rho: f64,
    pub c: f64,
    #[serde(default)]
    pub plane: Plane,
    #[serde(default = "one")]
    pub thickness: f64,
    /// Volumetric heat source.
    #[serde(default)]
    pub source: f64,
}

impl Material {
    /// All parameters equal to one (except `nu = 0`), plane stress.
    pub fn unit() -> Self {
        Self {
            e: 1.0,
            nu: 0.0,
            alpha: 1.0,
            kx: 1.0,
            ky: 1.0,
            rho: 1.0,
            c: 1.0,
            plane: Plane::Stress,
            thickness: 1.0,
            source: 0.0,
        }
    }

    pub fn check(&self) -> Result<(), ElementError> {
        let bad = |what: &str| Err(ElementError::InvalidMaterial(what.to_string()));
        let finite = [
            self.e, self.nu, self.alpha, self.kx, self.ky, self.rho, self.c, self.thickness, self.source,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return bad("non-finite parameter");
        }
        if !(self.e > 0.0) {
            return bad("E must be positive");
        }
        if !(self.nu > -1.0 && self.nu < 0.5) {
            return bad("nu must lie in (-1, 0.5); nu = 0.5 makes D singular");
        }
        if !(self.kx > 0.0 && self.ky > 0.0) {
            return bad("conductivities must be positive");
        }
        if !(self.rho > 0.0 && self.c > 0.0) {
            return bad("rho and c must be positive");
        }
        if !(self.thickness > 0.0) {
            return bad("thickness must be positive");
        }
        Ok(())
    }

    pub fn d_matrix(&self) -> Matrix3<f64> {
        d_matrix(self.e, self.nu, self.plane)
    }

    /// Factor multiplying `alpha * phi * [1, 1, 0]` in the thermal strain.
    pub fn expansion_factor(&self) -> f64 {
        expansion_factor(self.nu, self.plane)
    }
}

pub fn d_matrix(e: f64, nu: f64, plane: Plane) -> Matrix3<f64> {
    match plane {
        Plane::Stress => {
            let f = e / (1.0 - nu * nu);
            Matrix3::new(f, f * nu, 0.0, f * nu, f, 0.0, 0.0, 0.0, f * 0.5 * (1.0 - nu))
        }
        Plane::Strain => {
            let f = e / ((1.0 + nu) * (1.0 - 2.0 * nu));
            Matrix3::new(
                f * (1.0 - nu),
                f * nu,
                0.0,
                f * nu,
                f * (1.0 - nu),
                0.0,
                0.0,
                0.0,
                f * 0.5 * (1.0 - 2.0 * nu),
            )
        }
    }
}

pub fn expansion_factor(nu: f64, plane: Plane) -> f64 {
    match plane {
        Plane::Stress => 1.0,
        Plane::Strain => 1.0 + nu,
    }
}

/// How element shape functions and quadrature are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    /// Wachspress functions on a centroid fan rule of the given degree. With
    /// `corrected`, gradients get the constant shift that makes their
    /// quadrature integral equal the exact boundary integral, which restores
    /// the patch test under inexact integration.
    Wachspress { degree: usize, corrected: bool },
    /// Isoparametric bilinear quadrilateral, 2x2 Gauss.
    Bilinear,
}

impl Default for Formulation {
    fn default() -> Self {
        Formulation::Wachspress {
            degree: quadrature::DEFAULT_DEGREE,
            corrected: true,
        }
    }
}

/// Shape values and gradients at quadrature points of one element.
/// Entries are stored point-major: index `q * m + i`.
#[derive(Debug, Clone)]
pub struct ShapeSamples {
    pub m: usize,
    pub points: Vec<Vec2>,
    pub weights: Vec<f64>,
    pub values: Vec<f64>,
    pub gradients: Vec<Vec2>,
}

impl ShapeSamples {
    pub fn n_points(&self) -> usize {
        self.weights.len()
    }

    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn value(&self, q: usize, i: usize) -> f64 {
        self.values[q * self.m + i]
    }

    pub fn gradient(&self, q: usize, i: usize) -> Vec2 {
        self.gradients[q * self.m + i]
    }
}

/// Samples are computed in coordinates relative to the first vertex, so the
/// result does not lose digits for small elements far from the origin.
pub fn shape_samples(poly: &[Vec2], formulation: Formulation) -> Result<ShapeSamples, ElementError> {
    let Some(&base) = poly.first() else {
        return Err(ElementError::Shape(WachspressError::TooFewCorners(0)));
    };
    let local: Vec<Vec2> = poly.iter().map(|p| p - base).collect();
    let mut s = match formulation {
        Formulation::Wachspress { degree, corrected } => wachspress_samples(&local, degree, corrected),
        Formulation::Bilinear => bilinear_samples(&local),
    }?;
    for p in &mut s.points {
        *p += base;
    }
    Ok(s)
}

pub fn wachspress_samples(poly: &[Vec2], degree: usize, corrected: bool) -> Result<ShapeSamples, ElementError> {
    let basis = Wachspress::new(poly)?;
    let rule = quadrature::polygon_rule(poly, degree)?;
    let m = poly.len();
    let nq = rule.points.len();
    let mut values = Vec::with_capacity(nq * m);
    let mut gradients = Vec::with_capacity(nq * m);
    for p in &rule.points {
        let e = basis.eval(p)?;
        values.extend_from_slice(&e.values);
        gradients.extend_from_slice(&e.gradients);
    }
    if corrected {
        // Exact boundary integral of N_i n: shape traces are linear on edges.
        let mut exact = vec![Vec2::zeros(); m];
        for j in 0..m {
            let a = poly[j];
            let b = poly[(j + 1) % m];
            let e = b - a;
            let half = 0.5 * Vec2::new(e.y, -e.x);
            exact[j] += half;
            exact[(j + 1) % m] += half;
        }
        let area: f64 = rule.weights.iter().sum();
        for i in 0..m {
            let mut quad = Vec2::zeros();
            for q in 0..nq {
                quad += gradients[q * m + i] * rule.weights[q];
            }
            let shift = (exact[i] - quad) / area;
            for q in 0..nq {
                gradients[q * m + i] += shift;
            }
        }
    }
    Ok(ShapeSamples {
        m,
        points: rule.points,
        weights: rule.weights,
        values,
        gradients,
    })
}

/// `thickness * (kx Kx + ky Ky)` with `Kx = sum_q w_q dNi/dx dNj/dx` and
/// `Ky` likewise; the parent cache combines its matrices the same way.
pub fn conduction(s: &ShapeSamples, kx: f64, ky: f64, thickness: f64) -> DMatrix<f64> {
    let m = s.m;
    let mut kxx = DMatrix::zeros(m, m);
    let mut kyy = DMatrix::zeros(m, m);
    for q in 0..s.n_points() {
        let w = s.weights[q];
        let g = &s.gradients[q * m..(q + 1) * m];
        for i in 0..m {
            let (ax, ay) = (w * g[i].x, w * g[i].y);
            for j in i..m {
                kxx[(i, j)] += ax * g[j].x;
                kyy[(i, j)] += ay * g[j].y;
            }
        }
    }
    mirror_upper(&mut kxx);
    mirror_upper(&mut kyy);
    kxx * (thickness * kx) + kyy * (thickness * ky)
}

/// `sum_q w_q N_i N_j * scale`.
pub fn mass(s: &ShapeSamples, scale: f64) -> DMatrix<f64> {
    let m = s.m;
    let mut mm = DMatrix::zeros(m, m);
    for q in 0..s.n_points() {
        let w = s.weights[q] * scale;
        let n = &s.values[q * m..(q + 1) * m];
        for i in 0..m {
            let a = w * n[i];
            for j in i..m {
                mm[(i, j)] += a * n[j];
            }
        }
    }
    mirror_upper(&mut mm);
    mm
}

/// `sum_q w_q N_i * scale`.
pub fn load(s: &ShapeSamples, scale: f64) -> DVector<f64> {
    let m = s.m;
    let mut f = DVector::zeros(m);
    for q in 0..s.n_points() {
        for i in 0..m {
            f[i] += s.weights[q] * scale * s.values[q * m + i];
        }
    }
    f
}

/// Strain-displacement columns of node `i`: B_i = [[gx, 0], [0, gy], [gy, gx]].
#[inline]
fn b_cols(g: &Vec2) -> [Vector3<f64>; 2] {
    [Vector3::new(g.x, 0.0, g.y), Vector3::new(0.0, g.y, g.x)]
}

/// `sum_q w_q B^T D B * thickness`; dofs interleaved `(ux_0, uy_0, ux_1, ...)`.
pub fn elastic(s: &ShapeSamples, d: &Matrix3<f64>, thickness: f64) -> DMatrix<f64> {
    let m = s.m;
    let mut k = DMatrix::zeros(2 * m, 2 * m);
    for q in 0..s.n_points() {
        let w = s.weights[q] * thickness;
        let g = &s.gradients[q * m..(q + 1) * m];
        let db: Vec<[Vector3<f64>; 2]> = g
            .iter()
            .map(|gi| {
                let [bx, by] = b_cols(gi);
                [d * bx * w, d * by * w]
            })
            .collect();
        for i in 0..m {
            let bi = b_cols(&g[i]);
            for j in i..m {
                for a in 0..2 {
                    let b0 = if i == j { a } else { 0 };
                    for b in b0..2 {
                        k[(2 * i + a, 2 * j + b)] += bi[a].dot(&db[j][b]);
                    }
                }
            }
        }
    }
    mirror_upper(&mut k);
    k
}

/// Coupling block `-sum_q w_q B^T D beta N * thickness` with
/// `beta = factor * [1, 1, 0]`; size `2m x m`.
pub fn coupling(s: &ShapeSamples, d: &Matrix3<f64>, factor: f64, thickness: f64) -> DMatrix<f64> {
    let m = s.m;
    let db = d * Vector3::new(factor, factor, 0.0);
    let mut c = DMatrix::zeros(2 * m, m);
    for q in 0..s.n_points() {
        let w = s.weights[q] * thickness;
        let g = &s.gradients[q * m..(q + 1) * m];
        let n = &s.values[q * m..(q + 1) * m];
        for i in 0..m {
            let [bx, by] = b_cols(&g[i]);
            let (cx, cy) = (-w * bx.dot(&db), -w * by.dot(&db));
            for j in 0..m {
                c[(2 * i, j)] += cx * n[j];
                c[(2 * i + 1, j)] += cy * n[j];
            }
        }
    }
    c
}

fn mirror_upper(k: &mut DMatrix<f64>) {
    let n = k.nrows();
    for i in 0..n {
        for j in 0..i {
            k[(i, j)] = k[(j, i)];
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementMatrices {
    pub k_th: DMatrix<f64>,
    pub m_th: DMatrix<f64>,
    pub k_el: DMatrix<f64>,
    pub c_el: DMatrix<f64>,
    /// Volumetric source load.
    pub f_q: DVector<f64>,
}

pub fn element_matrices(s: &ShapeSamples, mat: &Material) -> ElementMatrices {
    let t = mat.thickness;
    let d = mat.d_matrix();
    ElementMatrices {
        k_th: conduction(s, mat.kx, mat.ky, t),
        m_th: mass(s, mat.rho * mat.c * t),
        k_el: elastic(s, &d, t),
        c_el: coupling(s, &d, mat.alpha * mat.expansion_factor(), t),
        f_q: load(s, mat.source * t),
    }
}

fn samples_for(poly: &[Vec2]) -> Result<ShapeSamples, ElementError> {
    shape_samples(poly, Formulation::default())
}

pub fn k_thermal(poly: &[Vec2], mat: &Material) -> Result<DMatrix<f64>, ElementError> {
    mat.check()?;
    Ok(conduction(&samples_for(poly)?, mat.kx, mat.ky, mat.thickness))
}

pub fn m_thermal(poly: &[Vec2], mat: &Material) -> Result<DMatrix<f64>, ElementError> {
    mat.check()?;
    Ok(mass(&samples_for(poly)?, mat.rho * mat.c * mat.thickness))
}

pub fn k_elastic(poly: &[Vec2], mat: &Material) -> Result<DMatrix<f64>, ElementError> {
    mat.check()?;
    Ok(elastic(&samples_for(poly)?, &mat.d_matrix(), mat.thickness))
}

pub fn c_coupling(poly: &[Vec2], mat: &Material) -> Result<DMatrix<f64>, ElementError> {
    mat.check()?;
    Ok(coupling(
        &samples_for(poly)?,
        &mat.d_matrix(),
        mat.alpha * mat.expansion_factor(),
        mat.thickness,
    ))
}

/// Rigid-body modes of an element: two translations and the infinitesimal
/// rotation about the element centroid, as interleaved dof vectors.
pub fn rigid_modes(poly: &[Vec2]) -> [DVector<f64>; 3] {
    let m = poly.len();
    let (_, c) = geom::area_centroid(poly);
    let mut tx = DVector::zeros(2 * m);
    let mut ty = DVector::zeros(2 * m);
    let mut rot = DVector::zeros(2 * m);
    for (i, p) in poly.iter().enumerate() {
        tx[2 * i] = 1.0;
        ty[2 * i + 1] = 1.0;
        rot[2 * i] = -(p.y - c.y);
        rot[2 * i + 1] = p.x - c.x;
    }
    [tx, ty, rot]
}
