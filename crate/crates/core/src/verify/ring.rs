//! Thick ring with prescribed inner and outer temperatures and an inner
//! radial displacement, against its closed-form solution.

use std::time::Instant;

use super::{l2_error, ErrorReport, VerifyError};
use crate::accel::ParentCache;
use crate::element::{Formulation, Material};
use crate::geom::{self, Vec2};
use crate::mesh::{annulus_quads, gen_voronoi_polygons, Mesh, Seeds, VoronoiDomain};
use crate::solver::{
    assemble, element_stresses, solve_steady, AssemblyOptions, BcKind, BoundaryCondition, Constraints,
    SolveError, SteadySolution,
};

/// Ring `0.25 <= r <= 1` with `T(0.25) = 3`, `T(1) = 1`, `u_r(0.25) = 0.25`,
/// `u(1) = 0` and unit material (`nu = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticRing {
    pub inner: f64,
    pub outer: f64,
}

impl Default for AnalyticRing {
    fn default() -> Self {
        Self { inner: 0.25, outer: 1.0 }
    }
}

impl AnalyticRing {
    pub fn temperature(&self, r: f64) -> f64 {
        1.0 - r.ln() / std::f64::consts::LN_2
    }

    pub fn radial_displacement(&self, r: f64) -> f64 {
        -0.5 * r * r.ln() / std::f64::consts::LN_2
    }

    pub fn radial_stress(&self, r: f64) -> f64 {
        -1.0 + (r.ln() - 1.0) / (2.0 * std::f64::consts::LN_2)
    }

    pub fn material(&self) -> Material {
        Material::unit()
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * (self.outer * self.outer - self.inner * self.inner)
    }

    pub fn boundary_conditions(&self) -> Vec<BoundaryCondition> {
        vec![
            BoundaryCondition::temperature("inner", self.temperature(self.inner)),
            BoundaryCondition::temperature("outer", self.temperature(self.outer)),
            BoundaryCondition::new(
                "inner",
                BcKind::RadialDisplacement {
                    center: [0.0, 0.0],
                    value: self.radial_displacement(self.inner),
                },
            ),
            BoundaryCondition::new(
                "outer",
                BcKind::DirichletDisplacement {
                    ux: Some(0.0),
                    uy: Some(0.0),
                },
            ),
        ]
    }

    /// Dirichlet values from the closed form at each constrained node, so
    /// boundary nodes lying on a chord inside the circle get the exact
    /// solution at their own radius.
    pub fn constraints(&self, mesh: &Mesh) -> Result<Constraints, SolveError> {
        let mut c = Constraints::from_bcs(mesh, &self.boundary_conditions())?;
        for (&n, v) in c.thermal.iter_mut() {
            *v = self.temperature(mesh.nodes[n].norm());
        }
        for (&dof, v) in c.mechanical.iter_mut() {
            let p = mesh.nodes[dof / 2];
            let r = p.norm();
            let e = if dof % 2 == 0 { p.x / r } else { p.y / r };
            *v = self.radial_displacement(r) * e;
        }
        Ok(c)
    }

    /// Chords per circle: the angular divisions of the matched quad grid.
    pub fn segments(&self, h: f64) -> usize {
        let mid = 0.5 * (self.inner + self.outer);
        (2.0 * std::f64::consts::PI * mid / h).round().max(3.0) as usize
    }

    /// Lloyd-relaxed Voronoi mesh with about `area / h^2` cells, bounded by
    /// the same polygons as [`AnalyticRing::quad_mesh`].
    pub fn voronoi_mesh(&self, h: f64, seed: u64, lloyd_iters: usize) -> Result<Mesh, VerifyError> {
        let count = (self.area() / (h * h)).round() as usize;
        let domain = VoronoiDomain::Annulus {
            center: Vec2::zeros(),
            inner: self.inner,
            outer: self.outer,
            segments: Some(self.segments(h)),
        };
        Ok(gen_voronoi_polygons(&domain, &Seeds::Random { count, seed }, lloyd_iters)?)
    }

    /// Polar quad grid with cells of about `h x h`.
    pub fn quad_mesh(&self, h: f64) -> Result<Mesh, VerifyError> {
        let n_r = ((self.outer - self.inner) / h).round().max(1.0) as usize;
        Ok(annulus_quads(Vec2::zeros(), self.inner, self.outer, n_r, self.segments(h))?)
    }
}

/// Nodal and element samples along the radius.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RadialProfile {
    /// Per node: radius, temperature, radial displacement.
    pub r: Vec<f64>,
    pub temperature: Vec<f64>,
    pub radial_displacement: Vec<f64>,
    /// Per element: centroid radius and mean radial stress.
    pub r_element: Vec<f64>,
    pub radial_stress: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RingRun {
    pub report: ErrorReport,
    pub profile: RadialProfile,
    pub solution: SteadySolution,
}

/// Solves the ring problem on `mesh` and measures it against the closed form.
pub fn solve_ring(
    ring: &AnalyticRing,
    mesh: &Mesh,
    h: f64,
    formulation: Formulation,
    accel: bool,
) -> Result<RingRun, VerifyError> {
    let start = Instant::now();
    let materials = [ring.material()];
    let bcs = ring.boundary_conditions();
    let cache = ParentCache::new(formulation);
    let opts = AssemblyOptions {
        formulation,
        cache: accel.then_some(&cache),
    };
    let system = assemble(mesh, &materials, &bcs, &opts)?;
    let constraints = ring.constraints(mesh)?;
    let solution = solve_steady(&system, &constraints)?;
    let time_s = start.elapsed().as_secs_f64();

    let n = mesh.n_nodes();
    let mut t_ref = Vec::with_capacity(n);
    let mut u_ref = Vec::with_capacity(2 * n);
    let mut profile = RadialProfile::default();
    for (i, p) in mesh.nodes.iter().enumerate() {
        let r = p.norm();
        let ur = ring.radial_displacement(r);
        t_ref.push(ring.temperature(r));
        u_ref.extend_from_slice(&[ur * p.x / r, ur * p.y / r]);
        let (ux, uy) = (solution.state.u[2 * i], solution.state.u[2 * i + 1]);
        profile.r.push(r);
        profile.temperature.push(solution.state.phi[i]);
        profile.radial_displacement.push((ux * p.x + uy * p.y) / r);
    }
    let stresses = element_stresses(mesh, &materials, formulation, &solution.state)?;
    for (e, s) in stresses.iter().enumerate() {
        let (_, c) = geom::area_centroid(&mesh.coords(e));
        let r = c.norm();
        let (cx, cy) = (c.x / r, c.y / r);
        profile.r_element.push(r);
        profile
            .radial_stress
            .push(s[0] * cx * cx + s[1] * cy * cy + 2.0 * s[2] * cx * cy);
    }
    let report = ErrorReport {
        h,
        elements: mesh.n_elements(),
        nodes: n,
        e_l2_t: l2_error(&solution.state.phi, &t_ref)?,
        e_l2_u: l2_error(&solution.state.u, &u_ref)?,
        time_s,
        accel,
    };
    Ok(RingRun {
        report,
        profile,
        solution,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RingOptions {
    pub sizes: Vec<f64>,
    pub seed: u64,
    pub lloyd_iters: usize,
    pub formulation: Formulation,
    /// Also solve on the matched polar quad grid with bilinear elements.
    pub with_quads: bool,
}

impl Default for RingOptions {
    fn default() -> Self {
        Self {
            sizes: vec![0.1, 0.05, 0.025, 0.0125],
            seed: 1,
            lloyd_iters: 20,
            formulation: Formulation::default(),
            with_quads: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RingStudy {
    pub polygonal: Vec<RingRun>,
    pub quads: Vec<RingRun>,
}

impl RingStudy {
    pub fn polygonal_reports(&self) -> Vec<ErrorReport> {
        self.polygonal.iter().map(|r| r.report.clone()).collect()
    }

    pub fn quad_reports(&self) -> Vec<ErrorReport> {
        self.quads.iter().map(|r| r.report.clone()).collect()
    }
}

pub fn bench_ring(opts: &RingOptions) -> Result<RingStudy, VerifyError> {
    if opts.sizes.iter().any(|h| !(*h > 0.0 && *h < 0.75)) {
        return Err(VerifyError::Parameter("ring mesh sizes must lie in (0, 0.75)".into()));
    }
    let ring = AnalyticRing::default();
    let mut study = RingStudy {
        polygonal: Vec::new(),
        quads: Vec::new(),
    };
    for &h in &opts.sizes {
        let mesh = ring.voronoi_mesh(h, opts.seed, opts.lloyd_iters)?;
        study.polygonal.push(solve_ring(&ring, &mesh, h, opts.formulation, false)?);
        if opts.with_quads {
            let mesh = ring.quad_mesh(h)?;
            study.quads.push(solve_ring(&ring, &mesh, h, Formulation::Bilinear, false)?);
        }
    }
    Ok(study)
}
