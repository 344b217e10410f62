//! Transient heating of an L-shaped plate: hot top and right edges, clamped
//! bottom, prescribed vertical displacement on top.

use std::time::Instant;

use serde::Serialize;

use super::{probe, VerifyError};
use crate::element::{Formulation, Material, Plane};
use crate::geom::Vec2;
use crate::mesh::{lshape_quads, lshape_voronoi, LShape, Mesh};
use crate::solver::{
    assemble, solve_transient, AssemblyOptions, BoundaryCondition, Constraints, FieldState, TransientConfig,
};

#[derive(Debug, Clone, PartialEq)]
pub struct LShapeOptions {
    /// Side of the enclosing square, metres.
    pub size: f64,
    /// Element size of both meshes.
    pub h: f64,
    pub dt: f64,
    pub n_steps: usize,
    pub seed: u64,
    pub lloyd_iters: usize,
    pub monitor: Vec2,
    pub top_temperature: f64,
    pub right_temperature: f64,
    pub top_displacement: f64,
    pub initial_temperature: f64,
    pub formulation: Formulation,
    /// Time-step refinements for the self-convergence study (0 skips it).
    pub dt_levels: usize,
}

impl Default for LShapeOptions {
    fn default() -> Self {
        Self {
            size: 0.1,
            h: 0.0025,
            dt: 1.0,
            n_steps: 100,
            seed: 1,
            lloyd_iters: 20,
            monitor: Vec2::new(0.025, 0.075),
            top_temperature: 1000.0,
            right_temperature: 500.0,
            top_displacement: 0.1,
            initial_temperature: 0.0,
            formulation: Formulation::default(),
            dt_levels: 3,
        }
    }
}

impl LShapeOptions {
    /// SI properties: k in W/(m K), rho in kg/m^3, c in J/(kg K), E in Pa.
    pub fn material() -> Material {
        Material {
            e: 1e4,
            nu: 0.3,
            alpha: 0.0011,
            kx: 3.0,
            ky: 3.0,
            rho: 2000.0,
            c: 450.0,
            plane: Plane::Stress,
            thickness: 1.0,
            source: 0.0,
        }
    }

    pub fn shape(&self) -> LShape {
        LShape::square(self.size)
    }

    pub fn boundary_conditions(&self) -> Vec<BoundaryCondition> {
        vec![
            BoundaryCondition::temperature("top", self.top_temperature),
            BoundaryCondition::temperature("right", self.right_temperature),
            BoundaryCondition::displacement("bottom", Some(0.0), Some(0.0)),
            BoundaryCondition::displacement("top", None, Some(self.top_displacement)),
        ]
    }

    pub fn voronoi_mesh(&self) -> Result<Mesh, VerifyError> {
        let shape = self.shape();
        let count = (shape.area() / (self.h * self.h)).round() as usize;
        Ok(lshape_voronoi(&shape, count, self.seed, self.lloyd_iters)?)
    }

    pub fn quad_mesh(&self) -> Result<Mesh, VerifyError> {
        Ok(lshape_quads(&self.shape(), self.h)?)
    }
}

/// Monitor-point history of one run.
#[derive(Debug, Clone)]
pub struct LShapeHistory {
    pub times: Vec<f64>,
    pub temperature: Vec<f64>,
    pub displacement: Vec<[f64; 2]>,
    pub mesh: Mesh,
    pub final_state: FieldState,
    pub time_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistoryRow {
    pub t: f64,
    pub temperature: f64,
    pub ux: f64,
    pub uy: f64,
}

impl LShapeHistory {
    pub fn rows(&self) -> Vec<HistoryRow> {
        self.times
            .iter()
            .zip(&self.temperature)
            .zip(&self.displacement)
            .map(|((&t, &temperature), u)| HistoryRow {
                t,
                temperature,
                ux: u[0],
                uy: u[1],
            })
            .collect()
    }

    /// Writes `t,temperature,ux,uy`, one row per step.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<(), VerifyError> {
        let mut w = csv::Writer::from_writer(out);
        for r in self.rows() {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn run_lshape(
    mesh: Mesh,
    formulation: Formulation,
    opts: &LShapeOptions,
    dt: f64,
    n_steps: usize,
) -> Result<LShapeHistory, VerifyError> {
    let start = Instant::now();
    let materials = [LShapeOptions::material()];
    let bcs = opts.boundary_conditions();
    let system = assemble(
        &mesh,
        &materials,
        &bcs,
        &AssemblyOptions {
            formulation,
            cache: None,
        },
    )?;
    let constraints = Constraints::from_bcs(&mesh, &bcs)?;
    let config = TransientConfig {
        dt,
        n_steps,
        phi0: vec![opts.initial_temperature; mesh.n_nodes()],
        mechanics: true,
    };
    let sol = solve_transient(&system, &constraints, &config)?;
    let mut times = Vec::with_capacity(n_steps);
    let mut temperature = Vec::with_capacity(n_steps);
    let mut displacement = Vec::with_capacity(n_steps);
    for s in &sol.states {
        times.push(s.t);
        temperature.push(probe(&mesh, &s.phi, 1, &opts.monitor)?[0]);
        let u = probe(&mesh, &s.u, 2, &opts.monitor)?;
        displacement.push([u[0], u[1]]);
    }
    let final_state = sol
        .states
        .last()
        .cloned()
        .ok_or_else(|| VerifyError::Parameter("at least one time step is required".into()))?;
    Ok(LShapeHistory {
        times,
        temperature,
        displacement,
        mesh,
        final_state,
        time_s: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone)]
pub struct LShapeStudy {
    pub polygonal: LShapeHistory,
    pub quads: LShapeHistory,
    /// `(dt, monitor temperature at the final time)` for dt, dt/2, ...
    pub dt_study: Vec<(f64, f64)>,
}

impl LShapeStudy {
    /// Relative difference of the monitor temperatures at the final time.
    pub fn final_temperature_gap(&self) -> f64 {
        let a = *self.polygonal.temperature.last().unwrap_or(&0.0);
        let b = *self.quads.temperature.last().unwrap_or(&0.0);
        (a - b).abs() / b.abs()
    }

    /// Ratios of successive differences in the dt study; about 2 for a
    /// first-order scheme.
    pub fn dt_ratios(&self) -> Vec<f64> {
        self.dt_study
            .windows(3)
            .map(|w| (w[0].1 - w[1].1) / (w[1].1 - w[2].1))
            .collect()
    }
}

pub fn bench_lshape(opts: &LShapeOptions) -> Result<LShapeStudy, VerifyError> {
    if !(opts.dt > 0.0) || opts.n_steps == 0 {
        return Err(VerifyError::Parameter("need dt > 0 and at least one step".into()));
    }
    let polygonal = run_lshape(opts.voronoi_mesh()?, opts.formulation, opts, opts.dt, opts.n_steps)?;
    let quads = run_lshape(opts.quad_mesh()?, Formulation::Bilinear, opts, opts.dt, opts.n_steps)?;
    let mut dt_study = Vec::new();
    if opts.dt_levels > 0 {
        dt_study.push((opts.dt, *polygonal.temperature.last().unwrap_or(&0.0)));
        for level in 1..opts.dt_levels {
            let k = 1usize << level;
            let dt = opts.dt / k as f64;
            let run = run_lshape(polygonal.mesh.clone(), opts.formulation, opts, dt, opts.n_steps * k)?;
            dt_study.push((dt, *run.temperature.last().unwrap_or(&0.0)));
        }
    }
    Ok(LShapeStudy {
        polygonal,
        quads,
        dt_study,
    })
}
