use std::path::Path;
use std::time::Instant;

use anyhow::Context;
use polytherm::accel::ParentCache;
use polytherm::export::write_vtk_file;
use polytherm::geom::Vec2;
use polytherm::mesh::Mesh;
use polytherm::solver::{
    assemble, element_stresses, solve_steady, solve_thermal, solve_transient, AssemblyOptions, Constraints,
    FieldState, TransientConfig,
};
use polytherm::verify::probe;
use serde::Serialize;

use crate::config::{load_run, Analysis, RunConfig};
use crate::output::{create_dir, write_csv, RunRecord};
use crate::{input_error, Global};

/// One row; columns `analysis,nodes,elements,steps,residual_thermal,
/// residual_mechanical,assembly_s,solve_s,accel,cache_hits,cache_misses,cache_entries`.
#[derive(Debug, Serialize)]
struct Summary {
    analysis: &'static str,
    nodes: usize,
    elements: usize,
    steps: usize,
    residual_thermal: f64,
    residual_mechanical: f64,
    assembly_s: f64,
    solve_s: f64,
    accel: bool,
    cache_hits: u64,
    cache_misses: u64,
    cache_entries: usize,
}

#[derive(Debug, Serialize)]
struct HistoryRow {
    step: usize,
    t: f64,
    temperature_min: f64,
    temperature_max: f64,
    displacement_max: f64,
}

#[derive(Debug, Serialize)]
struct MonitorRow {
    step: usize,
    t: f64,
    temperature: f64,
    ux: f64,
    uy: f64,
}

pub fn cmd_solve(path: &Path, global: &Global) -> anyhow::Result<()> {
    let mut run = load_run(path, global.out.as_deref())?;
    if let Some(a) = global.accel {
        run.config.accel = a.enabled();
    }
    if let Some(d) = global.quad_degree() {
        run.config.quad_degree = d;
    }
    let (config, mesh) = (&run.config, &run.mesh);
    config.validate(mesh)?;
    let monitor = config.monitor.map(|[x, y]| Vec2::new(x, y));
    if let Some(p) = monitor {
        if mesh.locate(&p).is_none() {
            return Err(input_error(format!("monitor point ({}, {}) lies outside the mesh", p.x, p.y)));
        }
    }
    create_dir(&run.out_dir)?;

    let formulation = config.formulation();
    let cache = ParentCache::new(formulation);
    let start = Instant::now();
    let system = assemble(
        mesh,
        &config.materials,
        &config.bcs,
        &AssemblyOptions {
            formulation,
            cache: config.accel.then_some(&cache),
        },
    )
    .context("assembly failed")?;
    let assembly_s = start.elapsed().as_secs_f64();
    let constraints = Constraints::from_bcs(mesh, &config.bcs).map_err(|e| input_error(e.to_string()))?;

    let start = Instant::now();
    let (states, residual_thermal, residual_mechanical) = match &config.analysis {
        Analysis::Steady => {
            if config.mechanics {
                let sol = solve_steady(&system, &constraints).context("steady solve failed")?;
                (vec![sol.state], sol.residual_thermal, sol.residual_mechanical)
            } else {
                let (phi, res) = solve_thermal(&system, &constraints).context("thermal solve failed")?;
                let state = FieldState {
                    t: 0.0,
                    u: vec![0.0; 2 * phi.len()],
                    phi,
                };
                (vec![state], res, 0.0)
            }
        }
        Analysis::Transient { dt, n_steps, phi0 } => {
            let tc = TransientConfig {
                dt: *dt,
                n_steps: *n_steps,
                phi0: mesh.nodes.iter().map(|p| phi0.at(p)).collect(),
                mechanics: config.mechanics,
            };
            let sol = solve_transient(&system, &constraints, &tc).context("transient solve failed")?;
            (sol.states, sol.max_residual, sol.max_residual)
        }
    };
    let solve_s = start.elapsed().as_secs_f64();
    let stats = cache.stats();
    if global.verbose {
        eprintln!(
            "assembly {assembly_s:.3} s, solve {solve_s:.3} s, cache hits {} misses {} entries {}",
            stats.hits, stats.misses, stats.entries
        );
    }

    let dir = &run.out_dir;
    let transient = matches!(config.analysis, Analysis::Transient { .. });
    let width = states.len().to_string().len().max(4);
    for (i, s) in states.iter().enumerate() {
        let stress = element_stresses(mesh, &config.materials, formulation, s).context("stress recovery failed")?;
        let name = if transient {
            format!("fields_{:0width$}.vtk", i + 1)
        } else {
            "fields.vtk".to_string()
        };
        let title = format!("polytherm t = {}", s.t);
        write_vtk_file(dir.join(&name), &title, mesh, s, Some(&stress)).with_context(|| format!("writing {name}"))?;
    }
    if transient {
        write_csv(&dir.join("history.csv"), &history(&states))?;
        if let Some(p) = monitor {
            write_csv(&dir.join("monitor.csv"), &monitor_rows(mesh, &states, &p)?)?;
        }
    }
    let summary = Summary {
        analysis: if transient { "transient" } else { "steady" },
        nodes: mesh.n_nodes(),
        elements: mesh.n_elements(),
        steps: if transient { states.len() } else { 0 },
        residual_thermal,
        residual_mechanical,
        assembly_s,
        solve_s,
        accel: config.accel,
        cache_hits: stats.hits,
        cache_misses: stats.misses,
        cache_entries: stats.entries,
    };
    write_csv(&dir.join("summary.csv"), &[summary])?;
    record(config, global).write(dir)
}

fn record<'a>(config: &'a RunConfig, global: &Global) -> RunRecord<'a, &'a RunConfig> {
    let mut r = RunRecord::new("solve", config);
    r.seed = global.seed;
    r.accel = Some(config.accel);
    r.quad_degree = Some(config.quad_degree);
    r
}

fn history(states: &[FieldState]) -> Vec<HistoryRow> {
    states
        .iter()
        .enumerate()
        .map(|(i, s)| HistoryRow {
            step: i + 1,
            t: s.t,
            temperature_min: s.phi.iter().copied().fold(f64::INFINITY, f64::min),
            temperature_max: s.phi.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            displacement_max: s.u.chunks(2).map(|u| u[0].hypot(u[1])).fold(0.0, f64::max),
        })
        .collect()
}

fn monitor_rows(mesh: &Mesh, states: &[FieldState], p: &Vec2) -> anyhow::Result<Vec<MonitorRow>> {
    states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let u = probe(mesh, &s.u, 2, p)?;
            Ok(MonitorRow {
                step: i + 1,
                t: s.t,
                temperature: probe(mesh, &s.phi, 1, p)?[0],
                ux: u[0],
                uy: u[1],
            })
        })
        .collect()
}
