use std::path::Path;

use anyhow::Context;
use clap::Subcommand;
use polytherm::element::Formulation;
use polytherm::export::write_vtk_file;
use polytherm::solver::element_stresses;
use polytherm::verify::{
    bench_lshape, bench_plate, bench_ring, write_plate_rows, write_reports, AnalyticRing, LShapeHistory,
    LShapeOptions, PlateOptions, RingOptions, RingRun, VerifyError,
};
use serde::Serialize;

use crate::output::{create, create_dir, write_csv, RunRecord};
use crate::{input_error, Global};

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// Thick ring against its closed form; one row per mesh size.
    Ring {
        /// Comma-separated mesh sizes.
        #[arg(long, default_value = "0.1,0.05,0.025,0.0125")]
        sizes: String,
        #[arg(long, default_value_t = 20)]
        lloyd: usize,
    },
    /// Clamped plate on uniform and locally refined quadtree meshes.
    Plate,
    /// Transient L-shaped plate, polygonal against quadrilateral elements.
    Lshape {
        #[arg(long, default_value_t = 1.0)]
        dt: f64,
        #[arg(long, default_value_t = 100.0)]
        tend: f64,
        /// Element size.
        #[arg(long, default_value_t = 0.0025)]
        h: f64,
        #[arg(long, default_value_t = 20)]
        lloyd: usize,
        /// Number of halved time steps in the self-convergence study.
        #[arg(long, default_value_t = 0)]
        dt_levels: usize,
    },
}

fn formulation(global: &Global) -> Formulation {
    match global.quad_degree() {
        Some(degree) => Formulation::Wachspress { degree, corrected: true },
        None => Formulation::default(),
    }
}

/// Bad benchmark parameters are input errors; the rest are failures.
fn checked<T>(r: Result<T, VerifyError>) -> anyhow::Result<T> {
    r.map_err(|e| match e {
        VerifyError::Parameter(_) => input_error(e.to_string()),
        e => anyhow::Error::new(e).context("benchmark failed"),
    })
}

#[derive(Debug, Serialize)]
struct ProfileRow {
    r: f64,
    temperature: f64,
    temperature_exact: f64,
    radial_displacement: f64,
    radial_displacement_exact: f64,
}

#[derive(Debug, Serialize)]
struct StressRow {
    r: f64,
    radial_stress: f64,
    radial_stress_exact: f64,
}

fn write_ring_profile(dir: &Path, run: &RingRun) -> anyhow::Result<()> {
    let ring = AnalyticRing::default();
    let p = &run.profile;
    let mut nodes: Vec<ProfileRow> = (0..p.r.len())
        .map(|i| ProfileRow {
            r: p.r[i],
            temperature: p.temperature[i],
            temperature_exact: ring.temperature(p.r[i]),
            radial_displacement: p.radial_displacement[i],
            radial_displacement_exact: ring.radial_displacement(p.r[i]),
        })
        .collect();
    nodes.sort_by(|a, b| a.r.total_cmp(&b.r));
    write_csv(&dir.join("ring_profile.csv"), &nodes)?;
    let mut elements: Vec<StressRow> = (0..p.r_element.len())
        .map(|i| StressRow {
            r: p.r_element[i],
            radial_stress: p.radial_stress[i],
            radial_stress_exact: ring.radial_stress(p.r_element[i]),
        })
        .collect();
    elements.sort_by(|a, b| a.r.total_cmp(&b.r));
    write_csv(&dir.join("ring_stress.csv"), &elements)
}

#[derive(Debug, Serialize)]
struct LShapeRow {
    mesh: &'static str,
    elements: usize,
    nodes: usize,
    temperature: f64,
    ux: f64,
    uy: f64,
    time_s: f64,
}

impl LShapeRow {
    fn new(mesh: &'static str, h: &LShapeHistory) -> Self {
        let [ux, uy] = h.displacement.last().copied().unwrap_or([0.0; 2]);
        Self {
            mesh,
            elements: h.mesh.n_elements(),
            nodes: h.mesh.n_nodes(),
            temperature: h.temperature.last().copied().unwrap_or(0.0),
            ux,
            uy,
            time_s: h.time_s,
        }
    }
}

#[derive(Debug, Serialize)]
struct DtRow {
    dt: f64,
    temperature: f64,
}

fn write_final(dir: &Path, name: &str, h: &LShapeHistory, formulation: Formulation) -> anyhow::Result<()> {
    let stress = element_stresses(&h.mesh, &[LShapeOptions::material()], formulation, &h.final_state)?;
    write_vtk_file(dir.join(name), "lshape final state", &h.mesh, &h.final_state, Some(&stress))
        .with_context(|| format!("writing {name}"))
}

#[derive(Debug, Serialize)]
struct Parameters<'a> {
    name: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    sizes: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lloyd: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h: Option<f64>,
}

impl<'a> Parameters<'a> {
    fn new(name: &'a str) -> Self {
        Self {
            name,
            sizes: None,
            lloyd: None,
            dt: None,
            n_steps: None,
            h: None,
        }
    }
}

pub fn cmd_bench(cmd: BenchCommand, global: &Global) -> anyhow::Result<()> {
    let dir = global.out_dir();
    let formulation = formulation(global);
    let seed = global.seed();
    let mut record = RunRecord::new("bench", Parameters::new(""));
    record.quad_degree = global.quad_degree();
    match cmd {
        BenchCommand::Ring { sizes, lloyd } => {
            let sizes = sizes
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|_| input_error(format!("mesh size `{s}` is not a number"))))
                .collect::<anyhow::Result<Vec<f64>>>()?;
            create_dir(&dir)?;
            let study = checked(bench_ring(&RingOptions {
                sizes: sizes.clone(),
                seed,
                lloyd_iters: lloyd,
                formulation,
                with_quads: true,
            }))?;
            write_reports(create(&dir.join("ring.csv"))?, &study.polygonal_reports())?;
            write_reports(create(&dir.join("ring_quads.csv"))?, &study.quad_reports())?;
            if let Some(finest) = study.polygonal.last() {
                write_ring_profile(&dir, finest)?;
            }
            if global.verbose {
                for r in study.polygonal_reports() {
                    eprintln!("h {} e_T {:.3e} e_U {:.3e}", r.h, r.e_l2_t, r.e_l2_u);
                }
            }
            record.seed = Some(seed);
            record.parameters = Parameters {
                sizes: Some(sizes),
                lloyd: Some(lloyd),
                ..Parameters::new("ring")
            };
        }
        BenchCommand::Plate => {
            let accel = global.accel.map_or(true, |a| a.enabled());
            create_dir(&dir)?;
            let study = checked(bench_plate(&PlateOptions {
                accel,
                formulation,
                ..PlateOptions::default()
            }))?;
            write_plate_rows(create(&dir.join("plate.csv"))?, &study.rows)?;
            if global.verbose {
                for r in &study.rows {
                    eprintln!(
                        "{}: assembly {:.3} s, cache hits {} misses {}",
                        r.mesh, r.assembly_s, r.cache_hits, r.cache_misses
                    );
                }
            }
            record.accel = Some(accel);
            record.parameters = Parameters::new("plate");
        }
        BenchCommand::Lshape {
            dt,
            tend,
            h,
            lloyd,
            dt_levels,
        } => {
            if !(dt > 0.0 && tend > 0.0) {
                return Err(input_error("need dt > 0 and tend > 0"));
            }
            let steps = tend / dt;
            let n_steps = steps.round() as usize;
            if n_steps == 0 || (steps - n_steps as f64).abs() > 1e-9 * steps {
                return Err(input_error(format!("tend {tend} is not a whole number of steps of {dt}")));
            }
            create_dir(&dir)?;
            let opts = LShapeOptions {
                h,
                dt,
                n_steps,
                seed,
                lloyd_iters: lloyd,
                formulation,
                dt_levels,
                ..LShapeOptions::default()
            };
            let study = checked(bench_lshape(&opts))?;
            study.polygonal.write_csv(create(&dir.join("history.csv"))?)?;
            study.quads.write_csv(create(&dir.join("history_quads.csv"))?)?;
            write_csv(
                &dir.join("lshape.csv"),
                &[
                    LShapeRow::new("polygonal", &study.polygonal),
                    LShapeRow::new("quads", &study.quads),
                ],
            )?;
            if !study.dt_study.is_empty() {
                let rows: Vec<DtRow> = study.dt_study.iter().map(|&(dt, temperature)| DtRow { dt, temperature }).collect();
                write_csv(&dir.join("dt_study.csv"), &rows)?;
            }
            write_final(&dir, "lshape_polygonal.vtk", &study.polygonal, formulation)?;
            write_final(&dir, "lshape_quads.vtk", &study.quads, Formulation::Bilinear)?;
            if global.verbose {
                eprintln!("final monitor temperature gap {:.3e}", study.final_temperature_gap());
            }
            record.seed = Some(seed);
            record.parameters = Parameters {
                lloyd: Some(lloyd),
                dt: Some(dt),
                n_steps: Some(n_steps),
                h: Some(h),
                ..Parameters::new("lshape")
            };
        }
    }
    record.write(&dir)
}
