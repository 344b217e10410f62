//! Clamped 5 x 1 plate with a linear temperature drop, on uniform and locally
//! refined quadtree meshes, against a much finer nested quadtree solution.

use std::collections::HashMap;
use std::time::Instant;

use serde::Serialize;

use super::{l2_error, VerifyError};
use crate::accel::{CacheStats, ParentCache};
use crate::element::{Formulation, Material};
use crate::geom::Rect;
use crate::mesh::{gen_quadtree, Mesh, QuadtreeSpec, Refinement};
use crate::solver::{assemble, solve_steady, AssemblyOptions, BoundaryCondition, Constraints, FieldState};

const LENGTH: f64 = 5.0;
const HEIGHT: f64 = 1.0;
const BASE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct PlateVariant {
    pub name: String,
    pub refinements: Vec<Refinement>,
}

impl PlateVariant {
    pub fn new(name: &str, refinements: Vec<Refinement>) -> Self {
        Self {
            name: name.to_string(),
            refinements,
        }
    }

    /// Uniform refinement of every base cell to `depth`.
    pub fn uniform(name: &str, depth: u32) -> Self {
        let refinements = if depth == 0 {
            Vec::new()
        } else {
            vec![Refinement {
                region: domain(),
                depth,
            }]
        };
        Self::new(name, refinements)
    }

    /// Coarse, fine and the two local refinements around the clamped end,
    /// where the displacement gradient is singular at the corners.
    pub fn standard() -> Vec<Self> {
        let strip = |x1, depth| Refinement {
            region: Rect::new(0.0, 0.0, x1, HEIGHT),
            depth,
        };
        let mut r2 = vec![strip(LENGTH, 1), strip(0.5, 2)];
        r2.extend(corners(0.1, 4));
        r2.extend(corners(0.02, 5));
        vec![
            Self::uniform("coarse", 0),
            Self::uniform("fine", 2),
            Self::new("refinement_1", corners(0.1, 3).to_vec()),
            Self::new("refinement_2", r2),
        ]
    }
}

impl PlateVariant {
    /// Uniform depth 4, graded to depth 7 at the clamped corners.
    pub fn reference() -> Vec<Refinement> {
        let mut r = PlateVariant::uniform("reference", 4).refinements;
        r.extend(corners(0.1, 6));
        r.extend(corners(0.02, 7));
        r
    }
}

/// Boxes of side `size` at the two clamped corners.
fn corners(size: f64, depth: u32) -> [Refinement; 2] {
    [
        Refinement {
            region: Rect::new(0.0, 0.0, size, size),
            depth,
        },
        Refinement {
            region: Rect::new(0.0, HEIGHT - size, size, HEIGHT),
            depth,
        },
    ]
}

fn domain() -> Rect {
    Rect::new(0.0, 0.0, LENGTH, HEIGHT)
}

/// Plate mesh on 0.1 base cells with sets `left`, `right`, `top`, `bottom`.
pub fn plate_mesh(refinements: &[Refinement]) -> Result<Mesh, VerifyError> {
    let spec = QuadtreeSpec::new(domain(), (LENGTH / BASE).round() as usize, (HEIGHT / BASE).round() as usize);
    let mut mesh = gen_quadtree(spec, refinements)?;
    mesh.add_rect_sides(&domain());
    Ok(mesh)
}

fn boundary_conditions() -> Vec<BoundaryCondition> {
    vec![
        BoundaryCondition::temperature("left", 7.0),
        BoundaryCondition::temperature("right", 1.0),
        BoundaryCondition::displacement("left", Some(0.0), Some(0.0)),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlateOptions {
    pub variants: Vec<PlateVariant>,
    /// Refinements of the nested reference mesh; every variant node must be
    /// one of its nodes.
    pub reference: Vec<Refinement>,
    pub accel: bool,
    pub formulation: Formulation,
}

impl Default for PlateOptions {
    fn default() -> Self {
        Self {
            variants: PlateVariant::standard(),
            reference: PlateVariant::reference(),
            accel: true,
            formulation: Formulation::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlateRow {
    pub mesh: String,
    pub elements: usize,
    pub nodes: usize,
    #[serde(rename = "e_L2_T")]
    pub e_l2_t: f64,
    #[serde(rename = "e_L2_U")]
    pub e_l2_u: f64,
    pub assembly_s: f64,
    pub time_s: f64,
    pub accel: bool,
    pub cache_hits: u64,
    pub cache_misses: u64,
}

#[derive(Debug, Clone)]
pub struct PlateStudy {
    pub rows: Vec<PlateRow>,
    pub states: Vec<FieldState>,
    pub reference_elements: usize,
}

impl PlateStudy {
    pub fn row(&self, name: &str) -> Option<&PlateRow> {
        self.rows.iter().find(|r| r.mesh == name)
    }
}

struct Run {
    mesh: Mesh,
    state: FieldState,
    assembly_s: f64,
    time_s: f64,
    stats: CacheStats,
}

fn run(refinements: &[Refinement], accel: bool, formulation: Formulation) -> Result<Run, VerifyError> {
    let mesh = plate_mesh(refinements)?;
    let materials = [Material::unit()];
    let bcs = boundary_conditions();
    let cache = ParentCache::new(formulation);
    let start = Instant::now();
    let opts = AssemblyOptions {
        formulation,
        cache: accel.then_some(&cache),
    };
    let system = assemble(&mesh, &materials, &bcs, &opts)?;
    let assembly_s = start.elapsed().as_secs_f64();
    let constraints = Constraints::from_bcs(&mesh, &bcs)?;
    let sol = solve_steady(&system, &constraints)?;
    Ok(Run {
        mesh,
        state: sol.state,
        assembly_s,
        time_s: start.elapsed().as_secs_f64(),
        stats: cache.stats(),
    })
}

/// Node index by position on the reference lattice.
fn lattice_key(x: f64, y: f64, unit: f64) -> (i64, i64) {
    ((x / unit).round() as i64, (y / unit).round() as i64)
}

pub fn bench_plate(opts: &PlateOptions) -> Result<PlateStudy, VerifyError> {
    let depth = opts.reference.iter().map(|r| r.depth).max().unwrap_or(0);
    let reference = run(&opts.reference, true, opts.formulation)?;
    let unit = BASE / f64::from(1u32 << depth);
    let index: HashMap<(i64, i64), usize> = reference
        .mesh
        .nodes
        .iter()
        .enumerate()
        .map(|(i, p)| (lattice_key(p.x, p.y, unit), i))
        .collect();

    let mut rows = Vec::new();
    let mut states = Vec::new();
    for v in &opts.variants {
        let r = run(&v.refinements, opts.accel, opts.formulation)?;
        let mut t_ref = Vec::with_capacity(r.mesh.n_nodes());
        let mut u_ref = Vec::with_capacity(2 * r.mesh.n_nodes());
        for p in &r.mesh.nodes {
            let &k = index
                .get(&lattice_key(p.x, p.y, unit))
                .ok_or(VerifyError::MissingReferenceNode { x: p.x, y: p.y })?;
            t_ref.push(reference.state.phi[k]);
            u_ref.extend_from_slice(&reference.state.u[2 * k..2 * k + 2]);
        }
        rows.push(PlateRow {
            mesh: v.name.clone(),
            elements: r.mesh.n_elements(),
            nodes: r.mesh.n_nodes(),
            e_l2_t: l2_error(&r.state.phi, &t_ref)?,
            e_l2_u: l2_error(&r.state.u, &u_ref)?,
            assembly_s: r.assembly_s,
            time_s: r.time_s,
            accel: opts.accel,
            cache_hits: r.stats.hits,
            cache_misses: r.stats.misses,
        });
        states.push(r.state);
    }
    Ok(PlateStudy {
        rows,
        states,
        reference_elements: reference.mesh.n_elements(),
    })
}

pub fn write_plate_rows<W: std::io::Write>(out: W, rows: &[PlateRow]) -> Result<(), VerifyError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
