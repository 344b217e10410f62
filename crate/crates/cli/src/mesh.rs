use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Subcommand};
use polytherm::geom::{Rect, Vec2};
use polytherm::mesh::{
    gen_quadtree, gen_structured_quads, gen_voronoi_polygons, save_mesh, validate, LShape, Mesh, MeshError,
    QuadtreeSpec, Refinement, Seeds, VoronoiDomain,
};
use serde::Serialize;

use crate::output::{create_dir, RunRecord};
use crate::{input_error, Global};

#[derive(Debug, Clone, Args)]
pub struct Target {
    /// Mesh file to write; defaults to `<out>/mesh.json`.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum MeshCommand {
    /// Structured grid of rectangles.
    Quad {
        #[arg(long, default_value_t = 1.0)]
        width: f64,
        #[arg(long, default_value_t = 1.0)]
        height: f64,
        #[arg(long)]
        nx: usize,
        #[arg(long)]
        ny: usize,
        #[command(flatten)]
        target: Target,
    },
    /// Balanced quadtree with hanging nodes turned into polygon vertices.
    Quadtree {
        /// Domain `x0,y0,x1,y1`.
        #[arg(long, default_value = "0,0,1,1")]
        domain: String,
        /// Base cells along x and y.
        #[arg(long, default_value_t = 1)]
        nx: usize,
        #[arg(long, default_value_t = 1)]
        ny: usize,
        /// Refinement `box:x0,y0,x1,y1:depthN`; repeatable.
        #[arg(long)]
        refine: Vec<String>,
        #[arg(long, default_value_t = 10)]
        max_depth: u32,
        #[command(flatten)]
        target: Target,
    },
    /// Lloyd-relaxed clipped Voronoi polygons.
    Voronoi {
        /// `rect:x0,y0,x1,y1`, `annulus:cx,cy,inner,outer[,segments]` or
        /// `lshape:size`.
        #[arg(long, default_value = "rect:0,0,1,1")]
        domain: String,
        #[arg(long, default_value_t = 100)]
        seeds: usize,
        #[arg(long, default_value_t = 20)]
        lloyd: usize,
        #[command(flatten)]
        target: Target,
    },
}

fn numbers(text: &str, what: &str) -> anyhow::Result<Vec<f64>> {
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| input_error(format!("{what}: `{v}` is not a number")))
        })
        .collect()
}

fn rect(text: &str, what: &str) -> anyhow::Result<Rect> {
    match numbers(text, what)?[..] {
        [x0, y0, x1, y1] => Ok(Rect::new(x0, y0, x1, y1)),
        _ => Err(input_error(format!("{what}: expected x0,y0,x1,y1, got `{text}`"))),
    }
}

pub fn parse_refinement(text: &str) -> anyhow::Result<Refinement> {
    let parts: Vec<&str> = text.split(':').collect();
    let [kind, coords, depth] = parts[..] else {
        return Err(input_error(format!("refinement `{text}`: expected box:x0,y0,x1,y1:depthN")));
    };
    if kind != "box" {
        return Err(input_error(format!("refinement `{text}`: unknown region `{kind}`")));
    }
    let depth = depth
        .strip_prefix("depth")
        .and_then(|d| d.parse::<u32>().ok())
        .ok_or_else(|| input_error(format!("refinement `{text}`: expected depthN, got `{depth}`")))?;
    Ok(Refinement {
        region: rect(coords, "refinement box")?,
        depth,
    })
}

pub fn parse_domain(text: &str) -> anyhow::Result<VoronoiDomain> {
    let (kind, rest) = text
        .split_once(':')
        .ok_or_else(|| input_error(format!("domain `{text}`: expected kind:parameters")))?;
    match kind {
        "rect" => Ok(VoronoiDomain::Rectangle(rect(rest, "rect domain")?)),
        "annulus" => match numbers(rest, "annulus domain")?[..] {
            [cx, cy, inner, outer] => Ok(VoronoiDomain::Annulus {
                center: Vec2::new(cx, cy),
                inner,
                outer,
                segments: None,
            }),
            [cx, cy, inner, outer, segments] if segments >= 3.0 && segments.fract() == 0.0 => {
                Ok(VoronoiDomain::Annulus {
                    center: Vec2::new(cx, cy),
                    inner,
                    outer,
                    segments: Some(segments as usize),
                })
            }
            _ => Err(input_error(format!("annulus domain `{rest}`: expected cx,cy,inner,outer[,segments]"))),
        },
        "lshape" => match numbers(rest, "lshape domain")?[..] {
            [size] if size > 0.0 => Ok(VoronoiDomain::LShape(LShape::square(size))),
            _ => Err(input_error(format!("lshape domain `{rest}`: expected a positive size"))),
        },
        _ => Err(input_error(format!("unknown domain kind `{kind}`"))),
    }
}

/// Generator parameter problems are input errors; the rest are failures.
fn generated(r: Result<Mesh, MeshError>) -> anyhow::Result<Mesh> {
    r.map_err(|e| match e {
        MeshError::Parameter(_) | MeshError::RegionOutsideDomain(_) => input_error(e.to_string()),
        e => anyhow::Error::new(e).context("mesh generation failed"),
    })
}

#[derive(Debug, Serialize)]
struct MeshSummary {
    nodes: usize,
    elements: usize,
    file: PathBuf,
}

pub fn cmd_mesh(cmd: MeshCommand, global: &Global) -> anyhow::Result<()> {
    let (name, mesh, target) = match &cmd {
        MeshCommand::Quad {
            width,
            height,
            nx,
            ny,
            target,
        } => ("mesh quad", generated(gen_structured_quads(*width, *height, *nx, *ny))?, target),
        MeshCommand::Quadtree {
            domain,
            nx,
            ny,
            refine,
            max_depth,
            target,
        } => {
            let refinements = refine.iter().map(|r| parse_refinement(r)).collect::<anyhow::Result<Vec<_>>>()?;
            let mut spec = QuadtreeSpec::new(rect(domain, "quadtree domain")?, *nx, *ny);
            spec.max_depth = *max_depth;
            ("mesh quadtree", generated(gen_quadtree(spec, &refinements))?, target)
        }
        MeshCommand::Voronoi {
            domain,
            seeds,
            lloyd,
            target,
        } => {
            let domain = parse_domain(domain)?;
            let seeds = Seeds::Random {
                count: *seeds,
                seed: global.seed(),
            };
            ("mesh voronoi", generated(gen_voronoi_polygons(&domain, &seeds, *lloyd))?, target)
        }
    };
    let report = validate(&mesh);
    if !report.is_valid() {
        anyhow::bail!("generated mesh failed validation: {report}");
    }
    let file = target.file.clone().unwrap_or_else(|| global.out_dir().join("mesh.json"));
    if let Some(dir) = file.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    save_mesh(&mesh, &file).with_context(|| format!("writing {}", file.display()))?;
    if global.verbose {
        eprintln!("{}: {} nodes, {} elements", file.display(), mesh.n_nodes(), mesh.n_elements());
    }
    if let Some(dir) = global.out.as_deref() {
        let mut r = RunRecord::new(
            name,
            MeshSummary {
                nodes: mesh.n_nodes(),
                elements: mesh.n_elements(),
                file,
            },
        );
        if matches!(cmd, MeshCommand::Voronoi { .. }) {
            r.seed = Some(global.seed());
        }
        create_dir(dir)?;
        r.write(dir)?;
    }
    Ok(())
}
