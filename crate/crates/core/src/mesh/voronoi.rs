//! Clipped Voronoi polygon meshes with Lloyd relaxation.
//!
//! Cells are computed seed by seed by clipping the convex outer boundary with
//! bisector half-planes of nearby seeds. Holes (the inner circle of an
//! annulus, the notch of an L-shape) are carved out with fixed seed pairs
//! mirrored across each boundary chord: the bisector of a pair is the chord
//! itself, and the outer seed of the pair is a ghost whose cell is discarded.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{LShape, Mesh, MeshError, PointGrid, PolyElement};
use crate::geom::{self, Rect, Vec2};

#[derive(Debug, Clone, PartialEq)]
pub enum VoronoiDomain {
    Rectangle(Rect),
    /// Annulus with polygonal (inscribed) circle boundaries. `segments`
    /// fixes the chord count of both circles; `None` picks it from the cell
    /// size.
    Annulus {
        center: Vec2,
        inner: f64,
        outer: f64,
        segments: Option<usize>,
    },
    LShape(LShape),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Seeds {
    /// `count` cells in total, seeded from a deterministic generator.
    Random { count: usize, seed: u64 },
    /// Free seeds given explicitly; boundary-layer seeds are added for holes.
    Explicit(Vec<Vec2>),
}

struct Layout {
    outer: Vec<Vec2>,
    holes: Vec<Vec<Vec2>>,
    fixed: Vec<Vec2>,
    ghosts: Vec<Vec2>,
    h: f64,
}

/// Number of chords for a circle of radius `r` so that chords are about `h`
/// long and the chord-to-arc gap stays below `h / 10`.
pub(crate) fn circle_segments(r: f64, h: f64) -> usize {
    let by_length = (2.0 * std::f64::consts::PI * r / h).ceil() as usize;
    let ratio = (1.0 - h / (10.0 * r)).max(-1.0);
    let by_sagitta = (std::f64::consts::PI / ratio.acos()).floor() as usize + 1;
    by_length.max(by_sagitta).max(8)
}

pub(crate) fn circle_polygon(center: Vec2, r: f64, n: usize) -> Vec<Vec2> {
    (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            center + Vec2::new(r * t.cos(), r * t.sin())
        })
        .collect()
}

fn inside_convex(poly: &[Vec2], p: &Vec2, strict: bool) -> bool {
    let m = poly.len();
    (0..m).all(|i| {
        let a = poly[i];
        let b = poly[(i + 1) % m];
        let c = geom::cross(&(b - a), &(p - a));
        if strict {
            c > 0.0
        } else {
            c >= 0.0
        }
    })
}

fn boundary_distance(poly: &[Vec2], p: &Vec2) -> f64 {
    let m = poly.len();
    (0..m)
        .map(|i| geom::segment_distance(p, &poly[i], &poly[(i + 1) % m]).0)
        .fold(f64::INFINITY, f64::min)
}

fn on_segment_of(poly: &[Vec2], p: &Vec2, tol: f64) -> bool {
    boundary_distance(poly, p) <= tol
}

impl VoronoiDomain {
    fn area(&self) -> f64 {
        match self {
            VoronoiDomain::Rectangle(r) => r.area(),
            VoronoiDomain::Annulus { inner, outer, .. } => {
                std::f64::consts::PI * (outer * outer - inner * inner)
            }
            VoronoiDomain::LShape(l) => l.area(),
        }
    }

    fn layout(&self, h: f64) -> Result<Layout, MeshError> {
        let (outer, holes) = match self {
            VoronoiDomain::Rectangle(r) => {
                if !(r.width() > 0.0 && r.height() > 0.0) {
                    return Err(MeshError::Parameter("rectangle must have positive size".into()));
                }
                (r.corners(), Vec::new())
            }
            VoronoiDomain::Annulus {
                center,
                inner,
                outer,
                segments,
            } => {
                if !(*inner > 0.0 && outer > inner) {
                    return Err(MeshError::Parameter(format!(
                        "annulus radii must satisfy 0 < inner < outer, got {inner}, {outer}"
                    )));
                }
                if segments.is_some_and(|n| n < 3) {
                    return Err(MeshError::Parameter("circles need at least 3 segments".into()));
                }
                let n = |r: f64| segments.unwrap_or_else(|| circle_segments(r, h));
                (
                    circle_polygon(*center, *outer, n(*outer)),
                    vec![circle_polygon(*center, *inner, n(*inner))],
                )
            }
            VoronoiDomain::LShape(l) => {
                l.check()?;
                (l.outer.corners(), vec![l.notch.corners()])
            }
        };
        let scale = geom::diameter(&outer);
        let mut fixed = Vec::new();
        let mut ghosts = Vec::new();
        for hole in &holes {
            let m = hole.len();
            for i in 0..m {
                let a = hole[i];
                let b = hole[(i + 1) % m];
                let mid = 0.5 * (a + b);
                // Hole edges on the outer boundary need no seed layer.
                if !inside_convex(&outer, &mid, true) || on_segment_of(&outer, &mid, 1e-12 * scale) {
                    continue;
                }
                let len = (b - a).norm();
                let k = ((len / h).round() as usize).max(1);
                let n = geom::outward_normal(&a, &b);
                let step = len / k as f64;
                for s in 0..k {
                    let m = a + (b - a) * ((s as f64 + 0.5) / k as f64);
                    fixed.push(m + n * (0.5 * step));
                    ghosts.push(m - n * (0.5 * step));
                }
            }
        }
        Ok(Layout {
            outer,
            holes,
            fixed,
            ghosts,
            h,
        })
    }
}

impl Layout {
    fn admissible(&self, p: &Vec2) -> bool {
        inside_convex(&self.outer, p, true)
            && self
                .holes
                .iter()
                .all(|hole| !inside_convex(hole, p, false) && boundary_distance(hole, p) >= 0.75 * self.h)
    }
}

fn clip(poly: &[Vec2], mid: &Vec2, dir: &Vec2) -> Vec<Vec2> {
    let m = poly.len();
    let mut out = Vec::with_capacity(m + 1);
    for i in 0..m {
        let p = poly[i];
        let q = poly[(i + 1) % m];
        let sp = (p - mid).dot(dir);
        let sq = (q - mid).dot(dir);
        if sp <= 0.0 {
            out.push(p);
        }
        if (sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0) {
            let t = sp / (sp - sq);
            out.push(p + (q - p) * t);
        }
    }
    out
}

/// Voronoi cell of `sites[i]` restricted to `outer`.
fn cell_of(i: usize, sites: &[Vec2], grid: &PointGrid, outer: &[Vec2], buf: &mut Vec<usize>) -> Vec<Vec2> {
    let s = sites[i];
    let mut poly = outer.to_vec();
    let mut ring = 0;
    loop {
        buf.clear();
        let any = grid.query_ring(&s, ring, buf);
        buf.sort_by(|&a, &b| {
            (sites[a] - s)
                .norm_squared()
                .partial_cmp(&(sites[b] - s).norm_squared())
                .unwrap()
                .then(a.cmp(&b))
        });
        for &j in buf.iter() {
            if j == i {
                continue;
            }
            let d = sites[j] - s;
            if d.norm_squared() == 0.0 {
                continue;
            }
            poly = clip(&poly, &(s + 0.5 * d), &d);
            if poly.is_empty() {
                return poly;
            }
        }
        let reach = poly.iter().map(|v| (v - s).norm()).fold(0.0, f64::max);
        if !any || 2.0 * reach <= ring as f64 * grid.cell_size() {
            return poly;
        }
        ring += 1;
    }
}

fn compute_cells(real: &[Vec2], ghosts: &[Vec2], outer: &[Vec2]) -> Vec<Vec<Vec2>> {
    let mut sites = real.to_vec();
    sites.extend_from_slice(ghosts);
    let grid = PointGrid::new(&sites, 2.0);
    let mut buf = Vec::new();
    (0..real.len())
        .map(|i| cell_of(i, &sites, &grid, outer, &mut buf))
        .collect()
}

/// Clipped, Lloyd-relaxed Voronoi mesh of `domain`.
///
/// Boundary sets: `left`/`right`/`bottom`/`top` for rectangles,
/// `inner`/`outer` for annuli, and the L-shape sides plus `notch`.
pub fn gen_voronoi_polygons(domain: &VoronoiDomain, seeds: &Seeds, lloyd_iters: usize) -> Result<Mesh, MeshError> {
    let count = match seeds {
        Seeds::Random { count, .. } => *count,
        Seeds::Explicit(p) => p.len(),
    };
    if count < 4 {
        return Err(MeshError::Parameter(format!("need at least 4 seeds, got {count}")));
    }
    let h = (domain.area() / count as f64).sqrt();
    let layout = domain.layout(h)?;

    let mut free: Vec<Vec2> = match seeds {
        Seeds::Explicit(p) => {
            if let Some(bad) = p.iter().find(|q| !layout.admissible(q)) {
                return Err(MeshError::SeedDegeneracy(format!(
                    "seed ({}, {}) lies outside the domain or too close to a hole",
                    bad.x, bad.y
                )));
            }
            p.clone()
        }
        Seeds::Random { seed, .. } => {
            let n_free = count.checked_sub(layout.fixed.len()).filter(|&n| n >= 1).ok_or_else(|| {
                MeshError::Parameter(format!(
                    "{count} seeds cannot cover the {} boundary-layer cells",
                    layout.fixed.len()
                ))
            })?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let lo = layout.outer.iter().fold(Vec2::repeat(f64::INFINITY), |a, p| a.inf(p));
            let hi = layout.outer.iter().fold(Vec2::repeat(f64::NEG_INFINITY), |a, p| a.sup(p));
            let mut pts = Vec::with_capacity(n_free);
            let mut attempts = 0usize;
            while pts.len() < n_free {
                attempts += 1;
                if attempts > 1000 * n_free + 10_000 {
                    return Err(MeshError::SeedDegeneracy("could not place random seeds".into()));
                }
                let p = Vec2::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
                if layout.admissible(&p) {
                    pts.push(p);
                }
            }
            pts
        }
    };

    let mut sorted: Vec<(u64, u64)> = free
        .iter()
        .chain(&layout.fixed)
        .map(|p| (p.x.to_bits(), p.y.to_bits()))
        .collect();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(MeshError::SeedDegeneracy("duplicate seeds".into()));
    }

    let n_free = free.len();
    let mut cells;
    let mut iter = 0;
    loop {
        let mut real = free.clone();
        real.extend_from_slice(&layout.fixed);
        cells = compute_cells(&real, &layout.ghosts, &layout.outer);
        if iter == lloyd_iters {
            break;
        }
        for (k, p) in free.iter_mut().enumerate() {
            if cells[k].len() < 3 {
                continue;
            }
            let (area, c) = geom::area_centroid(&cells[k]);
            if area > 0.0 && layout.admissible(&c) {
                *p = c;
            }
        }
        iter += 1;
    }
    let _ = n_free;

    let mesh = assemble_cells(&cells, h)?;
    finish(domain, &layout, mesh)
}

fn assemble_cells(cells: &[Vec<Vec2>], h: f64) -> Result<Mesh, MeshError> {
    let tol = 1e-8 * h;
    let key = |p: &Vec2| ((p.x / tol).floor() as i64, (p.y / tol).floor() as i64);
    let mut lookup: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut nodes: Vec<Vec2> = Vec::new();
    let mut elements = Vec::with_capacity(cells.len());
    for (c, cell) in cells.iter().enumerate() {
        let mut ids: Vec<usize> = Vec::with_capacity(cell.len());
        for p in cell {
            let (kx, ky) = key(p);
            let mut found = None;
            'search: for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(list) = lookup.get(&(kx + dx, ky + dy)) {
                        for &n in list {
                            if (nodes[n] - p).norm() <= tol {
                                found = Some(n);
                                break 'search;
                            }
                        }
                    }
                }
            }
            let id = found.unwrap_or_else(|| {
                nodes.push(*p);
                lookup.entry((kx, ky)).or_default().push(nodes.len() - 1);
                nodes.len() - 1
            });
            if ids.last() != Some(&id) {
                ids.push(id);
            }
        }
        while ids.len() > 1 && ids.first() == ids.last() {
            ids.pop();
        }
        if ids.len() < 3 {
            return Err(MeshError::SeedDegeneracy(format!(
                "cell {c} collapsed to {} vertices after clipping",
                ids.len()
            )));
        }
        elements.push(PolyElement::new(ids, 0));
    }
    Ok(Mesh::new(nodes, elements))
}

fn finish(domain: &VoronoiDomain, layout: &Layout, mut mesh: Mesh) -> Result<Mesh, MeshError> {
    let tol = 1e-7 * layout.h;
    // Every boundary edge must lie on the outer polygon or on a hole.
    for [a, b] in mesh.boundary_edges() {
        let mid = 0.5 * (mesh.nodes[a] + mesh.nodes[b]);
        let ok = on_segment_of(&layout.outer, &mid, tol)
            || layout.holes.iter().any(|hole| on_segment_of(hole, &mid, tol));
        if !ok {
            return Err(MeshError::SeedDegeneracy(format!(
                "cell boundary at ({:.6}, {:.6}) does not follow the domain boundary",
                mid.x, mid.y
            )));
        }
    }
    match domain {
        VoronoiDomain::Rectangle(r) => mesh.add_rect_sides(r),
        VoronoiDomain::Annulus { .. } => {
            let outer = layout.outer.clone();
            let inner = layout.holes[0].clone();
            mesh.add_boundary_set("inner", move |p| on_segment_of(&inner, p, tol));
            mesh.add_boundary_set("outer", move |p| on_segment_of(&outer, p, tol));
        }
        VoronoiDomain::LShape(l) => l.add_sets(&mut mesh),
    }
    Ok(mesh)
}
