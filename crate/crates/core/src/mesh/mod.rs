//! Mesh data model, validation, file I/O and generators.
//!
//! A [`Mesh`] is a list of nodes and convex counter-clockwise polygonal
//! elements. Nodes that lie on the straight edge of a coarser neighbour
//! (quadtree hanging nodes) are stored as genuine polygon vertices, so every
//! mesh produced here is conforming without constraint equations.

mod grid;
mod io;
mod quadtree;
mod shapes;
mod structured;
mod voronoi;

pub(crate) use grid::PointGrid;
pub use io::{load_mesh, mesh_from_json, mesh_to_json, save_mesh};
pub use quadtree::{gen_quadtree, Quadtree, QuadtreeCell, QuadtreeSpec, Refinement};
pub use shapes::{annulus_quads, lshape_quads, lshape_voronoi, LShape};
pub use structured::gen_structured_quads;
pub use voronoi::{gen_voronoi_polygons, Seeds, VoronoiDomain};

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::geom::{self, Vec2};

/// Axis tolerance used by generators when classifying boundary nodes.
pub const AXIS_TOL: f64 = 1e-9;

/// Default upper bound on the number of polygon vertices.
pub const DEFAULT_MAX_VERTICES: usize = 12;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("mesh parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("mesh file is missing section `{0}`")]
    MissingSection(String),
    #[error("mesh file is truncated at line {line}, column {column}; missing section(s): {missing}")]
    Truncated {
        line: usize,
        column: usize,
        missing: String,
    },
    #[error("mesh file field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("invalid mesh: {0}")]
    Invalid(ValidationReport),
    #[error("invalid generator parameter: {0}")]
    Parameter(String),
    #[error("refinement region {0:?} lies outside the domain")]
    RegionOutsideDomain(geom::Rect),
    #[error("seed degeneracy: {0}")]
    SeedDegeneracy(String),
    #[error("element {element} is degenerate (area {area:e})")]
    Degenerate { element: usize, area: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Convex polygonal element: counter-clockwise node ids and a material index.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyElement {
    pub nodes: Vec<usize>,
    pub material: usize,
}

impl PolyElement {
    pub fn new(nodes: Vec<usize>, material: usize) -> Self {
        Self { nodes, material }
    }

    /// Directed edges `(v_i, v_{i+1})`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let m = self.nodes.len();
        (0..m).map(move |i| (self.nodes[i], self.nodes[(i + 1) % m]))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<Vec2>,
    pub elements: Vec<PolyElement>,
    pub node_sets: BTreeMap<String, Vec<usize>>,
    pub edge_sets: BTreeMap<String, Vec<[usize; 2]>>,
}

impl Mesh {
    pub fn new(nodes: Vec<Vec2>, elements: Vec<PolyElement>) -> Self {
        Self {
            nodes,
            elements,
            ..Default::default()
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn coords(&self, element: usize) -> Vec<Vec2> {
        self.elements[element]
            .nodes
            .iter()
            .map(|&n| self.nodes[n])
            .collect()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.elements.len())
            .map(|e| geom::signed_area(&self.coords(e)))
            .sum()
    }

    /// Undirected edges used by exactly one element, in element order.
    pub fn boundary_edges(&self) -> Vec<[usize; 2]> {
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for el in &self.elements {
            for (a, b) in el.edges() {
                *count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let mut out = Vec::new();
        for el in &self.elements {
            for (a, b) in el.edges() {
                if count[&(a.min(b), a.max(b))] == 1 {
                    out.push([a, b]);
                }
            }
        }
        out
    }

    /// Adds a node set holding every node accepted by `pred`, and the edge set
    /// of boundary edges whose both endpoints are accepted.
    pub fn add_boundary_set(&mut self, name: &str, pred: impl Fn(&Vec2) -> bool) {
        let boundary = self.boundary_edges();
        let mut on_boundary = vec![false; self.nodes.len()];
        for [a, b] in &boundary {
            on_boundary[*a] = true;
            on_boundary[*b] = true;
        }
        let nodes: Vec<usize> = (0..self.nodes.len())
            .filter(|&i| on_boundary[i] && pred(&self.nodes[i]))
            .collect();
        let mut edges: Vec<[usize; 2]> = boundary
            .into_iter()
            .filter(|[a, b]| {
                pred(&self.nodes[*a])
                    && pred(&self.nodes[*b])
                    && pred(&(0.5 * (self.nodes[*a] + self.nodes[*b])))
            })
            .collect();
        edges.sort_by(|p, q| {
            let mp = self.nodes[p[0]] + self.nodes[p[1]];
            let mq = self.nodes[q[0]] + self.nodes[q[1]];
            (mp.x, mp.y).partial_cmp(&(mq.x, mq.y)).unwrap()
        });
        self.node_sets.insert(name.to_string(), nodes);
        self.edge_sets.insert(name.to_string(), edges);
    }

    /// Adds the four sides of an axis-aligned bounding rectangle as
    /// `left`/`right`/`bottom`/`top` node and edge sets.
    pub fn add_rect_sides(&mut self, rect: &geom::Rect) {
        let tol = AXIS_TOL * rect.width().max(rect.height());
        let r = *rect;
        self.add_boundary_set("left", move |p| (p.x - r.x0).abs() <= tol);
        self.add_boundary_set("right", move |p| (p.x - r.x1).abs() <= tol);
        self.add_boundary_set("bottom", move |p| (p.y - r.y0).abs() <= tol);
        self.add_boundary_set("top", move |p| (p.y - r.y1).abs() <= tol);
    }

    /// Index of an element containing `p`. Linear scan; intended for probes.
    pub fn locate(&self, p: &Vec2) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for e in 0..self.elements.len() {
            let poly = self.coords(e);
            let scale = geom::diameter(&poly);
            let m = poly.len();
            let mut worst = f64::INFINITY;
            for i in 0..m {
                let a = poly[i];
                let b = poly[(i + 1) % m];
                let d = geom::cross(&(b - a), &(p - a)) / (b - a).norm();
                worst = worst.min(d / scale);
            }
            if worst >= -1e-12 {
                if best.map_or(true, |(_, w)| worst > w) {
                    best = Some((e, worst));
                }
            }
        }
        best.map(|(e, _)| e)
    }
}

/// Area and area-weighted centroid of one element.
pub fn polygon_geometry(mesh: &Mesh, element: usize) -> Result<(f64, Vec2), MeshError> {
    let poly = mesh.coords(element);
    let (area, c) = geom::area_centroid(&poly);
    let scale = geom::diameter(&poly);
    if !(area > 1e-14 * scale * scale) {
        return Err(MeshError::Degenerate { element, area });
    }
    Ok((area, c))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonFiniteNode { node: usize },
    VertexCount { element: usize, count: usize },
    DanglingId { element: usize, node: usize },
    RepeatedNode { element: usize, node: usize },
    UnknownMaterial { element: usize, material: usize },
    Degenerate { element: usize },
    ClockwiseWinding { element: usize },
    NonConvex { element: usize, vertex: usize },
    HangingNode { element: usize, edge: [usize; 2], node: usize },
    OverlappingEdge { edge: [usize; 2], uses: usize },
    DanglingSetId { set: String, node: usize },
    SetEdgeNotOnBoundary { set: String, edge: [usize; 2] },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFiniteNode { node } => write!(f, "non-finite coordinate, node {node}"),
            Violation::VertexCount { element, count } => {
                write!(f, "vertex count {count} out of range, element {element}")
            }
            Violation::DanglingId { element, node } => {
                write!(f, "dangling id {node}, element {element}")
            }
            Violation::RepeatedNode { element, node } => {
                write!(f, "repeated node {node}, element {element}")
            }
            Violation::UnknownMaterial { element, material } => {
                write!(f, "unknown material {material}, element {element}")
            }
            Violation::Degenerate { element } => write!(f, "zero area, element {element}"),
            Violation::ClockwiseWinding { element } => write!(f, "CW winding, element {element}"),
            Violation::NonConvex { element, vertex } => {
                write!(f, "non-convex at local vertex {vertex}, element {element}")
            }
            Violation::HangingNode {
                element,
                edge,
                node,
            } => write!(
                f,
                "nonconforming edge ({}, {}) of element {element}: node {node} lies inside it",
                edge[0], edge[1]
            ),
            Violation::OverlappingEdge { edge, uses } => write!(
                f,
                "nonconforming edge ({}, {}) used {uses} times or with equal orientation",
                edge[0], edge[1]
            ),
            Violation::DanglingSetId { set, node } => {
                write!(f, "dangling id {node} in set `{set}`")
            }
            Violation::SetEdgeNotOnBoundary { set, edge } => write!(
                f,
                "edge ({}, {}) of set `{set}` is not a boundary edge",
                edge[0], edge[1]
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "no violations");
        }
        let shown: Vec<String> = self.violations.iter().take(8).map(|v| v.to_string()).collect();
        write!(f, "{}", shown.join("; "))?;
        if self.violations.len() > 8 {
            write!(f, "; ... {} more", self.violations.len() - 8)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ValidationOptions {
    pub max_vertices: usize,
    /// Number of materials available, if known.
    pub n_materials: Option<usize>,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            max_vertices: DEFAULT_MAX_VERTICES,
            n_materials: None,
        }
    }
}

pub fn validate(mesh: &Mesh) -> ValidationReport {
    validate_with(mesh, &ValidationOptions::default())
}

pub fn validate_with(mesh: &Mesh, opts: &ValidationOptions) -> ValidationReport {
    let mut v = Vec::new();
    let n = mesh.nodes.len();
    for (i, p) in mesh.nodes.iter().enumerate() {
        if !(p.x.is_finite() && p.y.is_finite()) {
            v.push(Violation::NonFiniteNode { node: i });
        }
    }

    let mut geometric_ok = vec![false; mesh.elements.len()];
    for (e, el) in mesh.elements.iter().enumerate() {
        let m = el.nodes.len();
        if m < 3 || m > opts.max_vertices {
            v.push(Violation::VertexCount { element: e, count: m });
        }
        let mut ids_ok = true;
        for &id in &el.nodes {
            if id >= n {
                v.push(Violation::DanglingId { element: e, node: id });
                ids_ok = false;
            }
        }
        let mut sorted = el.nodes.clone();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                v.push(Violation::RepeatedNode { element: e, node: w[0] });
                ids_ok = false;
            }
        }
        if let Some(nm) = opts.n_materials {
            if el.material >= nm {
                v.push(Violation::UnknownMaterial {
                    element: e,
                    material: el.material,
                });
            }
        }
        if !ids_ok || m < 3 {
            continue;
        }
        let poly = mesh.coords(e);
        let scale = (0..m)
            .map(|i| (poly[(i + 1) % m] - poly[i]).norm())
            .fold(0.0, f64::max);
        let area = geom::signed_area(&poly);
        if area.abs() <= 1e-14 * scale * scale || !area.is_finite() {
            v.push(Violation::Degenerate { element: e });
            continue;
        }
        if area < 0.0 {
            v.push(Violation::ClockwiseWinding { element: e });
            continue;
        }
        let tol = 1e-12 * scale * scale;
        let mut convex = true;
        for i in 0..m {
            let prev = poly[(i + m - 1) % m];
            let next = poly[(i + 1) % m];
            let c = geom::cross(&(poly[i] - prev), &(next - poly[i]));
            if c < -tol {
                v.push(Violation::NonConvex { element: e, vertex: i });
                convex = false;
            }
        }
        geometric_ok[e] = convex;
    }

    // Edge usage: interior edges appear twice with opposite orientation.
    let mut uses: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    for el in &mesh.elements {
        if el.nodes.iter().any(|&id| id >= n) {
            continue;
        }
        for (a, b) in el.edges() {
            let entry = uses.entry((a.min(b), a.max(b))).or_default();
            if a < b {
                entry.0 += 1;
            } else {
                entry.1 += 1;
            }
        }
    }
    let mut overl: Vec<_> = uses
        .iter()
        .filter(|(_, &(f, r))| f > 1 || r > 1)
        .map(|(&(a, b), &(f, r))| Violation::OverlappingEdge {
            edge: [a, b],
            uses: f + r,
        })
        .collect();
    overl.sort_by_key(|x| match x {
        Violation::OverlappingEdge { edge, .. } => *edge,
        _ => [0, 0],
    });
    v.extend(overl);

    // Hanging-node conformity: no node strictly inside any element edge.
    if !mesh.elements.is_empty() && n > 0 {
        let grid = PointGrid::new(&mesh.nodes, 2.0);
        let mut cand = Vec::new();
        for (e, el) in mesh.elements.iter().enumerate() {
            if !geometric_ok[e] {
                continue;
            }
            for (a, b) in el.edges() {
                let pa = mesh.nodes[a];
                let pb = mesh.nodes[b];
                let len = (pb - pa).norm();
                let tol = 1e-9 * len;
                cand.clear();
                grid.query_box(
                    &(pa.inf(&pb) - Vec2::repeat(tol)),
                    &(pa.sup(&pb) + Vec2::repeat(tol)),
                    &mut cand,
                );
                for &c in &cand {
                    if c == a || c == b {
                        continue;
                    }
                    let (d, t) = geom::segment_distance(&mesh.nodes[c], &pa, &pb);
                    if d <= tol && t > 1e-9 && t < 1.0 - 1e-9 {
                        v.push(Violation::HangingNode {
                            element: e,
                            edge: [a, b],
                            node: c,
                        });
                    }
                }
            }
        }
    }

    for (name, ids) in &mesh.node_sets {
        for &id in ids {
            if id >= n {
                v.push(Violation::DanglingSetId {
                    set: name.clone(),
                    node: id,
                });
            }
        }
    }
    for (name, edges) in &mesh.edge_sets {
        for &[a, b] in edges {
            let used = uses
                .get(&(a.min(b), a.max(b)))
                .map(|(f, r)| f + r)
                .unwrap_or(0);
            if used != 1 {
                v.push(Violation::SetEdgeNotOnBoundary {
                    set: name.clone(),
                    edge: [a, b],
                });
            }
        }
    }

    ValidationReport { violations: v }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_quads() -> Mesh {
        gen_structured_quads(1.0, 1.0, 2, 2).unwrap()
    }

    #[test]
    fn valid_unit_square_split() {
        let m = four_quads();
        assert!(validate(&m).is_valid(), "{}", validate(&m));
    }

    #[test]
    fn reversed_winding_is_reported_once() {
        let mut m = four_quads();
        m.elements[2].nodes.reverse();
        let r = validate(&m);
        let cw: Vec<_> = r
            .violations
            .iter()
            .filter(|v| matches!(v, Violation::ClockwiseWinding { .. }))
            .collect();
        assert_eq!(cw.len(), 1);
        assert_eq!(cw[0].to_string(), "CW winding, element 2");
    }

    #[test]
    fn dangling_id_is_reported() {
        let mut m = four_quads();
        let n = m.n_nodes();
        m.elements[0].nodes[1] = n;
        let r = validate(&m);
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::DanglingId { node, .. } if *node == n)));
    }

    #[test]
    fn hanging_node_without_vertex_is_nonconforming() {
        // Unit square next to two half-size squares, but the midpoint is not a
        // vertex of the big square.
        let nodes = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(1.5, 0.0),
            Vec2::new(1.5, 0.5),
            Vec2::new(1.0, 0.5),
            Vec2::new(1.5, 1.0),
        ];
        let els = vec![
            PolyElement::new(vec![0, 1, 2, 3], 0),
            PolyElement::new(vec![1, 4, 5, 6], 0),
            PolyElement::new(vec![6, 5, 7, 2], 0),
        ];
        let mut m = Mesh::new(nodes, els);
        assert!(validate(&m)
            .violations
            .iter()
            .any(|v| matches!(v, Violation::HangingNode { node: 6, .. })));
        m.elements[0].nodes = vec![0, 1, 6, 2, 3];
        assert!(validate(&m).is_valid(), "{}", validate(&m));
    }

    #[test]
    fn nonconvex_element() {
        let nodes = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(1.0, 0.5),
            Vec2::new(2.0, 2.0),
            Vec2::new(0.0, 2.0),
        ];
        let m = Mesh::new(nodes, vec![PolyElement::new(vec![0, 1, 2, 3, 4], 0)]);
        assert!(validate(&m)
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NonConvex { vertex: 2, .. })));
    }

    #[test]
    fn geometry_examples() {
        let sq = Mesh::new(
            vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(1.0, 1.0),
                Vec2::new(0.0, 1.0),
            ],
            vec![PolyElement::new(vec![0, 1, 2, 3], 0)],
        );
        let (a, c) = polygon_geometry(&sq, 0).unwrap();
        assert!((a - 1.0).abs() < 1e-15 && (c - Vec2::new(0.5, 0.5)).norm() < 1e-15);

        let tri = Mesh::new(
            vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)],
            vec![PolyElement::new(vec![0, 1, 2], 0)],
        );
        let (a, c) = polygon_geometry(&tri, 0).unwrap();
        assert!((a - 0.5).abs() < 1e-15);
        assert!((c - Vec2::new(1.0 / 3.0, 1.0 / 3.0)).norm() < 1e-15);

        let hex_nodes: Vec<Vec2> = (0..6)
            .map(|k| {
                let t = std::f64::consts::FRAC_PI_3 * k as f64;
                Vec2::new(t.cos(), t.sin())
            })
            .collect();
        let hex = Mesh::new(hex_nodes, vec![PolyElement::new((0..6).collect(), 0)]);
        let (a, c) = polygon_geometry(&hex, 0).unwrap();
        assert!((a - 3.0 * 3f64.sqrt() / 2.0).abs() < 1e-14);
        assert!(c.norm() < 1e-15);

        let flat = Mesh::new(
            vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(2.0, 0.0)],
            vec![PolyElement::new(vec![0, 1, 2], 0)],
        );
        assert!(matches!(
            polygon_geometry(&flat, 0),
            Err(MeshError::Degenerate { .. })
        ));
    }
}
