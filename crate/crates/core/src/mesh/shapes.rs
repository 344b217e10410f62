//! Benchmark geometries: mapped-quad annuli and L-shaped domains.

use std::collections::HashMap;

use super::voronoi::{gen_voronoi_polygons, Seeds, VoronoiDomain};
use super::{Mesh, MeshError, PolyElement, AXIS_TOL};
use crate::geom::{Rect, Vec2};

/// Rectangle `outer` with the rectangular `notch` removed from its
/// upper-right corner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LShape {
    pub outer: Rect,
    pub notch: Rect,
}

impl LShape {
    /// Square of side `size` with its upper-right quarter removed.
    pub fn square(size: f64) -> Self {
        let half = 0.5 * size;
        Self {
            outer: Rect::new(0.0, 0.0, size, size),
            notch: Rect::new(half, half, size, size),
        }
    }

    pub fn area(&self) -> f64 {
        self.outer.area() - self.notch.area()
    }

    pub(crate) fn check(&self) -> Result<(), MeshError> {
        let o = &self.outer;
        let n = &self.notch;
        let ok = o.width() > 0.0
            && o.height() > 0.0
            && n.x1 == o.x1
            && n.y1 == o.y1
            && n.x0 > o.x0
            && n.x0 < o.x1
            && n.y0 > o.y0
            && n.y0 < o.y1;
        if ok {
            Ok(())
        } else {
            Err(MeshError::Parameter(
                "notch must share the upper-right corner and lie strictly inside the outer rectangle".into(),
            ))
        }
    }

    /// Adds `bottom`, `left`, `top` (upper end of the vertical arm), `right`
    /// (right end of the horizontal arm) and `notch` (re-entrant sides).
    pub(crate) fn add_sets(&self, mesh: &mut Mesh) {
        let o = self.outer;
        let n = self.notch;
        let tol = AXIS_TOL * o.width().max(o.height());
        mesh.add_boundary_set("bottom", move |p| (p.y - o.y0).abs() <= tol);
        mesh.add_boundary_set("left", move |p| (p.x - o.x0).abs() <= tol);
        mesh.add_boundary_set("top", move |p| (p.y - o.y1).abs() <= tol && p.x <= n.x0 + tol);
        mesh.add_boundary_set("right", move |p| (p.x - o.x1).abs() <= tol && p.y <= n.y0 + tol);
        mesh.add_boundary_set("notch", move |p| {
            ((p.x - n.x0).abs() <= tol && p.y >= n.y0 - tol) || ((p.y - n.y0).abs() <= tol && p.x >= n.x0 - tol)
        });
    }
}

fn lattice_count(len: f64, h: f64) -> Result<usize, MeshError> {
    let k = (len / h).round();
    if !(k >= 1.0) || ((k * h - len).abs() > 1e-9 * len) {
        return Err(MeshError::Parameter(format!(
            "length {len} is not a multiple of the element size {h}"
        )));
    }
    Ok(k as usize)
}

/// Uniform quads of side `h` on an L-shape; notch corner must lie on the grid.
pub fn lshape_quads(shape: &LShape, h: f64) -> Result<Mesh, MeshError> {
    shape.check()?;
    let o = shape.outer;
    let nx = lattice_count(o.width(), h)?;
    let ny = lattice_count(o.height(), h)?;
    let cx = lattice_count(shape.notch.x0 - o.x0, h)?;
    let cy = lattice_count(shape.notch.y0 - o.y0, h)?;
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut nodes = Vec::new();
    let mut node = |i: usize, j: usize, nodes: &mut Vec<Vec2>| {
        *ids.entry((j, i)).or_insert_with(|| {
            nodes.push(Vec2::new(
                o.x0 + o.width() * i as f64 / nx as f64,
                o.y0 + o.height() * j as f64 / ny as f64,
            ));
            nodes.len() - 1
        })
    };
    let mut elements = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            if i >= cx && j >= cy {
                continue;
            }
            let ring = vec![
                node(i, j, &mut nodes),
                node(i + 1, j, &mut nodes),
                node(i + 1, j + 1, &mut nodes),
                node(i, j + 1, &mut nodes),
            ];
            elements.push(PolyElement::new(ring, 0));
        }
    }
    let mut mesh = Mesh::new(nodes, elements);
    shape.add_sets(&mut mesh);
    Ok(mesh)
}

/// Lloyd-relaxed Voronoi mesh of an L-shape with about `count` cells.
pub fn lshape_voronoi(shape: &LShape, count: usize, seed: u64, lloyd_iters: usize) -> Result<Mesh, MeshError> {
    gen_voronoi_polygons(&VoronoiDomain::LShape(*shape), &Seeds::Random { count, seed }, lloyd_iters)
}

/// Polar grid of `n_r x n_theta` quads between radii `inner` and `outer`;
/// nodes lie exactly on the circles. Sets: `inner`, `outer`.
pub fn annulus_quads(center: Vec2, inner: f64, outer: f64, n_r: usize, n_theta: usize) -> Result<Mesh, MeshError> {
    if !(inner > 0.0 && outer > inner) || n_r == 0 || n_theta < 3 {
        return Err(MeshError::Parameter(format!(
            "annulus needs 0 < inner < outer, n_r >= 1, n_theta >= 3 (got {inner}, {outer}, {n_r}, {n_theta})"
        )));
    }
    let mut nodes = Vec::with_capacity((n_r + 1) * n_theta);
    for i in 0..=n_r {
        let r = inner + (outer - inner) * i as f64 / n_r as f64;
        for j in 0..n_theta {
            let t = 2.0 * std::f64::consts::PI * j as f64 / n_theta as f64;
            nodes.push(center + Vec2::new(r * t.cos(), r * t.sin()));
        }
    }
    let id = |i: usize, j: usize| i * n_theta + j % n_theta;
    let mut elements = Vec::with_capacity(n_r * n_theta);
    for i in 0..n_r {
        for j in 0..n_theta {
            elements.push(PolyElement::new(
                vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)],
                0,
            ));
        }
    }
    let mut mesh = Mesh::new(nodes, elements);
    // Only boundary edges are classified, and those lie on one of the circles.
    let mid = 0.5 * (inner + outer);
    mesh.add_boundary_set("inner", move |p| (p - center).norm() < mid);
    mesh.add_boundary_set("outer", move |p| (p - center).norm() > mid);
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::validate;

    #[test]
    fn lshape_quad_counts() {
        let l = LShape::square(1.0);
        let m = lshape_quads(&l, 0.25).unwrap();
        assert_eq!(m.n_elements(), 12);
        assert_eq!(m.n_nodes(), 21);
        assert!(validate(&m).is_valid(), "{}", validate(&m));
        assert!((m.total_area() - 0.75).abs() < 1e-14);
        assert_eq!(m.edge_sets["top"].len(), 2);
        assert_eq!(m.edge_sets["right"].len(), 2);
        assert_eq!(m.edge_sets["notch"].len(), 4);
        assert!(lshape_quads(&l, 0.3).is_err());
    }

    #[test]
    fn lshape_voronoi_valid() {
        let l = LShape::square(0.1);
        let m = lshape_voronoi(&l, 300, 3, 15).unwrap();
        assert!(validate(&m).is_valid(), "{}", validate(&m));
        assert!((m.total_area() - 0.0075).abs() < 1e-10 * 0.0075);
        for set in ["top", "right", "bottom", "left", "notch"] {
            assert!(!m.edge_sets[set].is_empty(), "{set}");
        }
    }

    #[test]
    fn annulus_quads_on_circles() {
        let m = annulus_quads(Vec2::zeros(), 0.25, 1.0, 4, 32).unwrap();
        assert!(validate(&m).is_valid(), "{}", validate(&m));
        assert_eq!(m.node_sets["inner"].len(), 32);
        assert_eq!(m.edge_sets["outer"].len(), 32);
    }
}
