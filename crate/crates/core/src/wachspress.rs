//! Wachspress coordinates on convex polygons.
//!
//! For corners `c_k` with outward edge normals `n_k` (edge `k` runs from
//! `c_k` to `c_{k+1}`) and distances `h_k(x) = (c_k - x) . n_k`,
//!
//! ```text
//! w_k = det(n_{k-1}, n_k) / (h_{k-1} h_k),      N_k = w_k / sum_j w_j
//! grad N_k = N_k (r_k - sum_j N_j r_j),          r_k = n_{k-1}/h_{k-1} + n_k/h_k
//! ```
//!
//! Vertices with a straight interior angle (quadtree hanging nodes) have no
//! Wachspress weight. The coordinates are built on the polygon of true
//! corners; a straight vertex at parameter `s_j` on the corner edge `a -> b`
//! gets `N_j = S * phi_j(tau)` with `S = N_a + N_b`, `tau = N_b / S` and
//! `phi_j` the piecewise-linear hat on the vertex parameters of that edge,
//! and its linear share is removed from the corners:
//! `N_a -= (1 - s_j) N_j`, `N_b -= s_j N_j`. This keeps partition of unity,
//! linear precision, the Kronecker property and linearity on every edge; on a
//! square with mid-edge nodes it is the classical transition element.

use thiserror::Error;

use crate::geom::{self, Vec2};

/// Relative sine below which a vertex counts as a straight angle.
pub const STRAIGHT_ANGLE_TOL: f64 = 1e-10;

/// Distance in the edge parameter within which a hanging-node hat counts as
/// sitting on its kink.
const KINK_TOL: f64 = 1e-9;

/// Relative distance to an edge below which a point counts as on the boundary.
pub const BOUNDARY_TOL: f64 = 1e-13;

#[derive(Debug, Error, PartialEq)]
pub enum WachspressError {
    #[error("polygon needs at least 3 corners, got {0}")]
    TooFewCorners(usize),
    #[error("polygon is degenerate, clockwise or not convex")]
    InvalidPolygon,
    #[error("point ({x}, {y}) lies outside the polygon")]
    Outside { x: f64, y: f64 },
    #[error("gradients requested at boundary point ({x}, {y})")]
    OnBoundary { x: f64, y: f64 },
}

/// Values and gradients of all vertex functions at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeEval {
    pub point: Vec2,
    pub values: Vec<f64>,
    pub gradients: Vec<Vec2>,
}

#[derive(Debug, Clone)]
struct CornerEdge {
    normal: Vec2,
    /// Straight vertices strictly inside the edge: (vertex index, parameter).
    inner: Vec<(usize, f64)>,
}

/// Precomputed geometry for repeated evaluation on one polygon.
#[derive(Debug, Clone)]
pub struct Wachspress {
    vertices: Vec<Vec2>,
    /// Vertex index of each corner.
    corners: Vec<usize>,
    edges: Vec<CornerEdge>,
    /// `det(n_{k-1}, n_k)` at each corner.
    dets: Vec<f64>,
    diameter: f64,
}

impl Wachspress {
    pub fn new(vertices: &[Vec2]) -> Result<Self, WachspressError> {
        let m = vertices.len();
        if m < 3 {
            return Err(WachspressError::TooFewCorners(m));
        }
        let diameter = geom::diameter(vertices);
        let area = geom::signed_area(vertices);
        if !(area > 1e-14 * diameter * diameter) {
            return Err(WachspressError::InvalidPolygon);
        }
        let mut corners = Vec::with_capacity(m);
        for i in 0..m {
            let e0 = vertices[i] - vertices[(i + m - 1) % m];
            let e1 = vertices[(i + 1) % m] - vertices[i];
            let scale = e0.norm() * e1.norm();
            if !(scale > 0.0) {
                return Err(WachspressError::InvalidPolygon);
            }
            let s = geom::cross(&e0, &e1) / scale;
            if s < -STRAIGHT_ANGLE_TOL {
                return Err(WachspressError::InvalidPolygon);
            }
            if s > STRAIGHT_ANGLE_TOL {
                corners.push(i);
            }
        }
        let k = corners.len();
        if k < 3 {
            return Err(WachspressError::TooFewCorners(k));
        }
        let mut edges = Vec::with_capacity(k);
        for c in 0..k {
            let a = corners[c];
            let b = corners[(c + 1) % k];
            let pa = vertices[a];
            let pb = vertices[b];
            let d = pb - pa;
            let len2 = d.norm_squared();
            let mut inner = Vec::new();
            let mut v = (a + 1) % m;
            while v != b {
                inner.push((v, (vertices[v] - pa).dot(&d) / len2));
                v = (v + 1) % m;
            }
            edges.push(CornerEdge {
                normal: geom::outward_normal(&pa, &pb),
                inner,
            });
        }
        let dets = (0..k)
            .map(|c| geom::cross(&edges[(c + k - 1) % k].normal, &edges[c].normal))
            .collect();
        Ok(Self {
            vertices: vertices.to_vec(),
            corners,
            edges,
            dets,
            diameter,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    fn distances(&self, p: &Vec2) -> Result<Vec<f64>, WachspressError> {
        let h: Vec<f64> = self
            .edges
            .iter()
            .zip(&self.corners)
            .map(|(e, &c)| (self.vertices[c] - p).dot(&e.normal))
            .collect();
        if h.iter().any(|&v| v < -1e-12 * self.diameter) || h.iter().any(|v| !v.is_finite()) {
            return Err(WachspressError::Outside { x: p.x, y: p.y });
        }
        Ok(h)
    }

    /// Values at `p`; points on the boundary use the edge-linear limit.
    pub fn values(&self, p: &Vec2) -> Result<Vec<f64>, WachspressError> {
        let h = self.distances(p)?;
        if h.iter().any(|&v| v <= BOUNDARY_TOL * self.diameter) {
            return Ok(self.boundary_values(p));
        }
        Ok(self.interior(p, &h, false).values)
    }

    /// Values and gradients at an interior point.
    pub fn eval(&self, p: &Vec2) -> Result<ShapeEval, WachspressError> {
        let h = self.distances(p)?;
        if h.iter().any(|&v| v <= BOUNDARY_TOL * self.diameter) {
            return Err(WachspressError::OnBoundary { x: p.x, y: p.y });
        }
        Ok(self.interior(p, &h, true))
    }

    fn boundary_values(&self, p: &Vec2) -> Vec<f64> {
        let m = self.vertices.len();
        let (mut best, mut best_d, mut best_t) = (0, f64::INFINITY, 0.0);
        for i in 0..m {
            let (d, t) = geom::segment_distance(p, &self.vertices[i], &self.vertices[(i + 1) % m]);
            if d < best_d {
                (best, best_d, best_t) = (i, d, t);
            }
        }
        let mut n = vec![0.0; m];
        n[best] = 1.0 - best_t;
        n[(best + 1) % m] += best_t;
        n
    }

    fn interior(&self, p: &Vec2, h: &[f64], with_gradients: bool) -> ShapeEval {
        let k = self.corners.len();
        let m = self.vertices.len();
        let mut w = vec![0.0; k];
        for c in 0..k {
            w[c] = self.dets[c] / (h[(c + k - 1) % k] * h[c]);
        }
        let total: f64 = w.iter().sum();
        let nc: Vec<f64> = w.iter().map(|x| x / total).collect();

        let mut gc = vec![Vec2::zeros(); k];
        if with_gradients {
            let r: Vec<Vec2> = (0..k)
                .map(|c| {
                    let prev = (c + k - 1) % k;
                    self.edges[prev].normal / h[prev] + self.edges[c].normal / h[c]
                })
                .collect();
            let mean = r.iter().zip(&nc).fold(Vec2::zeros(), |acc, (r, n)| acc + r * *n);
            for c in 0..k {
                gc[c] = (r[c] - mean) * nc[c];
            }
        }

        let mut values = vec![0.0; m];
        let mut gradients = vec![Vec2::zeros(); m];
        for c in 0..k {
            values[self.corners[c]] = nc[c];
            gradients[self.corners[c]] = gc[c];
        }
        for c in 0..k {
            let edge = &self.edges[c];
            if edge.inner.is_empty() {
                continue;
            }
            let a = self.corners[c];
            let b = self.corners[(c + 1) % k];
            let cb = (c + 1) % k;
            let s = nc[c] + nc[cb];
            let gs = gc[c] + gc[cb];
            let tau = (nc[cb] / s).clamp(0.0, 1.0);
            let gtau = (gc[cb] - gs * tau) / s;
            let r = edge.inner.len();
            let param = |j: usize| match j {
                0 => 0.0,
                j if j == r + 1 => 1.0,
                j => edge.inner[j - 1].1,
            };
            for j in 1..=r {
                let (v, sj) = edge.inner[j - 1];
                let (lo, hi) = (param(j - 1), param(j + 1));
                let (up, down) = (1.0 / (sj - lo), -1.0 / (hi - sj));
                let phi = if tau <= lo || tau >= hi {
                    0.0
                } else if tau <= sj {
                    (tau - lo) * up
                } else {
                    (tau - hi) * down
                };
                // One-sided slopes are averaged on a kink so the result does
                // not hinge on rounding.
                let near = |x: f64| (tau - x).abs() <= KINK_TOL;
                let dphi = if near(sj) {
                    0.5 * (up + down)
                } else if near(lo) {
                    0.5 * up
                } else if near(hi) {
                    0.5 * down
                } else if tau > lo && tau < sj {
                    up
                } else if tau > sj && tau < hi {
                    down
                } else {
                    0.0
                };
                let nv = s * phi;
                let gv = gs * phi + gtau * (s * dphi);
                values[v] = nv;
                gradients[v] = gv;
                values[a] -= (1.0 - sj) * nv;
                values[b] -= sj * nv;
                gradients[a] -= gv * (1.0 - sj);
                gradients[b] -= gv * sj;
            }
        }
        ShapeEval {
            point: *p,
            values,
            gradients,
        }
    }
}

pub fn shape_values(vertices: &[Vec2], p: &Vec2) -> Result<Vec<f64>, WachspressError> {
    Wachspress::new(vertices)?.values(p)
}

pub fn shape_gradients(vertices: &[Vec2], p: &Vec2) -> Result<Vec<Vec2>, WachspressError> {
    Ok(Wachspress::new(vertices)?.eval(p)?.gradients)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Vec2> {
        vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ]
    }

    #[test]
    fn square_center_and_edge() {
        let n = shape_values(&square(), &Vec2::new(0.5, 0.5)).unwrap();
        for v in n {
            assert!((v - 0.25).abs() < 1e-15);
        }
        let n = shape_values(&square(), &Vec2::new(0.5, 0.0)).unwrap();
        let expect = [0.5, 0.5, 0.0, 0.0];
        for (a, b) in n.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        let g = shape_gradients(&square(), &Vec2::new(0.5, 0.5)).unwrap();
        assert!((g[0] - Vec2::new(-0.5, -0.5)).norm() < 1e-15);
        assert!((g[2] - Vec2::new(0.5, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn hexagon_centroid() {
        let hex: Vec<Vec2> = (0..6)
            .map(|k| {
                let t = std::f64::consts::FRAC_PI_3 * k as f64;
                Vec2::new(t.cos(), t.sin())
            })
            .collect();
        for v in shape_values(&hex, &Vec2::zeros()).unwrap() {
            assert!((v - 1.0 / 6.0).abs() < 1e-15);
        }
    }

    #[test]
    fn outside_and_boundary_gradient_errors() {
        assert!(matches!(
            shape_values(&square(), &Vec2::new(1.5, 0.5)),
            Err(WachspressError::Outside { .. })
        ));
        assert!(matches!(
            shape_gradients(&square(), &Vec2::new(1.0, 0.5)),
            Err(WachspressError::OnBoundary { .. })
        ));
    }

    #[test]
    fn square_with_midpoints_is_transition_element() {
        // Corners plus midpoints on all four sides.
        let poly = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(0.5, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 0.5),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.5, 1.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(0.0, 0.5),
        ];
        let w = Wachspress::new(&poly).unwrap();
        // Lower-left quarter: (1-x)(1-y) - x(1-y) - (1-x)y.
        let p = Vec2::new(0.2, 0.3);
        let e = w.eval(&p).unwrap();
        assert!((e.values[0] - (1.0 - 0.4 - 0.6 + 3.0 * 0.06)).abs() < 1e-14);
        assert!((e.values[1] - 2.0 * 0.2 * 0.7).abs() < 1e-14);
        let sum: f64 = e.values.iter().sum();
        assert!((sum - 1.0).abs() < 1e-14);
        let lin = e
            .values
            .iter()
            .zip(&poly)
            .fold(Vec2::zeros(), |acc, (n, x)| acc + x * *n);
        assert!((lin - p).norm() < 1e-14);
        let gsum = e.gradients.iter().fold(Vec2::zeros(), |a, g| a + g);
        assert!(gsum.norm() < 1e-13);
    }
}
