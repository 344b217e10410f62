//! Polygon quadrature by centroid-fan triangulation, and Gauss-Legendre rules
//! on segments.

use thiserror::Error;

use crate::geom::{self, Vec2};

#[derive(Debug, Error, PartialEq)]
pub enum QuadratureError {
    #[error("unsupported triangle rule degree {0} (available: 1, 2, 4)")]
    UnsupportedDegree(usize),
    #[error("unsupported edge rule with {0} points (available: 1, 2, 3)")]
    UnsupportedPoints(usize),
    #[error("degenerate polygon (area {0:e})")]
    Degenerate(f64),
    #[error("zero-length segment")]
    ZeroLength,
}

pub const DEFAULT_DEGREE: usize = 4;
pub const DEFAULT_EDGE_POINTS: usize = 2;

/// Triangle rule on the reference triangle `(0,0), (1,0), (0,1)`; weights sum
/// to its area 1/2. Points are barycentric `(l0, l1, l2)`.
#[derive(Debug, Clone)]
pub struct TriRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl TriRule {
    pub fn new(degree: usize) -> Result<Self, QuadratureError> {
        let (points, weights) = match degree {
            1 => (vec![[1.0 / 3.0; 3]], vec![0.5]),
            2 => {
                let a = 1.0 / 6.0;
                let b = 2.0 / 3.0;
                (vec![[b, a, a], [a, b, a], [a, a, b]], vec![1.0 / 6.0; 3])
            }
            4 => {
                let a1 = 0.445948490915964886318329253883;
                let w1 = 0.223381589678011465944806878614;
                let a2 = 0.091576213509770743459571463402;
                let w2 = 0.109951743655321867638526454719;
                let b1 = 1.0 - 2.0 * a1;
                let b2 = 1.0 - 2.0 * a2;
                (
                    vec![
                        [b1, a1, a1],
                        [a1, b1, a1],
                        [a1, a1, b1],
                        [b2, a2, a2],
                        [a2, b2, a2],
                        [a2, a2, b2],
                    ],
                    vec![0.5 * w1, 0.5 * w1, 0.5 * w1, 0.5 * w2, 0.5 * w2, 0.5 * w2],
                )
            }
            d => return Err(QuadratureError::UnsupportedDegree(d)),
        };
        Ok(Self {
            points,
            weights,
            degree,
        })
    }
}

/// Quadrature points on one polygon. `weights[i]` already includes the
/// triangle Jacobian.
#[derive(Debug, Clone)]
pub struct PolyQuadrature {
    pub points: Vec<Vec2>,
    pub weights: Vec<f64>,
    /// `|J_t|` (twice the triangle area) for each fan triangle.
    pub jacobians: Vec<f64>,
}

impl PolyQuadrature {
    pub fn n_triangles(&self) -> usize {
        self.jacobians.len()
    }

    pub fn integrate(&self, f: impl Fn(&Vec2) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p))
            .sum()
    }
}

/// Fan triangles `(centroid, v_i, v_{i+1})`.
pub fn triangulate_fan(poly: &[Vec2]) -> Result<Vec<[Vec2; 3]>, QuadratureError> {
    let (area, c) = geom::area_centroid(poly);
    let scale = geom::diameter(poly);
    if poly.len() < 3 || !(area > 1e-14 * scale * scale) {
        return Err(QuadratureError::Degenerate(area));
    }
    let m = poly.len();
    Ok((0..m).map(|i| [c, poly[i], poly[(i + 1) % m]]).collect())
}

pub fn polygon_rule(poly: &[Vec2], degree: usize) -> Result<PolyQuadrature, QuadratureError> {
    let rule = TriRule::new(degree)?;
    polygon_rule_with(poly, &rule)
}

pub fn polygon_rule_with(poly: &[Vec2], rule: &TriRule) -> Result<PolyQuadrature, QuadratureError> {
    let tris = triangulate_fan(poly)?;
    let n = tris.len() * rule.weights.len();
    let mut points = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut jacobians = Vec::with_capacity(tris.len());
    for [a, b, c] in &tris {
        let jac = geom::cross(&(b - a), &(c - a));
        jacobians.push(jac);
        for (l, w) in rule.points.iter().zip(&rule.weights) {
            points.push(a * l[0] + b * l[1] + c * l[2]);
            weights.push(w * jac);
        }
    }
    Ok(PolyQuadrature {
        points,
        weights,
        jacobians,
    })
}

/// Gauss-Legendre points on `[0, 1]` with weights summing to 1.
pub fn gauss_legendre_unit(n_points: usize) -> Result<Vec<(f64, f64)>, QuadratureError> {
    let (x, w): (Vec<f64>, Vec<f64>) = match n_points {
        1 => (vec![0.0], vec![2.0]),
        2 => {
            let g = 1.0 / 3f64.sqrt();
            (vec![-g, g], vec![1.0, 1.0])
        }
        3 => {
            let g = (0.6f64).sqrt();
            (vec![-g, 0.0, g], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
        }
        n => return Err(QuadratureError::UnsupportedPoints(n)),
    };
    Ok(x.into_iter()
        .zip(w)
        .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect())
}

/// Gauss-Legendre rule on the segment `[a, b]`: `(point, t, weight)` with
/// `t` the unit parameter and weights summing to the length.
pub fn edge_rule(a: &Vec2, b: &Vec2, n_points: usize) -> Result<Vec<(Vec2, f64, f64)>, QuadratureError> {
    let len = (b - a).norm();
    if !(len > 0.0) {
        return Err(QuadratureError::ZeroLength);
    }
    Ok(gauss_legendre_unit(n_points)?
        .into_iter()
        .map(|(t, w)| (a + (b - a) * t, t, w * len))
        .collect())
}
