use nalgebra::Matrix2;

use super::{ElementError, ShapeSamples};
use crate::geom::Vec2;

const XI: [f64; 4] = [-1.0, 1.0, 1.0, -1.0];
const ETA: [f64; 4] = [-1.0, -1.0, 1.0, 1.0];

/// Isoparametric bilinear quadrilateral with 2x2 Gauss points.
pub fn bilinear_samples(poly: &[Vec2]) -> Result<ShapeSamples, ElementError> {
    if poly.len() != 4 {
        return Err(ElementError::NotQuadrilateral(poly.len()));
    }
    let g = 1.0 / 3f64.sqrt();
    let mut points = Vec::with_capacity(4);
    let mut weights = Vec::with_capacity(4);
    let mut values = Vec::with_capacity(16);
    let mut gradients = Vec::with_capacity(16);
    for (xi, eta) in [(-g, -g), (g, -g), (g, g), (-g, g)] {
        let n: [f64; 4] = std::array::from_fn(|i| 0.25 * (1.0 + xi * XI[i]) * (1.0 + eta * ETA[i]));
        let dn: [Vec2; 4] = std::array::from_fn(|i| {
            Vec2::new(
                0.25 * XI[i] * (1.0 + eta * ETA[i]),
                0.25 * ETA[i] * (1.0 + xi * XI[i]),
            )
        });
        let mut jac = Matrix2::zeros();
        let mut x = Vec2::zeros();
        for i in 0..4 {
            jac += poly[i] * dn[i].transpose();
            x += poly[i] * n[i];
        }
        let det = jac.determinant();
        if !(det > 0.0) {
            return Err(ElementError::BadJacobian(det));
        }
        let inv_t = jac.try_inverse().ok_or(ElementError::BadJacobian(det))?.transpose();
        points.push(x);
        weights.push(det);
        values.extend_from_slice(&n);
        gradients.extend(dn.iter().map(|d| inv_t * d));
    }
    Ok(ShapeSamples {
        m: 4,
        points,
        weights,
        values,
        gradients,
    })
}
