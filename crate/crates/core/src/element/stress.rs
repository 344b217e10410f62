use nalgebra::Vector3;

use super::{Material, ShapeSamples};
use crate::geom::Vec2;

/// Strain, thermal strain and stress at one point (Voigt: xx, yy, xy with
/// engineering shear).
#[derive(Debug, Clone, PartialEq)]
pub struct StressSample {
    pub point: Vec2,
    pub strain: Vector3<f64>,
    pub thermal_strain: Vector3<f64>,
    pub stress: Vector3<f64>,
}

/// Samples at every quadrature point of the element. `phi` holds nodal
/// temperatures, `u` interleaved nodal displacements.
pub fn stress_recover(s: &ShapeSamples, mat: &Material, phi: &[f64], u: &[f64]) -> Vec<StressSample> {
    let m = s.m;
    assert_eq!(phi.len(), m);
    assert_eq!(u.len(), 2 * m);
    let d = mat.d_matrix();
    let beta = mat.alpha * mat.expansion_factor();
    (0..s.n_points())
        .map(|q| {
            let mut strain = Vector3::zeros();
            let mut t = 0.0;
            for i in 0..m {
                let g = s.gradient(q, i);
                let (ux, uy) = (u[2 * i], u[2 * i + 1]);
                strain += Vector3::new(g.x * ux, g.y * uy, g.y * ux + g.x * uy);
                t += s.value(q, i) * phi[i];
            }
            let thermal_strain = Vector3::new(beta * t, beta * t, 0.0);
            StressSample {
                point: s.points[q],
                strain,
                thermal_strain,
                stress: d * (strain - thermal_strain),
            }
        })
        .collect()
}

/// Area-weighted average stress over the element.
pub fn element_stress(s: &ShapeSamples, mat: &Material, phi: &[f64], u: &[f64]) -> Vector3<f64> {
    let samples = stress_recover(s, mat, phi, u);
    let mut acc = Vector3::zeros();
    for (smp, w) in samples.iter().zip(&s.weights) {
        acc += smp.stress * *w;
    }
    acc / s.area()
}
