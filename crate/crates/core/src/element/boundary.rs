//! Edge integrals for flux, convection and traction boundary conditions.
//! Shape traces on an edge are the two linear endpoint functions.

use super::ElementError;
use crate::geom::Vec2;
use crate::quadrature::{edge_rule, DEFAULT_EDGE_POINTS};

fn rule(a: &Vec2, b: &Vec2) -> Result<Vec<(Vec2, f64, f64)>, ElementError> {
    Ok(edge_rule(a, b, DEFAULT_EDGE_POINTS)?)
}

/// Convection `g (phi - ambient)` on edge `a -> b`: stiffness and load.
pub fn convection_edge(
    a: &Vec2,
    b: &Vec2,
    g: f64,
    ambient: f64,
    thickness: f64,
) -> Result<([[f64; 2]; 2], [f64; 2]), ElementError> {
    let mut k = [[0.0; 2]; 2];
    let mut f = [0.0; 2];
    for (_, t, w) in rule(a, b)? {
        let n = [1.0 - t, t];
        let w = w * thickness * g;
        for i in 0..2 {
            f[i] += w * ambient * n[i];
            for j in 0..2 {
                k[i][j] += w * n[i] * n[j];
            }
        }
    }
    Ok((k, f))
}

/// Outward flux `q` on edge `a -> b`: load `-int N_i q`.
pub fn flux_edge(a: &Vec2, b: &Vec2, q: f64, thickness: f64) -> Result<[f64; 2], ElementError> {
    let mut f = [0.0; 2];
    for (_, t, w) in rule(a, b)? {
        f[0] -= w * thickness * q * (1.0 - t);
        f[1] -= w * thickness * q * t;
    }
    Ok(f)
}

/// Uniform traction on edge `a -> b`, interleaved `(fx_a, fy_a, fx_b, fy_b)`.
pub fn traction_edge(a: &Vec2, b: &Vec2, traction: Vec2, thickness: f64) -> Result<[f64; 4], ElementError> {
    let mut f = [0.0; 4];
    for (_, t, w) in rule(a, b)? {
        let n = [1.0 - t, t];
        for i in 0..2 {
            f[2 * i] += w * thickness * traction.x * n[i];
            f[2 * i + 1] += w * thickness * traction.y * n[i];
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convection_closed_form() {
        let (k, f) = convection_edge(&Vec2::zeros(), &Vec2::new(2.0, 0.0), 3.0, 5.0, 1.0).unwrap();
        assert!((f[0] - 15.0).abs() < 1e-13 && (f[1] - 15.0).abs() < 1e-13);
        let expect = [[2.0, 1.0], [1.0, 2.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((k[i][j] - expect[i][j]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn flux_and_traction() {
        let a = Vec2::new(1.0, 1.0);
        let b = Vec2::new(1.0, 4.0);
        assert_eq!(flux_edge(&a, &b, 0.0, 1.0).unwrap(), [0.0, 0.0]);
        let f = flux_edge(&a, &b, 2.0, 1.0).unwrap();
        assert!((f[0] + 3.0).abs() < 1e-14 && (f[1] + 3.0).abs() < 1e-14);
        let t = traction_edge(&a, &b, Vec2::new(1.0, -2.0), 0.5).unwrap();
        assert!((t[0] - 0.75).abs() < 1e-14 && (t[3] + 1.5).abs() < 1e-14);
        assert!(flux_edge(&a, &a, 1.0, 1.0).is_err());
    }
}
