#![allow(dead_code)]

use polytherm::geom::Vec2;
use proptest::prelude::*;
use rand::Rng;

/// Convex polygon with corners on a rotated, shifted ellipse at the given
/// angular gaps (normalised to a full turn).
pub fn ellipse_polygon(gaps: &[f64], a: f64, b: f64, rot: f64, shift: Vec2) -> Vec<Vec2> {
    let total: f64 = gaps.iter().sum();
    let (s, c) = rot.sin_cos();
    let mut t = 0.0f64;
    gaps.iter()
        .map(|g| {
            let p = Vec2::new(a * t.cos(), b * t.sin());
            t += g / total * std::f64::consts::TAU;
            shift + Vec2::new(c * p.x - s * p.y, s * p.x + c * p.y)
        })
        .collect()
}

pub fn convex_polygon() -> impl Strategy<Value = Vec<Vec2>> {
    (
        prop::collection::vec(0.3f64..1.0, 3..=10),
        0.5f64..2.0,
        0.5f64..2.0,
        0.0f64..std::f64::consts::TAU,
        -3.0f64..3.0,
        -3.0f64..3.0,
    )
        .prop_map(|(gaps, a, b, rot, x, y)| ellipse_polygon(&gaps, a, b, rot, Vec2::new(x, y)))
}

pub fn random_polygon<R: Rng>(rng: &mut R) -> Vec<Vec2> {
    let m = rng.gen_range(3..=10);
    let gaps: Vec<f64> = (0..m).map(|_| rng.gen_range(0.3..1.0)).collect();
    ellipse_polygon(
        &gaps,
        rng.gen_range(0.5..2.0),
        rng.gen_range(0.5..2.0),
        rng.gen_range(0.0..std::f64::consts::TAU),
        Vec2::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)),
    )
}

/// Point `sum w_i v_i` with random convex weights, strictly inside.
pub fn interior_point<R: Rng>(poly: &[Vec2], rng: &mut R) -> Vec2 {
    let w: Vec<f64> = poly.iter().map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    poly.iter().zip(&w).fold(Vec2::zeros(), |acc, (p, wi)| acc + p * (wi / s))
}

pub fn area(poly: &[Vec2]) -> f64 {
    polytherm::geom::signed_area(poly)
}

/// Exact `int x^p y^q` over a polygon via Green's theorem, with each edge
/// integral expanded as a polynomial in the edge parameter.
pub fn monomial_integral(poly: &[Vec2], p: u32, q: u32) -> f64 {
    let mul = |a: &[f64], b: &[f64]| {
        let mut out = vec![0.0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    };
    let m = poly.len();
    let mut total = 0.0;
    for k in 0..m {
        let a = poly[k];
        let b = poly[(k + 1) % m];
        let x = [a.x, b.x - a.x];
        let y = [a.y, b.y - a.y];
        let mut f = vec![1.0];
        for _ in 0..=p {
            f = mul(&f, &x);
        }
        for _ in 0..q {
            f = mul(&f, &y);
        }
        let integral: f64 = f.iter().enumerate().map(|(i, c)| c / (i + 1) as f64).sum();
        total += integral * (b.y - a.y) / (p + 1) as f64;
    }
    total
}

/// Closed-form bilinear matrices of the unit square with corners
/// (0,0), (1,0), (1,1), (0,1): conduction, consistent mass and plane
/// elasticity for the given constitutive matrix, built from the 1D integrals
/// of `1 - s` and `s`.
pub fn unit_square_q4(d: &nalgebra::Matrix3<f64>) -> (nalgebra::DMatrix<f64>, nalgebra::DMatrix<f64>, nalgebra::DMatrix<f64>) {
    use nalgebra::DMatrix;
    // Derivative signs and which 1D factor each function carries.
    let sx = [-1.0, 1.0, 1.0, -1.0];
    let sy = [-1.0, -1.0, 1.0, 1.0];
    let fy = [0usize, 0, 1, 1]; // x-derivative keeps (1-y) or y
    let fx = [0usize, 1, 1, 0]; // y-derivative keeps (1-x) or x
    let mass1 = [[1.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 1.0 / 3.0]];
    let ixx = DMatrix::from_fn(4, 4, |i, j| sx[i] * sx[j] * mass1[fy[i]][fy[j]]);
    let iyy = DMatrix::from_fn(4, 4, |i, j| sy[i] * sy[j] * mass1[fx[i]][fx[j]]);
    let ixy = DMatrix::from_fn(4, 4, |i, j| sx[i] * sy[j] * 0.25);
    let k_th = &ixx + &iyy;
    let m = DMatrix::from_fn(4, 4, |i, j| mass1[fx[i]][fx[j]] * mass1[fy[i]][fy[j]]);
    let mut k = DMatrix::zeros(8, 8);
    for i in 0..4 {
        for j in 0..4 {
            k[(2 * i, 2 * j)] = d[(0, 0)] * ixx[(i, j)] + d[(2, 2)] * iyy[(i, j)];
            k[(2 * i, 2 * j + 1)] = d[(0, 1)] * ixy[(i, j)] + d[(2, 2)] * ixy[(j, i)];
            k[(2 * i + 1, 2 * j)] = d[(1, 0)] * ixy[(j, i)] + d[(2, 2)] * ixy[(i, j)];
            k[(2 * i + 1, 2 * j + 1)] = d[(1, 1)] * iyy[(i, j)] + d[(2, 2)] * ixx[(i, j)];
        }
    }
    (k_th, m, k)
}

pub fn rel_diff(a: &nalgebra::DMatrix<f64>, b: &nalgebra::DMatrix<f64>) -> f64 {
    (a - b).amax() / b.amax().max(f64::MIN_POSITIVE)
}

/// Solves steady conduction with `T = a x + b y + c` on every boundary node
/// and returns the largest nodal deviation from that field.
pub fn linear_patch_error(mesh: &polytherm::mesh::Mesh, a: f64, b: f64, c: f64) -> f64 {
    use polytherm::element::{Formulation, Material};
    use polytherm::solver::{assemble, solve_thermal, AssemblyOptions, BcKind, BoundaryCondition, Constraints, FieldValue};
    let mut mesh = mesh.clone();
    mesh.add_boundary_set("patch", |_| true);
    let bcs = [BoundaryCondition::new(
        "patch",
        BcKind::DirichletTemperature {
            value: FieldValue::Linear { a, b, c },
        },
    )];
    let opts = AssemblyOptions {
        formulation: Formulation::default(),
        cache: None,
    };
    let sys = assemble(&mesh, &[Material::unit()], &bcs, &opts).unwrap();
    let cons = Constraints::from_bcs(&mesh, &bcs).unwrap();
    let (phi, _) = solve_thermal(&sys, &cons).unwrap();
    mesh.nodes
        .iter()
        .zip(&phi)
        .map(|(p, t)| (t - (a * p.x + b * p.y + c)).abs())
        .fold(0.0, f64::max)
}

/// Monitor value of a single unit square with convection on all sides,
/// stepped from 1 with backward Euler, and the exact exponential at `t_end`.
pub fn cooling_square(dt: f64, t_end: f64) -> (f64, f64) {
    use polytherm::element::{Formulation, Material};
    use polytherm::mesh::gen_structured_quads;
    use polytherm::solver::{assemble, solve_transient, AssemblyOptions, BcKind, BoundaryCondition, Constraints, TransientConfig};
    let mut mesh = gen_structured_quads(1.0, 1.0, 1, 1).unwrap();
    mesh.add_boundary_set("skin", |_| true);
    let g = 0.25;
    let mat = Material::unit();
    let bcs = [BoundaryCondition::new("skin", BcKind::Convection { g, ambient: 0.0 })];
    let opts = AssemblyOptions {
        formulation: Formulation::default(),
        cache: None,
    };
    let sys = assemble(&mesh, &[mat], &bcs, &opts).unwrap();
    let cons = Constraints::from_bcs(&mesh, &bcs).unwrap();
    let n_steps = (t_end / dt).round() as usize;
    let cfg = TransientConfig {
        dt,
        n_steps,
        phi0: vec![1.0; 4],
        mechanics: false,
    };
    let sol = solve_transient(&sys, &cons, &cfg).unwrap();
    // The uniform field is an eigenvector: rate = g * perimeter / (rho c area).
    let rate = g * 4.0 / (mat.rho * mat.c * 1.0);
    (sol.states.last().unwrap().phi[0], (-rate * t_end).exp())
}
