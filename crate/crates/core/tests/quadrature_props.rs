mod common;

use common::{area, convex_polygon, monomial_integral};
use polytherm::geom::Vec2;
use polytherm::quadrature::{edge_rule, gauss_legendre_unit, polygon_rule, QuadratureError, TriRule};
use proptest::prelude::*;

fn exact_degrees(degree: usize) -> impl Iterator<Item = (u32, u32)> {
    (0..=degree as u32).flat_map(move |p| (0..=degree as u32 - p).map(move |q| (p, q)))
}

#[test]
fn monomial_oracle_on_unit_square() {
    let sq = [
        Vec2::new(0.0, 0.0),
        Vec2::new(1.0, 0.0),
        Vec2::new(1.0, 1.0),
        Vec2::new(0.0, 1.0),
    ];
    assert!((monomial_integral(&sq, 0, 0) - 1.0).abs() < 1e-15);
    assert!((monomial_integral(&sq, 2, 1) - 1.0 / 6.0).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn polygon_rules_are_exact_to_their_degree(poly in convex_polygon()) {
        for degree in [1usize, 2, 4] {
            let rule = polygon_rule(&poly, degree).unwrap();
            prop_assert!((rule.weights.iter().sum::<f64>() - area(&poly)).abs() <= 1e-12 * area(&poly));
            prop_assert!(rule.weights.iter().all(|w| *w > 0.0));
            for (p, q) in exact_degrees(degree) {
                let exact = monomial_integral(&poly, p, q);
                let num = rule.integrate(|x| x.x.powi(p as i32) * x.y.powi(q as i32));
                let scale = monomial_integral(&poly, 0, 0) * (1.0 + poly.iter().map(|v| v.norm()).fold(0.0, f64::max)).powi((p + q) as i32);
                prop_assert!((num - exact).abs() <= 1e-12 * scale, "degree {degree}, x^{p} y^{q}: {num} vs {exact}");
            }
        }
    }

    #[test]
    fn edge_rules_integrate_polynomials(ax in -2.0f64..2.0, ay in -2.0f64..2.0, bx in -2.0f64..2.0, by in -2.0f64..2.0) {
        let (a, b) = (Vec2::new(ax, ay), Vec2::new(bx, by));
        let len = (b - a).norm();
        prop_assume!(len > 1e-3);
        for n in 1..=3usize {
            let rule = edge_rule(&a, &b, n).unwrap();
            for k in 0..(2 * n) as i32 {
                let num: f64 = rule.iter().map(|(_, t, w)| w * t.powi(k)).sum();
                prop_assert!((num - len / (k + 1) as f64).abs() <= 1e-13 * len);
            }
        }
    }
}

#[test]
fn gauss_legendre_nodes() {
    let r = gauss_legendre_unit(2).unwrap();
    let x = 0.5 - 0.5 / 3f64.sqrt();
    assert!((r[0].0 - x).abs() < 1e-15 && (r[0].1 - 0.5).abs() < 1e-15);
    assert!(matches!(gauss_legendre_unit(4), Err(QuadratureError::UnsupportedPoints(4))));
    assert!(matches!(TriRule::new(3), Err(QuadratureError::UnsupportedDegree(3))));
}
