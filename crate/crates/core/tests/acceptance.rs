//! Acceptance criteria 1 to 7. Each test prints one PASS/FAIL line.
//!
//! Run with `cargo test --release --test acceptance -- --nocapture` to see
//! the lines and timings.

mod common;

use std::sync::Mutex;
use std::time::{Duration, Instant};

use common::{cooling_square, linear_patch_error, random_polygon, rel_diff, unit_square_q4};
use polytherm::accel::{parent_polygon, ParentCache};
use polytherm::element::{
    element_matrices, element_stress, k_elastic, k_thermal, m_thermal, rigid_modes, shape_samples, Formulation,
    Material, Plane,
};
use polytherm::geom::{self, Rect, Vec2};
use polytherm::mesh::{gen_quadtree, gen_voronoi_polygons, QuadtreeSpec, Refinement, Seeds, VoronoiDomain};
use polytherm::solver::{
    assemble, solve_steady, solve_transient, AssemblyOptions, BackwardEuler, BoundaryCondition, Constraints, CsrMatrix,
    TransientConfig,
};
use polytherm::verify::{
    bench_lshape, bench_plate, bench_ring, convergence_order, plate_mesh, LShapeOptions, PlateOptions, PlateVariant,
    RingOptions, RingRun,
};
use polytherm::wachspress::{shape_values, Wachspress};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Serialises the criteria so timings are not skewed by each other.
static SERIAL: Mutex<()> = Mutex::new(());

struct Outcome {
    id: u32,
    checks: Vec<(String, bool)>,
    start: Instant,
    limit: Duration,
}

impl Outcome {
    fn new(id: u32, limit_s: u64) -> Self {
        Self {
            id,
            checks: Vec::new(),
            start: Instant::now(),
            limit: Duration::from_secs(limit_s),
        }
    }

    fn check(&mut self, what: impl Into<String>, ok: bool) {
        self.checks.push((what.into(), ok));
    }

    fn finish(mut self) {
        let elapsed = self.start.elapsed();
        self.check(
            format!("runtime {:.2} s < {} s", elapsed.as_secs_f64(), self.limit.as_secs()),
            elapsed < self.limit,
        );
        let failed: Vec<&str> = self.checks.iter().filter(|c| !c.1).map(|c| c.0.as_str()).collect();
        let detail: Vec<String> = self
            .checks
            .iter()
            .map(|(w, ok)| format!("{}{w}", if *ok { "" } else { "!! " }))
            .collect();
        let verdict = if failed.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {}: {verdict} | {}", self.id, detail.join("; "));
        assert!(failed.is_empty(), "criterion {} failed: {}", self.id, failed.join("; "));
    }
}

fn lock() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

#[test]
fn criterion_1_wachspress_properties() {
    let _g = lock();
    let mut out = Outcome::new(1, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut pou, mut nonneg, mut lin, mut kron, mut edge, mut fd) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let poly = random_polygon(&mut rng);
        let m = poly.len();
        let w = Wachspress::new(&poly).unwrap();
        let scale = geom::diameter(&poly) + poly.iter().map(|p| p.norm()).fold(0.0, f64::max);
        let d = 1e-6 * geom::diameter(&poly);
        for _ in 0..10 {
            let p = common::interior_point(&poly, &mut rng);
            let e = w.eval(&p).unwrap();
            pou = pou.max((e.values.iter().sum::<f64>() - 1.0).abs());
            nonneg = nonneg.min(e.values.iter().copied().fold(f64::INFINITY, f64::min));
            let x = poly.iter().zip(&e.values).fold(Vec2::zeros(), |a, (v, n)| a + v * *n);
            lin = lin.max((x - p).norm() / scale);
            let gmax = e.gradients.iter().map(|g| g.norm()).fold(0.0, f64::max);
            let f = |dx: f64, dy: f64| w.values(&(p + Vec2::new(dx, dy))).unwrap();
            let (xp, xm, yp, ym) = (f(d, 0.0), f(-d, 0.0), f(0.0, d), f(0.0, -d));
            for i in 0..m {
                let g = Vec2::new((xp[i] - xm[i]) / (2.0 * d), (yp[i] - ym[i]) / (2.0 * d));
                fd = fd.max((g - e.gradients[i]).norm() / gmax);
            }
        }
        for i in 0..m {
            let v = shape_values(&poly, &poly[i]).unwrap();
            for (j, n) in v.iter().enumerate() {
                kron = kron.max((n - if i == j { 1.0 } else { 0.0 }).abs());
            }
            let s: f64 = rng.gen_range(0.0..1.0);
            let (a, b) = (poly[i], poly[(i + 1) % m]);
            let v = shape_values(&poly, &(a + (b - a) * s)).unwrap();
            for (j, n) in v.iter().enumerate() {
                let expect = if j == i {
                    1.0 - s
                } else if j == (i + 1) % m {
                    s
                } else {
                    0.0
                };
                edge = edge.max((n - expect).abs());
            }
        }
    }
    out.check(format!("partition of unity {pou:.1e}"), pou <= 1e-12);
    out.check(format!("min value {nonneg:.1e}"), nonneg >= -1e-14);
    out.check(format!("linear precision {lin:.1e} <= 1e-12"), lin <= 1e-12);
    out.check(format!("Kronecker delta {kron:.1e}"), kron <= 1e-12);
    out.check(format!("edge linearity {edge:.1e} <= 1e-10"), edge <= 1e-10);
    out.check(format!("gradient vs central differences {fd:.1e} <= 1e-6"), fd <= 1e-6);
    out.finish();
}

#[test]
fn criterion_2_element_oracles() {
    let _g = lock();
    let mut out = Outcome::new(2, 10);
    let sq = [
        Vec2::new(0.0, 0.0),
        Vec2::new(1.0, 0.0),
        Vec2::new(1.0, 1.0),
        Vec2::new(0.0, 1.0),
    ];
    let mut worst_q4 = 0.0f64;
    for (nu, plane) in [(0.0, Plane::Stress), (0.3, Plane::Stress), (0.25, Plane::Strain)] {
        let mut mat = Material::unit();
        mat.nu = nu;
        mat.plane = plane;
        let (kt, m, ke) = unit_square_q4(&mat.d_matrix());
        worst_q4 = worst_q4
            .max(rel_diff(&k_thermal(&sq, &mat).unwrap(), &kt))
            .max(rel_diff(&m_thermal(&sq, &mat).unwrap(), &m))
            .max(rel_diff(&k_elastic(&sq, &mat).unwrap(), &ke));
    }
    out.check(format!("unit square vs closed-form Q4 {worst_q4:.1e} <= 1e-12"), worst_q4 <= 1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut stress, mut rows, mut mass, mut null, mut zeros_ok) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, true);
    for k in 0..100 {
        let poly = random_polygon(&mut rng);
        let mat = Material {
            e: rng.gen_range(0.5..5.0),
            nu: rng.gen_range(0.0..0.45),
            alpha: rng.gen_range(1e-4..1e-2),
            kx: 1.0,
            ky: 1.0,
            rho: rng.gen_range(0.5..3.0),
            c: rng.gen_range(0.5..3.0),
            plane: if k % 2 == 0 { Plane::Stress } else { Plane::Strain },
            thickness: 1.0,
            source: 0.0,
        };
        let s = shape_samples(&poly, Formulation::default()).unwrap();
        let em = element_matrices(&s, &mat);
        let phi: f64 = rng.gen_range(-100.0..100.0);
        let beta = mat.alpha * mat.expansion_factor();
        let temps = vec![phi; poly.len()];
        let u: Vec<f64> = poly.iter().flat_map(|p| [beta * phi * p.x, beta * phi * p.y]).collect();
        let sigma = element_stress(&s, &mat, &temps, &u);
        stress = stress.max(sigma.norm() / (mat.e * mat.alpha * phi.abs()));
        let kmax = em.k_th.amax();
        for i in 0..poly.len() {
            rows = rows.max(em.k_th.row(i).sum().abs() / kmax);
        }
        let target = mat.rho * mat.c * geom::signed_area(&poly);
        mass = mass.max((em.m_th.sum() - target).abs() / target);
        let emax = em.k_el.amax();
        for r in rigid_modes(&poly) {
            null = null.max((&em.k_el * &r).amax() / (emax * r.amax()));
        }
        let eig = em.k_el.clone().symmetric_eigen().eigenvalues;
        zeros_ok &= eig.iter().filter(|v| v.abs() <= 1e-10 * emax).count() == 3;
    }
    out.check(format!("free expansion |sigma|/(E alpha |phi|) {stress:.1e} <= 1e-10"), stress <= 1e-10);
    out.check(format!("conduction row sums {rows:.1e}"), rows <= 1e-12);
    out.check(format!("mass total {mass:.1e}"), mass <= 1e-12);
    out.check(format!("rigid modes in null space {null:.1e}"), null <= 1e-11);
    out.check("exactly three zero stiffness eigenvalues", zeros_ok);
    out.finish();
}

#[test]
fn criterion_3_patch_test() {
    let _g = lock();
    let mut out = Outcome::new(3, 60);
    let r = Rect::new(0.0, 0.0, 5.0, 1.0);
    let voronoi = gen_voronoi_polygons(&VoronoiDomain::Rectangle(r), &Seeds::Random { count: 500, seed: 1 }, 20).unwrap();
    let ev = linear_patch_error(&voronoi, 0.7, -1.3, 2.0);
    out.check(
        format!("Voronoi {} elements max nodal error {ev:.1e} <= 1e-10", voronoi.n_elements()),
        voronoi.n_elements() == 500 && ev <= 1e-10,
    );
    let quadtree = gen_quadtree(
        QuadtreeSpec::new(r, 50, 10),
        &[Refinement {
            region: Rect::new(1.0, 0.3, 1.4, 0.6),
            depth: 3,
        }],
    )
    .unwrap();
    let hanging = quadtree.elements.iter().filter(|e| e.nodes.len() > 4).count();
    let eq = linear_patch_error(&quadtree, 0.7, -1.3, 2.0);
    out.check(
        format!("quadtree with {hanging} hanging-node cells max nodal error {eq:.1e} <= 1e-10"),
        hanging > 0 && eq <= 1e-10,
    );
    out.finish();
}

/// Largest nodal deviation of `T` and `u_r` from the closed form, relative to
/// the field maxima.
fn profile_deviation(run: &RingRun) -> (f64, f64) {
    let ring = polytherm::verify::AnalyticRing::default();
    let p = &run.profile;
    let t_scale = p.r.iter().map(|r| ring.temperature(*r).abs()).fold(0.0, f64::max);
    let u_scale = p.r.iter().map(|r| ring.radial_displacement(*r).abs()).fold(0.0, f64::max);
    let mut dt = 0.0f64;
    let mut du = 0.0f64;
    for i in 0..p.r.len() {
        dt = dt.max((p.temperature[i] - ring.temperature(p.r[i])).abs());
        du = du.max((p.radial_displacement[i] - ring.radial_displacement(p.r[i])).abs());
    }
    (dt / t_scale, du / u_scale)
}

#[test]
fn criterion_4_ring_benchmark() {
    let _g = lock();
    let mut out = Outcome::new(4, 300);
    let study = bench_ring(&RingOptions::default()).unwrap();
    let poly = study.polygonal_reports();
    let quads = study.quad_reports();
    let et: Vec<f64> = poly.iter().map(|r| r.e_l2_t).collect();
    let eu: Vec<f64> = poly.iter().map(|r| r.e_l2_u).collect();
    let h: Vec<f64> = poly.iter().map(|r| r.h).collect();
    let monotone = |e: &[f64]| e.windows(2).all(|w| w[1] < w[0]);
    let list = |e: &[f64]| e.iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>().join(", ");
    out.check(format!("e_L2_T monotone [{}]", list(&et)), monotone(&et));
    out.check(format!("e_L2_U monotone [{}]", list(&eu)), monotone(&eu));
    let order = convergence_order(&h, &et);
    out.check(format!("temperature order {order:.2} >= 1.8"), order >= 1.8);
    let ratio_t = poly.iter().zip(&quads).map(|(p, q)| p.e_l2_t / q.e_l2_t).fold(0.0, f64::max);
    let ratio_u = poly.iter().zip(&quads).map(|(p, q)| p.e_l2_u / q.e_l2_u).fold(0.0, f64::max);
    out.check(format!("PFEM/quad e_L2_T ratio {ratio_t:.2} <= 1.1"), ratio_t <= 1.1);
    out.check(format!("PFEM/quad e_L2_U ratio {ratio_u:.2} <= 1.1"), ratio_u <= 1.1);
    let mut profile_ok = true;
    let mut worst = (0.0f64, 0.0f64);
    for run in &study.polygonal {
        let (dt, du) = profile_deviation(run);
        let (bt, bu) = (dt / run.report.e_l2_t, du / run.report.e_l2_u);
        worst = (worst.0.max(bt), worst.1.max(bu));
        profile_ok &= bt <= 5.0 && bu <= 5.0;
    }
    out.check(
        format!("profile deviation / e_L2: T {:.2}, u_r {:.2} <= 5", worst.0, worst.1),
        profile_ok,
    );
    out.finish();
}

#[test]
fn criterion_5_plate_refinement() {
    let _g = lock();
    let mut out = Outcome::new(5, 300);
    let study = bench_plate(&PlateOptions::default()).unwrap();
    for r in &study.rows {
        println!(
            "  plate {:>13}: {:>5} elements, e_L2_T {:.2e}, e_L2_U {:.2e}",
            r.mesh, r.elements, r.e_l2_t, r.e_l2_u
        );
    }
    let coarse = study.row("coarse").unwrap();
    let fine = study.row("fine").unwrap();
    let ref1 = study.row("refinement_1").unwrap();
    let ref2 = study.row("refinement_2").unwrap();
    out.check(
        format!("coarse {} and fine {} elements", coarse.elements, fine.elements),
        (450..=550).contains(&coarse.elements) && (7500..=8500).contains(&fine.elements),
    );
    out.check(
        format!("refinement_2 error {:.2e} <= 2 x fine {:.2e}", ref2.e_l2_u, fine.e_l2_u),
        ref2.e_l2_u <= 2.0 * fine.e_l2_u,
    );
    out.check(
        format!("refinement_2 uses {} < 50% of {} elements", ref2.elements, fine.elements),
        2 * ref2.elements < fine.elements,
    );
    let gain = coarse.e_l2_u / ref2.e_l2_u;
    out.check(format!("coarse / refinement_2 error {gain:.1} >= 10"), gain >= 10.0);
    out.check(
        format!("refinement_1 error {:.2e} between refinement_2 and coarse", ref1.e_l2_u),
        ref1.e_l2_u < coarse.e_l2_u && ref1.e_l2_u > ref2.e_l2_u,
    );
    out.finish();
}

#[test]
fn criterion_6_acceleration() {
    let _g = lock();
    let mut out = Outcome::new(6, 120);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let formulation = Formulation::default();
    let cache = ParentCache::new(formulation);
    let (mut worst, mut mass_exp) = (0.0f64, 0.0f64);
    for k in 0..200 {
        let pattern = rng.gen_range(0u8..16);
        let side = 10f64.powf(rng.gen_range(-3.0..1.0));
        // Quadtree cells sit on a lattice of their own size.
        let origin = Vec2::new(rng.gen_range(-20..20) as f64, rng.gen_range(-20..20) as f64) * side;
        let mut poly: Vec<Vec2> = parent_polygon(pattern).iter().map(|v| origin + v * side).collect();
        let shift = rng.gen_range(0..poly.len());
        poly.rotate_left(shift);
        let mat = Material {
            e: rng.gen_range(0.1..10.0),
            nu: rng.gen_range(0.0..0.45),
            alpha: rng.gen_range(1e-4..1e-2),
            kx: rng.gen_range(0.1..10.0),
            ky: rng.gen_range(0.1..10.0),
            rho: rng.gen_range(0.5..5.0),
            c: rng.gen_range(0.5..5.0),
            plane: if k % 3 == 0 { Plane::Strain } else { Plane::Stress },
            thickness: rng.gen_range(0.1..2.0),
            source: rng.gen_range(-5.0..5.0),
        };
        let fast = cache.element_matrices(&poly, &mat).unwrap().expect("quadtree cell");
        let direct = element_matrices(&shape_samples(&poly, formulation).unwrap(), &mat);
        worst = worst
            .max(rel_diff(&fast.k_th, &direct.k_th))
            .max(rel_diff(&fast.m_th, &direct.m_th))
            .max(rel_diff(&fast.k_el, &direct.k_el))
            .max(rel_diff(&fast.c_el, &direct.c_el))
            .max((&fast.f_q - &direct.f_q).amax() / direct.f_q.amax());
        // Mass scales with area: the double-size cell has four times the mass.
        let big: Vec<Vec2> = poly.iter().map(|p| origin + (p - origin) * 2.0).collect();
        let m2 = element_matrices(&shape_samples(&big, formulation).unwrap(), &mat).m_th;
        mass_exp = mass_exp.max(rel_diff(&m2, &(&direct.m_th * 4.0)));
    }
    out.check(format!("scaled parent vs direct {worst:.1e} <= 1e-12 (200 cases)"), worst <= 1e-12);
    out.check(format!("mass area scaling {mass_exp:.1e} <= 1e-12"), mass_exp <= 1e-12);

    // Node coordinates on this mesh are exact binary fractions, so every cell
    // is exactly a scaled parent.
    let domain = Rect::new(0.0, 0.0, 8.0, 1.0);
    let mut mesh = gen_quadtree(
        QuadtreeSpec::new(domain, 64, 8),
        &[
            Refinement { region: domain, depth: 2 },
            Refinement {
                region: Rect::new(0.0, 0.0, 0.25, 0.25),
                depth: 5,
            },
        ],
    )
    .unwrap();
    mesh.add_rect_sides(&domain);
    let (speedup, t_off, t_on, dphi, du) = accel_comparison(&mesh, formulation);
    out.check(
        format!(
            "assembly speedup {speedup:.2}x >= 1.5 on {} elements ({t_off:.3} s vs {t_on:.3} s)",
            mesh.n_elements()
        ),
        mesh.n_elements() >= 5000 && speedup >= 1.5,
    );
    out.check(
        format!("solutions agree: T {dphi:.1e}, u {du:.1e} <= 1e-12"),
        dphi <= 1e-12 && du <= 1e-12,
    );
    let plate = plate_mesh(&PlateVariant::uniform("fine", 2).refinements).unwrap();
    let (speedup, _, _, dphi, du) = accel_comparison(&plate, formulation);
    println!(
        "  note: fine plate (0.025 cells, coordinates not exactly representable): speedup {speedup:.2}x, T {dphi:.1e}, u {du:.1e}"
    );
    out.finish();
}

/// Assembly speedup (best of three) and the relative max-norm differences of
/// the steady solutions with and without the parent cache.
fn accel_comparison(mesh: &polytherm::mesh::Mesh, formulation: Formulation) -> (f64, f64, f64, f64, f64) {
    let bcs = vec![
        BoundaryCondition::temperature("left", 7.0),
        BoundaryCondition::temperature("right", 1.0),
        BoundaryCondition::displacement("left", Some(0.0), Some(0.0)),
    ];
    let materials = [Material::unit()];
    let time = |accel: bool| {
        let mut best = f64::INFINITY;
        let mut sys = None;
        for _ in 0..3 {
            let cache = ParentCache::new(formulation);
            let opts = AssemblyOptions {
                formulation,
                cache: accel.then_some(&cache),
            };
            let t = Instant::now();
            let s = assemble(mesh, &materials, &bcs, &opts).unwrap();
            best = best.min(t.elapsed().as_secs_f64());
            sys = Some(s);
        }
        (best, sys.unwrap())
    };
    let (t_off, sys_off) = time(false);
    let (t_on, sys_on) = time(true);
    let cons = Constraints::from_bcs(mesh, &bcs).unwrap();
    let a = solve_steady(&sys_on, &cons).unwrap().state;
    let b = solve_steady(&sys_off, &cons).unwrap().state;
    (t_off / t_on, t_off, t_on, max_rel(&a.phi, &b.phi), max_rel(&a.u, &b.u))
}

fn max_rel(x: &[f64], y: &[f64]) -> f64 {
    let d = x.iter().zip(y).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
    d / y.iter().fold(0.0f64, |m, q| m.max(q.abs()))
}

#[test]
fn criterion_7_transient() {
    let _g = lock();
    let mut out = Outcome::new(7, 300);
    let one = CsrMatrix::identity(1);
    let be = BackwardEuler::new(&one, &one, &[0.0], &Default::default(), 1.0).unwrap();
    let phi1 = be.step(&[1.0]).unwrap().0[0];
    out.check(format!("scalar step {phi1}"), phi1 == 0.5);

    let mesh = plate_mesh(&[]).unwrap();
    let bcs = vec![
        BoundaryCondition::temperature("left", 7.0),
        BoundaryCondition::temperature("right", 1.0),
        BoundaryCondition::displacement("left", Some(0.0), Some(0.0)),
    ];
    let mut mat = Material::unit();
    mat.source = 2.0;
    let opts = AssemblyOptions::default();
    let sys = assemble(&mesh, &[mat], &bcs, &opts).unwrap();
    let cons = Constraints::from_bcs(&mesh, &bcs).unwrap();
    let steady = solve_steady(&sys, &cons).unwrap().state;
    let cfg = TransientConfig {
        dt: 0.5,
        n_steps: 4,
        phi0: steady.phi.clone(),
        mechanics: true,
    };
    let run = solve_transient(&sys, &cons, &cfg).unwrap();
    let last = run.states.last().unwrap();
    let fixed = max_rel(&last.phi, &steady.phi).max(max_rel(&last.u, &steady.u));
    out.check(format!("steady state fixed point {fixed:.1e} <= 1e-10"), fixed <= 1e-10);

    let errs: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&dt| {
            let (num, exact) = cooling_square(dt, 1.0);
            (num - exact).abs()
        })
        .collect();
    let ratios: Vec<f64> = errs.windows(2).map(|w| w[0] / w[1]).collect();
    out.check(
        format!("cooling error ratios {ratios:.3?} within 2 +- 0.2"),
        ratios.iter().all(|r| (r - 2.0).abs() <= 0.2),
    );

    let lshape = bench_lshape(&LShapeOptions {
        dt_levels: 0,
        ..Default::default()
    })
    .unwrap();
    let h = &lshape.polygonal.temperature;
    let monotone = h.windows(2).all(|w| w[1] >= w[0]);
    out.check(
        format!(
            "L-shape: {} steps, monotone heating ({:.2} to {:.2})",
            h.len(),
            h[0],
            h[h.len() - 1]
        ),
        h.len() == 100 && monotone,
    );
    let gap = lshape.final_temperature_gap();
    out.check(
        format!(
            "PFEM {:.3} vs quad {:.3} at t = {} s, gap {:.3}% <= 1%",
            h[h.len() - 1],
            lshape.quads.temperature.last().unwrap(),
            lshape.polygonal.times.last().unwrap(),
            100.0 * gap
        ),
        gap <= 0.01,
    );
    out.finish();
}
