//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Run with `cargo test --test acceptance -- --nocapture` to see
//! the lines; every tolerance is pinned in code.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kpoly_core::approximation::{convergence_experiment, semicontinuity_experiment, TargetSurface};
use kpoly_core::estimators::estimate_curvature_bounds;
use kpoly_core::fixtures;
use kpoly_core::gh::{gh_exact, gh_lower_bound, gh_upper_bound, FiniteMetricSpace};
use kpoly_core::model::{geodesic_point, side_point_ratios, Curvature};
use kpoly_core::smoothing::{
    audit_tail_coefficients, ode_deviation, smooth_cone, solve_warp, tail_limit, warp_coefficients,
};
use kpoly_core::surface::SurfacePoint;

struct Criterion {
    name: &'static str,
    start: Instant,
    failures: Vec<String>,
}

impl Criterion {
    fn new(name: &'static str) -> Self {
        Criterion {
            name,
            start: Instant::now(),
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(detail());
        }
    }

    fn finish(mut self, runtime_cap: Option<f64>) {
        let elapsed = self.start.elapsed().as_secs_f64();
        if let Some(cap) = runtime_cap {
            if elapsed >= cap {
                self.failures
                    .push(format!("runtime {elapsed:.2}s exceeds {cap}s"));
            }
        }
        let verdict = if self.failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        println!("acceptance {}: {verdict} ({elapsed:.2}s)", self.name);
        for f in &self.failures {
            println!("  - {f}");
        }
        assert!(
            self.failures.is_empty(),
            "{} failed: {:?}",
            self.name,
            self.failures
        );
    }
}

/// Criterion 1: discrete Gauss-Bonnet on the fixture suite.
#[test]
fn criterion_1_gauss_bonnet() {
    let mut c = Criterion::new("1 (gauss-bonnet fixtures)");
    let unit = Curvature::new(1.0).unwrap();
    let fixtures: Vec<(&str, kpoly_core::KPolyhedron)> = vec![
        ("tetrahedron", fixtures::tetrahedron()),
        ("cube", fixtures::cube()),
        ("icosahedron", fixtures::icosahedron()),
        ("flat torus", fixtures::flat_torus(1)),
        ("doubled square", fixtures::doubled_square()),
        ("octant sphere k=1", fixtures::octant_sphere(unit)),
        (
            "octant sphere k=0",
            fixtures::octant_sphere(Curvature::FLAT),
        ),
    ];
    for (name, poly) in &fixtures {
        let residual = poly.gauss_bonnet_residual();
        c.check(residual.abs() <= 1e-8, || {
            format!("{name}: residual {residual}")
        });
    }
    c.finish(Some(1.0));
}

/// Criterion 2: tail-coefficient limits and the RK4 cross-check.
#[test]
fn criterion_2_smoothing_limits() {
    let mut c = Criterion::new("2 (smoothing limits and integrator)");
    let epsilon = 1e-4;
    for i in 1..=10 {
        let lambda = i as f64 / 10.0;
        let (a, b) = solve_warp(lambda, epsilon).unwrap().tail_coefficients();
        let a_limit = tail_limit(lambda);
        c.check((a - a_limit).abs() <= 1e-3, || {
            format!("lambda {lambda}: |A - limit| = {}", (a - a_limit).abs())
        });
        c.check(b.abs() <= 1e-3, || {
            format!("lambda {lambda}: |B| = {}", b.abs())
        });
        // closed form against the fourth-order integrator
        let dev = ode_deviation(lambda, epsilon, epsilon / 50.0).unwrap();
        c.check(dev <= 1e-6, || format!("lambda {lambda}: deviation {dev}"));
    }
    // observed convergence order, measured where truncation dominates
    // roundoff (larger epsilon)
    let (lambda, eps) = (0.5, 0.05);
    let devs: Vec<f64> = [50.0, 100.0, 200.0]
        .iter()
        .map(|f| ode_deviation(lambda, eps, eps / f).unwrap())
        .collect();
    for w in devs.windows(2) {
        let order = (w[0] / w[1]).log2();
        c.check(order >= 3.8, || format!("observed order {order} ({w:?})"));
    }
    c.finish(Some(5.0));
}

/// Criterion 3: curvature bound of the smoothing and the cone match.
#[test]
fn criterion_3_smoothing_curvature_and_match() {
    let mut c = Criterion::new("3 (smoothing curvature bound and cone match)");
    let epsilon = 1e-4;
    let tau = 1e-2;
    let two_pi = 2.0 * std::f64::consts::PI;
    for omega in [0.5, 1.0, std::f64::consts::PI, 4.0, 5.5] {
        let cone = smooth_cone(omega, epsilon, tau).unwrap();
        let p = &cone.profile;
        let (k1, k2) = p.knots();
        // piecewise curvature: sample every piece, knots one-sided
        for t in [0.5 * k1, 0.5 * (k1 + k2), 2.0 * k2, 1.0, 2.5] {
            let kap = p.curvature_one_sided(t, true);
            c.check(kap >= 1.0 - 1e-12, || {
                format!("omega {omega}: curvature {kap} at t = {t}")
            });
        }
        // cone circumference law past the band
        let scale = 1.0 - omega / two_pi;
        for i in 1..=50 {
            let t = 2.0 * k2 + (2.8 - 2.0 * k2) * i as f64 / 50.0;
            let lhs = two_pi * p.eval(t);
            let rhs = scale * two_pi * (t + cone.phase).sin();
            c.check((lhs - rhs).abs() <= 1e-10, || {
                format!(
                    "omega {omega}: circumference gap {} at t = {t}",
                    (lhs - rhs).abs()
                )
            });
        }
    }
    c.finish(None);
}

/// Criterion 4: uniform second-order approach of the interpolation
/// ratio to one.
#[test]
fn criterion_4_interpolation_ratio_fit() {
    let mut c = Criterion::new("4 (interpolation-distance ratio fit)");
    let deltas: Vec<f64> = (1..=6).map(|k| 0.5_f64.powi(k)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for &kappa in &[1.0, -1.0] {
        let k = Curvature::new(kappa).unwrap();
        for case in 0..20 {
            let (x, y, z) = (
                rng.gen_range(0.2..0.6),
                rng.gen_range(0.2..0.6),
                rng.gen_range(0.2..0.6),
            );
            let sides: [f64; 3] = [y + z, z + x, x + y];
            let (s, t) = (rng.gen_range(0.15..0.85), rng.gen_range(0.15..0.85));
            let ratios = side_point_ratios(k, sides[0], sides[1], sides[2], s, t, &deltas).unwrap();
            // least-squares slope of log|ratio - 1| against log delta
            let pts: Vec<(f64, f64)> = deltas
                .iter()
                .zip(&ratios)
                .filter(|(_, &r)| (r - 1.0).abs() > 1e-13)
                .map(|(&d, &r)| (d.ln(), (r - 1.0).abs().ln()))
                .collect();
            c.check(pts.len() >= 5, || {
                format!("kappa {kappa} case {case}: degenerate ratios {ratios:?}")
            });
            if pts.len() < 2 {
                continue;
            }
            let n = pts.len() as f64;
            let sx: f64 = pts.iter().map(|p| p.0).sum();
            let sy: f64 = pts.iter().map(|p| p.1).sum();
            let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
            let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
            let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            c.check(slope >= 1.9, || {
                format!("kappa {kappa} case {case}: fitted exponent {slope}")
            });
        }
    }
    c.finish(Some(5.0));
}

/// Criterion 5: Gromov-Hausdorff convergence of the flat replacements
/// of the icosahedral sphere triangulations.
#[test]
fn criterion_5_sphere_convergence() {
    let mut c = Criterion::new("5 (sphere approximation convergence)");
    let rows = convergence_experiment(TargetSurface::UnitSphere, &[0, 1, 2, 3], 42, 8).unwrap();
    for w in rows.windows(2) {
        c.check(w[1].gh_upper < w[0].gh_upper, || {
            format!("gh_upper not decreasing: {:?}", rows)
        });
        c.check(w[1].max_abs_omega < w[0].max_abs_omega, || {
            format!("max |omega| not decreasing: {:?}", rows)
        });
    }
    let last = rows.last().unwrap();
    c.check(last.gh_upper <= 0.05, || {
        format!("level-3 gh_upper = {}", last.gh_upper)
    });
    c.finish(Some(60.0));
}

/// Criterion 6: oracle bracketing of the exact GH solver.
#[test]
fn criterion_6_gh_oracle() {
    let mut c = Criterion::new("6 (GH bounds bracket the exact solver)");
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let random_space = |rng: &mut ChaCha8Rng, n: usize| {
        let pts: Vec<[f64; 3]> = (0..n).map(|_| [rng.gen(), rng.gen(), rng.gen()]).collect();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let dx = pts[i][0] - pts[j][0];
                let dy = pts[i][1] - pts[j][1];
                let dz = pts[i][2] - pts[j][2];
                d[i * n + j] = (dx * dx + dy * dy + dz * dz).sqrt();
            }
        }
        FiniteMetricSpace::new(n, d).unwrap()
    };
    for case in 0..200 {
        let n = rng.gen_range(2..=4);
        let m = rng.gen_range(2..=4);
        let x = random_space(&mut rng, n);
        let y = random_space(&mut rng, m);
        let exact = gh_exact(&x, &y, 6).unwrap();
        let lower = gh_lower_bound(&x, &y);
        let (upper, _) = gh_upper_bound(&x, &y, 4);
        c.check(lower <= exact + 1e-12, || {
            format!("case {case}: lower {lower} > exact {exact}")
        });
        c.check(upper >= exact - 1e-12, || {
            format!("case {case}: upper {upper} < exact {exact}")
        });
        c.check(gh_exact(&x, &x, 6).unwrap() == 0.0, || {
            format!("case {case}: self-distance nonzero")
        });
        // scale equivariance
        let s = rng.gen_range(0.2..4.0);
        let scaled = gh_exact(&x.scaled(s), &y.scaled(s), 6).unwrap();
        c.check(
            (scaled - s * exact).abs() <= 1e-12 * (1.0 + s * exact),
            || format!("case {case}: scaling gap {}", (scaled - s * exact).abs()),
        );
    }
    c.finish(Some(30.0));
}

fn interior_point(poly: &kpoly_core::KPolyhedron, tri: usize) -> SurfacePoint {
    let chart = poly.chart(tri);
    let kappa = poly.kappa();
    let [va, vb, vc] = chart.vertices;
    let mid = geodesic_point(
        kappa,
        va,
        vb,
        0.5 * kpoly_core::model::chart_distance(kappa, va, vb),
    );
    let pos = geodesic_point(
        kappa,
        mid,
        vc,
        0.4 * kpoly_core::model::chart_distance(kappa, mid, vc),
    );
    SurfacePoint::Interior { tri, chart: pos }
}

/// Criterion 7: estimator sanity on the flat torus, the exact sphere
/// decomposition, and a cube cone point.
#[test]
fn criterion_7_estimator_sanity() {
    let mut c = Criterion::new("7 (excess-ratio estimator sanity)");
    let floor = std::f64::consts::PI / 8.0;

    let torus = fixtures::flat_torus(1);
    let x = interior_point(&torus, 0);
    let rows = estimate_curvature_bounds(&torus, &x, &[0.1], floor, 64, 16, 7).unwrap();
    c.check(
        rows[0].inf_ratio.abs() <= 0.02 && rows[0].sup_ratio.abs() <= 0.02,
        || format!("flat torus: {:?}", rows[0]),
    );

    let sphere = fixtures::octant_sphere(Curvature::new(1.0).unwrap());
    let x = interior_point(&sphere, 0);
    let rows = estimate_curvature_bounds(&sphere, &x, &[0.1], floor, 64, 16, 7).unwrap();
    c.check(
        (rows[0].inf_ratio - 1.0).abs() <= 0.05 && (rows[0].sup_ratio - 1.0).abs() <= 0.05,
        || format!("round sphere: {:?}", rows[0]),
    );

    let cube = fixtures::cube();
    let apex = SurfacePoint::Vertex(0);
    let rows = estimate_curvature_bounds(&cube, &apex, &[0.2, 0.1], floor, 64, 16, 7).unwrap();
    c.check(rows[1].sup_ratio >= 3.0 * rows[0].sup_ratio, || {
        format!("cube cone blow-up: {:?}", rows)
    });
    c.finish(Some(120.0));
}

/// Criterion 8: semicontinuity of the singular curvature under
/// vertex-preserving refinement.
#[test]
fn criterion_8_semicontinuity() {
    let mut c = Criterion::new("8 (singular-curvature semicontinuity)");
    for (name, poly, vertex) in [
        ("cube", fixtures::cube(), 0usize),
        ("doubled square", fixtures::doubled_square(), 0),
    ] {
        let omega0 = poly.singular_curvature(vertex).unwrap();
        let rows = semicontinuity_experiment(&poly, vertex, 3).unwrap();
        for row in &rows {
            c.check(row.omega <= omega0 + 1e-9, || {
                format!(
                    "{name} level {}: omega {} above {omega0}",
                    row.level, row.omega
                )
            });
        }
    }
    c.finish(None);
}

/// Criterion 9: the published tail-coefficient formulas agree with the
/// C^1-matching ground truth, or a mismatch report is produced.
#[test]
fn criterion_9_formula_transcription_audit() {
    let mut c = Criterion::new("9 (closed-form transcription audit)");
    let lambdas: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
    let epsilons = [1e-2, 1e-3, 1e-4];
    let report = audit_tail_coefficients(&lambdas, &epsilons, 1e-8);

    // independent divergence scan over the same grid with the same two
    // public routes; the audit must flag exactly these cells
    let mut independent = Vec::new();
    for &lambda in &lambdas {
        for &epsilon in &epsilons {
            let matched = solve_warp(lambda, epsilon).unwrap().tail_coefficients();
            let closed = warp_coefficients(lambda, epsilon);
            let norm = (matched.0.powi(2) + matched.1.powi(2)).sqrt();
            let rel = ((closed.0 - matched.0)
                .abs()
                .max((closed.1 - matched.1).abs()))
                / norm;
            if rel > 1e-8 {
                independent.push((lambda, epsilon, rel));
            }
        }
    }
    c.check(report.len() == independent.len(), || {
        format!(
            "audit reported {} mismatches, independent scan found {}",
            report.len(),
            independent.len()
        )
    });
    if report.is_empty() {
        println!("  transcription agrees to 1e-8 across the grid");
    } else {
        // a generated report is a valid outcome; silence would not be
        for m in &report {
            println!(
                "  mismatch at lambda={}, epsilon={}: closed {:?} vs matched {:?} (rel {})",
                m.lambda, m.epsilon, m.closed_form, m.matched, m.rel_error
            );
        }
    }
    c.finish(None);
}
