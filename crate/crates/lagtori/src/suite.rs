//! The named verification checks behind the `verify` command: every
//! module-level invariant, runnable as a suite with a seeded generator,
//! density-scaled grids, and per-check tolerance overrides.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::{classify_pq, classify_via_reduction, classify_xy, ClassificationOutcome};
use crate::disk::{CurveSample, DiskPoint};
use crate::germ::{
    displacement_energy, germ_consistency_residual, germ_diagonal_fiber, germ_l_torus,
    germs_linearly_equivalent,
};
use crate::polytope::{case_region, CaseRegion, FiberLabel, PqCoord};
use crate::probe::{
    apply_fiber_move, free_action_check, probe_pair, sigma_probe, FiberMove,
};
use crate::reduction::{
    circle_fiber_moduli, conjugated_disk_pair, disk_to_sphere, enclosed_area_closed_form,
    enclosed_area_quadrature, fiber_of_circle, h_level, half_abs_p_integral, matching_radius,
    primitive_one_form, reduced_curve, reduced_curve_norm, reduced_form_density,
    sample_reduced_curve, semiconjugacy_residual, sphere_to_disk, sqrt_radius_integral,
    ScalarField,
};
use crate::report::{CheckResult, Report};
use crate::sphere::{
    area_form_half, conjugating_matrices, omega_product, rotation_about_e1, ProductPoint,
    SpherePoint, TangentPair, Vec3,
};
use crate::torus::{
    generating_curve, generating_curve_velocity, membership_l1, pairing_field, pairing_moment,
    product_torus_point, rotation_moment, standard_moment, torus_point, TorusParam,
};

const TAU: f64 = std::f64::consts::TAU;
const PI: f64 = std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteName {
    All,
    Curves,
    Reduction,
    Appendix,
    Classify,
    Probes,
    Germs,
}

impl SuiteName {
    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteName::All => "all",
            SuiteName::Curves => "curves",
            SuiteName::Reduction => "reduction",
            SuiteName::Appendix => "appendix",
            SuiteName::Classify => "classify",
            SuiteName::Probes => "probes",
            SuiteName::Germs => "germs",
        }
    }

    pub const ALL_NAMES: [&'static str; 7] = [
        "all",
        "curves",
        "reduction",
        "appendix",
        "classify",
        "probes",
        "germs",
    ];
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("unknown suite '{0}'; expected one of all, curves, reduction, appendix, classify, probes, germs")]
pub struct UnknownSuite(pub String);

impl FromStr for SuiteName {
    type Err = UnknownSuite;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(SuiteName::All),
            "curves" => Ok(SuiteName::Curves),
            "reduction" => Ok(SuiteName::Reduction),
            "appendix" => Ok(SuiteName::Appendix),
            "classify" => Ok(SuiteName::Classify),
            "probes" => Ok(SuiteName::Probes),
            "germs" => Ok(SuiteName::Germs),
            other => Err(UnknownSuite(other.to_string())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    /// Side length of parameter grids; at least 4.
    pub grid_density: usize,
    pub seed: u64,
    /// Per-check tolerance overrides, keyed by check name.
    pub tol_overrides: BTreeMap<String, f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            grid_density: 4,
            seed: 0,
            tol_overrides: BTreeMap::new(),
        }
    }
}

/// Run the named suite. Deterministic for a fixed seed and flags up to the
/// wall-clock fields (see [`Report::normalized`]).
pub fn run_suite(name: SuiteName, cfg: &SuiteConfig) -> Report {
    assert!(cfg.grid_density >= 4, "grid density must be at least 4");
    let start = Instant::now();
    let mut checks = Vec::new();
    let want = |suite: SuiteName| name == SuiteName::All || name == suite;
    if want(SuiteName::Curves) {
        curves_checks(cfg, &mut checks);
    }
    if want(SuiteName::Reduction) {
        reduction_checks(cfg, &mut checks);
    }
    if want(SuiteName::Appendix) {
        appendix_checks(cfg, &mut checks);
    }
    if want(SuiteName::Classify) {
        classify_checks(cfg, &mut checks);
    }
    if want(SuiteName::Probes) {
        probes_checks(cfg, &mut checks);
    }
    if want(SuiteName::Germs) {
        germs_checks(cfg, &mut checks);
    }
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Report::new(name.as_str(), cfg.seed, checks, wall_ms)
}

fn fnv64(s: &str) -> u64 {
    s.bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
            (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
        })
}

fn run_check(
    cfg: &SuiteConfig,
    out: &mut Vec<CheckResult>,
    name: &str,
    default_tol: f64,
    params: &[(&str, String)],
    body: impl FnOnce(&mut ChaCha8Rng) -> f64,
) {
    let tol = cfg
        .tol_overrides
        .get(name)
        .copied()
        .unwrap_or(default_tol);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ fnv64(name));
    let start = Instant::now();
    let max_error = body(&mut rng);
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    let params: BTreeMap<String, String> = params
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect();
    out.push(CheckResult::new(name, params, max_error, tol, runtime_ms));
}

// ---------------------------------------------------------------------------
// Sampling and grids (shared with the acceptance tests)

pub fn sample_sphere_point(rng: &mut ChaCha8Rng) -> SpherePoint<f64> {
    let u: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..TAU);
    let rho = (1.0 - u * u).sqrt();
    SpherePoint::from_coords(rho * phi.cos(), rho * phi.sin(), u).expect("unit by construction")
}

pub fn sample_disk_point(rng: &mut ChaCha8Rng, max_radius: f64) -> DiskPoint<f64> {
    loop {
        let x = rng.random_range(-max_radius..max_radius);
        let y = rng.random_range(-max_radius..max_radius);
        if x * x + y * y < max_radius * max_radius {
            return DiskPoint::new(x, y).expect("inside the disk");
        }
    }
}

pub fn sample_interior_pq(rng: &mut ChaCha8Rng, margin: f64) -> PqCoord<f64> {
    let q: f64 = rng.random_range(margin..(1.0 - margin));
    let p: f64 = rng.random_range(-1.0 + margin..1.0 - margin) * q * (1.0 - margin);
    PqCoord::new(p, q)
}

/// Interior grid of (p, q) points, side `density`, with margins away from
/// every facet. Never contains p = 0.
pub fn pq_grid(density: usize) -> Vec<PqCoord<f64>> {
    let mut grid = Vec::with_capacity(density * density);
    for i in 0..density {
        let q = 0.12 + 0.82 * (i as f64 + 0.5) / density as f64;
        for j in 0..density {
            let frac = (j as f64 + 0.5) / density as f64;
            let p = q * (2.0 * frac - 1.0) * 0.92;
            if p.abs() < 1e-9 {
                continue;
            }
            grid.push(PqCoord::new(p, q));
        }
    }
    grid
}

/// Case-1 anchor points p = +/- q^2/2 for q in {0.5, ..., 0.9}.
pub fn case1_anchors() -> Vec<PqCoord<f64>> {
    let mut pts = Vec::new();
    for k in 0..5 {
        let q = 0.5 + 0.1 * k as f64;
        for sign in [1.0, -1.0] {
            pts.push(PqCoord::new(sign * 0.5 * q * q, q));
        }
    }
    pts
}

/// Grid points in the region 0 < p^2 < q^4, anchors included.
pub fn case1_grid(density: usize) -> Vec<PqCoord<f64>> {
    let mut pts = case1_anchors();
    pts.extend(
        pq_grid(density)
            .into_iter()
            .filter(|pq| case_region(*pq) == CaseRegion::Case1),
    );
    pts
}

/// Grid points in the region p^2 >= q^4 (p != 0).
pub fn case2_grid(density: usize) -> Vec<PqCoord<f64>> {
    pq_grid(density)
        .into_iter()
        .filter(|pq| case_region(*pq) == CaseRegion::Case2)
        .collect()
}

/// Polynomial fields (degree <= 2 monomials and x^2 - y) with hand-coded
/// gradients, for the semiconjugacy checks.
pub fn semiconjugacy_basis() -> Vec<(&'static str, ScalarField<f64>)> {
    vec![
        (
            "x2-y",
            ScalarField::new(|x, y| x * x - y, |x, _| (2.0 * x, -1.0)).unwrap(),
        ),
        ("one", ScalarField::new(|_, _| 1.0, |_, _| (0.0, 0.0)).unwrap()),
        ("x", ScalarField::new(|x, _| x, |_, _| (1.0, 0.0)).unwrap()),
        ("y", ScalarField::new(|_, y| y, |_, _| (0.0, 1.0)).unwrap()),
        (
            "x2",
            ScalarField::new(|x, _| x * x, |x, _| (2.0 * x, 0.0)).unwrap(),
        ),
        (
            "xy",
            ScalarField::new(|x, y| x * y, |x, y| (y, x)).unwrap(),
        ),
        (
            "y2",
            ScalarField::new(|_, y| y * y, |_, y| (0.0, 2.0 * y)).unwrap(),
        ),
    ]
}

fn fiber_of(outcome: ClassificationOutcome<f64>) -> FiberLabel<f64> {
    outcome.fiber().expect("grid point classifies to a fiber")
}

// ---------------------------------------------------------------------------
// curves: sphere geometry and the torus construction

fn curves_checks(cfg: &SuiteConfig, out: &mut Vec<CheckResult>) {
    let d = cfg.grid_density;
    let grid = pq_grid(d);
    let grid_param = [("grid", format!("{d}x{d}"))];

    run_check(cfg, out, "rotation-norm-preservation", 1e-12, &[("samples", "200".into())], |rng| {
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let v = Vec3::new(
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            );
            let t: f64 = rng.random_range(-10.0..10.0);
            let rotated = rotation_about_e1(t).apply(v);
            worst = worst.max((rotated.norm() - v.norm()).abs());
        }
        worst
    });

    run_check(cfg, out, "rotation-group-law", 1e-12, &[("samples", "100".into())], |rng| {
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let s: f64 = rng.random_range(-7.0..7.0);
            let t: f64 = rng.random_range(-7.0..7.0);
            let lhs = rotation_about_e1(s).mul(&rotation_about_e1(t));
            worst = worst.max(lhs.max_abs_diff(&rotation_about_e1(s + t)));
        }
        worst
    });

    run_check(cfg, out, "conjugation-reverses-angle", 1e-12, &[("samples", "100".into())], |rng| {
        let (_, d2) = conjugating_matrices::<f64>();
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let t: f64 = rng.random_range(-7.0..7.0);
            let lhs = d2.mul(&rotation_about_e1(t)).mul(&d2);
            worst = worst.max(lhs.max_abs_diff(&rotation_about_e1(-t)));
        }
        worst
    });

    run_check(cfg, out, "area-form-antisymmetry", 1e-15, &[("samples", "100".into())], |rng| {
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let v = sample_sphere_point(rng);
            let a = v.project_tangent(sample_sphere_point(rng).vec());
            let b = v.project_tangent(sample_sphere_point(rng).vec());
            worst = worst.max((area_form_half(&v, a, b) + area_form_half(&v, b, a)).abs());
            worst = worst.max(area_form_half(&v, a, a.scale(1.7)).abs());
        }
        worst
    });

    run_check(cfg, out, "sphere-area-quadrature", 1e-3, &[("grid", format!("{0}x{0}", 100 * d))], |_| {
        let n = 100 * d;
        let du = 2.0 / n as f64;
        let dphi = TAU / n as f64;
        let mut total = 0.0;
        for i in 0..n {
            let u = -1.0 + (i as f64 + 0.5) * du;
            let rho = (1.0 - u * u).sqrt();
            for j in 0..n {
                let phi = (j as f64 + 0.5) * dphi;
                let v = SpherePoint::from_coords(rho * phi.cos(), rho * phi.sin(), u).unwrap();
                let dphi_v = Vec3::new(-rho * phi.sin(), rho * phi.cos(), 0.0);
                let du_v = Vec3::new(-u / rho * phi.cos(), -u / rho * phi.sin(), 1.0);
                total += area_form_half(&v, dphi_v, du_v) * dphi * du;
            }
        }
        (total.abs() - TAU).abs()
    });

    run_check(cfg, out, "curve-unit-norms", 1e-12, &grid_param, |_| {
        let mut worst = 0.0f64;
        for &pq in &grid {
            for k in 0..64 {
                let pt = generating_curve(TAU * k as f64 / 64.0, pq).unwrap();
                worst = worst.max((pt.v.vec().norm() - 1.0).abs());
                worst = worst.max((pt.w.vec().norm() - 1.0).abs());
            }
        }
        worst
    });

    run_check(cfg, out, "torus-level-residuals", 1e-12, &grid_param, |_| {
        let mut worst = 0.0f64;
        for &pq in &grid {
            for i in 0..16 {
                for j in 0..16 {
                    let tp = TorusParam::new(TAU * i as f64 / 16.0, TAU * j as f64 / 16.0);
                    let pt = torus_point(tp, pq).unwrap();
                    let sum = (pt.v.vec().x + pt.w.vec().x - 2.0 * pq.p).abs();
                    let dot =
                        (pt.v.vec().dot(pt.w.vec()) - (2.0 * pq.q * pq.q - 1.0)).abs();
                    worst = worst.max(sum).max(dot);
                    worst = worst.max((rotation_moment(&pt) + 2.0 * pq.p).abs());
                    let f2 = pairing_moment(&pt, pq.q).unwrap();
                    worst =
                        worst.max((f2 - (2.0 * pq.q * pq.q - 1.0) / (4.0 * pq.q)).abs());
                }
            }
        }
        worst
    });

    run_check(cfg, out, "integral-curve-analytic", 1e-8, &grid_param, |_| {
        let mut worst = 0.0f64;
        for &pq in &grid {
            for k in 0..256 {
                let theta = TAU * k as f64 / 256.0;
                let pt = generating_curve(theta, pq).unwrap();
                let field = pairing_field(&pt, pq.q).unwrap();
                let (dv, dw) = generating_curve_velocity(theta, pq).unwrap();
                worst = worst.max((dv - field.a).norm()).max((dw - field.b).norm());
            }
        }
        worst
    });

    run_check(cfg, out, "integral-curve-fd", 1e-6, &grid_param, |_| {
        let h = 1e-5;
        let mut worst = 0.0f64;
        for &pq in &grid {
            for k in 0..64 {
                let theta = TAU * k as f64 / 64.0;
                let pt = generating_curve(theta, pq).unwrap();
                let field = pairing_field(&pt, pq.q).unwrap();
                let plus = generating_curve(theta + h, pq).unwrap();
                let minus = generating_curve(theta - h, pq).unwrap();
                let fd_v = (plus.v.vec() - minus.v.vec()).scale(0.5 / h);
                let fd_w = (plus.w.vec() - minus.w.vec()).scale(0.5 / h);
                worst = worst.max((fd_v - field.a).norm()).max((fd_w - field.b).norm());
            }
        }
        worst
    });

    run_check(cfg, out, "lagrangian-vanishing", 1e-10, &grid_param, |_| {
        lagrangian_worst(&grid, 32)
    });

    run_check(cfg, out, "poisson-commutation", 1e-10, &grid_param, |_| {
        let mut worst = 0.0f64;
        for &pq in &grid {
            for k in 0..64 {
                let pt = generating_curve(TAU * k as f64 / 64.0, pq).unwrap();
                let x = pairing_field(&pt, pq.q).unwrap();
                worst = worst.max((x.a + x.b).dot(Vec3::e1()).abs());
            }
        }
        worst
    });

    run_check(cfg, out, "product-torus-moment", 1e-12, &[("samples", "100".into())], |rng| {
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let fl: FiberLabel<f64> = FiberLabel::new(
                rng.random_range(-0.49..0.49),
                rng.random_range(-0.49..0.49),
            );
            let pt = product_torus_point(
                fl,
                rng.random_range(0.0..TAU),
                rng.random_range(0.0..TAU),
            )
            .unwrap();
            let (mx, my) = standard_moment(&pt);
            worst = worst.max((mx - fl.xi).abs()).max((my - fl.zeta).abs());
            worst = worst.max((pt.v.vec().norm() - 1.0).abs());
            let u1 = TangentPair::at(
                &pt,
                Vec3::new(0.0, -pt.v.vec().z, pt.v.vec().y),
                Vec3::zero(),
            )
            .unwrap();
            let u2 = TangentPair::at(
                &pt,
                Vec3::zero(),
                Vec3::new(0.0, -pt.w.vec().z, pt.w.vec().y),
            )
            .unwrap();
            worst = worst.max(omega_product(&pt, &u1, &u2).abs());
        }
        worst
    });

    run_check(cfg, out, "membership-residuals", 0.0, &grid_param, |_| {
        let mut violations = 0.0;
        for &pq in &grid {
            let tp = TorusParam::new(1.1, 2.7);
            let pt = torus_point(tp, pq).unwrap();
            if !membership_l1(&pt, pq, 1e-10) {
                violations += 1.0;
            }
            let off = PqCoord::new(pq.p, (pq.q + 0.83).min(0.98) - 0.45);
            if (off.q - pq.q).abs() > 1e-3 && membership_l1(&pt, off, 1e-6) {
                violations += 1.0;
            }
        }
        violations
    });
}

fn lagrangian_worst(grid: &[PqCoord<f64>], side: usize) -> f64 {
    let h = 1e-6;
    let mut worst = 0.0f64;
    for &pq in grid {
        for i in 0..side {
            for j in 0..side {
                let theta = TAU * i as f64 / side as f64;
                let t = TAU * j as f64 / side as f64;
                let pt = torus_point(TorusParam::new(theta, t), pq).unwrap();
                let diff = |f: &dyn Fn(f64, f64) -> ProductPoint<f64>,
                            a: f64,
                            b: f64,
                            da: f64,
                            db: f64| {
                    let plus = f(a + da, b + db);
                    let minus = f(a - da, b - db);
                    (
                        (plus.v.vec() - minus.v.vec()).scale(0.5 / h),
                        (plus.w.vec() - minus.w.vec()).scale(0.5 / h),
                    )
                };
                let curve = |a: f64, b: f64| torus_point(TorusParam::new(a, b), pq).unwrap();
                let (dv1, dw1) = diff(&curve, theta, t, h, 0.0);
                let (dv2, dw2) = diff(&curve, theta, t, 0.0, h);
                let u1 = TangentPair::project(&pt, dv1, dw1).unwrap();
                let u2 = TangentPair::project(&pt, dv2, dw2).unwrap();
                worst = worst.max(omega_product(&pt, &u1, &u2).abs());
            }
        }
    }
    worst
}

// ---------------------------------------------------------------------------
// reduction: the chart, the level claim, semiconjugacy, circle fibers

fn reduction_checks(cfg: &SuiteConfig, out: &mut Vec<CheckResult>) {
    let d = cfg.grid_density;
    let c1 = case1_grid(d);
    let c1_param = [("case1-points", c1.len().to_string())];

    run_check(cfg, out, "chart-roundtrip", 1e-12, &[("samples", "200".into())], |rng| {
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let z = sample_disk_point(rng, 0.97);
            let back = sphere_to_disk(&disk_to_sphere(z)).unwrap();
            worst = worst.max((back.re() - z.re()).abs()).max((back.im() - z.im()).abs());
        }
        worst
    });

    run_check(cfg, out, "chart-area-preserving", 1e-6, &[("samples", "100".into())], |rng| {
        let h = 1e-6;
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let z = sample_disk_point(rng, 0.9);
            let v = disk_to_sphere(z);
            let dx = (disk_to_sphere(DiskPoint::new(z.re() + h, z.im()).unwrap()).vec()
                - disk_to_sphere(DiskPoint::new(z.re() - h, z.im()).unwrap()).vec())
            .scale(0.5 / h);
            let dy = (disk_to_sphere(DiskPoint::new(z.re(), z.im() + h).unwrap()).vec()
                - disk_to_sphere(DiskPoint::new(z.re(), z.im() - h).unwrap()).vec())
            .scale(0.5 / h);
            let ratio = 0.5 * v.vec().dot(dx.cross(dy)) / 2.0;
            worst = worst.max((ratio - 1.0).abs());
        }
        worst
    });

    run_check(cfg, out, "chart-equivariance", 1e-12, &[("samples", "100".into())], |rng| {
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let z = sample_disk_point(rng, 0.95);
            let t: f64 = rng.random_range(0.0..TAU);
            let rotated = DiskPoint::new(
                z.re() * t.cos() - z.im() * t.sin(),
                z.re() * t.sin() + z.im() * t.cos(),
            )
            .unwrap();
            let lhs = disk_to_sphere(rotated);
            let rhs = disk_to_sphere(z).rotate(&rotation_about_e1(t)).unwrap();
            worst = worst.max((lhs.vec() - rhs.vec()).norm());
        }
        worst
    });

    run_check(cfg, out, "level-claim", 1e-12, &c1_param, |_| {
        let mut worst = 0.0f64;
        for &pq in &c1 {
            for k in 0..128 {
                let (z1, z2) = conjugated_disk_pair(TAU * k as f64 / 128.0, pq).unwrap();
                worst = worst.max((h_level(z1, z2) + pq.p).abs());
            }
        }
        worst
    });

    run_check(cfg, out, "reduced-curve-two-path", 1e-10, &c1_param, |_| {
        let mut worst = 0.0f64;
        for &pq in &c1 {
            for k in 0..128 {
                let theta = TAU * k as f64 / 128.0;
                let direct = reduced_curve(theta, pq).unwrap();
                let (z1, z2) = conjugated_disk_pair(theta, pq).unwrap();
                let composite = crate::disk::product_map(z1, z2);
                worst = worst
                    .max((direct.re() - composite.re()).abs())
                    .max((direct.im() - composite.im()).abs());
            }
        }
        worst
    });

    run_check(cfg, out, "semiconjugacy", 1e-8, &[("fields", "7".into()), ("samples", "100".into())], |rng| {
        let mut worst = 0.0f64;
        for (_, field) in semiconjugacy_basis() {
            for _ in 0..100 {
                let z1 = sample_disk_point(rng, 0.9);
                let z2 = sample_disk_point(rng, 0.9);
                worst = worst.max(semiconjugacy_residual(&field, z1, z2));
            }
        }
        worst
    });

    run_check(cfg, out, "circle-fiber-moduli", 1e-12, &[("samples", "100".into())], |rng| {
        let mut worst = 0.0f64;
        let mut accepted = 0;
        while accepted < 100 {
            let p: f64 = rng.random_range(-0.85..0.85);
            let r_cap = (1.0 - p.abs()).sqrt() * 0.95;
            let r = rng.random_range(0.02..r_cap.max(0.03));
            let Ok(label) = fiber_of_circle(r, p) else {
                continue;
            };
            accepted += 1;
            let (r1, r2) = circle_fiber_moduli(label);
            worst = worst.max((r1 * r2 - r).abs());
            worst = worst.max((r1 * r1 - r2 * r2 + p).abs());
        }
        worst
    });

    run_check(cfg, out, "circle-fiber-inclusion", 1e-10, &[("samples", "100".into())], |rng| {
        let mut worst = 0.0f64;
        let mut accepted = 0;
        while accepted < 100 {
            let p: f64 = rng.random_range(-0.8..0.8);
            if p.abs() < 0.02 {
                continue;
            }
            let r_cap = (1.0 - p.abs()).sqrt() * 0.9;
            let r = rng.random_range(0.05..r_cap.max(0.06));
            let Ok(label) = fiber_of_circle(r, p) else {
                continue;
            };
            accepted += 1;
            let (r1, r2) = circle_fiber_moduli(label);

            // Product-torus preimage lands in the circle fiber.
            let t1: f64 = rng.random_range(0.0..TAU);
            let t2: f64 = rng.random_range(0.0..TAU);
            let z1 = DiskPoint::new(r1 * t1.cos(), r1 * t1.sin()).unwrap();
            let z2 = DiskPoint::new(r2 * t2.cos(), r2 * t2.sin()).unwrap();
            let prod = crate::disk::product_map(z1, z2);
            worst = worst.max((prod.modulus() - r).abs());
            worst = worst.max((h_level(z1, z2) + p).abs());
            let (mx, my) = (
                disk_to_sphere(z1).vec().x * 0.5,
                disk_to_sphere(z2).vec().x * 0.5,
            );
            worst = worst.max((mx - label.xi).abs()).max((my - label.zeta).abs());

            // Conversely, solving the fiber constraints recovers the moduli.
            let s = (p * p + 4.0 * r * r).sqrt();
            let rho1 = ((-p + s) / 2.0).sqrt();
            let rho2 = ((p + s) / 2.0).sqrt();
            worst = worst.max((rho1 - r1).abs()).max((rho2 - r2).abs());
            let alpha: f64 = rng.random_range(0.0..TAU);
            let phi: f64 = rng.random_range(0.0..TAU);
            // z2 = r e^{i phi} / z1 for |z1| = rho1.
            let z1b = (rho1 * alpha.cos(), rho1 * alpha.sin());
            let z2b = (
                r * (phi - alpha).cos() / rho1,
                r * (phi - alpha).sin() / rho1,
            );
            let mod2 = (z2b.0 * z2b.0 + z2b.1 * z2b.1).sqrt();
            worst = worst.max((mod2 - r2).abs());
            let h = z1b.0 * z1b.0 + z1b.1 * z1b.1 - mod2 * mod2;
            worst = worst.max((h + p).abs());
        }
        worst
    });

    run_check(cfg, out, "radius-identity", 1e-12, &[("grid", format!("{0}x{0}", d * 4))], |_| {
        let mut worst = 0.0f64;
        for pq in pq_grid(d * 4) {
            let r = matching_radius(pq).unwrap();
            let lhs = (pq.p * pq.p + 4.0 * r * r).sqrt();
            worst = worst.max((lhs - (pq.p.abs() + 2.0 - 2.0 * pq.q)).abs());
        }
        worst
    });

    run_check(cfg, out, "sigma-derivative", 1e-6, &[("samples", "50".into())], |rng| {
        let h = 1e-5;
        let p = 0.3;
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let z = sample_disk_point(rng, 0.9);
            let coeff = |x: f64, y: f64| {
                primitive_one_form(DiskPoint::new(x, y).unwrap(), p).unwrap()
            };
            let curl = (coeff(z.re() + h, z.im()).1 - coeff(z.re() - h, z.im()).1) / (2.0 * h)
                - (coeff(z.re(), z.im() + h).0 - coeff(z.re(), z.im() - h).0) / (2.0 * h);
            worst = worst.max((curl - reduced_form_density(z, p).unwrap()).abs());
        }
        worst
    });
}

// ---------------------------------------------------------------------------
// appendix: the area identity and its intermediate integrals

fn appendix_checks(cfg: &SuiteConfig, out: &mut Vec<CheckResult>) {
    let d = cfg.grid_density;
    let c1 = case1_grid(d);
    let n = 4096;
    let params = [
        ("case1-points", c1.len().to_string()),
        ("samples", n.to_string()),
    ];

    run_check(cfg, out, "curve-norm-closed-form", 1e-12, &[("case1-points", c1.len().to_string())], |_| {
        let mut worst = 0.0f64;
        for &pq in &c1 {
            for k in 0..256 {
                let theta = TAU * k as f64 / 256.0;
                let z = reduced_curve(theta, pq).unwrap();
                worst = worst.max((z.modulus() - reduced_curve_norm(theta, pq).unwrap()).abs());
            }
        }
        worst
    });

    run_check(cfg, out, "area-identity", 1e-8, &params, |_| {
        let mut worst = 0.0f64;
        for &pq in &c1 {
            let curve = sample_reduced_curve(pq, n).unwrap();
            let quad = enclosed_area_quadrature(&curve, pq.p).unwrap();
            worst = worst.max((quad - enclosed_area_closed_form(pq).unwrap()).abs());
        }
        worst
    });

    run_check(cfg, out, "sqrt-radius-integral", 1e-7, &params, |_| {
        let mut worst = 0.0f64;
        for &pq in &c1 {
            let curve = sample_reduced_curve(pq, n).unwrap();
            let val = sqrt_radius_integral(&curve, pq.p).unwrap();
            worst = worst.max((val - (4.0 * PI * pq.q - 4.0 * PI)).abs());
        }
        worst
    });

    run_check(cfg, out, "abs-p-integral", 1e-8, &params, |_| {
        let mut worst = 0.0f64;
        for &pq in &c1 {
            let curve = sample_reduced_curve(pq, n).unwrap();
            worst = worst.max(half_abs_p_integral(&curve, pq.p).unwrap().abs());
        }
        worst
    });

    // Richardson-style doubling: starting from n = 1024, double until two
    // consecutive estimates agree. Curves passing near the origin have a
    // narrow analyticity strip and need the larger n.
    let doubling_tol = cfg
        .tol_overrides
        .get("quadrature-doubling")
        .copied()
        .unwrap_or(1e-9);
    run_check(cfg, out, "quadrature-doubling", 1e-9, &[("n-start", "1024".into()), ("n-cap", "32768".into())], |_| {
        let mut worst = 0.0f64;
        for &pq in &c1 {
            let area_at = |n: usize| {
                let curve = sample_reduced_curve(pq, n).unwrap();
                enclosed_area_quadrature(&curve, pq.p).unwrap()
            };
            let mut n = 1024;
            let mut prev = area_at(n);
            let mut delta = f64::INFINITY;
            while n <= 1 << 14 {
                let next = area_at(2 * n);
                delta = (prev - next).abs();
                if delta <= doubling_tol {
                    break;
                }
                prev = next;
                n *= 2;
            }
            worst = worst.max(delta);
        }
        worst
    });

    run_check(cfg, out, "circle-area", 1e-10, &[("samples", n.to_string())], |_| {
        let mut worst = 0.0f64;
        for &pq in &c1 {
            let r = matching_radius(pq).unwrap();
            let curve = CurveSample::circle(r, n, true).unwrap();
            let quad = enclosed_area_quadrature(&curve, pq.p).unwrap();
            let closed = PI * pq.p.abs() - PI * (pq.p * pq.p + 4.0 * r * r).sqrt();
            worst = worst.max((quad - closed).abs());
        }
        worst
    });

    run_check(cfg, out, "area-p-independence", 1e-8, &[("q", "0.7".into())], |_| {
        let closed: f64 = enclosed_area_closed_form(PqCoord::new(0.1, 0.7)).unwrap();
        let mut worst = 0.0f64;
        for &p in &[0.1, -0.1, 0.2, -0.2] {
            let curve = sample_reduced_curve(PqCoord::new(p, 0.7), n).unwrap();
            let quad = enclosed_area_quadrature(&curve, p).unwrap();
            worst = worst.max((quad - closed).abs());
        }
        worst
    });
}

// ---------------------------------------------------------------------------
// classify: both routes, both charts, energy coherence

fn classify_checks(cfg: &SuiteConfig, out: &mut Vec<CheckResult>) {
    let d = cfg.grid_density;
    let grid = pq_grid(d * 4);
    let grid_param = [("grid", format!("{0}x{0}", d * 4))];

    run_check(cfg, out, "path-independence", 1e-12, &grid_param, |_| {
        let mut worst = 0.0f64;
        for &pq in &grid {
            let direct = fiber_of(classify_pq(pq).unwrap());
            let via = classify_via_reduction(pq).unwrap();
            worst = worst
                .max((direct.xi - via.xi).abs())
                .max((direct.zeta - via.zeta).abs());
        }
        worst
    });

    run_check(cfg, out, "coordinate-coherence", 1e-15, &grid_param, |_| {
        let mut worst = 0.0f64;
        for &pq in &grid {
            let xy = pq.to_xy();
            let from_xy = fiber_of(classify_xy(xy).unwrap());
            let from_pq = fiber_of(classify_pq(xy.to_pq()).unwrap());
            worst = worst
                .max((from_xy.xi - from_pq.xi).abs())
                .max((from_xy.zeta - from_pq.zeta).abs());
            // Chart formulas evaluated directly.
            let (fx, fz) = if 1.0 - xy.y < xy.x {
                (0.5 - xy.y, 1.5 - 2.0 * xy.y - xy.x)
            } else {
                (xy.x - 0.5, 0.5 - xy.y)
            };
            worst = worst.max((from_xy.xi - fx).abs()).max((from_xy.zeta - fz).abs());
        }
        worst
    });

    run_check(cfg, out, "branch-continuity", 1e-12, &[("q-points", d.to_string())], |_| {
        let mut worst = 0.0f64;
        for i in 0..d {
            let q = 0.35 + 0.6 * (i as f64 + 0.5) / d as f64;
            for sign in [1.0, -1.0] {
                let below = PqCoord::new(sign * (q * q - 1e-13), q);
                let above = PqCoord::new(sign * (q * q + 1e-13), q);
                let f_below = fiber_of(classify_pq(below).unwrap());
                let f_above = fiber_of(classify_pq(above).unwrap());
                worst = worst
                    .max((f_below.xi - f_above.xi).abs())
                    .max((f_below.zeta - f_above.zeta).abs());
                let v_below = classify_via_reduction(below).unwrap();
                let v_above = classify_via_reduction(above).unwrap();
                worst = worst
                    .max((v_below.xi - v_above.xi).abs())
                    .max((v_below.zeta - v_above.zeta).abs());
            }
        }
        worst
    });

    run_check(cfg, out, "energy-coherence", 1e-12, &[("q-points", (d * 2).to_string())], |_| {
        let mut worst = 0.0f64;
        for i in 0..(d * 2) {
            let q = 0.55 + 0.4 * (i as f64 + 0.5) / (d * 2) as f64;
            for scale in [0.25, 0.6] {
                for sign in [1.0, -1.0] {
                    let p = sign * (q - 0.5) * scale;
                    let fiber = fiber_of(classify_pq(PqCoord::new(p, q)).unwrap());
                    let energy = displacement_energy(fiber).unwrap().finite().unwrap();
                    worst = worst.max((energy - (1.0 - q)).abs());
                }
            }
        }
        worst
    });

    run_check(cfg, out, "outcome-labels-interior", 0.0, &grid_param, |_| {
        let mut violations = 0.0;
        for &pq in &grid {
            let fiber = fiber_of(classify_pq(pq).unwrap());
            if !fiber.is_interior() {
                violations += 1.0;
            }
        }
        violations
    });
}

// ---------------------------------------------------------------------------
// probes: the vertical probe family, pairing, moves, free action

fn probes_checks(cfg: &SuiteConfig, out: &mut Vec<CheckResult>) {
    let d = cfg.grid_density;

    run_check(cfg, out, "sigma-probe-valid", 0.0, &[("levels", "20".into())], |_| {
        let mut violations = 0.0;
        for k in 0..20 {
            let a = -0.95 + 1.9 * (k as f64 + 0.5) / 20.0;
            if a.abs() < 1e-3 {
                continue;
            }
            match sigma_probe(a) {
                Ok(probe) if probe.symmetric => {}
                _ => violations += 1.0,
            }
        }
        violations
    });

    run_check(cfg, out, "probe-pair-involution", 1e-15, &[("grid", format!("{0}x{0}", d * 5))], |_| {
        let m = d * 5;
        let mut worst = 0.0f64;
        for i in 0..m {
            let a = -0.9 + 1.8 * (i as f64 + 0.5) / m as f64;
            if a.abs() < 1e-3 {
                continue;
            }
            for j in 0..m {
                let q = a.abs() + (1.0 - a.abs()) * (j as f64 + 0.5) / m as f64;
                let Ok(q1) = probe_pair(a, q) else { continue };
                let Ok(q2) = probe_pair(a, q1) else { continue };
                worst = worst.max((q2 - q).abs());
            }
        }
        worst
    });

    run_check(cfg, out, "case1-reachability", 1.0, &[("informational", "true".into())], |_| {
        // Reported, not asserted: fraction of large-|p| grid points whose
        // paired level fails the small-|p| hypothesis.
        let grid = case2_grid(d * 4);
        if grid.is_empty() {
            return 0.0;
        }
        let mut failures = 0usize;
        for &pq in &grid {
            let q_paired = probe_pair(pq.p, pq.q).unwrap();
            if case_region(PqCoord::new(pq.p, q_paired)) != CaseRegion::Case1 {
                failures += 1;
            }
        }
        failures as f64 / grid.len() as f64
    });

    run_check(cfg, out, "free-action", 0.0, &[("levels", "6".into()), ("samples", "1000".into())], |rng| {
        let mut violations = 0.0;
        for &a in &[0.3, -0.3, 0.7, -0.7, 0.99, -0.99] {
            let seed = rng.random::<u64>();
            if !free_action_check(a, 1000, seed).unwrap() {
                violations += 1.0;
            }
        }
        violations
    });

    run_check(cfg, out, "probe-pair-classification", 1e-12, &[("grid", format!("{0}x{0}", d * 4))], |_| {
        let mut worst = 0.0f64;
        for &pq in &case2_grid(d * 4) {
            let here = fiber_of(classify_pq(pq).unwrap());
            let q_paired = probe_pair(pq.p, pq.q).unwrap();
            let there = fiber_of(classify_pq(PqCoord::new(pq.p, q_paired)).unwrap());
            // Equal displacement energies.
            let e_here = displacement_energy(here).unwrap().finite().unwrap();
            let e_there = displacement_energy(there).unwrap().finite().unwrap();
            worst = worst.max((e_here - e_there).abs());
            // Connected by the recorded moves.
            let moved = apply_fiber_move(there, FiberMove::ReflectXi)
                .and_then(|f| apply_fiber_move(f, FiberMove::ReflectZeta))
                .and_then(|f| apply_fiber_move(f, FiberMove::Swap))
                .unwrap();
            worst = worst
                .max((moved.xi - here.xi).abs())
                .max((moved.zeta - here.zeta).abs());
        }
        worst
    });

    run_check(cfg, out, "swap-involution", 1e-15, &[("samples", "50".into())], |rng| {
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let label: FiberLabel<f64> = FiberLabel::new(
                rng.random_range(-0.45..0.45),
                rng.random_range(-0.45..0.45),
            );
            if (label.xi + label.zeta).abs() < 1e-3 {
                continue;
            }
            let once = apply_fiber_move(label, FiberMove::Swap).unwrap();
            let twice = apply_fiber_move(once, FiberMove::Swap).unwrap();
            worst = worst
                .max((twice.xi - label.xi).abs())
                .max((twice.zeta - label.zeta).abs());
        }
        worst
    });
}

// ---------------------------------------------------------------------------
// germs: the inequivalence decision behind the diagonal verdict

fn germs_checks(cfg: &SuiteConfig, out: &mut Vec<CheckResult>) {
    let d = cfg.grid_density;

    run_check(cfg, out, "germ-consistency", 1e-12, &[("q-points", "9".into())], |_| {
        let mut worst = 0.0f64;
        for i in 0..9 {
            let q = 0.55 + 0.05 * i as f64;
            for &d1 in &[0.01, -0.01, 0.03, -0.03] {
                for &d2 in &[0.01, -0.01, 0.02, -0.02] {
                    worst = worst.max(germ_consistency_residual(q, d1, d2).unwrap());
                }
            }
        }
        worst
    });

    run_check(cfg, out, "germ-inequivalence", 0.0, &[("grid", format!("{0}x{0}", d * 5))], |_| {
        let m = d * 5;
        let mut violations = 0.0;
        for i in 0..m {
            let q = 0.5 + 0.49 * (i as f64 + 0.5) / m as f64;
            let l_germ = germ_l_torus(q).unwrap();
            for j in 0..m {
                let xi = -0.49 + 0.98 * (j as f64 + 0.5) / m as f64;
                if xi.abs() < 1e-6 {
                    continue;
                }
                let t_germ = germ_diagonal_fiber(xi).unwrap();
                if germs_linearly_equivalent(&l_germ, &t_germ) {
                    violations += 1.0;
                }
            }
        }
        violations
    });

    run_check(cfg, out, "germ-delta1-independence", 1e-15, &[("q-points", d.to_string())], |_| {
        let mut worst = 0.0f64;
        for i in 0..d {
            let q = 0.55 + 0.4 * (i as f64 + 0.5) / d as f64;
            let germ = germ_l_torus(q).unwrap();
            let reference = germ.evaluate(0.01, 0.015);
            for &d1 in &[-0.01, -0.005, 0.005, 0.01] {
                worst = worst.max((germ.evaluate(d1, 0.015) - reference).abs());
            }
        }
        worst
    });

    run_check(cfg, out, "germ-limit-matches-energy", 1e-15, &[("q-points", d.to_string())], |_| {
        let mut worst = 0.0f64;
        for i in 0..d {
            let q = 0.55 + 0.4 * (i as f64 + 0.5) / d as f64;
            let germ = germ_l_torus(q).unwrap();
            let paired = displacement_energy(FiberLabel::new(q - 0.5, q - 0.5))
                .unwrap()
                .finite()
                .unwrap();
            worst = worst.max((germ.evaluate(0.0, 0.0) - paired).abs());
        }
        worst
    });

    run_check(cfg, out, "energy-move-invariance", 1e-15, &[("samples", "60".into())], |rng| {
        let mut worst = 0.0f64;
        for _ in 0..60 {
            let label: FiberLabel<f64> = FiberLabel::new(
                rng.random_range(-0.45..0.45),
                rng.random_range(-0.45..0.45),
            );
            if label.xi == 0.0 && label.zeta == 0.0 {
                continue;
            }
            let energy = displacement_energy(label).unwrap().finite().unwrap();
            for mv in [FiberMove::ReflectXi, FiberMove::ReflectZeta, FiberMove::Swap] {
                let Ok(moved) = apply_fiber_move(label, mv) else {
                    continue;
                };
                let moved_energy = displacement_energy(moved).unwrap().finite().unwrap();
                worst = worst.max((moved_energy - energy).abs());
            }
        }
        worst
    });
}
