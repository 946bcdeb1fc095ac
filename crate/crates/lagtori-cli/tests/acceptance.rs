//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured worst error against the pinned tolerance.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lagtori::classify::{classify_pq, classify_via_reduction, classify_xy};
use lagtori::disk::{product_map, DiskPoint};
use lagtori::germ::{germ_consistency_residual, germ_diagonal_fiber, germ_l_torus, germs_linearly_equivalent};
use lagtori::polytope::PqCoord;
use lagtori::probe::{free_action_check, probe_pair, sigma_probe};
use lagtori::reduction::{
    circle_fiber_moduli, conjugated_disk_pair, disk_to_sphere, enclosed_area_quadrature,
    fiber_of_circle, h_level, half_abs_p_integral, matching_radius, reduced_curve,
    reduced_curve_norm, sample_reduced_curve, semiconjugacy_residual, sphere_to_disk,
    sqrt_radius_integral,
};
use lagtori::suite::{case1_anchors, pq_grid, run_suite, semiconjugacy_basis, SuiteConfig, SuiteName};
use lagtori::sphere::{omega_product, rotation_about_e1, TangentPair};
use lagtori::torus::{generating_curve, generating_curve_velocity, pairing_field, torus_point, TorusParam};

const TAU: f64 = std::f64::consts::TAU;
const PI: f64 = std::f64::consts::PI;

fn report(criterion: &str, max_error: f64, tolerance: f64) {
    let passed = max_error <= tolerance;
    println!(
        "{} criterion {criterion}: max_error {max_error:.3e} <= tolerance {tolerance:.1e}",
        if passed { "PASS" } else { "FAIL" },
    );
    assert!(passed, "criterion {criterion} failed: {max_error:.3e} > {tolerance:.1e}");
}

fn disk_sample(rng: &mut ChaCha8Rng, max_radius: f64) -> DiskPoint<f64> {
    loop {
        let x = rng.random_range(-max_radius..max_radius);
        let y = rng.random_range(-max_radius..max_radius);
        if x * x + y * y < max_radius * max_radius {
            return DiskPoint::new(x, y).unwrap();
        }
    }
}

#[test]
fn criterion_01_area_identity() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for pq in case1_anchors() {
        let curve = sample_reduced_curve(pq, 4096).unwrap();
        let quad = enclosed_area_quadrature(&curve, pq.p).unwrap();
        worst = worst.max((quad - TAU * (pq.q - 1.0)).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed <= 5.0, "area identity took {elapsed:.2}s > 5s");
    report("1 (appendix area identity)", worst, 1e-8);
}

#[test]
fn criterion_02_intermediate_integrals() {
    let mut worst_sqrt = 0.0f64;
    let mut worst_abs = 0.0f64;
    for pq in case1_anchors() {
        let curve = sample_reduced_curve(pq, 4096).unwrap();
        let sqrt_int = sqrt_radius_integral(&curve, pq.p).unwrap();
        worst_sqrt = worst_sqrt.max((sqrt_int - (4.0 * PI * pq.q - 4.0 * PI)).abs());
        worst_abs = worst_abs.max(half_abs_p_integral(&curve, pq.p).unwrap().abs());
    }
    report("2a (sqrt-radius integral)", worst_sqrt, 1e-7);
    report("2b (|p|/2 integral)", worst_abs, 1e-8);
}

#[test]
fn criterion_03_closed_form_norm() {
    let mut worst = 0.0f64;
    for pq in case1_anchors() {
        for k in 0..256 {
            let theta = TAU * k as f64 / 256.0;
            let z = reduced_curve(theta, pq).unwrap();
            worst = worst.max((z.modulus() - reduced_curve_norm(theta, pq).unwrap()).abs());
        }
    }
    report("3 (closed-form norm)", worst, 1e-12);
}

#[test]
fn criterion_04_integral_curve_tangency() {
    let mut worst = 0.0f64;
    for pq in case1_anchors() {
        for k in 0..256 {
            let theta = TAU * k as f64 / 256.0;
            let pt = generating_curve(theta, pq).unwrap();
            let field = pairing_field(&pt, pq.q).unwrap();
            let (dv, dw) = generating_curve_velocity(theta, pq).unwrap();
            worst = worst.max((dv - field.a).norm()).max((dw - field.b).norm());
        }
    }
    report("4 (integral-curve tangency)", worst, 1e-8);
}

#[test]
fn criterion_05_lagrangian_check() {
    let h = 1e-6;
    let mut worst = 0.0f64;
    for pq in case1_anchors() {
        for i in 0..32 {
            for j in 0..32 {
                let theta = TAU * i as f64 / 32.0;
                let t = TAU * j as f64 / 32.0;
                let pt = torus_point(TorusParam::new(theta, t), pq).unwrap();
                let at = |a: f64, b: f64| torus_point(TorusParam::new(a, b), pq).unwrap();
                let d_theta = {
                    let (plus, minus) = (at(theta + h, t), at(theta - h, t));
                    (
                        (plus.v.vec() - minus.v.vec()).scale(0.5 / h),
                        (plus.w.vec() - minus.w.vec()).scale(0.5 / h),
                    )
                };
                let d_t = {
                    let (plus, minus) = (at(theta, t + h), at(theta, t - h));
                    (
                        (plus.v.vec() - minus.v.vec()).scale(0.5 / h),
                        (plus.w.vec() - minus.w.vec()).scale(0.5 / h),
                    )
                };
                let u1 = TangentPair::project(&pt, d_theta.0, d_theta.1).unwrap();
                let u2 = TangentPair::project(&pt, d_t.0, d_t.1).unwrap();
                worst = worst.max(omega_product(&pt, &u1, &u2).abs());
            }
        }
    }
    report("5 (Lagrangian check)", worst, 1e-10);
}

#[test]
fn criterion_06_chart_symplectomorphism_and_equivariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(601);
    let h = 1e-6;
    let mut worst_ratio = 0.0f64;
    for _ in 0..100 {
        let z = disk_sample(&mut rng, 0.9);
        let v = disk_to_sphere(z);
        let dx = (disk_to_sphere(DiskPoint::new(z.re() + h, z.im()).unwrap()).vec()
            - disk_to_sphere(DiskPoint::new(z.re() - h, z.im()).unwrap()).vec())
        .scale(0.5 / h);
        let dy = (disk_to_sphere(DiskPoint::new(z.re(), z.im() + h).unwrap()).vec()
            - disk_to_sphere(DiskPoint::new(z.re(), z.im() - h).unwrap()).vec())
        .scale(0.5 / h);
        let ratio = 0.5 * v.vec().dot(dx.cross(dy)) / 2.0;
        worst_ratio = worst_ratio.max((ratio - 1.0).abs());
    }
    report("6a (chart pullback ratio)", worst_ratio, 1e-6);

    let mut worst_eq = 0.0f64;
    for _ in 0..100 {
        let z = disk_sample(&mut rng, 0.95);
        let t: f64 = rng.random_range(0.0..TAU);
        let rotated = DiskPoint::new(
            z.re() * t.cos() - z.im() * t.sin(),
            z.re() * t.sin() + z.im() * t.cos(),
        )
        .unwrap();
        let lhs = disk_to_sphere(rotated);
        let rhs = disk_to_sphere(z).rotate(&rotation_about_e1(t)).unwrap();
        worst_eq = worst_eq.max((lhs.vec() - rhs.vec()).norm());
    }
    report("6b (chart equivariance)", worst_eq, 1e-12);
}

#[test]
fn criterion_07_level_claim() {
    let mut worst = 0.0f64;
    for pq in case1_anchors() {
        for k in 0..128 {
            let (z1, z2) = conjugated_disk_pair(TAU * k as f64 / 128.0, pq).unwrap();
            worst = worst.max((h_level(z1, z2) + pq.p).abs());
        }
    }
    report("7 (level claim)", worst, 1e-12);
}

#[test]
fn criterion_08_semiconjugacy() {
    let mut rng = ChaCha8Rng::seed_from_u64(801);
    let mut worst = 0.0f64;
    for (_, field) in semiconjugacy_basis() {
        for _ in 0..100 {
            let z1 = disk_sample(&mut rng, 0.9);
            let z2 = disk_sample(&mut rng, 0.9);
            worst = worst.max(semiconjugacy_residual(&field, z1, z2));
        }
    }
    report("8 (semiconjugacy)", worst, 1e-8);
}

#[test]
fn criterion_09_circle_fiber() {
    let mut rng = ChaCha8Rng::seed_from_u64(901);
    let mut worst_moduli = 0.0f64;
    let mut worst_incl = 0.0f64;
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
        worst_moduli = worst_moduli.max((r1 * r2 - r).abs());
        worst_moduli = worst_moduli.max((r1 * r1 - r2 * r2 + p).abs());

        // Product-torus preimage sits inside the circle fiber.
        let t1: f64 = rng.random_range(0.0..TAU);
        let t2: f64 = rng.random_range(0.0..TAU);
        let z1 = DiskPoint::new(r1 * t1.cos(), r1 * t1.sin()).unwrap();
        let z2 = DiskPoint::new(r2 * t2.cos(), r2 * t2.sin()).unwrap();
        worst_incl = worst_incl.max((product_map(z1, z2).modulus() - r).abs());
        worst_incl = worst_incl.max((h_level(z1, z2) + p).abs());
        let back1 = sphere_to_disk(&disk_to_sphere(z1)).unwrap();
        worst_incl = worst_incl.max((back1.re() - z1.re()).abs());

        // Conversely, fiber constraints force the product-torus moduli.
        let s = (p * p + 4.0 * r * r).sqrt();
        let rho1 = ((-p + s) / 2.0).sqrt();
        let rho2 = ((p + s) / 2.0).sqrt();
        worst_incl = worst_incl.max((rho1 - r1).abs()).max((rho2 - r2).abs());
        let alpha: f64 = rng.random_range(0.0..TAU);
        let phi: f64 = rng.random_range(0.0..TAU);
        let z2_mod = ((r * (phi - alpha).cos() / rho1).powi(2)
            + (r * (phi - alpha).sin() / rho1).powi(2))
        .sqrt();
        worst_incl = worst_incl.max((z2_mod - r2).abs());
    }
    report("9a (circle-fiber moduli)", worst_moduli, 1e-12);
    report("9b (circle-fiber inclusion)", worst_incl, 1e-10);
}

#[test]
fn criterion_10_radius_identity() {
    let mut worst = 0.0f64;
    for pq in pq_grid(50) {
        let r = matching_radius(pq).unwrap();
        let lhs = (pq.p * pq.p + 4.0 * r * r).sqrt();
        worst = worst.max((lhs - (pq.p.abs() + 2.0 - 2.0 * pq.q)).abs());
    }
    report("10 (radius identity)", worst, 1e-12);
}

#[test]
fn criterion_11_classification_coherence() {
    let grid = pq_grid(50);
    let mut worst_path = 0.0f64;
    let mut worst_xy = 0.0f64;
    for &pq in &grid {
        let direct = classify_pq(pq).unwrap().fiber().unwrap();
        let via = classify_via_reduction(pq).unwrap();
        worst_path = worst_path
            .max((direct.xi - via.xi).abs())
            .max((direct.zeta - via.zeta).abs());
        let from_xy = classify_xy(pq.to_xy()).unwrap().fiber().unwrap();
        worst_xy = worst_xy
            .max((from_xy.xi - direct.xi).abs())
            .max((from_xy.zeta - direct.zeta).abs());
    }
    report("11a (path independence)", worst_path, 1e-12);
    report("11b (coordinate coherence)", worst_xy, 1e-12);

    let mut worst_cont = 0.0f64;
    for i in 0..20 {
        let q = 0.35 + 0.6 * (i as f64 + 0.5) / 20.0;
        for sign in [1.0, -1.0] {
            let below = PqCoord::new(sign * (q * q - 1e-13), q);
            let above = PqCoord::new(sign * (q * q + 1e-13), q);
            let f_below = classify_pq(below).unwrap().fiber().unwrap();
            let f_above = classify_pq(above).unwrap().fiber().unwrap();
            worst_cont = worst_cont
                .max((f_below.xi - f_above.xi).abs())
                .max((f_below.zeta - f_above.zeta).abs());
            let v_below = classify_via_reduction(below).unwrap();
            let v_above = classify_via_reduction(above).unwrap();
            worst_cont = worst_cont
                .max((v_below.xi - v_above.xi).abs())
                .max((v_below.zeta - v_above.zeta).abs());
        }
    }
    report("11c (branch continuity)", worst_cont, 1e-12);
}

#[test]
fn criterion_12_probe_suite() {
    let mut violations = 0usize;
    for k in 0..20 {
        let a = -0.95 + 1.9 * (k as f64 + 0.5) / 20.0;
        let a = if a.abs() < 1e-3 { 0.05 } else { a };
        match sigma_probe(a) {
            Ok(probe) if probe.symmetric => {}
            _ => violations += 1,
        }
    }
    report("12a (sigma probe symmetric)", violations as f64, 0.0);

    let mut worst_inv = 0.0f64;
    for i in 0..40 {
        let a = -0.9 + 1.8 * (i as f64 + 0.5) / 40.0;
        if a.abs() < 1e-3 {
            continue;
        }
        for j in 0..40 {
            let q = a.abs() + (1.0 - a.abs()) * (j as f64 + 0.5) / 40.0;
            let Ok(q1) = probe_pair(a, q) else { continue };
            let Ok(q2) = probe_pair(a, q1) else { continue };
            worst_inv = worst_inv.max((q2 - q).abs());
        }
    }
    report("12b (probe pair involution)", worst_inv, 1e-15);

    let mut failures = 0usize;
    for (i, &a) in [0.3, -0.3, 0.7, -0.7, 0.99, -0.99].iter().enumerate() {
        if !free_action_check(a, 1000, 1200 + i as u64).unwrap() {
            failures += 1;
        }
    }
    report("12c (free action)", failures as f64, 0.0);
}

#[test]
fn criterion_13_germ_suite() {
    let mut worst = 0.0f64;
    for i in 0..9 {
        let q = 0.55 + 0.05 * i as f64;
        for &d1 in &[0.01, -0.01, 0.03, -0.03] {
            for &d2 in &[0.01, -0.01, 0.02, -0.02] {
                worst = worst.max(germ_consistency_residual(q, d1, d2).unwrap());
            }
        }
    }
    report("13a (germ consistency)", worst, 1e-12);

    let mut equivalences = 0usize;
    for i in 0..20 {
        let q = 0.5 + 0.49 * (i as f64 + 0.5) / 20.0;
        let l_germ = germ_l_torus(q).unwrap();
        for j in 0..20 {
            let xi = -0.49 + 0.98 * (j as f64 + 0.5) / 20.0;
            if xi.abs() < 1e-6 {
                continue;
            }
            let t_germ = germ_diagonal_fiber(xi).unwrap();
            if germs_linearly_equivalent(&l_germ, &t_germ) {
                equivalences += 1;
            }
        }
    }
    report("13b (germ inequivalence)", equivalences as f64, 0.0);
}

#[test]
fn criterion_14_full_suite() {
    let start = Instant::now();
    let cfg = SuiteConfig {
        grid_density: 4,
        seed: 0,
        ..Default::default()
    };
    let in_process = run_suite(SuiteName::All, &cfg);
    assert!(
        in_process.all_passed(),
        "in-process run reported failures:\n{}",
        in_process.to_json_string()
    );

    let status = std::process::Command::new(env!("CARGO_BIN_EXE_lagtori"))
        .args(["verify", "--suite", "all", "--grid", "4"])
        .stdout(std::process::Stdio::null())
        .stderr(std::process::Stdio::null())
        .status()
        .expect("binary runs");
    let elapsed = start.elapsed().as_secs_f64();
    assert_eq!(status.code(), Some(0), "verify exit code");
    assert!(elapsed <= 60.0, "full suite took {elapsed:.1}s > 60s");
    report("14 (full suite, exit 0)", 0.0, 0.0);
    println!("full suite wall time {elapsed:.2}s (limit 60s)");
}
