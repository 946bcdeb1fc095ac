//! The reduction machinery behind the small-|p| classification branch: the
//! disk-to-sphere symplectomorphism, the level function H and product map F
//! on the bidisk, the reduced curve with its closed-form norm, the reduced
//! symplectic form with an explicit primitive, enclosed-area quadrature, the
//! area-matching circle radius, and the circle-fiber identification.

use thiserror::Error;

use crate::disk::{integrate_one_form, product_map, CurveSample, DiskError, DiskPoint, Orientation};
use crate::polytope::{CaseRegion, FiberLabel, InteriorError, PqCoord};
use crate::scalar::Real;
use crate::sphere::{conjugating_matrices, GeomError, SpherePoint};
use crate::torus::{self, TorusError};

#[derive(Debug, Error, PartialEq)]
pub enum ReductionError {
    #[error(transparent)]
    Disk(#[from] DiskError),
    #[error(transparent)]
    NotInterior(#[from] InteriorError),
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("the chart is singular at the removed pole (v1 = {v1})")]
    PoleSingularity { v1: f64 },
    #[error("curve denominator radicand {value} at theta = {theta} is below the guard")]
    DenominatorVanishes { theta: f64, value: f64 },
    #[error("norm radicand {value} is negative beyond the guard")]
    NegativeRadicand { value: f64 },
    #[error("the reduced form is singular at the origin when p = 0")]
    OriginSingularity,
    #[error("curve passes within {min_modulus} of the origin where the angle form is singular")]
    OriginOnCurve { min_modulus: f64 },
    #[error("area closed form requires 0 < p^2 < q^4 (got p = {p}, q = {q})")]
    HypothesisViolated { p: f64, q: f64 },
    #[error("operation requires p != 0")]
    ZeroP,
    #[error("matching circle requires a positive radius (got {r})")]
    NonPositiveRadius { r: f64 },
    #[error(
        "supplied gradient disagrees with finite differences at ({x}, {y}): |delta| = {delta}"
    )]
    GradientMismatch { x: f64, y: f64, delta: f64 },
}

/// The area-preserving chart from the open unit disk (with twice the
/// Euclidean form) onto the sphere minus the pole -e1:
/// r e^{i t} -> (1 - 2r^2, 2r sqrt(1-r^2) cos t, 2r sqrt(1-r^2) sin t).
pub fn disk_to_sphere<F: Real>(z: DiskPoint<F>) -> SpherePoint<F> {
    let r_sq = z.modulus_sq();
    let scale = F::of(2.0) * (F::one() - r_sq).sqrt();
    SpherePoint::from_coords(
        F::one() - F::of(2.0) * r_sq,
        scale * z.re(),
        scale * z.im(),
    )
    .expect("image of a disk point is a unit vector")
}

/// Inverse of [`disk_to_sphere`]; undefined at and near the removed pole.
pub fn sphere_to_disk<F: Real>(v: &SpherePoint<F>) -> Result<DiskPoint<F>, ReductionError> {
    let v1 = v.vec().x;
    if v1 <= -F::one() + F::of(1e-12) {
        return Err(ReductionError::PoleSingularity { v1: v1.as_f64() });
    }
    let den = (F::of(2.0) * (F::one() + v1)).sqrt();
    Ok(DiskPoint::new(v.vec().y / den, v.vec().z / den)?)
}

/// The moment of the anti-diagonal circle action on the bidisk:
/// (z1, z2) -> |z1|^2 - |z2|^2.
pub fn h_level<F: Real>(z1: DiskPoint<F>, z2: DiskPoint<F>) -> F {
    z1.modulus_sq() - z2.modulus_sq()
}

/// The image of the generating curve in the bidisk, after conjugating the
/// second factor so the circle action becomes anti-diagonal. The level
/// function [`h_level`] is constant -p along it.
pub fn conjugated_disk_pair<F: Real>(
    theta: F,
    pq: PqCoord<F>,
) -> Result<(DiskPoint<F>, DiskPoint<F>), ReductionError> {
    let pt = torus::generating_curve(theta, pq)?;
    let (d1, d2) = conjugating_matrices::<F>();
    let v = pt.v.rotate(&d1)?;
    let w = pt.w.rotate(&d2)?;
    Ok((sphere_to_disk(&v)?, sphere_to_disk(&w)?))
}

/// The reduced curve: the product-map image of [`conjugated_disk_pair`],
/// evaluated through its closed-form expression.
pub fn reduced_curve<F: Real>(theta: F, pq: PqCoord<F>) -> Result<DiskPoint<F>, ReductionError> {
    let c = torus::coeffs(pq)?;
    let (sin, cos) = theta.sin_cos();
    let p_sq = pq.p * pq.p;
    let q_sq = pq.q * pq.q;
    let radicand = {
        let lin = F::one() + c.amp * sin;
        lin * lin - p_sq
    };
    if radicand < F::of(1e-12) {
        return Err(ReductionError::DenominatorVanishes {
            theta: theta.as_f64(),
            value: radicand.as_f64(),
        });
    }
    let den = F::of(2.0) * radicand.sqrt();
    let re = F::one() - F::of(2.0) * q_sq + p_sq - c.amp * c.amp * sin * sin;
    let im = F::of(2.0) * c.sqp * c.s1q * cos;
    Ok(DiskPoint::new(re / den, im / den)?)
}

/// Closed-form modulus of [`reduced_curve`]:
/// sqrt( (1 - amp*sin(theta))^2/4 - p^2/4 ).
pub fn reduced_curve_norm<F: Real>(theta: F, pq: PqCoord<F>) -> Result<F, ReductionError> {
    let c = torus::coeffs(pq)?;
    let lin = F::one() - c.amp * theta.sin();
    let radicand = (lin * lin - pq.p * pq.p) * F::of(0.25);
    if radicand < -F::of(1e-14) {
        return Err(ReductionError::NegativeRadicand {
            value: radicand.as_f64(),
        });
    }
    Ok(radicand.max(F::zero()).sqrt())
}

/// Sample the reduced curve on the canonical theta grid.
pub fn sample_reduced_curve<F: Real>(
    pq: PqCoord<F>,
    n: usize,
) -> Result<CurveSample<F>, ReductionError> {
    CurveSample::from_fn(n, Orientation::ThetaIncreasing, |theta| {
        reduced_curve(theta, pq)
    })
}

/// Density of the reduced symplectic form with respect to dx^dy:
/// 2 / sqrt(p^2 + 4x^2 + 4y^2).
pub fn reduced_form_density<F: Real>(z: DiskPoint<F>, p: F) -> Result<F, ReductionError> {
    let r_sq = z.modulus_sq();
    if p == F::zero() && r_sq == F::zero() {
        return Err(ReductionError::OriginSingularity);
    }
    Ok(F::of(2.0) / (p * p + F::of(4.0) * r_sq).sqrt())
}

/// Cartesian coefficients of the primitive sigma of the reduced form:
/// (-2y, 2x) / (sqrt(p^2 + 4x^2 + 4y^2) + |p|). Smooth at the origin for
/// p != 0, where it vanishes.
pub fn primitive_one_form<F: Real>(z: DiskPoint<F>, p: F) -> Result<(F, F), ReductionError> {
    let r_sq = z.modulus_sq();
    if p == F::zero() && r_sq == F::zero() {
        return Err(ReductionError::OriginSingularity);
    }
    let den = (p * p + F::of(4.0) * r_sq).sqrt() + p.abs();
    Ok((-F::of(2.0) * z.im() / den, F::of(2.0) * z.re() / den))
}

/// Line integral of the primitive along a sampled curve; by Stokes this is
/// the (signed, orientation-respecting) enclosed area in the reduced form.
pub fn enclosed_area_quadrature<F: Real>(
    curve: &CurveSample<F>,
    p: F,
) -> Result<F, ReductionError> {
    if p == F::zero() {
        guard_origin(curve)?;
    }
    Ok(integrate_one_form(curve, |z| {
        primitive_one_form(z, p).expect("origin guarded above")
    }))
}

fn guard_origin<F: Real>(curve: &CurveSample<F>) -> Result<F, ReductionError> {
    let min_mod = curve
        .points()
        .iter()
        .map(|z| z.modulus())
        .fold(F::infinity(), F::min);
    if min_mod < F::of(1e-9) {
        return Err(ReductionError::OriginOnCurve {
            min_modulus: min_mod.as_f64(),
        });
    }
    Ok(min_mod)
}

/// Integral of weight(r^2) * dphi along the curve, with the angle form in
/// its Cartesian guise (-y dx + x dy)/r^2; the curve must avoid the origin.
pub fn angular_integral<F: Real>(
    curve: &CurveSample<F>,
    mut weight: impl FnMut(F) -> F,
) -> Result<F, ReductionError> {
    guard_origin(curve)?;
    Ok(integrate_one_form(curve, |z| {
        let r_sq = z.modulus_sq();
        let w = weight(r_sq) / r_sq;
        (-z.im() * w, z.re() * w)
    }))
}

/// Integral of sqrt(p^2 + 4 r^2) dphi along the curve.
pub fn sqrt_radius_integral<F: Real>(
    curve: &CurveSample<F>,
    p: F,
) -> Result<F, ReductionError> {
    angular_integral(curve, |r_sq| (p * p + F::of(4.0) * r_sq).sqrt())
}

/// Integral of (|p|/2) dphi along the curve.
pub fn half_abs_p_integral<F: Real>(curve: &CurveSample<F>, p: F) -> Result<F, ReductionError> {
    angular_integral(curve, |_| p.abs() * F::of(0.5))
}

/// Closed form for the reduced-form area enclosed by the reduced curve in
/// its theta-increasing (clockwise) traversal: 2*pi*(q-1). The reversed
/// traversal gives the positive value 2*pi*(1-q).
pub fn enclosed_area_closed_form<F: Real>(pq: PqCoord<F>) -> Result<F, ReductionError> {
    if crate::polytope::case_region(pq) != CaseRegion::Case1 {
        return Err(ReductionError::HypothesisViolated {
            p: pq.p.as_f64(),
            q: pq.q.as_f64(),
        });
    }
    Ok(F::TAU() * (pq.q - F::one()))
}

/// Radius of the circle enclosing the same reduced-form area as the reduced
/// curve: r = sqrt((1-q)(1-q+|p|)). Satisfies
/// sqrt(p^2 + 4 r^2) = |p| + 2 - 2q.
pub fn matching_radius<F: Real>(pq: PqCoord<F>) -> Result<F, ReductionError> {
    pq.require_interior()?;
    if pq.p == F::zero() {
        return Err(ReductionError::ZeroP);
    }
    let one_less_q = F::one() - pq.q;
    Ok((one_less_q * (one_less_q + pq.p.abs())).sqrt())
}

/// The standard fiber label cut out by the circle of radius `r` inside the
/// level H = -p: xi = (1 + p - s)/2, zeta = (1 - p - s)/2 with
/// s = sqrt(p^2 + 4 r^2).
pub fn fiber_of_circle<F: Real>(r: F, p: F) -> Result<FiberLabel<F>, ReductionError> {
    if r <= F::zero() {
        return Err(ReductionError::NonPositiveRadius { r: r.as_f64() });
    }
    let s = (p * p + F::of(4.0) * r * r).sqrt();
    let half = F::of(0.5);
    let label = FiberLabel::new(
        (F::one() + p - s) * half,
        (F::one() - p - s) * half,
    );
    Ok(label.require_interior()?)
}

/// Moduli of the two disk factors over a point of the circle fiber: the
/// label (xi, zeta) corresponds to radii sqrt((1-2 xi)/2), sqrt((1-2 zeta)/2).
pub fn circle_fiber_moduli<F: Real>(label: FiberLabel<F>) -> (F, F) {
    let half = F::of(0.5);
    (
        ((F::one() - F::of(2.0) * label.xi) * half).sqrt(),
        ((F::one() - F::of(2.0) * label.zeta) * half).sqrt(),
    )
}

/// A scalar field on the disk with a caller-supplied gradient, validated
/// against central finite differences at construction so the semiconjugacy
/// check really compares two independent evaluations.
pub struct ScalarField<F> {
    value: Box<dyn Fn(F, F) -> F + Send + Sync>,
    gradient: Box<dyn Fn(F, F) -> (F, F) + Send + Sync>,
}

impl<F: Real> ScalarField<F> {
    pub fn new(
        value: impl Fn(F, F) -> F + Send + Sync + 'static,
        gradient: impl Fn(F, F) -> (F, F) + Send + Sync + 'static,
    ) -> Result<Self, ReductionError> {
        let field = Self {
            value: Box::new(value),
            gradient: Box::new(gradient),
        };
        let h = F::of(1e-5);
        let tol = F::of(1e-6);
        for &x in &[-0.6, -0.2, 0.2, 0.6] {
            for &y in &[-0.6, -0.2, 0.2, 0.6] {
                let x = F::of(x);
                let y = F::of(y);
                let fd_x = ((field.value)(x + h, y) - (field.value)(x - h, y))
                    / (F::of(2.0) * h);
                let fd_y = ((field.value)(x, y + h) - (field.value)(x, y - h))
                    / (F::of(2.0) * h);
                let (gx, gy) = (field.gradient)(x, y);
                let delta = (gx - fd_x).abs().max((gy - fd_y).abs());
                if delta > tol * (F::one() + fd_x.abs().max(fd_y.abs())) {
                    return Err(ReductionError::GradientMismatch {
                        x: x.as_f64(),
                        y: y.as_f64(),
                        delta: delta.as_f64(),
                    });
                }
            }
        }
        Ok(field)
    }

    pub fn value(&self, x: F, y: F) -> F {
        (self.value)(x, y)
    }

    pub fn gradient(&self, x: F, y: F) -> (F, F) {
        (self.gradient)(x, y)
    }
}

fn cmul<F: Real>(a: (F, F), b: (F, F)) -> (F, F) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

/// Residual of the semiconjugacy identity at a bidisk point: the push-down
/// of the Hamiltonian field of K composed with the product map, computed
/// through complex-product differentials, against the reduced field
/// (1/2) sqrt(h^2 + 4|F|^2) (-K_y, K_x) at the image, with h the level of
/// the point. Both sides are independent code paths.
pub fn semiconjugacy_residual<F: Real>(
    field: &ScalarField<F>,
    z1: DiskPoint<F>,
    z2: DiskPoint<F>,
) -> F {
    let w = product_map(z1, z2);
    let (ku, kv) = field.gradient(w.re(), w.im());
    let half = F::of(0.5);

    // Chain rule for G = K o F on each factor, then the Hamiltonian field of
    // G for twice the Euclidean form: X = (-G_y/2, G_x/2).
    let (x1, y1) = (z1.re(), z1.im());
    let (x2, y2) = (z2.re(), z2.im());
    let g_x1 = ku * x2 + kv * y2;
    let g_y1 = -ku * y2 + kv * x2;
    let g_x2 = ku * x1 + kv * y1;
    let g_y2 = -ku * y1 + kv * x1;
    let x_first = (-g_y1 * half, g_x1 * half);
    let x_second = (-g_y2 * half, g_x2 * half);

    // dF(X) = X1 * z2 + z1 * X2.
    let push_a = cmul(x_first, (x2, y2));
    let push_b = cmul((x1, y1), x_second);
    let lhs = (push_a.0 + push_b.0, push_a.1 + push_b.1);

    // Reduced field at the image point.
    let level = h_level(z1, z2);
    let scale = (level * level + F::of(4.0) * w.modulus_sq()).sqrt() * half;
    let rhs = (-kv * scale, ku * scale);

    ((lhs.0 - rhs.0).powi(2) + (lhs.1 - rhs.1).powi(2)).sqrt()
}
