//! Explicit construction of the torus L1(p,q) = { v1+w1 = 2p, v.w = 2q^2-1 }
//! as the circle orbit of an embedded curve, together with the pair of
//! commuting Hamiltonians cutting it out and the standard product-torus
//! parametrization it is compared against.

use thiserror::Error;

use crate::polytope::{FiberLabel, InteriorError, PqCoord};
use crate::scalar::Real;
use crate::sphere::{
    rotation_about_e1, GeomError, ProductPoint, SpherePoint, TangentPair, Vec3,
};

#[derive(Debug, Error, PartialEq)]
pub enum TorusError {
    #[error(transparent)]
    NotInterior(#[from] InteriorError),
    #[error("curve degenerates: q^2 - p^2 = {value} is below the guard")]
    DegenerateCurve { value: f64 },
    #[error("the pairing Hamiltonian requires q > 0 (got {q})")]
    NonPositiveQ { q: f64 },
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Curve and orbit parameters, both reduced mod 2*pi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusParam<F> {
    theta: F,
    t: F,
}

impl<F: Real> TorusParam<F> {
    pub fn new(theta: F, t: F) -> Self {
        Self {
            theta: theta.wrap_angle(),
            t: t.wrap_angle(),
        }
    }

    pub fn theta(&self) -> F {
        self.theta
    }

    pub fn t(&self) -> F {
        self.t
    }
}

/// Shared radicals of the curve formulas at a given (p,q).
pub(crate) struct CurveCoeffs<F> {
    /// sqrt(q^2-p^2) * sqrt(1-q^2) / q, the amplitude of the first-coordinate wobble.
    pub(crate) amp: F,
    /// sqrt(1-q^2).
    pub(crate) s1q: F,
    /// sqrt(q^2-p^2).
    pub(crate) sqp: F,
    /// p * sqrt(1-q^2) / q.
    pub(crate) tilt: F,
}

pub(crate) fn coeffs<F: Real>(pq: PqCoord<F>) -> Result<CurveCoeffs<F>, TorusError> {
    pq.require_interior()?;
    let gap = pq.q * pq.q - pq.p * pq.p;
    if gap < F::of(1e-14) {
        return Err(TorusError::DegenerateCurve {
            value: gap.as_f64(),
        });
    }
    let s1q = (F::one() - pq.q * pq.q).sqrt();
    let sqp = gap.sqrt();
    Ok(CurveCoeffs {
        amp: sqp * s1q / pq.q,
        s1q,
        sqp,
        tilt: pq.p * s1q / pq.q,
    })
}

/// The distinguished point (v0, w0) of L1(p,q) from which the generating
/// curve is swept out.
pub fn base_point<F: Real>(pq: PqCoord<F>) -> Result<ProductPoint<F>, TorusError> {
    let c = coeffs(pq)?;
    let v = SpherePoint::from_coords(pq.p, c.s1q, c.sqp)?;
    let w = SpherePoint::from_coords(pq.p, -c.s1q, c.sqp)?;
    Ok(ProductPoint::new(v, w))
}

/// The embedded curve through `base_point` whose diagonal-rotation orbit is
/// the whole torus; an integral curve of [`pairing_field`].
pub fn generating_curve<F: Real>(
    theta: F,
    pq: PqCoord<F>,
) -> Result<ProductPoint<F>, TorusError> {
    let c = coeffs(pq)?;
    let (sin, cos) = theta.sin_cos();
    let v = SpherePoint::from_coords(pq.p + c.amp * sin, c.s1q * cos, c.sqp - c.tilt * sin)?;
    let w = SpherePoint::from_coords(pq.p - c.amp * sin, -c.s1q * cos, c.sqp + c.tilt * sin)?;
    Ok(ProductPoint::new(v, w))
}

/// Analytic theta-derivative of [`generating_curve`], as an ambient pair.
pub fn generating_curve_velocity<F: Real>(
    theta: F,
    pq: PqCoord<F>,
) -> Result<(Vec3<F>, Vec3<F>), TorusError> {
    let c = coeffs(pq)?;
    let (sin, cos) = theta.sin_cos();
    let dv = Vec3::new(c.amp * cos, -c.s1q * sin, -c.tilt * cos);
    let dw = Vec3::new(-c.amp * cos, c.s1q * sin, c.tilt * cos);
    Ok((dv, dw))
}

/// Full parametrization of L1(p,q): the generating curve rotated by the
/// diagonal circle action.
pub fn torus_point<F: Real>(
    tp: TorusParam<F>,
    pq: PqCoord<F>,
) -> Result<ProductPoint<F>, TorusError> {
    let on_curve = generating_curve(tp.theta, pq)?;
    let r = rotation_about_e1(tp.t);
    Ok(on_curve.rotate(&r, &r)?)
}

/// The moment of the diagonal rotation action: -(v+w).e1.
/// Constant -2p on L1(p,q).
pub fn rotation_moment<F: Real>(pt: &ProductPoint<F>) -> F {
    -(pt.v.vec() + pt.w.vec()).dot(Vec3::e1())
}

/// The second commuting Hamiltonian v.w / (4q); constant (2q^2-1)/(4q) on
/// L1(p,q).
pub fn pairing_moment<F: Real>(pt: &ProductPoint<F>, q: F) -> Result<F, TorusError> {
    if q <= F::zero() {
        return Err(TorusError::NonPositiveQ { q: q.as_f64() });
    }
    Ok(pt.v.vec().dot(pt.w.vec()) / (F::of(4.0) * q))
}

/// Hamiltonian vector field of [`pairing_moment`]: ((v x w)/2q, (w x v)/2q).
pub fn pairing_field<F: Real>(
    pt: &ProductPoint<F>,
    q: F,
) -> Result<TangentPair<F>, TorusError> {
    if q <= F::zero() {
        return Err(TorusError::NonPositiveQ { q: q.as_f64() });
    }
    let half_q2 = F::of(2.0) * q;
    let a = pt.v.vec().cross(pt.w.vec()).scale(F::one() / half_q2);
    let b = pt.w.vec().cross(pt.v.vec()).scale(F::one() / half_q2);
    Ok(TangentPair::at(pt, a, b)?)
}

/// The standard toric fiber T(xi, zeta) as a product of latitude circles.
pub fn product_torus_point<F: Real>(
    fl: FiberLabel<F>,
    theta1: F,
    theta2: F,
) -> Result<ProductPoint<F>, TorusError> {
    let fl = fl.require_interior()?;
    let two = F::of(2.0);
    let rho1 = (F::one() - F::of(4.0) * fl.xi * fl.xi).sqrt();
    let rho2 = (F::one() - F::of(4.0) * fl.zeta * fl.zeta).sqrt();
    let v = SpherePoint::from_coords(two * fl.xi, rho1 * theta1.cos(), rho1 * theta1.sin())?;
    let w = SpherePoint::from_coords(two * fl.zeta, rho2 * theta2.cos(), rho2 * theta2.sin())?;
    Ok(ProductPoint::new(v, w))
}

/// Standard moment map (v,w) |-> (v1/2, w1/2).
pub fn standard_moment<F: Real>(pt: &ProductPoint<F>) -> (F, F) {
    let half = F::of(0.5);
    (pt.v.vec().x * half, pt.w.vec().x * half)
}

/// Whether both defining residuals of L1(p,q) are within `tol`.
pub fn membership_l1<F: Real>(pt: &ProductPoint<F>, pq: PqCoord<F>, tol: F) -> bool {
    let sum_res = (pt.v.vec().x + pt.w.vec().x - F::of(2.0) * pq.p).abs();
    let dot_res =
        (pt.v.vec().dot(pt.w.vec()) - (F::of(2.0) * pq.q * pq.q - F::one())).abs();
    sum_res <= tol && dot_res <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::omega_product;
    use approx::assert_abs_diff_eq;

    const PQ: PqCoord<f64> = PqCoord { p: 0.3, q: 0.7 };

    #[test]
    fn base_point_values() {
        let pt = base_point(PQ).unwrap();
        assert_abs_diff_eq!(pt.v.vec().x, 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(pt.v.vec().y, 0.714142842854285, epsilon = 1e-12);
        assert_abs_diff_eq!(pt.v.vec().z, 0.6324555320336758, epsilon = 1e-12);
        assert_eq!(pt.v.vec().x + pt.w.vec().x, 0.6);
        assert_abs_diff_eq!(pt.v.vec().dot(pt.w.vec()), -0.02, epsilon = 1e-12);
    }

    #[test]
    fn base_point_rejects_non_interior() {
        assert!(matches!(
            base_point(PqCoord::new(0.7, 0.7)),
            Err(TorusError::NotInterior(_))
        ));
        assert!(matches!(
            base_point(PqCoord::new(0.9, 1.5)),
            Err(TorusError::NotInterior(_))
        ));
    }

    #[test]
    fn curve_at_zero_matches_base_point() {
        let a = generating_curve(0.0, PQ).unwrap();
        let b = base_point(PQ).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn curve_at_quarter_turn() {
        let pt = generating_curve(std::f64::consts::FRAC_PI_2, PQ).unwrap();
        // p + sqrt(q^2-p^2) sqrt(1-q^2)/q at (0.3, 0.7)
        assert_abs_diff_eq!(pt.v.vec().x, 0.9452337023220694, epsilon = 1e-12);
    }

    #[test]
    fn curve_unit_norms() {
        for k in 0..64 {
            let theta = std::f64::consts::TAU * k as f64 / 64.0;
            let pt = generating_curve(theta, PQ).unwrap();
            assert_abs_diff_eq!(pt.v.vec().norm(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(pt.w.vec().norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn orbit_stays_on_level_set() {
        for (i, j) in [(0, 0), (3, 11), (7, 2), (13, 29)] {
            let tp = TorusParam::new(
                std::f64::consts::TAU * i as f64 / 16.0,
                std::f64::consts::TAU * j as f64 / 32.0,
            );
            let pt = torus_point(tp, PQ).unwrap();
            assert!(membership_l1(&pt, PQ, 1e-12));
            assert!(!membership_l1(&pt, PqCoord::new(0.4, 0.7), 1e-10));
        }
    }

    #[test]
    fn hamiltonian_values_on_torus() {
        let pt = base_point(PQ).unwrap();
        assert_abs_diff_eq!(rotation_moment(&pt), -0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(
            pairing_moment(&pt, PQ.q).unwrap(),
            (2.0 * 0.49 - 1.0) / 2.8,
            epsilon = 1e-15
        );
        assert!(matches!(
            pairing_moment(&pt, 0.0),
            Err(TorusError::NonPositiveQ { .. })
        ));
    }

    #[test]
    fn rotation_moment_is_action_invariant() {
        for j in 0..100 {
            let tp = TorusParam::new(0.6, std::f64::consts::TAU * j as f64 / 100.0);
            let pt = torus_point(tp, PQ).unwrap();
            assert_abs_diff_eq!(rotation_moment(&pt), -0.6, epsilon = 1e-12);
        }
    }

    #[test]
    fn pairing_field_values() {
        let pt = base_point(PQ).unwrap();
        let x = pairing_field(&pt, PQ.q).unwrap();
        assert_abs_diff_eq!(x.a.x, 0.6452337023220693, epsilon = 1e-12);
        assert_abs_diff_eq!(x.a.y, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(x.a.z, -0.30606121836612216, epsilon = 1e-12);
        assert_eq!(x.b, -x.a);
    }

    #[test]
    fn curve_is_integral_curve_of_pairing_field() {
        for k in 0..256 {
            let theta = std::f64::consts::TAU * k as f64 / 256.0;
            let pt = generating_curve(theta, PQ).unwrap();
            let field = pairing_field(&pt, PQ.q).unwrap();
            let (dv, dw) = generating_curve_velocity(theta, PQ).unwrap();
            assert!((dv - field.a).norm() <= 1e-8);
            assert!((dw - field.b).norm() <= 1e-8);
        }
    }

    #[test]
    fn velocity_matches_central_differences() {
        let h = 1e-5;
        for k in 0..32 {
            let theta = std::f64::consts::TAU * k as f64 / 32.0;
            let plus = generating_curve(theta + h, PQ).unwrap();
            let minus = generating_curve(theta - h, PQ).unwrap();
            let fd_v = (plus.v.vec() - minus.v.vec()).scale(1.0 / (2.0 * h));
            let (dv, _) = generating_curve_velocity(theta, PQ).unwrap();
            assert!((fd_v - dv).norm() <= 1e-6);
        }
    }

    #[test]
    fn orbit_is_lagrangian() {
        let h = 1e-6;
        for (i, j) in [(1, 5), (9, 20), (17, 3)] {
            let theta = std::f64::consts::TAU * i as f64 / 32.0;
            let t = std::f64::consts::TAU * j as f64 / 32.0;
            let pt = torus_point(TorusParam::new(theta, t), PQ).unwrap();
            let d_theta = {
                let p = torus_point(TorusParam::new(theta + h, t), PQ).unwrap();
                let m = torus_point(TorusParam::new(theta - h, t), PQ).unwrap();
                (
                    (p.v.vec() - m.v.vec()).scale(0.5 / h),
                    (p.w.vec() - m.w.vec()).scale(0.5 / h),
                )
            };
            let d_t = {
                let p = torus_point(TorusParam::new(theta, t + h), PQ).unwrap();
                let m = torus_point(TorusParam::new(theta, t - h), PQ).unwrap();
                (
                    (p.v.vec() - m.v.vec()).scale(0.5 / h),
                    (p.w.vec() - m.w.vec()).scale(0.5 / h),
                )
            };
            let u1 = TangentPair::project(&pt, d_theta.0, d_theta.1).unwrap();
            let u2 = TangentPair::project(&pt, d_t.0, d_t.1).unwrap();
            assert!(omega_product(&pt, &u1, &u2).abs() <= 1e-10);
        }
    }

    #[test]
    fn poisson_commutation_proxy() {
        // d(rotation_moment) along the pairing field vanishes.
        for k in 0..100 {
            let theta = std::f64::consts::TAU * k as f64 / 100.0;
            let pt = generating_curve(theta, PQ).unwrap();
            let x = pairing_field(&pt, PQ.q).unwrap();
            let deriv = -(x.a + x.b).dot(Vec3::e1());
            assert!(deriv.abs() <= 1e-10);
        }
    }

    #[test]
    fn product_torus_examples() {
        let clifford = product_torus_point(FiberLabel::new(0.0, 0.0), 0.0, 0.0).unwrap();
        assert_eq!(clifford.v.vec(), Vec3::new(0.0, 1.0, 0.0));
        assert_eq!(clifford.w.vec(), Vec3::new(0.0, 1.0, 0.0));

        let fl = FiberLabel::new(0.2, -0.1);
        let pt = product_torus_point(fl, 1.1, 2.3).unwrap();
        let (mx, my) = standard_moment(&pt);
        assert_abs_diff_eq!(mx, fl.xi, epsilon = 1e-12);
        assert_abs_diff_eq!(my, fl.zeta, epsilon = 1e-12);
        assert_abs_diff_eq!(pt.v.vec().norm(), 1.0, epsilon = 1e-12);

        assert!(product_torus_point(FiberLabel::new(0.5, 0.0), 0.0, 0.0).is_err());
        // Generic product torus point is not on L1(0.3, 0.7).
        assert!(!membership_l1(&pt, PQ, 1e-6));
    }

    #[test]
    fn degenerate_curve_guard() {
        // Within the boundary band of |p| = q the input is rejected before
        // the radical can degenerate.
        let err = base_point(PqCoord::new(0.7 - 1e-15, 0.7)).unwrap_err();
        assert!(matches!(err, TorusError::NotInterior(_)));
        // Just outside the band the radicals are still well conditioned.
        assert!(base_point(PqCoord::new(0.699999999, 0.7)).is_ok());
    }
}
