//! Vector algebra on R^3, points of the unit sphere and of S^2 x S^2, the
//! half-scaled area form, and the e1-axis rotations used throughout.
//!
//! The symplectic form on each factor is fixed as half the standard area
//! form of the unit sphere (total area 4*pi), so a single factor carries
//! total form-area 2*pi. Storing the half-scaled form directly keeps every
//! downstream formula free of stray factors of 1/2.

use thiserror::Error;

use crate::scalar::Real;

/// Errors from constructing sphere-bound data.
#[derive(Debug, Error, PartialEq)]
pub enum GeomError {
    #[error("vector has non-finite components")]
    NonFinite,
    #[error("vector norm {norm} is not within tolerance of 1")]
    NotUnit { norm: f64 },
    #[error("vector is not tangent at its base point (residual {residual})")]
    NotTangent { residual: f64 },
}

/// A vector in R^3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3<F> {
    pub x: F,
    pub y: F,
    pub z: F,
}

impl<F: Real> Vec3<F> {
    pub fn new(x: F, y: F, z: F) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(F::zero(), F::zero(), F::zero())
    }

    /// First basis vector; the rotation axis of the circle actions.
    pub fn e1() -> Self {
        Self::new(F::one(), F::zero(), F::zero())
    }

    pub fn e2() -> Self {
        Self::new(F::zero(), F::one(), F::zero())
    }

    pub fn e3() -> Self {
        Self::new(F::zero(), F::zero(), F::one())
    }

    pub fn dot(self, o: Self) -> F {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> F {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: F) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl<F: Real> std::ops::Add for Vec3<F> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<F: Real> std::ops::Sub for Vec3<F> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<F: Real> std::ops::Neg for Vec3<F> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// A 3x3 matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3<F> {
    pub rows: [[F; 3]; 3],
}

impl<F: Real> Mat3<F> {
    pub fn identity() -> Self {
        let o = F::one();
        let z = F::zero();
        Self {
            rows: [[o, z, z], [z, o, z], [z, z, o]],
        }
    }

    pub fn apply(&self, v: Vec3<F>) -> Vec3<F> {
        let r = &self.rows;
        Vec3::new(
            r[0][0] * v.x + r[0][1] * v.y + r[0][2] * v.z,
            r[1][0] * v.x + r[1][1] * v.y + r[1][2] * v.z,
            r[2][0] * v.x + r[2][1] * v.y + r[2][2] * v.z,
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut rows = [[F::zero(); 3]; 3];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.rows[i][0] * o.rows[0][j]
                    + self.rows[i][1] * o.rows[1][j]
                    + self.rows[i][2] * o.rows[2][j];
            }
        }
        Self { rows }
    }

    pub fn transpose(&self) -> Self {
        let r = &self.rows;
        Self {
            rows: [
                [r[0][0], r[1][0], r[2][0]],
                [r[0][1], r[1][1], r[2][1]],
                [r[0][2], r[1][2], r[2][2]],
            ],
        }
    }

    /// Largest entrywise absolute difference to another matrix.
    pub fn max_abs_diff(&self, o: &Self) -> F {
        let mut m = F::zero();
        for i in 0..3 {
            for j in 0..3 {
                m = m.max((self.rows[i][j] - o.rows[i][j]).abs());
            }
        }
        m
    }
}

fn unit_accept_tol<F: Real>() -> F {
    F::of(1e-9).max(F::epsilon() * F::of(100.0))
}

fn tangency_tol<F: Real>() -> F {
    F::of(1e-10).max(F::epsilon() * F::of(100.0))
}

/// A point of the unit sphere. Construction renormalizes inputs whose norm
/// is within 1e-9 of 1 and rejects anything farther off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint<F> {
    v: Vec3<F>,
}

impl<F: Real> SpherePoint<F> {
    pub fn new(v: Vec3<F>) -> Result<Self, GeomError> {
        if !v.is_finite() {
            return Err(GeomError::NonFinite);
        }
        let norm = v.norm();
        let off = (norm - F::one()).abs();
        if off > unit_accept_tol() {
            return Err(GeomError::NotUnit {
                norm: norm.as_f64(),
            });
        }
        // Renormalize only when measurably off unit, so exact constructions
        // pass through bit-for-bit.
        let v = if off > F::epsilon() * F::of(32.0) {
            v.scale(F::one() / norm)
        } else {
            v
        };
        Ok(Self { v })
    }

    pub fn from_coords(x: F, y: F, z: F) -> Result<Self, GeomError> {
        Self::new(Vec3::new(x, y, z))
    }

    pub fn vec(&self) -> Vec3<F> {
        self.v
    }

    /// Rotate by a matrix assumed orthogonal; the unit-norm invariant is
    /// re-checked by the constructor.
    pub fn rotate(&self, m: &Mat3<F>) -> Result<Self, GeomError> {
        Self::new(m.apply(self.v))
    }

    /// Orthogonal projection of an ambient vector onto the tangent plane.
    pub fn project_tangent(&self, a: Vec3<F>) -> Vec3<F> {
        a - self.v.scale(a.dot(self.v))
    }
}

/// A point of S^2 x S^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductPoint<F> {
    pub v: SpherePoint<F>,
    pub w: SpherePoint<F>,
}

impl<F: Real> ProductPoint<F> {
    pub fn new(v: SpherePoint<F>, w: SpherePoint<F>) -> Self {
        Self { v, w }
    }

    pub fn rotate(&self, mv: &Mat3<F>, mw: &Mat3<F>) -> Result<Self, GeomError> {
        Ok(Self::new(self.v.rotate(mv)?, self.w.rotate(mw)?))
    }
}

/// A pair of tangent vectors, one per factor, at a point of S^2 x S^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentPair<F> {
    pub a: Vec3<F>,
    pub b: Vec3<F>,
}

impl<F: Real> TangentPair<F> {
    /// Validates tangency of `a` at `pt.v` and `b` at `pt.w`, relative to
    /// the vectors' magnitudes.
    pub fn at(pt: &ProductPoint<F>, a: Vec3<F>, b: Vec3<F>) -> Result<Self, GeomError> {
        let tol = tangency_tol::<F>();
        for (vec, base) in [(a, pt.v.vec()), (b, pt.w.vec())] {
            if !vec.is_finite() {
                return Err(GeomError::NonFinite);
            }
            let residual = vec.dot(base).abs();
            if residual > tol * (F::one() + vec.norm()) {
                return Err(GeomError::NotTangent {
                    residual: residual.as_f64(),
                });
            }
        }
        Ok(Self { a, b })
    }

    /// Project arbitrary ambient vectors to the tangent planes first; used
    /// for finite-difference tangents.
    pub fn project(pt: &ProductPoint<F>, a: Vec3<F>, b: Vec3<F>) -> Result<Self, GeomError> {
        Self::at(pt, pt.v.project_tangent(a), pt.w.project_tangent(b))
    }
}

/// The half-scaled area form of one factor: (1/2) v . (a x b).
///
/// Bilinear and antisymmetric in (a, b); callers guarantee tangency.
pub fn area_form_half<F: Real>(v: &SpherePoint<F>, a: Vec3<F>, b: Vec3<F>) -> F {
    v.vec().dot(a.cross(b)) * F::of(0.5)
}

/// The product form on S^2 x S^2: sum of [`area_form_half`] over the factors.
pub fn omega_product<F: Real>(
    pt: &ProductPoint<F>,
    u1: &TangentPair<F>,
    u2: &TangentPair<F>,
) -> F {
    area_form_half(&pt.v, u1.a, u2.a) + area_form_half(&pt.w, u1.b, u2.b)
}

/// Rotation around the e1-axis by angle `t`.
pub fn rotation_about_e1<F: Real>(t: F) -> Mat3<F> {
    let (s, c) = t.sin_cos();
    let o = F::one();
    let z = F::zero();
    Mat3 {
        rows: [[o, z, z], [z, c, -s], [z, s, c]],
    }
}

/// The pair (D1, D2) = (id, diag(-1,-1,1)) conjugating the diagonal circle
/// action (R_t, R_t) into the anti-diagonal one (R_t, R_{-t}).
pub fn conjugating_matrices<F: Real>() -> (Mat3<F>, Mat3<F>) {
    let o = F::one();
    let z = F::zero();
    let d2 = Mat3 {
        rows: [[-o, z, z], [z, -o, z], [z, z, o]],
    };
    (Mat3::identity(), d2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type V = Vec3<f64>;

    fn pole_frame() -> (SpherePoint<f64>, V, V) {
        let v = SpherePoint::from_coords(0.0, 0.0, 1.0).unwrap();
        (v, V::e1(), V::e2())
    }

    #[test]
    fn area_form_on_pole_frame() {
        let (v, a, b) = pole_frame();
        assert_eq!(area_form_half(&v, a, b), 0.5);
        assert_eq!(area_form_half(&v, b, a), -0.5);
    }

    #[test]
    fn area_form_vanishes_on_parallel() {
        let (v, a, _) = pole_frame();
        assert_eq!(area_form_half(&v, a, a.scale(3.7)), 0.0);
    }

    #[test]
    fn sphere_total_area_is_two_pi() {
        // Midpoint quadrature of the half form over a latitude/longitude
        // grid; independent of every other code path in this module.
        let n_u = 400;
        let n_phi = 400;
        let du = 2.0 / n_u as f64;
        let dphi = std::f64::consts::TAU / n_phi as f64;
        let mut total = 0.0;
        for i in 0..n_u {
            let u = -1.0 + (i as f64 + 0.5) * du;
            let rho = (1.0 - u * u).sqrt();
            for j in 0..n_phi {
                let phi = (j as f64 + 0.5) * dphi;
                let v = SpherePoint::from_coords(rho * phi.cos(), rho * phi.sin(), u).unwrap();
                // Coordinate tangents of (phi, u) |-> v, computed analytically.
                let dphi_v = V::new(-rho * phi.sin(), rho * phi.cos(), 0.0);
                let du_v = V::new(-u / rho * phi.cos(), -u / rho * phi.sin(), 1.0);
                total += area_form_half(&v, dphi_v, du_v) * dphi * du;
            }
        }
        assert!(
            (total.abs() - std::f64::consts::TAU).abs() < 1e-3,
            "total = {total}"
        );
    }

    #[test]
    fn product_form_on_pole_frames() {
        let (v, a, b) = pole_frame();
        let pt = ProductPoint::new(v, v);
        let u1 = TangentPair::at(&pt, a, a).unwrap();
        let u2 = TangentPair::at(&pt, b, b).unwrap();
        assert_eq!(omega_product(&pt, &u1, &u2), 1.0);
        assert_eq!(omega_product(&pt, &u1, &u1), 0.0);
    }

    #[test]
    fn rotation_basics() {
        let id = rotation_about_e1(0.0f64);
        assert_eq!(id.max_abs_diff(&Mat3::identity()), 0.0);
        let r = rotation_about_e1(std::f64::consts::FRAC_PI_2);
        let img = r.apply(V::e2());
        assert!((img - V::e3()).norm() < 1e-15);
    }

    #[test]
    fn conjugation_identity() {
        let (_, d2) = conjugating_matrices::<f64>();
        assert_eq!(d2.apply(V::e1()), -V::e1());
        let t = 0.7;
        let lhs = d2.mul(&rotation_about_e1(t)).mul(&d2);
        let rhs = rotation_about_e1(-t);
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn sphere_point_renormalizes_and_rejects() {
        let p: SpherePoint<f64> = SpherePoint::from_coords(1.0 + 5e-10, 0.0, 0.0).unwrap();
        assert!((p.vec().norm() - 1.0).abs() <= 1e-12);
        assert!(matches!(
            SpherePoint::from_coords(1.1, 0.0, 0.0),
            Err(GeomError::NotUnit { .. })
        ));
        assert!(matches!(
            SpherePoint::from_coords(f64::NAN, 0.0, 0.0),
            Err(GeomError::NonFinite)
        ));
    }

    #[test]
    fn tangent_pair_rejects_non_tangent() {
        let (v, a, _) = pole_frame();
        let pt = ProductPoint::new(v, v);
        assert!(TangentPair::at(&pt, a, V::e3()).is_err());
        let proj = TangentPair::project(&pt, V::new(1.0, 0.0, 0.4), a).unwrap();
        assert!(proj.a.dot(v.vec()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn rotation_preserves_norm(t in -10.0f64..10.0, x in -2.0f64..2.0, y in -2.0f64..2.0, z in -2.0f64..2.0) {
            let v = V::new(x, y, z);
            let r = rotation_about_e1(t);
            prop_assert!((r.apply(v).norm() - v.norm()).abs() <= 1e-12);
        }

        #[test]
        fn rotation_group_law(s in -7.0f64..7.0, t in -7.0f64..7.0) {
            let lhs = rotation_about_e1(s).mul(&rotation_about_e1(t));
            let rhs = rotation_about_e1(s + t);
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
        }

        #[test]
        fn conjugation_reverses_angle(t in -7.0f64..7.0) {
            let (_, d2) = conjugating_matrices::<f64>();
            let lhs = d2.mul(&rotation_about_e1(t)).mul(&d2);
            prop_assert!(lhs.max_abs_diff(&rotation_about_e1(-t)) <= 1e-12);
        }

        #[test]
        fn area_form_antisymmetric(ax in -1.0f64..1.0, ay in -1.0f64..1.0, bx in -1.0f64..1.0, by in -1.0f64..1.0) {
            let (v, e1, e2) = pole_frame();
            let a = e1.scale(ax) + e2.scale(ay);
            let b = e1.scale(bx) + e2.scale(by);
            prop_assert_eq!(area_form_half(&v, a, b), -area_form_half(&v, b, a));
        }
    }
}
