//! Scalar abstraction: every geometric routine in this crate is generic over
//! a floating-point type implementing [`Real`].

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar: f32 or f64.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + 'static {
    /// Convert an `f64` literal, panicking only for values outside the
    /// target type's range (never the case for the constants used here).
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant representable in scalar type")
    }

    /// Lossy view as f64, for diagnostics and reports.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Wrap an angle into `[0, 2*pi)`.
    fn wrap_angle(self) -> Self {
        let tau = Self::TAU();
        let r = self % tau;
        if r < Self::zero() {
            r + tau
        } else {
            r
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}
