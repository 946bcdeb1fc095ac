//! Points of the open unit disk, sampled closed curves, and line-integral
//! quadrature of 1-forms along them.
//!
//! Curves are sampled at the equispaced parameter values theta_k = 2*pi*k/n.
//! The parameter derivative is recovered from the samples by an 8th-order
//! periodic central difference, so the composite trapezoidal rule on the
//! periodic parameter keeps its spectral accuracy for smooth curves.

use std::io::{BufRead, Write};

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum DiskError {
    #[error("point ({re}, {im}) is not in the open unit disk")]
    NotInDisk { re: f64, im: f64 },
    #[error("point has non-finite coordinates")]
    NonFinite,
    #[error("curve needs at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("csv row {row}: {reason}")]
    BadCsv { row: usize, reason: String },
    #[error("csv io: {0}")]
    Io(String),
}

/// A point of the open unit disk in C.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint<F> {
    re: F,
    im: F,
}

impl<F: Real> DiskPoint<F> {
    pub fn new(re: F, im: F) -> Result<Self, DiskError> {
        if !(re.is_finite() && im.is_finite()) {
            return Err(DiskError::NonFinite);
        }
        if re * re + im * im >= F::one() {
            return Err(DiskError::NotInDisk {
                re: re.as_f64(),
                im: im.as_f64(),
            });
        }
        Ok(Self { re, im })
    }

    pub fn origin() -> Self {
        Self {
            re: F::zero(),
            im: F::zero(),
        }
    }

    pub fn re(&self) -> F {
        self.re
    }

    pub fn im(&self) -> F {
        self.im
    }

    pub fn modulus_sq(&self) -> F {
        self.re * self.re + self.im * self.im
    }

    pub fn modulus(&self) -> F {
        self.modulus_sq().sqrt()
    }
}

/// Complex product of two disk points; lands back in the disk since the
/// moduli multiply.
pub fn product_map<F: Real>(z1: DiskPoint<F>, z2: DiskPoint<F>) -> DiskPoint<F> {
    DiskPoint {
        re: z1.re * z2.re - z1.im * z2.im,
        im: z1.re * z2.im + z1.im * z2.re,
    }
}

/// Traversal direction of a sampled curve relative to increasing theta.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    ThetaIncreasing,
    Reversed,
}

/// A closed curve sampled at theta_k = 2*pi*k/n.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSample<F> {
    points: Vec<DiskPoint<F>>,
    orientation: Orientation,
}

pub const MIN_SAMPLES: usize = 16;

impl<F: Real> CurveSample<F> {
    pub fn new(points: Vec<DiskPoint<F>>, orientation: Orientation) -> Result<Self, DiskError> {
        if points.len() < MIN_SAMPLES {
            return Err(DiskError::TooFewSamples {
                min: MIN_SAMPLES,
                got: points.len(),
            });
        }
        Ok(Self {
            points,
            orientation,
        })
    }

    /// Sample a parametrized curve at the canonical theta grid.
    pub fn from_fn<E>(
        n: usize,
        orientation: Orientation,
        mut f: impl FnMut(F) -> Result<DiskPoint<F>, E>,
    ) -> Result<Self, E>
    where
        E: From<DiskError>,
    {
        let mut points = Vec::with_capacity(n);
        for k in 0..n {
            let theta = F::TAU() * F::of(k as f64) / F::of(n as f64);
            points.push(f(theta)?);
        }
        Ok(Self::new(points, orientation)?)
    }

    /// The circle of radius `r`, wound counterclockwise (or clockwise) as
    /// theta increases.
    pub fn circle(r: F, n: usize, clockwise: bool) -> Result<Self, DiskError> {
        Self::from_fn(n, Orientation::ThetaIncreasing, |theta: F| {
            let (sin, cos) = theta.sin_cos();
            let sign = if clockwise { -F::one() } else { F::one() };
            DiskPoint::new(r * cos, sign * r * sin)
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[DiskPoint<F>] {
        &self.points
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn reversed(mut self) -> Self {
        self.orientation = match self.orientation {
            Orientation::ThetaIncreasing => Orientation::Reversed,
            Orientation::Reversed => Orientation::ThetaIncreasing,
        };
        self
    }

    /// Export as CSV rows `theta,re,im` (with header).
    pub fn to_csv(&self, mut w: impl Write) -> Result<(), DiskError> {
        let n = self.points.len();
        writeln!(w, "theta,re,im").map_err(|e| DiskError::Io(e.to_string()))?;
        for (k, pt) in self.points.iter().enumerate() {
            let theta = std::f64::consts::TAU * k as f64 / n as f64;
            writeln!(w, "{},{},{}", theta, pt.re.as_f64(), pt.im.as_f64())
                .map_err(|e| DiskError::Io(e.to_string()))?;
        }
        Ok(())
    }

    /// Import from CSV rows `theta,re,im`; the theta column must match the
    /// canonical equispaced grid.
    pub fn from_csv(r: impl BufRead) -> Result<Self, DiskError> {
        let mut rows: Vec<(f64, F, F)> = Vec::new();
        for (idx, line) in r.lines().enumerate() {
            let line = line.map_err(|e| DiskError::Io(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || (idx == 0 && line.starts_with("theta")) {
                continue;
            }
            let mut fields = line.split(',');
            let mut next = |name: &str| -> Result<f64, DiskError> {
                fields
                    .next()
                    .ok_or_else(|| DiskError::BadCsv {
                        row: idx,
                        reason: format!("missing field {name}"),
                    })?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| DiskError::BadCsv {
                        row: idx,
                        reason: format!("{name}: {e}"),
                    })
            };
            let theta = next("theta")?;
            let re = next("re")?;
            let im = next("im")?;
            rows.push((theta, F::of(re), F::of(im)));
        }
        let n = rows.len();
        let mut points = Vec::with_capacity(n);
        for (k, (theta, re, im)) in rows.into_iter().enumerate() {
            let expected = std::f64::consts::TAU * k as f64 / n as f64;
            if (theta - expected).abs() > 1e-9 {
                return Err(DiskError::BadCsv {
                    row: k,
                    reason: format!("theta {theta} is not on the canonical grid ({expected})"),
                });
            }
            points.push(DiskPoint::new(re, im)?);
        }
        Self::new(points, Orientation::ThetaIncreasing)
    }

    /// Parameter derivative at every sample. Power-of-two sample counts get
    /// the exact trigonometric-interpolant derivative (machine precision on
    /// analytic curves); other counts fall back to a periodic 8th-order
    /// central difference.
    pub fn derivative(&self) -> Vec<(F, F)> {
        let n = self.points.len();
        if n.is_power_of_two() {
            self.derivative_spectral()
        } else {
            self.derivative_fd8()
        }
    }

    fn derivative_spectral(&self) -> Vec<(F, F)> {
        let n = self.points.len();
        let mut re: Vec<F> = self.points.iter().map(|z| z.re).collect();
        let mut im: Vec<F> = self.points.iter().map(|z| z.im).collect();
        fft_pow2(&mut re, &mut im, false);
        // Multiply mode k by i * m(k) with the signed frequency m; the
        // Nyquist mode has no well-defined derivative sign and is dropped.
        for k in 0..n {
            let m = if 2 * k < n {
                k as f64
            } else if 2 * k == n {
                0.0
            } else {
                k as f64 - n as f64
            };
            let m = F::of(m);
            let (r, i) = (re[k], im[k]);
            re[k] = -i * m;
            im[k] = r * m;
        }
        fft_pow2(&mut re, &mut im, true);
        let scale = F::one() / F::of(n as f64);
        re.into_iter()
            .zip(im)
            .map(|(r, i)| (r * scale, i * scale))
            .collect()
    }

    fn derivative_fd8(&self) -> Vec<(F, F)> {
        let n = self.points.len();
        let h = F::TAU() / F::of(n as f64);
        let c1 = F::of(4.0 / 5.0);
        let c2 = F::of(-1.0 / 5.0);
        let c3 = F::of(4.0 / 105.0);
        let c4 = F::of(-1.0 / 280.0);
        let at = |i: isize| -> DiskPoint<F> {
            let idx = i.rem_euclid(n as isize) as usize;
            self.points[idx]
        };
        (0..n as isize)
            .map(|k| {
                let mut dre = F::zero();
                let mut dim = F::zero();
                for (off, c) in [(1, c1), (2, c2), (3, c3), (4, c4)] {
                    let plus = at(k + off);
                    let minus = at(k - off);
                    dre = dre + c * (plus.re - minus.re);
                    dim = dim + c * (plus.im - minus.im);
                }
                (dre / h, dim / h)
            })
            .collect()
    }
}

/// Iterative radix-2 Cooley-Tukey transform; `invert` runs the inverse
/// without the 1/n normalization.
fn fft_pow2<F: Real>(re: &mut [F], im: &mut [F], invert: bool) {
    let n = re.len();
    debug_assert!(n.is_power_of_two());
    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            re.swap(i, j);
            im.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let angle = F::TAU() / F::of(len as f64) * if invert { F::one() } else { -F::one() };
        let (w_sin, w_cos) = angle.sin_cos();
        let mut start = 0;
        while start < n {
            let mut wr = F::one();
            let mut wi = F::zero();
            for k in 0..len / 2 {
                let (ar, ai) = (re[start + k], im[start + k]);
                let (br, bi) = (re[start + k + len / 2], im[start + k + len / 2]);
                let tr = br * wr - bi * wi;
                let ti = br * wi + bi * wr;
                re[start + k] = ar + tr;
                im[start + k] = ai + ti;
                re[start + k + len / 2] = ar - tr;
                im[start + k + len / 2] = ai - ti;
                let new_wr = wr * w_cos - wi * w_sin;
                wi = wr * w_sin + wi * w_cos;
                wr = new_wr;
            }
            start += len;
        }
        len <<= 1;
    }
}

/// Integrate a 1-form (given by its Cartesian coefficients) along the
/// sampled curve: composite trapezoid on the periodic parameter.
pub fn integrate_one_form<F: Real>(
    curve: &CurveSample<F>,
    mut form: impl FnMut(DiskPoint<F>) -> (F, F),
) -> F {
    let n = curve.len();
    let h = F::TAU() / F::of(n as f64);
    let derivs = curve.derivative();
    let mut total = F::zero();
    for (pt, (dre, dim)) in curve.points().iter().zip(derivs) {
        let (cx, cy) = form(*pt);
        total = total + (cx * dre + cy * dim) * h;
    }
    match curve.orientation() {
        Orientation::ThetaIncreasing => total,
        Orientation::Reversed => -total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_point_invariants() {
        assert!(DiskPoint::new(0.999, 0.0).is_ok());
        assert!(matches!(
            DiskPoint::new(1.0, 0.0),
            Err(DiskError::NotInDisk { .. })
        ));
        assert!(matches!(
            DiskPoint::new(f64::INFINITY, 0.0),
            Err(DiskError::NonFinite)
        ));
    }

    #[test]
    fn product_map_example() {
        let z1 = DiskPoint::new(0.5, 0.0).unwrap();
        let z2 = DiskPoint::new(0.0, 0.5).unwrap();
        let prod = product_map(z1, z2);
        assert_eq!((prod.re(), prod.im()), (0.0, 0.25));
    }

    #[test]
    fn constant_curve_integrates_to_zero() {
        let pts = vec![DiskPoint::new(0.3, 0.1).unwrap(); 32];
        let curve = CurveSample::new(pts, Orientation::ThetaIncreasing).unwrap();
        let val = integrate_one_form(&curve, |z| (-z.im(), z.re()));
        assert_eq!(val, 0.0);
    }

    #[test]
    fn circle_circulation() {
        // One-form (-y dx + x dy) has circulation 2*pi*r^2 counterclockwise.
        let r = 0.45;
        let curve = CurveSample::circle(r, 256, false).unwrap();
        let val = integrate_one_form(&curve, |z| (-z.im(), z.re()));
        assert!((val - std::f64::consts::TAU * r * r).abs() < 1e-12);
        let cw = CurveSample::circle(r, 256, true).unwrap();
        let val_cw = integrate_one_form(&cw, |z| (-z.im(), z.re()));
        assert!((val_cw + std::f64::consts::TAU * r * r).abs() < 1e-12);
        // Reversing the traversal flips the sign.
        let val_rev = integrate_one_form(&curve.reversed(), |z| (-z.im(), z.re()));
        assert!((val_rev + std::f64::consts::TAU * r * r).abs() < 1e-12);
    }

    #[test]
    fn derivative_matches_analytic_circle() {
        let r = 0.6;
        let n = 128;
        let curve = CurveSample::circle(r, n, false).unwrap();
        let derivs = curve.derivative();
        for (k, (dre, dim)) in derivs.iter().enumerate() {
            let theta = std::f64::consts::TAU * k as f64 / n as f64;
            assert!((dre + r * theta.sin()).abs() < 1e-10);
            assert!((dim - r * theta.cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn too_few_samples_rejected() {
        let pts = vec![DiskPoint::origin(); 8];
        assert!(matches!(
            CurveSample::<f64>::new(pts, Orientation::ThetaIncreasing),
            Err(DiskError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn csv_roundtrip() {
        let curve = CurveSample::circle(0.25f64, 32, false).unwrap();
        let mut buf = Vec::new();
        curve.to_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("theta,re,im\n"));
        let back = CurveSample::<f64>::from_csv(&buf[..]).unwrap();
        assert_eq!(back.len(), curve.len());
        for (a, b) in back.points().iter().zip(curve.points()) {
            assert!((a.re() - b.re()).abs() < 1e-15);
            assert!((a.im() - b.im()).abs() < 1e-15);
        }
    }

    #[test]
    fn csv_rejects_off_grid_theta() {
        let text = (0..20)
            .map(|k| format!("{},0.1,0.0", 0.17 * k as f64))
            .collect::<Vec<_>>()
            .join("\n");
        assert!(matches!(
            CurveSample::<f64>::from_csv(text.as_bytes()),
            Err(DiskError::BadCsv { .. })
        ));
    }
}
