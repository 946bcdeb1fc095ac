//! Symmetric probes in rational polytopes, the vertical probe {p = a} with
//! its equidistant level pairing, the free-action check behind the probe's
//! reduction argument, and the three fiber moves in the square that the
//! large-|p| classification branch composes.
//!
//! Probe geometry runs in exact rational arithmetic: floating inputs are
//! snapped to rationals with denominator at most 10^6 and the snap distance
//! is reported on the probe. The fiber relation along a validated symmetric
//! probe is an axiom of the system; its hypotheses (validity, symmetry,
//! equidistance) are checked, never re-proven.

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::polytope::{
    p1_square, p2_polytope, rat_to_float, FiberLabel, InteriorError, Location, RationalPolytope,
};
use crate::scalar::Real;
use crate::sphere::rotation_about_e1;

pub const MAX_SNAP_DENOMINATOR: i64 = 1_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum ProbeError {
    #[error("direction ({0}, {1}) is not primitive", dir[0], dir[1])]
    NotPrimitive { dir: [i64; 2] },
    #[error("probe base does not lie on the polytope boundary")]
    BaseNotOnBoundary,
    #[error("probe base lies on a vertex")]
    BaseOnVertex,
    #[error("direction is not integrally transverse to the entry facet (pairing {pairing})")]
    NotTransverse { pairing: i64 },
    #[error("direction points out of the polytope at the base")]
    DirectionNotInward,
    #[error("direction never exits the polytope")]
    UnboundedDirection,
    #[error("cannot snap {value} to a rational with denominator <= {max_den}")]
    SnapFailed { value: f64, max_den: i64 },
    #[error(transparent)]
    LabelNotInterior(#[from] InteriorError),
    #[error("parameter out of range: {reason}")]
    ParameterOutOfRange { reason: String },
    #[error("probe hypothesis failed: {reason}")]
    HypothesisFailed { reason: String },
}

/// Best rational approximation with bounded denominator, computed by exact
/// continued fractions on the binary representation of the float.
pub fn snap_to_rational(x: f64, max_den: i64) -> Result<Rational64, ProbeError> {
    let fail = || ProbeError::SnapFailed {
        value: x,
        max_den,
    };
    if !x.is_finite() || max_den < 1 {
        return Err(fail());
    }
    if x == 0.0 {
        return Ok(Rational64::from_integer(0));
    }
    let negative = x < 0.0;
    // Exact fraction n/d for |x|.
    let (mantissa, exponent, _) = num_traits::Float::integer_decode(x.abs());
    let mut n: i128 = mantissa as i128;
    let mut d: i128 = 1;
    if exponent >= 0 {
        n = n.checked_shl(exponent as u32).ok_or_else(fail)?;
    } else {
        let shift = (-exponent) as u32;
        if shift > 120 {
            // Far below any representable snap target; treat as zero.
            return Ok(Rational64::from_integer(0));
        }
        d <<= shift;
    }
    let bound = max_den as i128;

    // Continued-fraction convergents h/k of n/d with k <= bound, plus the
    // best semiconvergent at the cut.
    let (mut h_pp, mut k_pp): (i128, i128) = (0, 1);
    let (mut h_p, mut k_p): (i128, i128) = (1, 0);
    let (orig_n, orig_d) = (n, d);
    let err_of = |h: i128, k: i128| -> i128 { (orig_n * k - h * orig_d).abs() };
    loop {
        let a = n / d;
        let r = n % d;
        let h = a * h_p + h_pp;
        let k = a * k_p + k_pp;
        if k > bound {
            let best = if k_p > 0 {
                let a_cut = (bound - k_pp) / k_p;
                if a_cut >= 1 {
                    let hs = a_cut * h_p + h_pp;
                    let ks = a_cut * k_p + k_pp;
                    // Compare errors |x - hs/ks| vs |x - h_p/k_p| exactly.
                    if err_of(hs, ks) * k_p < err_of(h_p, k_p) * ks {
                        (hs, ks)
                    } else {
                        (h_p, k_p)
                    }
                } else {
                    (h_p, k_p)
                }
            } else {
                return Err(fail());
            };
            let (num, den) = best;
            let num = i64::try_from(num).map_err(|_| fail())?;
            let den = i64::try_from(den).map_err(|_| fail())?;
            let q = Rational64::new(num, den);
            return Ok(if negative { -q } else { q });
        }
        h_pp = h_p;
        k_pp = k_p;
        h_p = h;
        k_p = k;
        if r == 0 {
            break;
        }
        n = d;
        d = r;
    }
    let num = i64::try_from(h_p).map_err(|_| fail())?;
    let den = i64::try_from(k_p).map_err(|_| fail())?;
    let q = Rational64::new(num, den);
    Ok(if negative { -q } else { q })
}

/// A validated probe: a directed rational segment from the interior of one
/// facet, integrally transverse to it, ending on the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub polytope: RationalPolytope,
    pub base: [Rational64; 2],
    pub direction: [i64; 2],
    pub endpoint: [Rational64; 2],
    pub symmetric: bool,
    /// Euclidean distance between the floating base handed in and the
    /// rational base actually used.
    pub snap_distance: f64,
}

impl Probe {
    /// Exit parameter: the endpoint is base + length * direction.
    pub fn length(&self) -> Rational64 {
        if self.direction[0] != 0 {
            (self.endpoint[0] - self.base[0]) / Rational64::from_integer(self.direction[0])
        } else {
            (self.endpoint[1] - self.base[1]) / Rational64::from_integer(self.direction[1])
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "polytope": self.polytope.to_json(),
            "base": [self.base[0].to_string(), self.base[1].to_string()],
            "direction": self.direction,
            "endpoint": [self.endpoint[0].to_string(), self.endpoint[1].to_string()],
            "symmetric": self.symmetric,
            "snap_distance": self.snap_distance,
        })
    }
}

/// Validate a probe with an exact rational base.
pub fn validate_probe_exact(
    polytope: &RationalPolytope,
    base: [Rational64; 2],
    dir: [i64; 2],
    snap_distance: f64,
) -> Result<Probe, ProbeError> {
    if dir[0].abs().gcd(&dir[1].abs()) != 1 {
        return Err(ProbeError::NotPrimitive { dir });
    }
    if polytope.locate_exact(base) == Location::Outside {
        return Err(ProbeError::BaseNotOnBoundary);
    }
    let active = polytope.active_facets(base);
    match active.len() {
        0 => return Err(ProbeError::BaseNotOnBoundary),
        1 => {}
        _ => return Err(ProbeError::BaseOnVertex),
    }
    let entry = &polytope.halfspaces()[active[0]];
    let pairing = entry.normal[0] * dir[0] + entry.normal[1] * dir[1];
    if pairing.abs() != 1 {
        return Err(ProbeError::NotTransverse { pairing });
    }
    if pairing != 1 {
        return Err(ProbeError::DirectionNotInward);
    }

    // Exit parameter: smallest positive t with base + t*dir on the boundary.
    let mut exit_t: Option<Rational64> = None;
    for hs in polytope.halfspaces() {
        let along = hs.normal[0] * dir[0] + hs.normal[1] * dir[1];
        if along >= 0 {
            continue;
        }
        let t = hs.eval_exact(base) / Rational64::from_integer(-along);
        exit_t = Some(match exit_t {
            Some(cur) if cur <= t => cur,
            _ => t,
        });
    }
    let exit_t = exit_t.ok_or(ProbeError::UnboundedDirection)?;
    let endpoint = [
        base[0] + exit_t * Rational64::from_integer(dir[0]),
        base[1] + exit_t * Rational64::from_integer(dir[1]),
    ];
    let exit_active = polytope.active_facets(endpoint);
    let symmetric = match exit_active.len() {
        1 => {
            let exit = &polytope.halfspaces()[exit_active[0]];
            (exit.normal[0] * dir[0] + exit.normal[1] * dir[1]).abs() == 1
        }
        // Endpoint on a vertex is not in the interior of a facet.
        _ => false,
    };
    Ok(Probe {
        polytope: polytope.clone(),
        base,
        direction: dir,
        endpoint,
        symmetric,
        snap_distance,
    })
}

/// Validate a probe from a floating base, snapping it to rationals first.
pub fn validate_probe<F: Real>(
    polytope: &RationalPolytope,
    base: [F; 2],
    dir: [i64; 2],
) -> Result<Probe, ProbeError> {
    let bx = snap_to_rational(base[0].as_f64(), MAX_SNAP_DENOMINATOR)?;
    let by = snap_to_rational(base[1].as_f64(), MAX_SNAP_DENOMINATOR)?;
    let dx = rat_to_float::<f64>(bx) - base[0].as_f64();
    let dy = rat_to_float::<f64>(by) - base[1].as_f64();
    let snap_distance = (dx * dx + dy * dy).sqrt();
    validate_probe_exact(polytope, [bx, by], dir, snap_distance)
}

/// The vertical probe {p = a} in the triangle, from the slanted facet up to
/// the roof q = 1. Valid and symmetric for every a in (-1,1) \ {0}.
pub fn sigma_probe<F: Real>(a: F) -> Result<Probe, ProbeError> {
    let af = a.as_f64();
    if !af.is_finite() || af.abs() >= 1.0 || af == 0.0 {
        return Err(ProbeError::ParameterOutOfRange {
            reason: format!("probe level a = {af} must satisfy -1 < a < 1, a != 0"),
        });
    }
    let a_rat = snap_to_rational(af, MAX_SNAP_DENOMINATOR)?;
    let snap = (rat_to_float::<f64>(a_rat) - af).abs();
    validate_probe_exact(&p2_polytope(), [a_rat, a_rat.abs()], [0, 1], snap)
}

/// The level q' = 1 - q + |a| paired with q along the probe {p = a}: the two
/// levels sit at equal distance from the probe's endpoints {q = |a|} and
/// {q = 1}. An involution of (|a|, 1) fixing (1 + |a|)/2.
pub fn probe_pair<F: Real>(a: F, q: F) -> Result<F, ProbeError> {
    if a == F::zero() {
        return Err(ProbeError::ParameterOutOfRange {
            reason: "probe level a must be nonzero".into(),
        });
    }
    if !(a.abs() < q && q < F::one()) {
        return Err(ProbeError::ParameterOutOfRange {
            reason: format!(
                "need |a| < q < 1, got a = {}, q = {}",
                a.as_f64(),
                q.as_f64()
            ),
        });
    }
    Ok(F::one() - q + a.abs())
}

/// The three Hamiltonian-isotopy moves on fiber labels of the square, each
/// realized by a symmetric probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FiberMove {
    ReflectXi,
    ReflectZeta,
    Swap,
}

impl FiberMove {
    fn apply_rational(self, label: [Rational64; 2]) -> [Rational64; 2] {
        match self {
            FiberMove::ReflectXi => [-label[0], label[1]],
            FiberMove::ReflectZeta => [label[0], -label[1]],
            FiberMove::Swap => [label[1], label[0]],
        }
    }

    fn apply_float<F: Real>(self, label: FiberLabel<F>) -> FiberLabel<F> {
        match self {
            FiberMove::ReflectXi => FiberLabel::new(-label.xi, label.zeta),
            FiberMove::ReflectZeta => FiberLabel::new(label.xi, -label.zeta),
            FiberMove::Swap => FiberLabel::new(label.zeta, label.xi),
        }
    }
}

/// Apply a fiber move, constructing and validating the symmetric probe of
/// the square that realizes it and checking the equidistance hypothesis on
/// the snapped label pair. Identity instances (a label fixed by its move)
/// return immediately: no isotopy is needed.
pub fn apply_fiber_move<F: Real>(
    label: FiberLabel<F>,
    mv: FiberMove,
) -> Result<FiberLabel<F>, ProbeError> {
    let label = label.require_interior()?;
    let image = mv.apply_float(label);
    if image == label {
        return Ok(image);
    }

    let half = Rational64::new(1, 2);
    let xs = snap_to_rational(label.xi.as_f64(), MAX_SNAP_DENOMINATOR)?;
    let zs = snap_to_rational(label.zeta.as_f64(), MAX_SNAP_DENOMINATOR)?;
    let snapped = [xs, zs];
    let snap_distance = {
        let dx = rat_to_float::<f64>(xs) - label.xi.as_f64();
        let dy = rat_to_float::<f64>(zs) - label.zeta.as_f64();
        (dx * dx + dy * dy).sqrt()
    };
    let (base, dir) = match mv {
        FiberMove::ReflectXi => ([-half, zs], [1i64, 0i64]),
        FiberMove::ReflectZeta => ([xs, -half], [0, 1]),
        FiberMove::Swap => {
            let diag = xs + zs;
            if diag > Rational64::from_integer(0) {
                ([diag - half, half], [1, -1])
            } else {
                // diag == 0 puts the base on a vertex; validation rejects it.
                ([-half, diag + half], [1, -1])
            }
        }
    };
    let probe = validate_probe_exact(&p1_square(), base, dir, snap_distance)?;
    if !probe.symmetric {
        return Err(ProbeError::HypothesisFailed {
            reason: "realizing probe is not symmetric".into(),
        });
    }
    check_equidistant_on_probe(&probe, snapped, mv.apply_rational(snapped))?;
    Ok(image)
}

/// Both points must lie strictly inside the probe segment at parameters
/// t and length - t: equidistant from the two endpoints.
fn check_equidistant_on_probe(
    probe: &Probe,
    a: [Rational64; 2],
    b: [Rational64; 2],
) -> Result<(), ProbeError> {
    let param_of = |pt: [Rational64; 2]| -> Result<Rational64, ProbeError> {
        let t = if probe.direction[0] != 0 {
            (pt[0] - probe.base[0]) / Rational64::from_integer(probe.direction[0])
        } else {
            (pt[1] - probe.base[1]) / Rational64::from_integer(probe.direction[1])
        };
        let on_line = pt[0] == probe.base[0] + t * Rational64::from_integer(probe.direction[0])
            && pt[1] == probe.base[1] + t * Rational64::from_integer(probe.direction[1]);
        if !on_line {
            return Err(ProbeError::HypothesisFailed {
                reason: "snapped label is not on the probe line".into(),
            });
        }
        Ok(t)
    };
    let t_a = param_of(a)?;
    let t_b = param_of(b)?;
    let len = probe.length();
    let zero = Rational64::from_integer(0);
    if !(t_a > zero && t_a < len && t_b > zero && t_b < len) {
        return Err(ProbeError::HypothesisFailed {
            reason: "snapped label is not strictly inside the probe".into(),
        });
    }
    if t_a + t_b != len {
        return Err(ProbeError::HypothesisFailed {
            reason: "label pair is not equidistant from the probe endpoints".into(),
        });
    }
    Ok(())
}

/// Sampled stabilizer search for the circle action rotating both factors
/// around e1 on the level set Z = { v1 + w1 = 2a }. Returns true when no
/// sampled (point, angle) pair is fixed, which is the case for every
/// admissible a: a fixed point would force both latitude circles to
/// degenerate, possible only at a in {-1, 0, 1}.
pub fn free_action_check(a: f64, samples: usize, seed: u64) -> Result<bool, ProbeError> {
    if a == 0.0 || a.abs() >= 1.0 {
        return Err(ProbeError::ParameterOutOfRange {
            reason: format!("level a = {a} must satisfy -1 < a < 1, a != 0"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = std::f64::consts::TAU;
    let v1_lo = (2.0 * a - 1.0).max(-1.0);
    let v1_hi = (2.0 * a + 1.0).min(1.0);
    for _ in 0..samples {
        let v1 = rng.random_range(v1_lo..v1_hi);
        let w1 = 2.0 * a - v1;
        let alpha = rng.random_range(0.0..tau);
        let beta = rng.random_range(0.0..tau);
        let rho_v = (1.0 - v1 * v1).max(0.0).sqrt();
        let rho_w = (1.0 - w1 * w1).max(0.0).sqrt();
        let v = crate::sphere::Vec3::new(v1, rho_v * alpha.cos(), rho_v * alpha.sin());
        let w = crate::sphere::Vec3::new(w1, rho_w * beta.cos(), rho_w * beta.sin());
        let theta = rng.random_range(0.0..tau);
        if theta < 1e-7 || tau - theta < 1e-7 {
            continue;
        }
        let rot = rotation_about_e1(theta);
        let displacement_sq = {
            let dv = rot.apply(v) - v;
            let dw = rot.apply(w) - w;
            dv.dot(dv) + dw.dot(dw)
        };
        if displacement_sq.sqrt() <= 1e-14 {
            return Ok(false);
        }
    }
    Ok(true)
}
