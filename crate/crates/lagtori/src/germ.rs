//! Displacement energies of standard fibers, displacement-energy germs of
//! the diagonal tori L1(0,q) and of diagonal fibers T(xi,xi), and the
//! linear-inequivalence decision separating them.
//!
//! A germ is modelled as a min (or single choice) of affine functions of
//! the cohomology shift delta, possibly restricted away from the line
//! delta_1 = 0. Linear inequivalence is decided on the span dimension of
//! the active gradients: one family is governed by a single function, the
//! other by two independent ones, and no linear isomorphism can match them.

use serde::Serialize;
use thiserror::Error;

use crate::classify::{classify_pq, ClassificationOutcome, ClassifyError};
use crate::polytope::{FiberLabel, InteriorError, PqCoord};
use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum GermError {
    #[error(transparent)]
    NotInterior(#[from] InteriorError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error("germ of the diagonal torus is computed only for 1/2 < q < 1 (got {q})")]
    QOutOfRange { q: f64 },
    #[error("diagonal fiber germ requires 0 < |xi| < 1/2 (got {xi})")]
    XiOutOfRange { xi: f64 },
    #[error("consistency check requires a nonzero first shift")]
    ZeroShift,
    #[error("classification unexpectedly returned a non-product verdict")]
    UnexpectedNonProduct,
    #[error("displacement energy is unbounded where a finite value was needed")]
    UnboundedEnergy,
}

/// Displacement energy: finite, or the unbounded marker of the single
/// nondisplaceable fiber. Never an IEEE infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Energy<F> {
    Finite(F),
    Unbounded,
}

impl<F: Real> Energy<F> {
    pub fn finite(self) -> Result<F, GermError> {
        match self {
            Energy::Finite(e) => Ok(e),
            Energy::Unbounded => Err(GermError::UnboundedEnergy),
        }
    }
}

/// min(1/2 - |xi|, 1/2 - |zeta|) for interior labels other than the
/// monotone center (0,0), which is nondisplaceable.
pub fn displacement_energy<F: Real>(fl: FiberLabel<F>) -> Result<Energy<F>, GermError> {
    let fl = fl.require_interior()?;
    if fl.xi == F::zero() && fl.zeta == F::zero() {
        return Ok(Energy::Unbounded);
    }
    let half = F::of(0.5);
    Ok(Energy::Finite(
        (half - fl.xi.abs()).min(half - fl.zeta.abs()),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffinePiece<F> {
    #[serde(rename = "grad")]
    pub gradient: [F; 2],
    #[serde(rename = "const")]
    pub constant: F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Combiner {
    Min,
    Single,
}

/// Where the germ model is known to be valid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DomainNote {
    All,
    Delta1Nonzero,
}

/// A displacement-energy germ as a combination of affine pieces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GermModel<F> {
    pub pieces: Vec<AffinePiece<F>>,
    pub combiner: Combiner,
    pub domain: DomainNote,
}

impl<F: Real> GermModel<F> {
    pub fn evaluate(&self, d1: F, d2: F) -> F {
        self.pieces
            .iter()
            .map(|piece| piece.constant + piece.gradient[0] * d1 + piece.gradient[1] * d2)
            .fold(F::infinity(), F::min)
    }

    /// Dimension of the span of the piece gradients (0, 1 or 2).
    pub fn gradient_span_dim(&self) -> usize {
        let tol = F::of(1e-12);
        let nonzero: Vec<[F; 2]> = self
            .pieces
            .iter()
            .map(|p| p.gradient)
            .filter(|g| g[0].abs().max(g[1].abs()) > tol)
            .collect();
        if nonzero.is_empty() {
            return 0;
        }
        for (i, a) in nonzero.iter().enumerate() {
            for b in &nonzero[i + 1..] {
                if (a[0] * b[1] - a[1] * b[0]).abs() > tol {
                    return 2;
                }
            }
        }
        1
    }
}

/// Germ of the diagonal torus at level q in (1/2, 1): the single function
/// 1 - q - delta_2, valid off the line delta_1 = 0.
pub fn germ_l_torus<F: Real>(q: F) -> Result<GermModel<F>, GermError> {
    let half = F::of(0.5);
    if !(q > half && q < F::one()) {
        return Err(GermError::QOutOfRange { q: q.as_f64() });
    }
    Ok(GermModel {
        pieces: vec![AffinePiece {
            gradient: [F::zero(), -F::one()],
            constant: F::one() - q,
        }],
        combiner: Combiner::Single,
        domain: DomainNote::Delta1Nonzero,
    })
}

/// Germ of the diagonal standard fiber T(xi, xi), 0 < |xi| < 1/2: the min of
/// two affine functions with independent gradients.
pub fn germ_diagonal_fiber<F: Real>(xi: F) -> Result<GermModel<F>, GermError> {
    let half = F::of(0.5);
    if xi == F::zero() || xi.abs() >= half {
        return Err(GermError::XiOutOfRange { xi: xi.as_f64() });
    }
    let constant = half - xi.abs();
    let sign = if xi > F::zero() { -F::one() } else { F::one() };
    Ok(GermModel {
        pieces: vec![
            AffinePiece {
                gradient: [sign, F::zero()],
                constant,
            },
            AffinePiece {
                gradient: [F::zero(), sign],
                constant,
            },
        ],
        combiner: Combiner::Min,
        domain: DomainNote::All,
    })
}

/// Whether two germ models are related by a linear change of the shift
/// coordinates. Distinct gradient-span dimensions rule it out; otherwise an
/// integer matrix with entries bounded by 3 and nonzero determinant must
/// carry one gradient multiset onto the other.
pub fn germs_linearly_equivalent<F: Real>(g1: &GermModel<F>, g2: &GermModel<F>) -> bool {
    if g1.gradient_span_dim() != g2.gradient_span_dim() {
        return false;
    }
    if g1.combiner != g2.combiner || g1.domain != g2.domain {
        return false;
    }
    if g1.pieces.len() != g2.pieces.len() {
        return false;
    }
    let tol = F::of(1e-12);
    let bound = 3i64;
    for m00 in -bound..=bound {
        for m01 in -bound..=bound {
            for m10 in -bound..=bound {
                for m11 in -bound..=bound {
                    if m00 * m11 - m01 * m10 == 0 {
                        continue;
                    }
                    // Transpose action on gradients: delta |-> M delta pulls a
                    // gradient g back to M^T g.
                    let mapped: Vec<[F; 2]> = g1
                        .pieces
                        .iter()
                        .map(|piece| {
                            let g = piece.gradient;
                            [
                                F::of(m00 as f64) * g[0] + F::of(m10 as f64) * g[1],
                                F::of(m01 as f64) * g[0] + F::of(m11 as f64) * g[1],
                            ]
                        })
                        .collect();
                    if multiset_matches(&mapped, g2, tol) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

fn multiset_matches<F: Real>(mapped: &[[F; 2]], g2: &GermModel<F>, tol: F) -> bool {
    let mut used = vec![false; g2.pieces.len()];
    'outer: for m in mapped {
        for (slot, piece) in g2.pieces.iter().enumerate() {
            if used[slot] {
                continue;
            }
            let g = piece.gradient;
            if (m[0] - g[0]).abs() <= tol && (m[1] - g[1]).abs() <= tol {
                used[slot] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Residual of the derivation behind the diagonal germ: the displacement
/// energy of the classified fiber over (d1, q + d2) must equal 1 - q - d2.
pub fn germ_consistency_residual<F: Real>(q: F, d1: F, d2: F) -> Result<F, GermError> {
    let half = F::of(0.5);
    if !(q > half && q < F::one()) {
        return Err(GermError::QOutOfRange { q: q.as_f64() });
    }
    if d1 == F::zero() {
        return Err(GermError::ZeroShift);
    }
    let outcome = classify_pq(PqCoord::new(d1, q + d2))?;
    let fiber = match outcome {
        ClassificationOutcome::StandardFiber { fiber, .. } => fiber,
        ClassificationOutcome::NonProduct { .. } => return Err(GermError::UnexpectedNonProduct),
    };
    let energy = displacement_energy(fiber)?.finite()?;
    Ok((energy - (F::one() - q - d2)).abs())
}
