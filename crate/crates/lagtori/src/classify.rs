//! The classification map: which standard toric fiber the torus over an
//! interior polytope point is Hamiltonian isotopic to, in both coordinate
//! charts, plus the independent route through the disk reduction and probe
//! moves used to cross-check it.

use serde::Serialize;
use thiserror::Error;

use crate::polytope::{case_region, CaseRegion, FiberLabel, InteriorError, PqCoord, XyCoord};
use crate::probe::{apply_fiber_move, probe_pair, FiberMove, ProbeError};
use crate::reduction::{fiber_of_circle, matching_radius, ReductionError};
use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum ClassifyError {
    #[error(transparent)]
    NotInterior(#[from] InteriorError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Probe(#[from] ProbeError),
    #[error("the reduction route requires p != 0")]
    ZeroP,
    #[error("paired level (p, q') = ({p}, {q_paired}) did not land in the small-|p| case")]
    PairedNotCase1 { p: f64, q_paired: f64 },
}

/// Which closed-form branch produced a fiber answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Case1Pos,
    Case1Neg,
    Case2Pos,
    Case2Neg,
}

/// Why a diagonal input is not Hamiltonian isotopic to a product torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NonProductReason {
    /// Decided here, by the displacement-energy germ comparison.
    GermArgument,
    /// 0 < q <= 1/2: nondisplaceability is cited, not computed.
    #[serde(rename = "CitedFOOO")]
    CitedFooo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum ClassificationOutcome<F> {
    StandardFiber { fiber: FiberLabel<F>, branch: Branch },
    NonProduct { reason: NonProductReason },
}

impl<F: Real> ClassificationOutcome<F> {
    pub fn fiber(&self) -> Option<FiberLabel<F>> {
        match self {
            ClassificationOutcome::StandardFiber { fiber, .. } => Some(*fiber),
            ClassificationOutcome::NonProduct { .. } => None,
        }
    }
}

/// Classify an interior (p, q): for p > 0 the fiber is T(q-1/2, q-p-1/2),
/// for p < 0 it is T(q+p-1/2, q-1/2), and p = 0 is not a product torus.
pub fn classify_pq<F: Real>(pq: PqCoord<F>) -> Result<ClassificationOutcome<F>, ClassifyError> {
    let pq = pq.require_interior()?;
    let half = F::of(0.5);
    let region = case_region(pq);
    let zero = F::zero();
    Ok(if pq.p > zero {
        ClassificationOutcome::StandardFiber {
            fiber: FiberLabel::new(pq.q - half, pq.q - pq.p - half),
            branch: if region == CaseRegion::Case1 {
                Branch::Case1Pos
            } else {
                Branch::Case2Pos
            },
        }
    } else if pq.p < zero {
        ClassificationOutcome::StandardFiber {
            fiber: FiberLabel::new(pq.q + pq.p - half, pq.q - half),
            branch: if region == CaseRegion::Case1 {
                Branch::Case1Neg
            } else {
                Branch::Case2Neg
            },
        }
    } else {
        ClassificationOutcome::NonProduct {
            reason: if pq.q > half {
                NonProductReason::GermArgument
            } else {
                NonProductReason::CitedFooo
            },
        }
    })
}

/// Classify in the original (x, y) chart. Delegates through the coordinate
/// change, which reproduces the chart formulas T(1/2-y, 3/2-2y-x) for
/// 1-y < x < 2-2y and T(x-1/2, 1/2-y) for 0 < x < 1-y exactly.
pub fn classify_xy<F: Real>(xy: XyCoord<F>) -> Result<ClassificationOutcome<F>, ClassifyError> {
    classify_pq(xy.to_pq())
}

/// The independent classification route: match the reduced curve's enclosed
/// area with a circle in the small-|p| case, and compose the probe pairing
/// with the three fiber moves in the large-|p| case. Must agree with
/// [`classify_pq`]; requires p != 0.
pub fn classify_via_reduction<F: Real>(pq: PqCoord<F>) -> Result<FiberLabel<F>, ClassifyError> {
    let pq = pq.require_interior()?;
    match case_region(pq) {
        CaseRegion::Diagonal => Err(ClassifyError::ZeroP),
        CaseRegion::Case1 => Ok(fiber_of_circle(matching_radius(pq)?, pq.p)?),
        CaseRegion::Case2 => {
            let q_paired = probe_pair(pq.p, pq.q)?;
            let paired = PqCoord::new(pq.p, q_paired);
            if case_region(paired) != CaseRegion::Case1 {
                return Err(ClassifyError::PairedNotCase1 {
                    p: pq.p.as_f64(),
                    q_paired: q_paired.as_f64(),
                });
            }
            let fiber = fiber_of_circle(matching_radius(paired)?, pq.p)?;
            let fiber = apply_fiber_move(fiber, FiberMove::ReflectXi)?;
            let fiber = apply_fiber_move(fiber, FiberMove::ReflectZeta)?;
            Ok(apply_fiber_move(fiber, FiberMove::Swap)?)
        }
        // require_interior has already excluded these.
        CaseRegion::Boundary | CaseRegion::Outside => unreachable!("interior checked above"),
    }
}
