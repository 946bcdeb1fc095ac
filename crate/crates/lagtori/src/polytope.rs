//! The two moment polytopes, the (x,y) <-> (p,q) coordinate change,
//! interior membership, and case-region dispatch.
//!
//! P1 is the standard square [-1/2, 1/2]^2; P2 is the triangle
//! { -q <= p <= q, q <= 1 } carrying the fibers to be classified. All
//! section-level formulas are written in (p,q), so that chart is canonical
//! internally and (x,y) is accepted at the API edge only.

use num_integer::Integer;
use num_rational::Rational64;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::scalar::Real;

/// Moment coordinates on P2 in its original chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XyCoord<F> {
    pub x: F,
    pub y: F,
}

/// Moment coordinates on P2 in the shifted chart p = x+y-1, q = 1-y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PqCoord<F> {
    pub p: F,
    pub q: F,
}

/// An interior point of P1, labelling a standard toric fiber T(xi, zeta).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiberLabel<F> {
    pub xi: F,
    pub zeta: F,
}

impl<F: Real> XyCoord<F> {
    pub fn new(x: F, y: F) -> Self {
        Self { x, y }
    }

    pub fn to_pq(self) -> PqCoord<F> {
        PqCoord {
            p: self.x + self.y - F::one(),
            q: F::one() - self.y,
        }
    }
}

impl<F: Real> PqCoord<F> {
    pub fn new(p: F, q: F) -> Self {
        Self { p, q }
    }

    pub fn to_xy(self) -> XyCoord<F> {
        XyCoord {
            x: self.p + self.q,
            y: F::one() - self.q,
        }
    }

    /// Requires strict interior of P2, away from every facet by the
    /// boundary tolerance.
    pub fn require_interior(self) -> Result<Self, InteriorError> {
        match case_region(self) {
            CaseRegion::Boundary => Err(InteriorError::Boundary {
                facet: nearest_facet_constraint(&p2_polytope(), [self.p, self.q]),
            }),
            CaseRegion::Outside => Err(InteriorError::Outside {
                facet: nearest_facet_constraint(&p2_polytope(), [self.p, self.q]),
            }),
            _ => Ok(self),
        }
    }
}

impl<F: Real> FiberLabel<F> {
    pub fn new(xi: F, zeta: F) -> Self {
        Self { xi, zeta }
    }

    pub fn is_interior(&self) -> bool {
        p1_square().locate([self.xi, self.zeta], default_boundary_tol::<F>()) == Location::Interior
    }

    pub fn require_interior(self) -> Result<Self, InteriorError> {
        if self.is_interior() {
            Ok(self)
        } else {
            Err(InteriorError::LabelNotInterior {
                xi: self.xi.as_f64(),
                zeta: self.zeta.as_f64(),
            })
        }
    }
}

/// Rejection for operations that are only defined on interior points.
#[derive(Debug, Error, PartialEq)]
pub enum InteriorError {
    #[error("point lies on the polytope boundary (facet {facet})")]
    Boundary { facet: String },
    #[error("point lies outside the polytope (violates {facet})")]
    Outside { facet: String },
    #[error("fiber label ({xi}, {zeta}) is not interior to the square")]
    LabelNotInterior { xi: f64, zeta: f64 },
}

/// Points within this distance of a facet classify as boundary.
pub fn default_boundary_tol<F: Real>() -> F {
    F::of(1e-12).max(F::epsilon() * F::of(100.0))
}

/// One halfspace constraint <normal, x> >= offset with a primitive integer
/// normal and rational offset.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: [i64; 2],
    pub offset: Rational64,
}

impl Halfspace {
    fn new(normal: [i64; 2], offset: Rational64) -> Self {
        let g = normal[0].abs().gcd(&normal[1].abs());
        assert_eq!(g, 1, "halfspace normal must be primitive");
        Self { normal, offset }
    }

    /// Human-readable constraint, for diagnostics.
    pub fn constraint_string(&self) -> String {
        format!(
            "{}*u + {}*v >= {}",
            self.normal[0], self.normal[1], self.offset
        )
    }

    pub fn eval_exact(&self, point: [Rational64; 2]) -> Rational64 {
        point[0] * Rational64::from_integer(self.normal[0])
            + point[1] * Rational64::from_integer(self.normal[1])
            - self.offset
    }

    fn eval_float<F: Real>(&self, point: [F; 2]) -> F {
        let n0 = F::of(self.normal[0] as f64);
        let n1 = F::of(self.normal[1] as f64);
        point[0] * n0 + point[1] * n1 - rat_to_float(self.offset)
    }

    fn normal_len<F: Real>(&self) -> F {
        let n0 = F::of(self.normal[0] as f64);
        let n1 = F::of(self.normal[1] as f64);
        (n0 * n0 + n1 * n1).sqrt()
    }
}

pub fn rat_to_float<F: Real>(r: Rational64) -> F {
    F::of(*r.numer() as f64) / F::of(*r.denom() as f64)
}

/// Where a point sits relative to a polytope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Location {
    Interior,
    Boundary,
    Outside,
}

/// A bounded 2-d rational polytope as an intersection of halfspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalPolytope {
    halfspaces: Vec<Halfspace>,
}

impl RationalPolytope {
    pub fn new(halfspaces: Vec<Halfspace>) -> Self {
        let poly = Self { halfspaces };
        assert!(!poly.vertices().is_empty(), "polytope must be nonempty");
        poly
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    /// Classify a floating point with a boundary band of width `tol`
    /// (Euclidean distance to the facet line).
    pub fn locate<F: Real>(&self, point: [F; 2], tol: F) -> Location {
        let mut on_boundary = false;
        for hs in &self.halfspaces {
            let dist = hs.eval_float(point) / hs.normal_len();
            if dist < -tol {
                return Location::Outside;
            }
            if dist <= tol {
                on_boundary = true;
            }
        }
        if on_boundary {
            Location::Boundary
        } else {
            Location::Interior
        }
    }

    pub fn locate_exact(&self, point: [Rational64; 2]) -> Location {
        let mut on_boundary = false;
        for hs in &self.halfspaces {
            let v = hs.eval_exact(point);
            if v < Rational64::from_integer(0) {
                return Location::Outside;
            }
            if v == Rational64::from_integer(0) {
                on_boundary = true;
            }
        }
        if on_boundary {
            Location::Boundary
        } else {
            Location::Interior
        }
    }

    /// Indices of facets on which the point lies exactly.
    pub fn active_facets(&self, point: [Rational64; 2]) -> Vec<usize> {
        self.halfspaces
            .iter()
            .enumerate()
            .filter(|(_, hs)| hs.eval_exact(point) == Rational64::from_integer(0))
            .map(|(i, _)| i)
            .collect()
    }

    /// Exact vertex set: pairwise facet-line intersections that satisfy
    /// every constraint, deduplicated and ordered around the centroid.
    pub fn vertices(&self) -> Vec<[Rational64; 2]> {
        let mut verts: Vec<[Rational64; 2]> = Vec::new();
        let n = self.halfspaces.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let a = &self.halfspaces[i];
                let b = &self.halfspaces[j];
                let det = a.normal[0] * b.normal[1] - a.normal[1] * b.normal[0];
                if det == 0 {
                    continue;
                }
                let det = Rational64::from_integer(det);
                let x = (a.offset * Rational64::from_integer(b.normal[1])
                    - b.offset * Rational64::from_integer(a.normal[1]))
                    / det;
                let y = (b.offset * Rational64::from_integer(a.normal[0])
                    - a.offset * Rational64::from_integer(b.normal[0]))
                    / det;
                let cand = [x, y];
                let inside = self
                    .halfspaces
                    .iter()
                    .all(|hs| hs.eval_exact(cand) >= Rational64::from_integer(0));
                if inside && !verts.contains(&cand) {
                    verts.push(cand);
                }
            }
        }
        // Order counterclockwise for drawing.
        if verts.len() > 2 {
            let cx: f64 = verts.iter().map(|v| rat_to_float::<f64>(v[0])).sum::<f64>()
                / verts.len() as f64;
            let cy: f64 = verts.iter().map(|v| rat_to_float::<f64>(v[1])).sum::<f64>()
                / verts.len() as f64;
            verts.sort_by(|a, b| {
                let aa = (rat_to_float::<f64>(a[1]) - cy).atan2(rat_to_float::<f64>(a[0]) - cx);
                let bb = (rat_to_float::<f64>(b[1]) - cy).atan2(rat_to_float::<f64>(b[0]) - cx);
                aa.partial_cmp(&bb).unwrap()
            });
        }
        verts
    }

    /// JSON description {normals, offsets} with offsets as "n/d" strings.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "normals": self.halfspaces.iter().map(|h| h.normal).collect::<Vec<_>>(),
            "offsets": self
                .halfspaces
                .iter()
                .map(|h| h.offset.to_string())
                .collect::<Vec<_>>(),
        })
    }
}

fn nearest_facet_constraint<F: Real>(poly: &RationalPolytope, point: [F; 2]) -> String {
    poly.halfspaces
        .iter()
        .map(|hs| (hs.eval_float(point) / hs.normal_len(), hs))
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        .map(|(_, hs)| hs.constraint_string())
        .unwrap_or_default()
}

/// The square [-1/2, 1/2]^2, moment polytope of the standard torus action.
pub fn p1_square() -> RationalPolytope {
    let half = Rational64::new(-1, 2);
    RationalPolytope::new(vec![
        Halfspace::new([1, 0], half),
        Halfspace::new([-1, 0], half),
        Halfspace::new([0, 1], half),
        Halfspace::new([0, -1], half),
    ])
}

/// The triangle { -q <= p <= q, q <= 1 } in the (p,q) chart.
pub fn p2_polytope() -> RationalPolytope {
    RationalPolytope::new(vec![
        Halfspace::new([1, 1], Rational64::from_integer(0)),
        Halfspace::new([-1, 1], Rational64::from_integer(0)),
        Halfspace::new([0, -1], Rational64::from_integer(-1)),
    ])
}

/// Which classification branch an input (p,q) falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseRegion {
    /// 0 < p^2 < q^4: the area-matching reduction applies directly.
    Case1,
    /// p^2 >= q^4, p != 0: reached through the vertical probe pairing.
    Case2,
    /// p = 0: the non-product diagonal.
    Diagonal,
    Boundary,
    Outside,
}

/// Partition of P2: each interior point gets exactly one of Case1, Case2,
/// Diagonal; everything else is Boundary or Outside.
pub fn case_region<F: Real>(pq: PqCoord<F>) -> CaseRegion {
    match p2_polytope().locate([pq.p, pq.q], default_boundary_tol::<F>()) {
        Location::Outside => CaseRegion::Outside,
        Location::Boundary => CaseRegion::Boundary,
        Location::Interior => {
            if pq.p == F::zero() {
                CaseRegion::Diagonal
            } else if pq.p * pq.p < pq.q.powi(4) {
                CaseRegion::Case1
            } else {
                CaseRegion::Case2
            }
        }
    }
}
