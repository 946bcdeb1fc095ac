//! lagtori decides, for an interior point of the moment polytope of the
//! resolved toric degeneration of S^2 x S^2, which standard toric fiber the
//! Lagrangian torus over it is Hamiltonian isotopic to, and verifies every
//! formula that decision rests on numerically.
//!
//! The core is generic over the floating-point scalar through
//! [`scalar::Real`]; the aliases at the crate root fix f64, which is what
//! the CLI and the verification suite use.

pub mod classify;
pub mod disk;
pub mod germ;
pub mod polytope;
pub mod probe;
pub mod reduction;
pub mod report;
pub mod scalar;
pub mod sphere;
pub mod suite;
pub mod torus;

/// f64 alias of [`sphere::Vec3`].
pub type Vec3 = sphere::Vec3<f64>;
/// f64 alias of [`sphere::Mat3`].
pub type Mat3 = sphere::Mat3<f64>;
/// f64 alias of [`sphere::SpherePoint`].
pub type SpherePoint = sphere::SpherePoint<f64>;
/// f64 alias of [`sphere::ProductPoint`].
pub type ProductPoint = sphere::ProductPoint<f64>;
/// f64 alias of [`sphere::TangentPair`].
pub type TangentPair = sphere::TangentPair<f64>;
/// f64 alias of [`polytope::XyCoord`].
pub type XyCoord = polytope::XyCoord<f64>;
/// f64 alias of [`polytope::PqCoord`].
pub type PqCoord = polytope::PqCoord<f64>;
/// f64 alias of [`polytope::FiberLabel`].
pub type FiberLabel = polytope::FiberLabel<f64>;
/// f64 alias of [`torus::TorusParam`].
pub type TorusParam = torus::TorusParam<f64>;
/// f64 alias of [`disk::DiskPoint`].
pub type DiskPoint = disk::DiskPoint<f64>;
/// f64 alias of [`disk::CurveSample`].
pub type CurveSample = disk::CurveSample<f64>;
/// f64 alias of [`classify::ClassificationOutcome`].
pub type ClassificationOutcome = classify::ClassificationOutcome<f64>;
/// f64 alias of [`germ::GermModel`].
pub type GermModel = germ::GermModel<f64>;
/// f64 alias of [`germ::Energy`].
pub type Energy = germ::Energy<f64>;
