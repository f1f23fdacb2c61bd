//! Numerical toolkit for semigroups of composition operators on the Hardy
//! spaces `H^p` of the upper half-plane.
//!
//! The crate is organised bottom-up:
//!
//! - [`maps`]: evaluable holomorphic maps and the catalog of concrete self-maps.
//! - [`cayley`]: transfer between the half-plane and the disc, sectors and
//!   non-tangential approach paths.
//! - [`quad`]: adaptive Gauss-Kronrod quadrature used by the Hardy numerics.
//! - [`hardy`]: line means, Hardy norms, membership, the sharp growth bound and
//!   the reproducing kernel.
//! - [`semigroup`]: semigroup families, generators, Denjoy-Wolff points, angular
//!   derivatives at infinity and model (Koenigs / Abel) functions.
//! - [`operators`]: the induced composition operators, their norms, strong
//!   continuity probes and the generator `f -> G f'`.
//! - [`spectrum`]: the point spectrum of that generator.
//! - [`cli`], [`report`] and [`suite`]: the command-line front end, canonical JSON
//!   and CSV output, and the acceptance suite.

pub mod cayley;
pub mod cli;
pub mod error;
pub mod hardy;
pub mod maps;
pub mod operators;
pub mod quad;
pub mod report;
pub mod sampling;
pub mod semigroup;
pub mod spectrum;
pub mod suite;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

pub use hardy::{HardyFunction, Membership, NormEstimate, NormVerdict};
pub use maps::{AnalyticMap, Domain, Params};
pub use semigroup::{ExtendedPoint, GeneratorInfo, ModelFunction, SemigroupFamily};


/// The imaginary unit.
pub const I: C64 = C64::new(0.0, 1.0);

/// Chordal distance on the Riemann sphere between two finite points.
pub fn chordal(z: C64, w: C64) -> f64 {
    2.0 * (z - w).norm() / (1.0f64.hypot(z.norm()) * 1.0f64.hypot(w.norm()))
}

/// Chordal distance from a finite point to infinity.
pub fn chordal_to_infinity(z: C64) -> f64 {
    2.0 / 1.0f64.hypot(z.norm())
}
