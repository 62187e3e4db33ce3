//! Exact-arithmetic construction and verification of extended and
//! superextended Poincare algebras and the homogeneous quaternionic
//! (pseudo-Kahler) geometry they generate.
//!
//! The crate builds, entirely over the rationals (and Gaussian rationals
//! for the twistor layer):
//!
//! * explicit matrix representations of Clifford algebras `Cl(p,q)` and
//!   their even modules ([`clifford`]),
//! * the space of spin-equivariant maps `Pi` on the exterior or symmetric
//!   square of a module `W` and the graded Lie algebras
//!   `g(Pi) = R D + o(V) + V + W` they define ([`epa`]),
//! * the canonical bilinear form `b`, its kernel/decomposition/classification
//!   invariants ([`epa`]),
//! * the isotropy data, invariant metric, quaternionic frame, Nomizu maps
//!   (closed form and Koszul solve), curvature and the Einstein check
//!   ([`homgeom`]),
//! * the algebraic twistor layer with its contact criterion ([`twistor`]),
//! * the super variants of all of the above ([`superbridge`]),
//! * JSON document and report formats plus the CLI plumbing ([`doc`],
//!   [`report`], [`cli`]).
//!
//! Every check is exact: a property holds iff its residual is literally
//! zero, no tolerances anywhere.

pub mod scalar;
pub mod matrix;
pub mod clifford;
pub mod epa;
pub mod homgeom;
pub mod twistor;
pub mod superbridge;
pub mod doc;
pub mod report;
pub mod cli;

pub use clifford::{BlockLabel, Signature};
pub use epa::Variant;
