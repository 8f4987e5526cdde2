//! Exact formal inversion of maps `F(z) = z - H(z)` over the rationals.
//!
//! The crate is organized bottom-up:
//!
//! * [`series`]: sparse truncated multivariate power series, formal maps,
//!   Jacobians and the small amount of Laurent machinery residues need.
//! * [`trees`]: rooted trees up to isomorphism, their automorphism counts,
//!   labeled tree polynomials and strict order polynomials.
//! * [`inversion`]: fixed-point, recurrent, homogeneous (B-form),
//!   Abhyankar-Gurjar, tree-expansion, Jacobi and Lagrange inversion, plus a
//!   cross-checker.
//! * [`flow`]: the deformation `z - tH`, its inverse `z + tN_t`, the formal
//!   flow, integer powers and the identity checks built on them.
//!
//! All arithmetic is exact; there is no floating point anywhere in the crate.

pub mod error;
pub mod flow;
pub mod inversion;
pub mod rat;
pub mod report;
pub mod series;
pub mod tpoly;
pub mod trees;

pub use error::{Error, Result};
pub use rat::Rat;
pub use report::{CheckStatus, IdentityCheck, Report};
pub use series::{Exponent, LaurentExpr, MSeries, MapF, PolyMap, SeriesMatrix};
pub use tpoly::TPoly;
pub use trees::RootedTree;
