//! Exact p-adic toolkit for rank-one differential and q-difference operators
//! over the Amice ring.
//!
//! The crate is organised bottom-up:
//!
//! - [`padic`] and [`norm`]: capped-precision `Q_p` arithmetic and exact norms.
//! - [`witt`]: finite p-typical Witt vectors and ghost coordinates.
//! - [`amice`]: Laurent windows, Gauss norms, twisted derivations, q-numerics.
//! - [`radius`]: iterate recursions and radius of convergence reports.
//! - [`motzkin`]: the factorisation `a = λ T^N a^- a^+` of window units.
//! - [`solvability`]: Witt extraction, solvability criteria, Artin–Hasse
//!   exponentials, canonical forms and q-deformation.
//! - [`lemmas`]: brute-force oracle suites for the numerical lemmas.
//! - [`cli`]: the `amice` command line and its JSON formats.

pub mod amice;
pub mod cli;
pub mod error;
pub mod json;
pub mod lemmas;
pub mod motzkin;
pub mod norm;
pub mod padic;
pub mod radius;
pub mod solvability;
pub mod witt;

pub use error::{Error, Result};
pub use norm::{Exponent, NormValue};
pub use padic::PAdic;
