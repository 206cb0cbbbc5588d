//! Exact orbit-method computations for unipotent groups over prime fields.
//!
//! Irreducible representations of `G = exp(g)`, `g ⊆ ut(N, F_p)`, are
//! indexed by coadjoint orbits in `g*`. This crate enumerates those orbits,
//! builds polarizations, evaluates characters exactly in Q(ζ_p), and computes
//! restriction, induction and tensor multiplicities from orbit geometry.
//! The [`repox`] module rebuilds the same quantities from explicit induced
//! representation matrices and serves as an independent check.

pub mod characters;
pub mod cli;
pub mod coadjoint;
pub mod error;
pub mod field;
pub mod linalg;
pub mod multiplicity;
pub mod nilalg;
pub mod polarization;
pub mod repox;

pub use error::{Error, Result};
