//! Nilpotent matrix Lie algebras g ⊆ ut(N, F_p) and their groups G = exp(g).
//!
//! Elements of g are addressed by coordinates on the canonical basis;
//! elements of G by the coordinates of their logarithm. Both use the same
//! base-p code, which fixes the enumeration order everywhere in the crate.

mod algebra;
mod matrix;
mod subalgebra;

pub use algebra::{build_algebra, center, flat_index, AlgebraDump, AlgebraId, AlgebraSpec, LieAlgebra};
pub use matrix::{adjoint, bracket, exp, flat_positions, log, GroupElement, NilMatrix};
pub use subalgebra::{codim_one_subalgebras, ideal_chain, ideal_chain_spaces, DirectSum, SubalgebraEmbedding};
