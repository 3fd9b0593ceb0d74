//! Exact rational linear algebra: canonical subspace bases, subquotients,
//! induced maps and pairing ranks.

pub mod matrix;
pub mod scalar;
pub mod subspace;

pub use matrix::{vector, Matrix};
pub use scalar::{format_scalar, format_vector, int, parse_scalar, ratio, Scalar};
pub use subspace::{induced_map, pairing_rank, PairingRank, Subquotient, Subspace};

/// Canonical (reduced column echelon) basis of the span of `vectors` in `Q^ambient`.
pub fn canonical_basis(ambient: usize, vectors: &[Vec<Scalar>]) -> crate::Result<Subspace> {
    Subspace::span(ambient, vectors)
}
