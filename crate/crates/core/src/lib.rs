//! Spectral sequences of filtered cochain complexes over Q, multiplicative
//! structure on pages, graded Lefschetz structures, and a step-by-step
//! certifier for degeneration of bidegree `(r, 1-r)` derivations on polarized
//! bigraded algebras.
//!
//! Everything is exact: scalars are arbitrary-precision rationals and every
//! subspace carries a canonical echelon basis, so equal subspaces compare equal.

pub mod error;
pub mod exactla;
pub mod filtered;
pub mod fuzz;
pub mod geometry;
pub mod io;
pub mod lefschetz;
pub mod multalg;
pub mod spectral;

pub use error::{Error, ErrorKind, Result};
pub use exactla::{Matrix, Scalar, Subquotient, Subspace};
pub use filtered::{CochainComplex, FilteredComplex, Filtration};
pub use geometry::{HodgeDiamond, ModelKind, ObstructionDatum, VarietyModel};
pub use lefschetz::{Certificate, PolarizedAlgebra, Verdict};
pub use multalg::{BigradedAlgebra, Derivation};
pub use spectral::{Page, SpectralSequence};

/// Bigrading index `(p, q)`.
pub type Bidegree = (i64, i64);
