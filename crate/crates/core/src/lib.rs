//! Exact Heegaard Floer correction terms for lens spaces and surgeries on
//! L-space knots, the double branched covers `Σ_p` of the knots `K_p`, and
//! concordance obstruction certificates built from them.
//!
//! Everything is exact: d-invariants are [`Rational`] values, labels are
//! residues, and chain complexes live over `F_2[U, U^-1]`.

pub mod alexander;
pub mod brcover;
pub mod cfk;
pub mod error;
pub mod exactnum;
pub mod lens;
pub mod metabolizer;
pub mod obstruction;
pub mod registry;
pub mod surgery;

pub use error::{Error, Result};
pub use exactnum::{Rational, Residue};
