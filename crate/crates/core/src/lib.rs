//! Exact truncated moment problems on path *-algebras of quiver doubles.
//!
//! All arithmetic is over the Gaussian rationals, so every rank, flatness
//! and positivity verdict is exact.

pub mod element;
pub mod error;
pub mod extension;
pub mod gns;
pub mod groebner;
pub mod io;
pub mod linalg;
pub mod moment;
pub mod quiver;
pub mod scalar;
pub mod sos;

pub use element::{echelon_basis, embed_element, embed_matrix_free, Element, FreeMatrix};
pub use error::{Error, Result};
pub use extension::{flat_extend_tip_maximal, schur_complete, FlatExtension};
pub use gns::{
    build_representation, check_relations, compress_representation, from_groebner, rep_kernel, Representation,
};
pub use groebner::{kernel_groebner, left_divides, right_groebner, total_reduce, Reduction, RightGroebnerBasis};
pub use linalg::{nullspace, psd_check, rank, solve_in_range, Matrix};
pub use moment::{BlockDecomposition, FlatReport, MomentMatrix, TruncatedFunctional, Window};
pub use quiver::{DoubleQuiver, Letter, Path, PathAlgebra, PathOrder, Quiver};
pub use scalar::Scalar;
pub use sos::{verify_gram, verify_squares, SosCertificate, SosVerdict, WeightedSquare, Witness};
