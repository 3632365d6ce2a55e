//! Dense complex linear algebra.

pub mod eigen;
pub mod matrix;
pub mod subsystems;

pub use eigen::{
    hermitian_eigensystem, min_eigenvalue, operator_norm, operator_norm_via_eigen,
    singular_values, EigenSystem,
};
pub use matrix::{inner, tensor, tensor_vec, vec_norm, ComplexMatrix, C64, MAX_SIDE};
pub use subsystems::{partial_trace, permute_ket, permute_operator, permute_rows, total_dim};
