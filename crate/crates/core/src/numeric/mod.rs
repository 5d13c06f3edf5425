//! Scalar backends and matrix primitives.

pub mod float;
pub mod linalg;
pub mod mat;
pub mod matrix;
pub mod scalar;

pub use float::{expm, hermitian_eigh, jacobi_eigh, orthonormal_basis, polar_decompose, polar_newton, projector, projector_distance, sym_exp, sym_log, sym_log_symplectic};
pub use linalg::{
    column_basis, column_echelon, extend_basis, intersect_columns, inverse, left_annihilator, nullspace, rank,
    rank_and_nullspace, rref, signature_by_congruence, solve, span_contains, span_eq, TolerancePolicy,
};
pub use mat::Mat;
pub use matrix::{Matrix, RealBackend};
pub use scalar::{q, qi, rationalize, Backend, ComplexField, Field, RealField, C64, Q, QI};
