//! Dense complex linear algebra: Hermitian eigensolver, functional calculus
//! on positive matrices, operator norm and numerical radius.

mod eigen;
mod funcalc;
mod matrix;

pub(crate) use eigen::eigen_unchecked;
pub use eigen::{hermitian_eigen, hermitian_eigenvalues, HermitianEigen, MAX_SWEEPS, OFF_DIAGONAL_TOL};
pub use funcalc::{
    abs_op, abs_power, func_calculus, numerical_radius, power_psd, singular_values, spectral_norm,
    ScalarFunction, DEFAULT_CLAMP, DEFAULT_RADIUS_REFINE_ITERS, DEFAULT_THETA_STEPS, HERMITIAN_TOL,
};
pub use matrix::{inner, vec_norm, Matrix, MatrixFile, C64};

/// `Matrix::adjoint` as a free function.
pub fn adjoint(m: &Matrix) -> Matrix {
    m.adjoint()
}
