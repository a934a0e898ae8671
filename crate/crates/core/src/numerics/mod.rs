//! Dense linear-algebra kernel shared by every other module: LU solves,
//! eigenvalues, the matrix exponential and composite Simpson quadrature.
//!
//! All routines are generic over [`Scalar`], implemented for `f64` and
//! `Complex64`, so resolvents at complex spectral parameters reuse the same
//! code as the real-valued generators.

mod eigen;
mod expm;
mod lu;
mod quadrature;

pub use eigen::{eigenvalues, numerical_abscissa, spectral_bound, spectrum_distance};
pub use expm::expm;
pub use lu::{inverse, solve_linear, solve_vector, Lu, PIVOT_RTOL};
pub use quadrature::{integrate_matrix_function, simpson_weights};

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type DenseMatrix<T = f64> = DMatrix<T>;
pub type Vector<T = f64> = DVector<T>;

/// Field of matrix entries: double precision real or complex.
pub trait Scalar: ComplexField<RealField = f64> + Copy + Send + Sync {
    fn lift(x: f64) -> Self {
        Self::from_real(x)
    }

    fn to_complex(self) -> Complex64;

    /// Eigenvalues via Hessenberg reduction and shifted QR; `None` when the
    /// iteration budget is exhausted.
    fn schur_eigenvalues(m: &DMatrix<Self>, max_iter: usize) -> Option<Vec<Complex64>>;
}

impl Scalar for f64 {
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }

    fn schur_eigenvalues(m: &DMatrix<f64>, max_iter: usize) -> Option<Vec<Complex64>> {
        let schur = nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, max_iter)?;
        Some(schur.complex_eigenvalues().iter().copied().collect())
    }
}

impl Scalar for Complex64 {
    fn to_complex(self) -> Complex64 {
        self
    }

    fn schur_eigenvalues(m: &DMatrix<Complex64>, max_iter: usize) -> Option<Vec<Complex64>> {
        let schur = nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, max_iter)?;
        schur.eigenvalues().map(|ev| ev.iter().copied().collect())
    }
}

/// Induced infinity norm (maximum absolute row sum).
pub fn norm_inf<T: Scalar>(m: &DMatrix<T>) -> f64 {
    m.row_iter().map(|row| row.iter().map(|x| x.modulus()).sum::<f64>()).fold(0.0, f64::max)
}

/// Induced one norm (maximum absolute column sum).
pub fn norm_one<T: Scalar>(m: &DMatrix<T>) -> f64 {
    m.column_iter().map(|col| col.iter().map(|x| x.modulus()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn vec_norm_inf<T: Scalar>(v: &DVector<T>) -> f64 {
    v.iter().map(|x| x.modulus()).fold(0.0, f64::max)
}

/// `‖a − b‖_∞` for equally shaped matrices.
pub fn diff_norm_inf<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> f64 {
    norm_inf(&(a - b))
}

pub fn identity<T: Scalar>(n: usize) -> DMatrix<T> {
    DMatrix::identity(n, n)
}

/// Validates the `DenseMatrix` invariants: non-empty and finite.
pub fn check_matrix<T: Scalar>(m: &DMatrix<T>, what: &'static str) -> Result<()> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(Error::DimensionMismatch(format!("{what} is empty")));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite(what));
    }
    Ok(())
}

pub(crate) fn check_square<T: Scalar>(m: &DMatrix<T>, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!("{what} must be square, got {}x{}", m.nrows(), m.ncols())));
    }
    Ok(m.nrows())
}

/// Promotes a real matrix to complex entries.
pub fn complexify(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Drops the imaginary part once it is negligible (at most `tol` in modulus).
pub fn realify(m: &DMatrix<Complex64>, tol: f64) -> Option<DMatrix<f64>> {
    if m.iter().all(|z| z.im.abs() <= tol) {
        Some(m.map(|z| z.re))
    } else {
        None
    }
}
