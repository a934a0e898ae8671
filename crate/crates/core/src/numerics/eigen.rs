use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{check_square, Scalar};
use crate::error::{Error, Result};

/// Largest dimension accepted by [`eigenvalues`].
pub const MAX_EIGEN_DIM: usize = 4096;

/// QR sweeps allowed per unit of dimension before giving up.
const SWEEPS_PER_DIM: usize = 30;

/// Eigenvalues of a square matrix as a multiset (no particular order).
pub fn eigenvalues<T: Scalar>(m: &DMatrix<T>) -> Result<Vec<Complex64>> {
    let n = check_square(m, "eigenvalue operand")?;
    if n == 0 || n > MAX_EIGEN_DIM {
        return Err(Error::DimensionMismatch(format!("eigenvalues supports 1..={MAX_EIGEN_DIM}, got {n}")));
    }
    if n == 1 {
        return Ok(vec![m[(0, 0)].to_complex()]);
    }
    let budget = SWEEPS_PER_DIM * n;
    T::schur_eigenvalues(m, budget).ok_or(Error::NoConvergence { iterations: budget })
}

/// Maximum real part of the spectrum.
pub fn spectral_bound<T: Scalar>(m: &DMatrix<T>) -> Result<f64> {
    Ok(eigenvalues(m)?.into_iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max))
}

/// Largest eigenvalue of the symmetric part `(M + Mᵀ)/2` of a real matrix.
pub fn numerical_abscissa(m: &DMatrix<f64>) -> Result<f64> {
    check_square(m, "numerical abscissa operand")?;
    let sym = (m + m.transpose()) * 0.5;
    Ok(nalgebra::SymmetricEigen::new(sym).eigenvalues.max())
}

/// Distance between two spectra treated as multisets.
///
/// Every eigenvalue of `a` is greedily paired with the closest unused one in
/// `b` (largest moduli first); returns the largest pairing distance, or
/// infinity when the multiplicities differ.
pub fn spectrum_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by(|&i, &j| a[j].norm().total_cmp(&a[i].norm()));
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for i in order {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, z)| (j, (a[i] - z).norm()))
            .fold((usize::MAX, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sorted_re(mut v: Vec<Complex64>) -> Vec<f64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re));
        v.into_iter().map(|z| z.re).collect()
    }

    #[test]
    fn diagonal() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, -2.0, -3.0]));
        assert_eq!(sorted_re(eigenvalues(&m).unwrap()), vec![-3.0, -2.0, -1.0]);
    }

    #[test]
    fn rotation_generator() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let ev = eigenvalues(&m).unwrap();
        let expected = [Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)];
        assert!(spectrum_distance(&ev, &expected) < 1e-14);
    }

    #[test]
    fn discrete_dirichlet_laplacian() {
        let m = DMatrix::from_row_slice(3, 3, &[-32.0, 16.0, 0.0, 16.0, -32.0, 16.0, 0.0, 16.0, -32.0]);
        let ev = sorted_re(eigenvalues(&m).unwrap());
        let s = 16.0 * 2f64.sqrt();
        assert_abs_diff_eq!(ev[0], -32.0 - s, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[1], -32.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[2], -32.0 + s, epsilon = 1e-12);
        assert_abs_diff_eq!(spectral_bound(&m).unwrap(), -9.372583002030478, epsilon = 1e-12);
    }

    #[test]
    fn complex_matrix() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let m = DMatrix::from_row_slice(2, 2, &[i, one, Complex64::new(0.0, 0.0), -one]);
        let ev = eigenvalues(&m).unwrap();
        assert!(spectrum_distance(&ev, &[i, -one]) < 1e-14);
    }

    #[test]
    fn abscissa_of_non_normal() {
        let m = DMatrix::from_row_slice(2, 2, &[-1.0, 4.0, 0.0, -1.0]);
        // symmetric part [[-1,2],[2,-1]] has eigenvalues 1 and -3
        assert_abs_diff_eq!(numerical_abscissa(&m).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rejects_rectangular() {
        assert!(eigenvalues(&DMatrix::<f64>::zeros(2, 3)).is_err());
    }
}
