use nalgebra::{DMatrix, DVector};

use super::{check_square, norm_inf, Scalar};
use crate::error::{Error, Result};

/// Relative pivot threshold: a pivot below `PIVOT_RTOL · ‖M‖_∞` is singular.
pub const PIVOT_RTOL: f64 = 1e-13;

/// LU factorization with partial pivoting, `P·M = L·U` packed in one matrix.
#[derive(Debug, Clone)]
pub struct Lu<T: Scalar> {
    packed: DMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Lu<T> {
    pub fn factor(m: &DMatrix<T>) -> Result<Self> {
        let n = check_square(m, "LU operand")?;
        let threshold = PIVOT_RTOL * norm_inf(m);
        let mut a = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let (offset, pivot) = a
                .view((k, k), (n - k, 1))
                .iter()
                .map(|x| x.modulus())
                .enumerate()
                .fold((0, -1.0), |best, (i, v)| if v > best.1 { (i, v) } else { best });
            // an all-zero matrix has threshold 0 and still has to be rejected
            if !(pivot > threshold) || pivot == 0.0 {
                return Err(Error::SingularMatrix { pivot, threshold });
            }
            let r = k + offset;
            if r != k {
                a.swap_rows(k, r);
                perm.swap(k, r);
            }
            let inv = T::one() / a[(k, k)];
            for i in k + 1..n {
                let factor = a[(i, k)] * inv;
                a[(i, k)] = factor;
                if factor != T::zero() {
                    for j in k + 1..n {
                        let u = a[(k, j)];
                        a[(i, j)] -= factor * u;
                    }
                }
            }
        }
        Ok(Self { packed: a, perm })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn solve(&self, rhs: &DMatrix<T>) -> Result<DMatrix<T>> {
        let n = self.dim();
        if rhs.nrows() != n {
            return Err(Error::DimensionMismatch(format!("rhs has {} rows, matrix has {n}", rhs.nrows())));
        }
        let mut x = DMatrix::from_fn(n, rhs.ncols(), |i, j| rhs[(self.perm[i], j)]);
        for mut col in x.column_iter_mut() {
            for i in 0..n {
                let mut s = col[i];
                for k in 0..i {
                    s -= self.packed[(i, k)] * col[k];
                }
                col[i] = s;
            }
            for i in (0..n).rev() {
                let mut s = col[i];
                for k in i + 1..n {
                    s -= self.packed[(i, k)] * col[k];
                }
                col[i] = s / self.packed[(i, i)];
            }
        }
        Ok(x)
    }
}

/// Solves `M·X = rhs` by partial-pivoting LU.
pub fn solve_linear<T: Scalar>(m: &DMatrix<T>, rhs: &DMatrix<T>) -> Result<DMatrix<T>> {
    Lu::factor(m)?.solve(rhs)
}

pub fn solve_vector<T: Scalar>(m: &DMatrix<T>, rhs: &DVector<T>) -> Result<DVector<T>> {
    let x = solve_linear(m, &DMatrix::from_column_slice(rhs.len(), 1, rhs.as_slice()))?;
    Ok(x.column(0).into_owned())
}

pub fn inverse<T: Scalar>(m: &DMatrix<T>) -> Result<DMatrix<T>> {
    let n = check_square(m, "inverse operand")?;
    Lu::factor(m)?.solve(&DMatrix::identity(n, n))
}
