//! Matrix exponential by scaling and squaring with the diagonal [13/13]
//! Padé approximant (Higham, SIAM J. Matrix Anal. Appl. 26, 2005).

use nalgebra::DMatrix;

use super::{check_square, norm_one, solve_linear, Scalar};
use crate::error::{Error, Result};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which the [13/13] approximant is accurate to unit roundoff.
const THETA13: f64 = 5.371920351148152;

pub fn expm<T: Scalar>(m: &DMatrix<T>) -> Result<DMatrix<T>> {
    let n = check_square(m, "expm operand")?;
    let norm = norm_one(m);
    if !norm.is_finite() {
        return Err(Error::NonFinite("expm operand"));
    }
    let squarings = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = m * T::lift(0.5f64.powi(squarings));

    let b = |k: usize| T::lift(PADE13[k]);
    let eye = DMatrix::<T>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9)) + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &eye * b(1);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8)) + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &eye * b(0);

    let mut r = solve_linear(&(&v - &u), &(&v + &u))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    if r.iter().any(|x| !x.is_finite()) {
        return Err(Error::Overflow);
    }
    Ok(r)
}
