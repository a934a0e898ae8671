use nalgebra::DMatrix;

use super::Scalar;
use crate::error::{invalid, Result};
use crate::exec;

/// Composite Simpson weights for `n_panels` (even) subintervals of width `h`.
pub fn simpson_weights(n_panels: usize, h: f64) -> Vec<f64> {
    (0..=n_panels)
        .map(|i| {
            let w = if i == 0 || i == n_panels {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect()
}

/// Composite Simpson approximation of `∫_{t0}^{t1} F(s) ds`.
///
/// The integrand is evaluated at the nodes in parallel; the weighted sum is
/// accumulated in node order so the result does not depend on scheduling.
pub fn integrate_matrix_function<T, F>(f: F, t0: f64, t1: f64, n_panels: usize) -> Result<DMatrix<T>>
where
    T: Scalar,
    F: Fn(f64) -> Result<DMatrix<T>> + Sync + Send,
{
    if !(t1 >= t0) {
        return Err(invalid(format!("integration bounds reversed: [{t0}, {t1}]")));
    }
    if n_panels < 2 || !n_panels.is_multiple_of(2) {
        return Err(invalid(format!("Simpson needs an even panel count >= 2, got {n_panels}")));
    }
    let h = (t1 - t0) / n_panels as f64;
    let values = exec::try_map_indexed(n_panels + 1, |i| f(t0 + i as f64 * h))?;
    let weights = simpson_weights(n_panels, h);

    let (rows, cols) = values[0].shape();
    let mut acc = DMatrix::<T>::zeros(rows, cols);
    for (value, w) in values.iter().zip(weights) {
        if value.shape() != (rows, cols) {
            return Err(invalid("integrand changed shape between nodes"));
        }
        acc += value * T::lift(w);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_integrand() {
        let i = integrate_matrix_function(|_| Ok(DMatrix::<f64>::identity(2, 2)), 0.0, 1.0, 6).unwrap();
        assert_abs_diff_eq!(i, DMatrix::identity(2, 2), epsilon = 1e-15);
    }

    #[test]
    fn exact_on_quadratic() {
        let i = integrate_matrix_function(|s| Ok(DMatrix::<f64>::identity(2, 2) * (s * s)), 0.0, 1.0, 2).unwrap();
        assert_abs_diff_eq!(i, DMatrix::identity(2, 2) / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn exponential_against_closed_form() {
        let exact = std::f64::consts::E - 1.0;
        let simpson = |n| {
            integrate_matrix_function(|s| Ok(DMatrix::<f64>::identity(1, 1) * s.exp()), 0.0, 1.0, n).unwrap()[(0, 0)]
        };
        // 8 subintervals: error (h⁴/180)·e^ξ with h = 1/8, i.e. about 2.33e-6
        assert_abs_diff_eq!(simpson(8) - exact, 2.3262408517243927e-6, epsilon = 1e-12);
        assert!((simpson(16) - exact).abs() < 1e-6);
        // fourth-order ratio on halving
        let ratio = (simpson(8) - exact) / (simpson(16) - exact);
        assert!((15.0..17.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn degenerate_interval_is_zero() {
        let i = integrate_matrix_function(|_| Ok(DMatrix::<f64>::identity(2, 2)), 0.5, 0.5, 2).unwrap();
        assert_eq!(i, DMatrix::zeros(2, 2));
    }

    #[test]
    fn contract_violations() {
        let f = |_| Ok(DMatrix::<f64>::identity(1, 1));
        assert!(integrate_matrix_function(f, 0.0, 1.0, 3).is_err());
        assert!(integrate_matrix_function(f, 0.0, 1.0, 0).is_err());
        assert!(integrate_matrix_function(f, 1.0, 0.0, 2).is_err());
    }
}
