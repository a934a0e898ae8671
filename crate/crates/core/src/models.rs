//! Finite-difference triples on the unit interval.
//!
//! The domain coordinates are the full nodal vector `w = (w₀, …, w_N)`;
//! `J` keeps the interior values and `L` the two endpoint values, so the
//! state space is interior values only and the boundary space is `ℂ²`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::Scalar;
use crate::triple::MaximalTriple;

/// Smallest admissible node count.
pub const MIN_NODES: usize = 5;

/// Uniform grid `x_i = i·h` on `[0, 1]` with `h = 1/(n_nodes − 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    n_nodes: usize,
}

impl GridSpec {
    pub fn new(n_nodes: usize) -> Result<Self> {
        if n_nodes < MIN_NODES {
            return Err(invalid(format!("grid needs at least {MIN_NODES} nodes, got {n_nodes}")));
        }
        Ok(Self { n_nodes })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn h(&self) -> f64 {
        1.0 / (self.n_nodes - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        // exact endpoints regardless of rounding in i·h
        if i + 1 == self.n_nodes {
            1.0
        } else {
            i as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_nodes).map(|i| self.node(i)).collect()
    }

    /// Interior node count, the state dimension.
    pub fn p(&self) -> usize {
        self.n_nodes - 2
    }

    pub fn interior_nodes(&self) -> Vec<f64> {
        (1..self.n_nodes - 1).map(|i| self.node(i)).collect()
    }
}

/// Coefficients of `u̇ = u″ + k u′` with `u̇(0) = u′(0) + c u(0)`, `u̇(1) = −u′(1) + d u(1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DTParams<T: Scalar = f64> {
    pub k: f64,
    pub c: T,
    pub d: T,
}

impl<T: Scalar> DTParams<T> {
    pub fn new(k: f64, c: T, d: T) -> Result<Self> {
        if !(k >= 0.0) || !k.is_finite() {
            return Err(Error::InvalidK(k));
        }
        if !c.is_finite() || !d.is_finite() {
            return Err(Error::NonFinite("feedback coefficients c, d"));
        }
        Ok(Self { k, c, d })
    }
}

fn selectors<T: Scalar>(n: usize) -> (DMatrix<T>, DMatrix<T>) {
    let p = n - 2;
    let embedding = DMatrix::from_fn(p, n, |i, j| if j == i + 1 { T::one() } else { T::zero() });
    let mut trace = DMatrix::zeros(2, n);
    trace[(0, 0)] = T::one();
    trace[(1, n - 1)] = T::one();
    (embedding, trace)
}

/// Interior rows of `u″ + k u′` with central differences.
fn interior_operator<T: Scalar>(grid: &GridSpec, k: f64) -> DMatrix<T> {
    let n = grid.n_nodes();
    let h = grid.h();
    let (diff, adv) = (1.0 / (h * h), k / (2.0 * h));
    let mut a = DMatrix::zeros(n - 2, n);
    for i in 0..n - 2 {
        a[(i, i)] = T::lift(diff - adv);
        a[(i, i + 1)] = T::lift(-2.0 * diff);
        a[(i, i + 2)] = T::lift(diff + adv);
    }
    a
}

/// Heat equation `u̇ = u″` with the Dirichlet trace and no feedback.
pub fn build_heat_1d(grid: &GridSpec) -> MaximalTriple {
    let (embedding, trace) = selectors(grid.n_nodes());
    MaximalTriple::new(interior_operator(grid, 0.0), trace, embedding, None).expect("selector stack is a permutation")
}

/// Diffusion-transport equation with dynamical boundary conditions.
///
/// Boundary derivatives use the second-order one-sided three-point stencil.
pub fn build_diffusion_transport<T: Scalar>(grid: &GridSpec, params: &DTParams<T>) -> Result<MaximalTriple<T>> {
    let params = DTParams::new(params.k, params.c, params.d)?;
    let n = grid.n_nodes();
    let h = grid.h();
    let (embedding, trace) = selectors(n);

    let s = 1.0 / (2.0 * h);
    let mut feedback = DMatrix::<T>::zeros(2, n);
    feedback[(0, 0)] = T::lift(-3.0 * s) + params.c;
    feedback[(0, 1)] = T::lift(4.0 * s);
    feedback[(0, 2)] = T::lift(-s);
    feedback[(1, n - 1)] = T::lift(-3.0 * s) + params.d;
    feedback[(1, n - 2)] = T::lift(4.0 * s);
    feedback[(1, n - 3)] = T::lift(-s);

    MaximalTriple::new(interior_operator(grid, params.k), trace, embedding, Some(feedback))
}

/// Point samples of `f` at the interior nodes and at the two endpoints.
pub fn sample_function(grid: &GridSpec, f: impl Fn(f64) -> f64) -> (DVector<f64>, DVector<f64>) {
    let interior = DVector::from_iterator(grid.p(), grid.interior_nodes().into_iter().map(&f));
    let boundary = DVector::from_vec(vec![f(0.0), f(1.0)]);
    (interior, boundary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::spectral_bound;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn grid_basics() {
        let g = GridSpec::new(5).unwrap();
        assert_eq!(g.h(), 0.25);
        assert_eq!(g.nodes(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(g.p(), 3);
        assert!(GridSpec::new(4).is_err());
    }

    #[test]
    fn heat_a0_quarter_grid() {
        let t = build_heat_1d(&GridSpec::new(5).unwrap());
        let expected = DMatrix::from_row_slice(3, 3, &[-32.0, 16.0, 0.0, 16.0, -32.0, 16.0, 0.0, 16.0, -32.0]);
        assert_eq!(t.restrict_a0(), expected);
        assert_eq!(t.condition_number(), 1.0);
    }

    #[test]
    fn heat_spectral_bound_closed_form() {
        for n in [5, 17, 65] {
            let g = GridSpec::new(n).unwrap();
            let h = g.h();
            let exact = -(2.0 / (h * h)) * (1.0 - (PI * h).cos());
            let s = spectral_bound(&build_heat_1d(&g).restrict_a0()).unwrap();
            assert_abs_diff_eq!(s, exact, epsilon = 1e-9 * exact.abs());
        }
    }

    #[test]
    fn k_zero_matches_heat() {
        let g = GridSpec::new(9).unwrap();
        let dt = build_diffusion_transport(&g, &DTParams::new(0.0, 1.0, 2.0).unwrap()).unwrap();
        assert_eq!(dt.maximal(), build_heat_1d(&g).maximal());
        assert_eq!(dt.restrict_a0(), build_heat_1d(&g).restrict_a0());
    }

    #[test]
    fn negative_k_rejected() {
        assert_eq!(DTParams::new(-1.0, 0.0, 0.0), Err(Error::InvalidK(-1.0)));
        assert!(matches!(DTParams::<f64>::new(f64::NAN, 0.0, 0.0), Err(Error::InvalidK(_))));
    }

    #[test]
    fn feedback_stencil_exact_on_linear() {
        let g = GridSpec::new(9).unwrap();
        let c = 0.7;
        let t = build_diffusion_transport(&g, &DTParams::new(1.0, c, -0.3).unwrap()).unwrap();
        let x = DVector::from_vec(g.nodes());
        let bx = t.feedback().unwrap() * &x;
        assert_abs_diff_eq!(bx[0], 1.0, epsilon = 1e-12);
        // −u′(1) + d·u(1) = −1 − 0.3
        assert_abs_diff_eq!(bx[1], -1.3, epsilon = 1e-12);
    }

    #[test]
    fn complex_coefficients_accepted() {
        let g = GridSpec::new(7).unwrap();
        let p = DTParams::new(1.0, Complex64::new(-1.0, 0.5), Complex64::new(-2.0, -0.5)).unwrap();
        let t = build_diffusion_transport(&g, &p).unwrap();
        assert_eq!(t.feedback().unwrap()[(0, 0)], Complex64::new(-3.0 * 3.0 - 1.0, 0.5));
    }

    #[test]
    fn samples() {
        let g = GridSpec::new(5).unwrap();
        let (u, v) = sample_function(&g, |_| 0.0);
        assert!(u.iter().chain(v.iter()).all(|&x| x == 0.0));
        let (u, v) = sample_function(&g, |x| 1.0 - x);
        assert_eq!(u.as_slice(), &[0.75, 0.5, 0.25]);
        assert_eq!(v.as_slice(), &[1.0, 0.0]);
        let (u, v) = sample_function(&GridSpec::new(8).unwrap(), |x| (PI * x).sin());
        assert_abs_diff_eq!(v[0], 0.0);
        assert_abs_diff_eq!(v[1], 0.0, epsilon = 1e-15);
        for i in 0..u.len() {
            assert_abs_diff_eq!(u[i], u[u.len() - 1 - i], epsilon = 1e-15);
        }
    }
}
