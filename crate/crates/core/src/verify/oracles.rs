use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::models::GridSpec;
use crate::numerics::{eigenvalues, Scalar};
use crate::semigroup::{BoundarySignal, Trajectory};
use crate::triple::MaximalTriple;

/// Largest stable RK4 step `2.5/ρ`, `ρ` the spectral radius of `generator`.
pub fn rk4_stability_limit<T: Scalar>(generator: &DMatrix<T>) -> Result<f64> {
    let radius = eigenvalues(generator)?.into_iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(if radius > 0.0 { 2.5 / radius } else { f64::INFINITY })
}

/// Classical RK4 for `𝒰̇ = 𝒢𝒰 + (0, ψ(t))`, storing every step.
///
/// The step is shrunk to `t_end / ⌈t_end/dt⌉` so the grid ends exactly at
/// `t_end`.
pub fn rk4_reference<T: Scalar>(
    triple: &MaximalTriple<T>,
    f: &DVector<T>,
    g: &DVector<T>,
    psi: &BoundarySignal,
    dt: f64,
    t_end: f64,
) -> Result<Trajectory<T>> {
    if !(dt > 0.0) || !(t_end > 0.0) || !t_end.is_finite() {
        return Err(invalid("RK4 needs dt > 0 and a finite t_end > 0"));
    }
    let (p, m) = (triple.p(), triple.m());
    if f.len() != p || g.len() != m || psi.dim() != m {
        return Err(Error::DimensionMismatch("initial data or signal does not match the triple".into()));
    }
    let generator = triple.generator();
    let a = generator.matrix();
    let limit = rk4_stability_limit(a)?;
    if dt > limit {
        return Err(Error::UnstableStep { dt, limit });
    }
    let steps = (t_end / dt).ceil().max(1.0) as usize;
    let h = t_end / steps as f64;

    let forcing = |t: f64| {
        let mut out = DVector::<T>::zeros(p + m);
        if !psi.is_zero() {
            let v = psi.eval(t);
            for i in 0..m {
                out[p + i] = T::lift(v[i]);
            }
        }
        out
    };
    let rhs = |t: f64, x: &DVector<T>| a * x + forcing(t);

    let mut x = DVector::from_iterator(p + m, f.iter().chain(g.iter()).copied());
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(x.clone());
    let (half, sixth) = (T::lift(0.5 * h), T::lift(h / 6.0));
    let two = T::lift(2.0);
    for k in 0..steps {
        let t = k as f64 * h;
        let k1 = rhs(t, &x);
        let k2 = rhs(t + 0.5 * h, &(&x + &k1 * half));
        let k3 = rhs(t + 0.5 * h, &(&x + &k2 * half));
        let k4 = rhs(t + h, &(&x + &k3 * T::lift(h)));
        x += (k1 + (k2 + k3) * two + k4) * sixth;
        times.push(if k + 1 == steps { t_end } else { (k + 1) as f64 * h });
        states.push(x.clone());
    }
    Trajectory::new(p, m, times, states)
}

/// `Σ a_j e^{−(jπ)²t} sin(jπx)` at the interior nodes.
pub fn heat_series_solution(grid: &GridSpec, modes: &[(f64, usize)], t: f64) -> DVector<f64> {
    let nodes = grid.interior_nodes();
    DVector::from_iterator(
        nodes.len(),
        nodes.iter().map(|&x| {
            modes
                .iter()
                .map(|&(a, j)| {
                    let w = j as f64 * PI;
                    a * (-w * w * t).exp() * (w * x).sin()
                })
                .sum()
        }),
    )
}

/// Solution of `u″ + k u′ = 0`, `u(0) = α`, `u(1) = β`, at `x`.
pub fn dirichlet_closed_form(k: f64, alpha: f64, beta: f64, x: f64) -> f64 {
    if k == 0.0 {
        return alpha + (beta - alpha) * x;
    }
    alpha + (beta - alpha) * (-(-k * x).exp_m1()) / (-(-k).exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::build_heat_1d;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_data_stays_zero() {
        let t = build_heat_1d(&GridSpec::new(9).unwrap());
        let traj =
            rk4_reference(&t, &DVector::zeros(7), &DVector::zeros(2), &BoundarySignal::zero(2), 1e-3, 0.1).unwrap();
        assert!(traj.states().iter().all(|s| s.iter().all(|&x| x == 0.0)));
        assert_eq!(traj.len(), 101);
        assert_eq!(*traj.times().last().unwrap(), 0.1);
    }

    #[test]
    fn scalar_decay_fourth_order() {
        // A = [a, 0] on (u, boundary) with J = [1, 0], L = [0, 1]: generator diag(a, 0)
        let a = -2.0;
        let t = MaximalTriple::new(
            DMatrix::from_row_slice(1, 2, &[a, 0.0]),
            DMatrix::from_row_slice(1, 2, &[0.0, 1.0]),
            DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
            None,
        )
        .unwrap();
        let err = |dt: f64| {
            let tr = rk4_reference(
                &t,
                &DVector::from_element(1, 1.0),
                &DVector::zeros(1),
                &BoundarySignal::zero(1),
                dt,
                1.0,
            )
            .unwrap();
            (tr.u(tr.len() - 1)[0] - (a * 1.0f64).exp()).abs()
        };
        let ratio = err(0.1) / err(0.05);
        assert!((14.0..18.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn unstable_step_rejected() {
        let t = build_heat_1d(&GridSpec::new(33).unwrap());
        let r = rk4_reference(&t, &DVector::zeros(31), &DVector::zeros(2), &BoundarySignal::zero(2), 1e-3, 1.0);
        assert!(matches!(r, Err(Error::UnstableStep { .. })));
    }

    #[test]
    fn series_values() {
        let g = GridSpec::new(5).unwrap();
        let s0 = heat_series_solution(&g, &[(1.0, 1), (0.5, 2)], 0.0);
        assert_abs_diff_eq!(s0[1], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s0[0], (PI / 4.0).sin() + 0.5, epsilon = 1e-15);
        let s1 = heat_series_solution(&g, &[(1.0, 1)], 1.0);
        assert_abs_diff_eq!(s1[1], 5.172318620381e-5, epsilon = 1e-15);
        assert_eq!(heat_series_solution(&g, &[], 0.3), DVector::zeros(3));
    }

    #[test]
    fn closed_form_lift() {
        assert_eq!(dirichlet_closed_form(0.0, 1.0, 3.0, 0.5), 2.0);
        assert_abs_diff_eq!(dirichlet_closed_form(1.0, 0.0, 1.0, 1.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(dirichlet_closed_form(1.0, 2.0, 2.0, 0.3), 2.0, epsilon = 1e-15);
        let e = std::f64::consts::E;
        assert_abs_diff_eq!(
            dirichlet_closed_form(1.0, 0.0, 1.0, 0.5),
            (1.0 - e.powf(-0.5)) / (1.0 - 1.0 / e),
            epsilon = 1e-15
        );
    }
}
