use nalgebra::DVector;
use std::f64::consts::PI;

use crate::error::Result;
use crate::models::{build_diffusion_transport, build_heat_1d, sample_function, DTParams, GridSpec};
use crate::semigroup::{BoundarySignal, Forcing};
use crate::triple::MaximalTriple;

/// Grid of the oracle comparisons, `h = 1/32`.
pub const ORACLE_NODES: usize = 33;
/// RK4 step of the oracle comparisons.
pub const ORACLE_DT: f64 = 1e-4;
/// Time step of the integrated-problem residual.
pub const RESIDUAL_DT: f64 = 1e-3;

/// A fully specified initial-boundary value problem.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: &'static str,
    pub triple: MaximalTriple,
    pub f: DVector<f64>,
    pub g: DVector<f64>,
    pub psi: BoundarySignal,
}

impl Scenario {
    /// Boundary driver for the integrated residual.
    pub fn forcing(&self) -> Forcing<'_> {
        if self.triple.has_feedback() {
            Forcing::Feedback
        } else {
            Forcing::Signal(&self.psi)
        }
    }
}

/// The three shipped scenarios on a grid with `n_nodes` nodes.
///
/// * `heat_homogeneous`: `f = sin(πx)`, `g = 0`, no forcing.
/// * `heat_inhomogeneous`: same data, `ψ(t) = (sin t, 0)`.
/// * `dt_feedback`: `k = 1`, `c = d = −2`, `w = 1 + 1.5x − x²`, which
///   satisfies `w″ + k w′ = ±w′ + c w` at both ends so the solution has no
///   initial layer.
pub fn shipped_scenarios(n_nodes: usize) -> Result<Vec<Scenario>> {
    let grid = GridSpec::new(n_nodes)?;
    let heat = build_heat_1d(&grid);
    let (f, g) = sample_function(&grid, |x| (PI * x).sin());
    // sin(π) is not exactly zero in floating point
    let g = g.map(|v| if v.abs() < 1e-15 { 0.0 } else { v });
    let (wf, wg) = sample_function(&grid, |x| 1.0 + 1.5 * x - x * x);
    Ok(vec![
        Scenario {
            name: "heat_homogeneous",
            triple: heat.clone(),
            f: f.clone(),
            g: g.clone(),
            psi: BoundarySignal::zero(2),
        },
        Scenario { name: "heat_inhomogeneous", triple: heat, f, g, psi: BoundarySignal::sine(&[1.0, 0.0], 1.0, 0.0) },
        Scenario {
            name: "dt_feedback",
            triple: build_diffusion_transport(&grid, &DTParams::new(1.0, -2.0, -2.0)?)?,
            f: wf,
            g: wg,
            psi: BoundarySignal::zero(2),
        },
    ])
}
