use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::exec;
use crate::models::{build_diffusion_transport, build_heat_1d, sample_function, DTParams, GridSpec};
use crate::numerics::{diff_norm_inf, vec_norm_inf};
use crate::semigroup::solve_homogeneous;

use super::oracles::{dirichlet_closed_form, heat_series_solution};

/// Accepted range of observed orders for the second-order discretization.
pub const ORDER_RANGE: (f64, f64) = (1.8, 2.2);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConvergenceStudy {
    /// Heat equation from `sin(πx)` against the exact series at time `t`.
    HeatSeries { t: f64 },
    /// Diffusion-transport `D₀` against `α + (β−α)(1−e^{−kx})/(1−e^{−k})`.
    DirichletMap { k: f64 },
}

impl ConvergenceStudy {
    pub fn heat_default() -> Self {
        Self::HeatSeries { t: 0.1 }
    }

    pub fn dirichlet_default() -> Self {
        Self::DirichletMap { k: 1.0 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::HeatSeries { .. } => "heat_series",
            Self::DirichletMap { .. } => "dirichlet_map",
        }
    }

    /// Sup-norm error at the interior nodes of one grid.
    pub fn error(&self, grid: &GridSpec) -> Result<f64> {
        match *self {
            Self::HeatSeries { t } => {
                let triple = build_heat_1d(grid);
                let (f, g) = sample_function(grid, |x| (PI * x).sin());
                let traj = solve_homogeneous(&triple, &f, &g.map(|_| 0.0), &[0.0, t])?;
                Ok(vec_norm_inf(&(traj.u(1) - heat_series_solution(grid, &[(1.0, 1)], t))))
            }
            Self::DirichletMap { k } => {
                let triple = build_diffusion_transport(grid, &DTParams::new(k, 0.0, 0.0)?)?;
                let d0 = triple.dirichlet_map(0.0)?.state;
                let nodes = grid.interior_nodes();
                let exact = nalgebra::DMatrix::from_fn(nodes.len(), 2, |i, j| {
                    let (alpha, beta) = if j == 0 { (1.0, 0.0) } else { (0.0, 1.0) };
                    dirichlet_closed_form(k, alpha, beta, nodes[i])
                });
                Ok(diff_norm_inf(&d0, &exact))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub n_nodes: usize,
    pub h: f64,
    pub error: f64,
    /// `log₂(e(2h)/e(h))`, absent on the coarsest level.
    pub observed_order: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    pub study: String,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn orders(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.observed_order).collect()
    }

    pub fn all_in_range(&self) -> bool {
        let orders = self.orders();
        !orders.is_empty() && orders.iter().all(|&q| (ORDER_RANGE.0..=ORDER_RANGE.1).contains(&q))
    }
}

/// `count` node counts `8·2^i + 1`, so each level halves `h`.
pub fn refinement_levels(count: usize) -> Vec<usize> {
    (0..count).map(|i| (8usize << i) + 1).collect()
}

/// Errors on successively halved grids and the observed orders between them.
pub fn convergence_study(study: ConvergenceStudy, levels: &[usize]) -> Result<ConvergenceTable> {
    if levels.len() < 3 {
        return Err(invalid(format!("convergence study needs at least 3 levels, got {}", levels.len())));
    }
    let grids = levels.iter().map(|&n| GridSpec::new(n)).collect::<Result<Vec<_>>>()?;
    if grids.windows(2).any(|w| (w[0].h() / w[1].h() - 2.0).abs() > 1e-12) {
        return Err(invalid("refinement levels must halve h"));
    }
    let errors = exec::try_map_indexed(grids.len(), |i| study.error(&grids[i]))?;
    let rows = grids
        .iter()
        .zip(&errors)
        .enumerate()
        .map(|(i, (grid, &error))| ConvergenceRow {
            n_nodes: grid.n_nodes(),
            h: grid.h(),
            error,
            observed_order: (i > 0).then(|| (errors[i - 1] / error).log2()),
        })
        .collect();
    Ok(ConvergenceTable { study: study.name().to_string(), rows })
}
