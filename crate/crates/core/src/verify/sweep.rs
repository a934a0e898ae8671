use serde::Serialize;

use crate::error::{invalid, Result};
use crate::exec;
use crate::models::{build_diffusion_transport, DTParams, GridSpec};
use crate::numerics::spectral_bound;

use super::report::{CheckResult, VerificationReport};

/// Default half-width of the band around 0 where signs are not compared.
pub const DEFAULT_BAND: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct SweepCell {
    pub k: f64,
    pub c: f64,
    pub d: f64,
    /// spectral bound of the feedback generator `Ã`
    pub sbound_generator: f64,
    /// spectral bound of `B₀ = B·D₀`
    pub sbound_b0: f64,
    /// `Ã` is Metzler (nonnegative off-diagonal entries)
    pub positivity: bool,
    /// sign agreement, absent when either bound lies inside the band
    pub agreement: Option<bool>,
}

impl SweepCell {
    fn sign(&self) -> f64 {
        self.sbound_generator.signum()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub n_nodes: usize,
    pub band: f64,
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    pub fn positivity_flagged(&self) -> usize {
        self.cells.iter().filter(|c| c.positivity).count()
    }

    pub fn excluded(&self) -> usize {
        self.cells.iter().filter(|c| c.agreement.is_none()).count()
    }

    /// Cells outside the band whose signs differ, optionally restricted to
    /// positivity-flagged cells.
    pub fn disagreements(&self, flagged_only: bool) -> Vec<&SweepCell> {
        self.cells.iter().filter(|c| (!flagged_only || c.positivity) && c.agreement == Some(false)).collect()
    }

    /// `(c, d)` pairs whose generator sign changes with `k`, among cells
    /// outside the band (and positivity-flagged, if requested).
    pub fn k_dependent_pairs(&self, flagged_only: bool) -> Vec<(f64, f64)> {
        let mut pairs: Vec<(f64, f64)> = Vec::new();
        for cell in &self.cells {
            if pairs.contains(&(cell.c, cell.d)) {
                continue;
            }
            let signs: Vec<f64> = self
                .cells
                .iter()
                .filter(|o| o.c == cell.c && o.d == cell.d)
                .filter(|o| o.agreement.is_some() && (!flagged_only || o.positivity))
                .map(SweepCell::sign)
                .collect();
            if signs.windows(2).any(|w| w[0] != w[1]) {
                pairs.push((cell.c, cell.d));
            }
        }
        pairs
    }

    /// Both sweep properties on positivity-flagged, non-excluded cells.
    pub fn passes(&self) -> bool {
        self.disagreements(true).is_empty() && self.k_dependent_pairs(true).is_empty()
    }
}

/// Spectral bounds of `Ã` and `B₀` for every `(k, c, d)` of the grid.
pub fn stability_sweep(
    grid: &GridSpec,
    k_values: &[f64],
    c_values: &[f64],
    d_values: &[f64],
    band: f64,
) -> Result<SweepResult> {
    if k_values.is_empty() || c_values.is_empty() || d_values.is_empty() {
        return Err(invalid("sweep ranges must be non-empty"));
    }
    if !(band > 0.0) {
        return Err(invalid(format!("exclusion band must be positive, got {band}")));
    }
    let params: Vec<(f64, f64, f64)> = k_values
        .iter()
        .flat_map(|&k| c_values.iter().flat_map(move |&c| d_values.iter().map(move |&d| (k, c, d))))
        .collect();
    let cells = exec::try_map_indexed(params.len(), |i| -> Result<SweepCell> {
        let (k, c, d) = params[i];
        let triple = build_diffusion_transport(grid, &DTParams::new(k, c, d)?)?;
        let generator = triple.generator();
        let g = generator.matrix();
        let sbound_generator = spectral_bound(g)?;
        let sbound_b0 = spectral_bound(&triple.b_lambda(0.0)?)?;
        let positivity = (0..g.nrows()).all(|r| (0..g.ncols()).all(|s| r == s || g[(r, s)] >= 0.0));
        let agreement = (sbound_generator.abs() > band && sbound_b0.abs() > band)
            .then(|| sbound_generator.signum() == sbound_b0.signum());
        Ok(SweepCell { k, c, d, sbound_generator, sbound_b0, positivity, agreement })
    })?;
    Ok(SweepResult { n_nodes: grid.n_nodes(), band, cells })
}

/// Sweep outcome as report checks (counts of violations, tolerance 0).
pub fn sweep_report(result: &SweepResult) -> VerificationReport {
    let mut report = VerificationReport::new("sweep");
    let flagged = result.disagreements(true).len();
    let k_dep = result.k_dependent_pairs(true).len();
    report.checks.push(
        CheckResult::new("sweep_sign_agreement", flagged as f64, 0.0)
            .with_detail(format!("{} positivity-flagged cells", result.positivity_flagged())),
    );
    report.checks.push(CheckResult::new("sweep_k_invariance", k_dep as f64, 0.0));
    report
        .notes
        .push("positivity proxy: off-diagonal nonnegativity (Metzler test) of the feedback generator".to_string());
    report.notes.push(format!(
        "{} cells, {} excluded by band {}, {} positivity-flagged; sign disagreements over all non-excluded cells: {}; \
         (c,d) pairs with k-dependent sign over all non-excluded cells: {}",
        result.cells.len(),
        result.excluded(),
        result.band,
        result.positivity_flagged(),
        result.disagreements(false).len(),
        result.k_dependent_pairs(false).len(),
    ));
    report
}
