use std::path::{Path, PathBuf};

use aibvp::semigroup::{integrated_problem_residual, solve_homogeneous, solve_inhomogeneous, spectral_bound, Forcing};
use aibvp::verify::{
    convergence_study, refinement_levels, run_identity_suite, run_oracle_suite, stability_sweep, sweep_report,
    ConvergenceStudy, SweepResult, Tolerances, VerificationReport, DEFAULT_BAND, ORACLE_NODES, ORDER_RANGE,
};
use aibvp::{build_diffusion_transport, build_heat_1d, DTParams, GridSpec};
use serde::Serialize;

use crate::config::{ModelKind, ScenarioConfig, DEFAULT_SEED, SEED_ENV};
use crate::error::CliError;
use crate::output::{json_bytes, num, prepare_dir, trajectory_csv, write_atomic, Csv};

pub const SWEEP_K: &str = "0,1,4";
pub const SWEEP_CD: &str = "-6,-4,-2,-0.5,0.5,2";
pub const SWEEP_NODES: usize = 129;
pub const MAX_LEVELS: usize = 8;

#[derive(Serialize)]
struct SolveReport<'a> {
    config: &'a ScenarioConfig,
    p: usize,
    m: usize,
    generator: &'static str,
    spectral_bound: f64,
    final_time: f64,
    final_boundary: Vec<f64>,
    /// trapezoidal defect of the integrated problem on the output grid
    integrated_residual: Option<f64>,
}

pub fn solve(config_path: &Path, out: &Path) -> Result<(), CliError> {
    let config = ScenarioConfig::load(config_path)?;
    let problem = config.problem()?;
    log::info!(
        "solving {:?} on {} nodes, t_end = {}, {} steps",
        config.model,
        config.n_nodes,
        config.times.t_end,
        config.times.n_steps
    );
    let traj = if problem.psi.is_zero() {
        solve_homogeneous(&problem.triple, &problem.f, &problem.g, &problem.times)?
    } else {
        solve_inhomogeneous(&problem.triple, &problem.f, &problem.g, &problem.psi, &problem.times, problem.n_panels)?
    };
    let forcing = match (problem.triple.has_feedback(), problem.psi.is_zero()) {
        (true, true) => Some(Forcing::Feedback),
        (false, _) => Some(Forcing::Signal(&problem.psi)),
        // both feedback and a signal drive the boundary; no single-forcing residual applies
        (true, false) => None,
    };
    let integrated_residual = match forcing {
        Some(forcing) if traj.len() > 1 => {
            Some(integrated_problem_residual(&problem.triple, &traj, &problem.g, forcing)?)
        }
        _ => None,
    };
    let last = traj.len() - 1;
    let report = SolveReport {
        config: &config,
        p: traj.p(),
        m: traj.m(),
        generator: if problem.triple.has_feedback() { "feedback" } else { "plain" },
        spectral_bound: spectral_bound(problem.triple.generator().matrix())?,
        final_time: traj.times()[last],
        final_boundary: traj.v(last).iter().copied().collect(),
        integrated_residual,
    };

    let dir = prepare_dir(out)?;
    write_atomic(&dir.join("trajectory.csv"), &trajectory_csv(&traj).into_bytes())?;
    write_atomic(&dir.join("report.json"), &json_bytes(&report))?;
    let log_text = format!(
        "model: {:?}\nnodes: {}\nseed: {}\ngenerator: {}\ntime points: {}\nspectral bound: {}\nintegrated residual: {}\n",
        config.model,
        config.n_nodes,
        config.seed,
        report.generator,
        traj.len(),
        num(report.spectral_bound),
        integrated_residual.map_or("n/a".to_string(), num),
    );
    write_atomic(&dir.join("run.log"), log_text.as_bytes())?;
    log::info!("wrote {} time points to {}", traj.len(), dir.display());
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Identities,
    Oracle,
    Sweep,
    All,
}

pub struct VerifyOptions {
    pub suite: Suite,
    pub model: ModelKind,
    pub n_nodes: Option<usize>,
    pub params: (f64, f64, f64),
    pub tol_scale: f64,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => {
            v.trim().parse().map_err(|_| CliError::Config(format!("{SEED_ENV} must be an unsigned integer, got {v:?}")))
        }
        Err(_) => Ok(DEFAULT_SEED),
    }
}

pub fn verify(opts: &VerifyOptions) -> Result<(), CliError> {
    if !(opts.tol_scale >= 0.0) || !opts.tol_scale.is_finite() {
        return Err(CliError::Config(format!("tolerance scale must be finite and >= 0, got {}", opts.tol_scale)));
    }
    let seed = resolve_seed(opts.seed)?;
    let tol = Tolerances::default().scaled(opts.tol_scale);
    let n = opts.n_nodes.unwrap_or(ORACLE_NODES);
    let grid = GridSpec::new(n).map_err(|e| CliError::Config(e.to_string()))?;
    let (k, c, d) = opts.params;
    let dt_params = DTParams::new(k, c, d).map_err(|e| CliError::Config(e.to_string()))?;

    let mut parts = Vec::new();
    if matches!(opts.suite, Suite::Identities | Suite::All) {
        let triple = match opts.model {
            ModelKind::Heat => build_heat_1d(&grid),
            ModelKind::DiffusionTransport => build_diffusion_transport(&grid, &dt_params)?,
        };
        let mut r = run_identity_suite(&triple, seed, &tol);
        r.notes.push(format!("model {:?}, {n} nodes, seed {seed}", opts.model));
        parts.push(r);
    }
    if matches!(opts.suite, Suite::Oracle | Suite::All) {
        parts.push(run_oracle_suite(n, &tol)?);
    }
    if matches!(opts.suite, Suite::Sweep | Suite::All) {
        let sweep_n = if opts.suite == Suite::Sweep { opts.n_nodes.unwrap_or(SWEEP_NODES) } else { SWEEP_NODES };
        let values = parse_values(SWEEP_CD)?;
        let sweep = stability_sweep(
            &GridSpec::new(sweep_n).map_err(|e| CliError::Config(e.to_string()))?,
            &parse_values(SWEEP_K)?,
            &values,
            &values,
            DEFAULT_BAND,
        )?;
        parts.push(sweep_report(&sweep));
    }
    let name = match opts.suite {
        Suite::Identities => "identities",
        Suite::Oracle => "oracle",
        Suite::Sweep => "sweep",
        Suite::All => "all",
    };
    let report = VerificationReport::merge(name, parts);
    for check in &report.checks {
        log::info!(
            "{}: residual {:.3e}, tolerance {:.1e}, {:?}",
            check.id,
            check.residual,
            check.tolerance,
            check.wall_time
        );
    }
    let bytes = json_bytes(&report);
    match &opts.out {
        Some(dir) => write_atomic(&prepare_dir(dir)?.join("report.json"), &bytes)?,
        None => print!("{}", String::from_utf8_lossy(&bytes)),
    }
    finish(&report)
}

fn finish(report: &VerificationReport) -> Result<(), CliError> {
    let failed: Vec<&str> = report.failures().map(|c| c.id.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!("{} check(s) failed: {}", failed.len(), failed.join(", "))))
    }
}

pub fn convergence(model: ModelKind, levels: usize, t: f64, k: f64, out: &Path) -> Result<(), CliError> {
    if !(3..=MAX_LEVELS).contains(&levels) {
        return Err(CliError::Config(format!("--levels must be between 3 and {MAX_LEVELS}, got {levels}")));
    }
    let study = match model {
        ModelKind::Heat if t > 0.0 && t.is_finite() => ConvergenceStudy::HeatSeries { t },
        ModelKind::DiffusionTransport if k >= 0.0 && k.is_finite() => ConvergenceStudy::DirichletMap { k },
        _ => return Err(CliError::Config("--t must be positive and --k non-negative".into())),
    };
    let table = convergence_study(study, &refinement_levels(levels))?;
    let mut csv = Csv::new(&["h", "error", "observed_order"]);
    for row in &table.rows {
        csv.row([num(row.h), num(row.error), row.observed_order.map(num).unwrap_or_default()]);
    }
    write_atomic(&prepare_dir(out)?.join("convergence.csv"), &csv.into_bytes())?;
    for row in &table.rows {
        log::info!("n = {}: error {:.3e}, order {:?}", row.n_nodes, row.error, row.observed_order);
    }
    if table.all_in_range() {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "observed orders {:?} outside [{}, {}]",
            table.orders(),
            ORDER_RANGE.0,
            ORDER_RANGE.1
        )))
    }
}

/// A comma-separated list or an inclusive `lo:hi:step` range.
pub fn parse_values(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = |msg: &str| CliError::Config(format!("{msg}: {text:?}"));
    let text = text.trim();
    if text.is_empty() {
        return Err(bad("empty value list"));
    }
    let parse = |s: &str| s.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| bad("not a number"));
    let values = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [lo, hi, step] = parts[..] else {
            return Err(bad("range must be lo:hi:step"));
        };
        let (lo, hi, step) = (parse(lo)?, parse(hi)?, parse(step)?);
        if !(step > 0.0) {
            return Err(bad("range step must be positive"));
        }
        let count = ((hi - lo) / step + 1e-9).floor();
        if count < 0.0 {
            return Err(bad("empty range"));
        }
        (0..=count as usize).map(|i| lo + i as f64 * step).collect()
    } else {
        text.split(',').map(parse).collect::<Result<Vec<_>, _>>()?
    };
    Ok(values)
}

fn sweep_csv(result: &SweepResult) -> Csv {
    let mut csv = Csv::new(&["k", "c", "d", "sbound_generator", "sbound_B0", "positivity", "agreement"]);
    for cell in &result.cells {
        let agreement = match cell.agreement {
            Some(true) => "true",
            Some(false) => "false",
            None => "excluded",
        };
        csv.row([
            num(cell.k),
            num(cell.c),
            num(cell.d),
            num(cell.sbound_generator),
            num(cell.sbound_b0),
            cell.positivity.to_string(),
            agreement.to_string(),
        ]);
    }
    csv
}

pub fn sweep(k: &str, c: &str, d: &str, n: usize, band: f64, out: &Path) -> Result<(), CliError> {
    let (k, c, d) = (parse_values(k)?, parse_values(c)?, parse_values(d)?);
    if k.iter().any(|&x| x < 0.0) {
        return Err(CliError::Config("--k values must be non-negative".into()));
    }
    if !(band > 0.0) {
        return Err(CliError::Config(format!("--band must be positive, got {band}")));
    }
    let grid = GridSpec::new(n).map_err(|e| CliError::Config(e.to_string()))?;
    let result = stability_sweep(&grid, &k, &c, &d, band)?;
    write_atomic(&prepare_dir(out)?.join("sweep.csv"), &sweep_csv(&result).into_bytes())?;
    let report = sweep_report(&result);
    for note in &report.notes {
        log::info!("{note}");
    }
    finish(&report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_lists_and_ranges() {
        assert_eq!(parse_values("0,1,4").unwrap(), vec![0.0, 1.0, 4.0]);
        assert_eq!(parse_values("-6:-2:2").unwrap(), vec![-6.0, -4.0, -2.0]);
        assert_eq!(parse_values("0:1:0.25").unwrap().len(), 5);
        assert_eq!(parse_values("-3").unwrap(), vec![-3.0]);
        assert!(parse_values("").is_err());
        assert!(parse_values("2:1:0.5").is_err());
        assert!(parse_values("0:1:0").is_err());
        assert!(parse_values("0:1").is_err());
        assert!(parse_values("a,b").is_err());
    }
}
