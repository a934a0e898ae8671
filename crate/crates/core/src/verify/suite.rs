use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec;
use crate::numerics::{
    self, eigenvalues, expm, inverse, norm_inf, numerical_abscissa, simpson_weights, spectrum_distance,
};
use crate::semigroup::{
    block_semigroup, integrated_problem_residual, laplace_transform_residual, propagator, q_closed_form, q_quadrature,
    resolved_panels, sector_estimate, solve_homogeneous, solve_inhomogeneous, uniform_times, BoundarySignal, Forcing,
};
use crate::triple::MaximalTriple;

use super::oracles::rk4_reference;
use super::report::{run_checks, CheckFn, Tolerances, VerificationReport};
use super::scenarios::{shipped_scenarios, ORACLE_DT, RESIDUAL_DT};

pub const DEFAULT_SEED: u64 = 42;

/// Spectral parameters are drawn from `[0.5, 20]`.
const LAMBDA_RANGE: std::ops::Range<f64> = 0.5..20.0;
/// Simpson panels per unit of `‖A₀‖·Δs` for the Q-family and Laplace checks.
const Q_THETA: f64 = 0.1;
const LAPLACE_THETA: f64 = 0.25;
const LAPLACE_LAMBDA: f64 = 2.0;

fn max_of(values: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    values.into_iter().try_fold(0.0f64, |acc, v| Ok(acc.max(v?)))
}

fn plain(value: Result<f64>) -> Result<(f64, Option<String>)> {
    value.map(|v| (v, None))
}

struct Draws {
    pairs: Vec<(f64, f64)>,
    lambdas: Vec<f64>,
    shifts: Vec<f64>,
    times: Vec<f64>,
    time_pairs: Vec<(f64, f64)>,
    q_draws: Vec<(f64, f64, f64)>,
    noise: Vec<f64>,
    amplitudes: [f64; 2],
}

impl Draws {
    fn new(seed: u64, dim: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pairs = (0..20).map(|_| (rng.random_range(LAMBDA_RANGE), rng.random_range(LAMBDA_RANGE))).collect();
        let lambdas = (0..20).map(|_| rng.random_range(LAMBDA_RANGE)).collect();
        let shifts = (0..3).map(|_| rng.random_range(LAMBDA_RANGE)).collect();
        let mut times: Vec<f64> = vec![0.1, 0.5, 1.0];
        times.extend((0..3).map(|_| rng.random_range(0.0..1.0)));
        let time_pairs = (0..10).map(|_| (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0))).collect();
        let q_draws = (0..10)
            .map(|_| (rng.random_range(LAMBDA_RANGE), rng.random_range(LAMBDA_RANGE), rng.random_range(0.1..1.0)))
            .collect();
        let noise = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let amplitudes = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        Self { pairs, lambdas, shifts, times, time_pairs, q_draws, noise, amplitudes }
    }
}

/// Every matrix identity of the operator construction and the semigroup
/// formulas, with seeded random spectral parameters and times.
pub fn run_identity_suite(triple: &MaximalTriple, seed: u64, tol: &Tolerances) -> VerificationReport {
    let draws = Draws::new(seed, triple.p() + triple.m());
    let bare = triple.without_feedback();
    let m = triple.m();
    let rate = norm_inf(&triple.restrict_a0()).max(1.0);
    let draws = &draws;
    let bare = &bare;

    let mut checks: Vec<(String, f64, CheckFn<'_>)> = Vec::new();
    macro_rules! add {
        ($id:expr, $tol:expr, $check:expr $(,)?) => {
            checks.push(($id.to_string(), $tol, $check))
        };
    }

    add!(
        "dirichlet_identity",
        tol.dirichlet_identity,
        Box::new(move || plain(max_of(draws.pairs.iter().map(|&(l, mu)| triple.dirichlet_identity_residual(l, mu))))),
    );
    add!(
        "dirichlet_constraints",
        tol.dirichlet_constraints,
        Box::new(move || {
            plain(max_of(draws.lambdas.iter().map(|&l| {
                let d = triple.dirichlet_map(l)?;
                Ok(d.trace_residual(triple).max(d.kernel_residual(triple)))
            })))
        }),
    );
    add!(
        "block_resolvent",
        tol.block_resolvent,
        Box::new(move || {
            let generator = bare.build_block_generator(false)?;
            let dim = generator.dim();
            plain(max_of(draws.lambdas[..10].iter().map(|&l| {
                let dense = inverse(&(DMatrix::identity(dim, dim) * l - generator.matrix()))?;
                Ok(numerics::diff_norm_inf(bare.block_resolvent(l)?.matrix(), &dense))
            })))
        }),
    );
    add!(
        "resolvent_rejects_zero",
        0.0,
        Box::new(move || match bare.block_resolvent(0.0) {
            Err(Error::LambdaZero) => Ok((0.0, None)),
            _ => Ok((1.0, Some("lambda = 0 was not rejected".into()))),
        }),
    );
    add!(
        "factorization",
        tol.factorization,
        Box::new(move || {
            let generator = bare.build_block_generator(false)?;
            plain(max_of(draws.lambdas[..10].iter().map(|&l| {
                let (a_l, r_l) = bare.factorize(l)?;
                Ok(generator.block.shifted(l).distance(&a_l.mul(&r_l)?))
            })))
        }),
    );
    if triple.has_feedback() {
        add!(
            "feedback_factorization",
            tol.factorization,
            Box::new(move || {
                let generator = triple.build_block_generator(true)?;
                plain(max_of(draws.lambdas[..10].iter().map(|&l| {
                    let (f, r) = triple.feedback_factorize(l)?;
                    Ok(generator.block.shifted(l).distance(&f.mul(&r)?))
                })))
            }),
        );
        add!(
            "similarity_assembly",
            tol.factorization,
            Box::new(move || {
                let generator = triple.build_block_generator(true)?;
                plain(max_of(draws.shifts.iter().map(|&l0| {
                    let s = triple.similarity_decompose(l0)?;
                    let recombined = s.recombined_generator()?.distance(&generator.block);
                    Ok(s.assembly_residual()?.max(recombined))
                })))
            }),
        );
        add!(
            "similarity_spectrum",
            tol.similarity_spectrum,
            Box::new(move || {
                let reference = eigenvalues(triple.build_block_generator(true)?.matrix())?;
                plain(max_of(draws.shifts.iter().map(|&l0| {
                    let rebuilt = triple.similarity_decompose(l0)?.recombined_generator()?;
                    Ok(spectrum_distance(&reference, &eigenvalues(rebuilt.matrix())?))
                })))
            }),
        );
    }
    add!(
        "semigroup_formula",
        tol.semigroup_formula,
        Box::new(move || {
            let generator = bare.build_block_generator(false)?;
            plain(max_of(draws.times.iter().map(|&t| {
                let dense = expm(&(generator.matrix() * t))?;
                Ok(numerics::diff_norm_inf(&dense, block_semigroup(bare, t)?.matrix()))
            })))
        }),
    );
    add!(
        "semigroup_law",
        tol.semigroup_law,
        Box::new(move || {
            let generator = triple.generator();
            plain(max_of(draws.time_pairs.iter().map(|&(t, s)| {
                let explicit = block_semigroup(bare, t)?.mul(&block_semigroup(bare, s)?)?;
                let explicit = explicit.distance(&block_semigroup(bare, t + s)?);
                let e = |x: f64| expm(&(generator.matrix() * x));
                let general = numerics::diff_norm_inf(&(e(t)? * e(s)?), &e(t + s)?);
                Ok(explicit.max(general))
            })))
        }),
    );
    add!(
        "q_family",
        tol.q_family,
        Box::new(move || {
            let worst = max_of(draws.q_draws.iter().map(|&(l, mu, t)| {
                let panels = resolved_panels(t, rate, Q_THETA, 256);
                let ql = q_quadrature(triple, l, t, panels)?;
                let qm = q_quadrature(triple, mu, t, panels)?;
                let closed = q_closed_form(triple, t)?;
                Ok(numerics::diff_norm_inf(&ql, &qm).max(numerics::diff_norm_inf(&ql, &closed)))
            }))?;
            Ok((worst, Some(format!("panels resolve |A0|·ds <= {Q_THETA}"))))
        }),
    );
    add!(
        "laplace_transform",
        tol.laplace,
        Box::new(move || {
            let t_max = 20.0 / LAPLACE_LAMBDA;
            let panels = resolved_panels(t_max, rate, LAPLACE_THETA, 2048);
            let r = laplace_transform_residual(triple, LAPLACE_LAMBDA, t_max, panels)?;
            Ok((r, Some(format!("lambda = {LAPLACE_LAMBDA}, T_max = {t_max}, {panels} panels"))))
        }),
    );
    add!(
        "semigroup_boundedness",
        tol.boundedness,
        Box::new(move || {
            let d0 = norm_inf(&bare.dirichlet_map(0.0)?.state);
            plain(max_of((0..=8).map(|k| {
                let t = 0.1 * f64::from(1u32 << k);
                let full = norm_inf(block_semigroup(bare, t)?.matrix());
                let bulk = norm_inf(&propagator(bare, t)?);
                Ok((full - (1.0 + d0)).max(bulk - 1.0).max(0.0))
            })))
        }),
    );
    add!(
        "non_dissipativity",
        0.0,
        Box::new(move || {
            let full = numerical_abscissa(bare.build_block_generator(false)?.matrix())?;
            let bulk = numerical_abscissa(&bare.restrict_a0())?;
            Ok(((-full).max(0.0) + bulk.max(0.0), Some(format!("abscissa: generator {full:.6e}, A0 {bulk:.6e}"))))
        }),
    );
    add!(
        "sector_estimate",
        0.0,
        Box::new(move || {
            let report = sector_estimate(bare, &[0.1, 1.0], &[1.0, -1.0, 10.0, -10.0, 100.0, -100.0], 1.0)?;
            Ok((report.excess(), Some(format!("C = {:.6e}, bound = {:.6e}", report.c_measured, report.bound))))
        }),
    );
    add!(
        "integrated_residual",
        tol.integrated_residual,
        Box::new(move || {
            let (f, g) = smoothed_data(triple, &draws.noise)?;
            let traj = solve_homogeneous(triple, &f, &g, &uniform_times(1.0, (1.0 / RESIDUAL_DT).round() as usize))?;
            let zero = BoundarySignal::zero(m);
            let forcing = if triple.has_feedback() { Forcing::Feedback } else { Forcing::Signal(&zero) };
            plain(integrated_problem_residual(triple, &traj, &g, forcing))
        }),
    );
    add!(
        "trace_consistency",
        tol.trace_consistency,
        Box::new(move || {
            let (f, g) = smoothed_data(triple, &draws.noise)?;
            let traj = solve_homogeneous(triple, &f, &g, &uniform_times(1.0, 100))?;
            plain(max_of((0..traj.len()).map(|k| {
                let w = triple.reconstruct(&traj.u(k), &traj.v(k))?;
                Ok(numerics::vec_norm_inf(&(triple.trace() * w - traj.v(k))))
            })))
        }),
    );
    add!(
        "boundary_quadrature",
        tol.boundary_quadrature,
        Box::new(move || {
            const PANELS: usize = 64;
            let mut amplitude = vec![0.0; m];
            for (i, a) in amplitude.iter_mut().enumerate() {
                *a = draws.amplitudes[i % 2];
            }
            let psi = BoundarySignal::sine(&amplitude, 1.0, 0.0);
            let (f, g) = smoothed_data(bare, &draws.noise)?;
            let times = [0.0, 0.5, 1.0];
            let traj = solve_inhomogeneous(bare, &f, &g, &psi, &times, PANELS)?;
            plain(max_of(times.iter().enumerate().map(|(k, &t)| {
                let step = t / PANELS as f64;
                let weights = if t > 0.0 { simpson_weights(PANELS, step) } else { vec![0.0; PANELS + 1] };
                let integral = weights
                    .iter()
                    .enumerate()
                    .fold(DVector::zeros(m), |acc, (j, &w)| acc + psi.eval(j as f64 * step) * w);
                Ok(numerics::vec_norm_inf(&(traj.v(k) - &g - integral)))
            })))
        }),
    );
    run_checks("identities", checks)
}

/// Seeded initial data run through the semigroup for a short time, which
/// removes the stiff components a raw random vector would carry.
fn smoothed_data(triple: &MaximalTriple, noise: &[f64]) -> Result<(DVector<f64>, DVector<f64>)> {
    let (p, m) = (triple.p(), triple.m());
    let raw = DVector::from_column_slice(&noise[..p + m]);
    let x = expm(&(triple.generator().matrix() * 0.25))? * raw;
    let scale = numerics::vec_norm_inf(&x);
    let x = if scale > 0.0 { x / scale } else { x };
    Ok((x.rows(0, p).into_owned(), x.rows(p, m).into_owned()))
}

/// Cross-checks of the expm-based solvers against RK4 on the shipped
/// scenarios, and their integrated-problem residuals.
pub fn run_oracle_suite(n_nodes: usize, tol: &Tolerances) -> Result<VerificationReport> {
    const PANELS: usize = 64;
    let scenarios = shipped_scenarios(n_nodes)?;
    let scenarios = &scenarios;
    let parts = exec::map_indexed(scenarios.len(), |i| {
        let s = &scenarios[i];
        let homogeneous = s.psi.is_zero();
        let solve = move |times: &[f64]| {
            if homogeneous {
                solve_homogeneous(&s.triple, &s.f, &s.g, times)
            } else {
                solve_inhomogeneous(&s.triple, &s.f, &s.g, &s.psi, times, PANELS)
            }
        };
        let oracle_tol = if homogeneous { tol.oracle_homogeneous } else { tol.oracle_inhomogeneous };
        let checks: Vec<(String, f64, CheckFn<'_>)> = vec![
            (
                format!("oracle_{}", s.name),
                oracle_tol,
                Box::new(move || {
                    let reference = rk4_reference(&s.triple, &s.f, &s.g, &s.psi, ORACLE_DT, 1.0)?;
                    plain(solve(&uniform_times(1.0, 100))?.max_distance(&reference))
                }),
            ),
            (
                format!("integrated_residual_{}", s.name),
                tol.integrated_residual,
                Box::new(move || {
                    let traj = solve(&uniform_times(1.0, (1.0 / RESIDUAL_DT).round() as usize))?;
                    plain(integrated_problem_residual(&s.triple, &traj, &s.g, s.forcing()))
                }),
            ),
        ];
        run_checks("oracle", checks)
    });
    Ok(VerificationReport::merge("oracle", parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_diffusion_transport, build_heat_1d, DTParams, GridSpec};

    fn summary(r: &VerificationReport) -> String {
        r.checks.iter().map(|c| format!("{}: {:.3e}/{:.1e}\n", c.id, c.residual, c.tolerance)).collect()
    }

    #[test]
    fn heat_suite_passes() {
        let t = build_heat_1d(&GridSpec::new(17).unwrap());
        let r = run_identity_suite(&t, DEFAULT_SEED, &Tolerances::default());
        assert!(r.all_pass(), "{}", summary(&r));
        assert!(r.get("similarity_spectrum").is_none());
    }

    #[test]
    fn feedback_suite_passes() {
        let t =
            build_diffusion_transport(&GridSpec::new(17).unwrap(), &DTParams::new(1.0, -2.0, -2.0).unwrap()).unwrap();
        let r = run_identity_suite(&t, DEFAULT_SEED, &Tolerances::default());
        assert!(r.all_pass(), "{}", summary(&r));
        assert!(r.get("similarity_spectrum").is_some());
    }

    #[test]
    fn deterministic_for_seed() {
        let t = build_heat_1d(&GridSpec::new(9).unwrap());
        let a = serde_json::to_string(&run_identity_suite(&t, 7, &Tolerances::default())).unwrap();
        let b = serde_json::to_string(&run_identity_suite(&t, 7, &Tolerances::default())).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_tolerance_fails() {
        let t = build_heat_1d(&GridSpec::new(9).unwrap());
        let r = run_identity_suite(&t, DEFAULT_SEED, &Tolerances::default().scaled(0.0));
        assert!(!r.all_pass());
        for id in ["dirichlet_identity", "block_resolvent", "q_family", "laplace_transform", "integrated_residual"] {
            assert!(!r.get(id).unwrap().pass, "{id}");
        }
    }
}
