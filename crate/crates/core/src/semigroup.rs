//! Time evolution on the product space `X × ∂X`.
//!
//! `T(t) = e^{tA₀}` is the bulk semigroup, `Q(t)` the upper-right block of
//! the coupled semigroup, and `𝒯(t) = [[T(t), Q(t)], [0, I]]` the semigroup
//! generated by `𝒜`. Solvers evaluate `e^{t𝒢}` directly at every requested
//! time, so the time grid is a reporting choice except where a quadrature
//! is involved.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::exec;
use crate::numerics::{
    self, expm, inverse, norm_inf, simpson_weights, spectral_bound as matrix_spectral_bound, Scalar,
};
use crate::triple::{BlockMatrix, MaximalTriple};

/// Boundary forcing `ψ(t)` of the inhomogeneous problem.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundarySignal {
    Zero {
        dim: usize,
    },
    Constant(DVector<f64>),
    /// Piecewise-linear interpolation of the samples, held constant outside.
    Sampled {
        times: Vec<f64>,
        values: Vec<DVector<f64>>,
    },
    /// `amplitude · sin(frequency·t + phase)`, componentwise.
    Sine {
        amplitude: DVector<f64>,
        frequency: f64,
        phase: f64,
    },
}

impl BoundarySignal {
    pub fn zero(dim: usize) -> Self {
        Self::Zero { dim }
    }

    pub fn constant(value: &[f64]) -> Self {
        Self::Constant(DVector::from_column_slice(value))
    }

    pub fn sine(amplitude: &[f64], frequency: f64, phase: f64) -> Self {
        Self::Sine { amplitude: DVector::from_column_slice(amplitude), frequency, phase }
    }

    pub fn sampled(times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(invalid("sampled signal needs one value per sample time"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
            return Err(invalid("sample times must be finite and strictly increasing"));
        }
        let dim = values[0].len();
        if dim == 0 || values.iter().any(|v| v.len() != dim) {
            return Err(invalid("sampled values must share one non-zero dimension"));
        }
        if values.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("sampled boundary signal"));
        }
        Ok(Self::Sampled { times, values: values.into_iter().map(DVector::from_vec).collect() })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Zero { dim } => *dim,
            Self::Constant(v) => v.len(),
            Self::Sampled { values, .. } => values[0].len(),
            Self::Sine { amplitude, .. } => amplitude.len(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Zero { .. })
    }

    pub fn eval(&self, t: f64) -> DVector<f64> {
        match self {
            Self::Zero { dim } => DVector::zeros(*dim),
            Self::Constant(v) => v.clone(),
            Self::Sine { amplitude, frequency, phase } => amplitude * (frequency * t + phase).sin(),
            Self::Sampled { times, values } => {
                let idx = times.partition_point(|&s| s <= t);
                if idx == 0 {
                    values[0].clone()
                } else if idx == times.len() {
                    values[idx - 1].clone()
                } else {
                    let (t0, t1) = (times[idx - 1], times[idx]);
                    let w = (t - t0) / (t1 - t0);
                    &values[idx - 1] * (1.0 - w) + &values[idx] * w
                }
            }
        }
    }

    /// Whether the signal is defined by data (not extrapolated) on `[0, t_max]`.
    pub fn covers(&self, t_max: f64) -> bool {
        match self {
            Self::Sampled { times, .. } => times[0] <= 0.0 && *times.last().unwrap() >= t_max,
            _ => true,
        }
    }

    fn eval_as<T: Scalar>(&self, t: f64) -> DVector<T> {
        self.eval(t).map(T::lift)
    }
}

/// Time-stamped product-space states `(u(t), v(t))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T: Scalar = f64> {
    p: usize,
    m: usize,
    times: Vec<f64>,
    states: Vec<DVector<T>>,
}

/// Checks that `times` starts at 0 and increases strictly.
pub fn validate_times(times: &[f64]) -> Result<()> {
    if times.is_empty() || times[0] != 0.0 {
        return Err(invalid("time grid must start at t = 0"));
    }
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("time grid must be finite and strictly increasing"));
    }
    Ok(())
}

/// `n_steps + 1` equally spaced times on `[0, t_end]`.
pub fn uniform_times(t_end: f64, n_steps: usize) -> Vec<f64> {
    (0..=n_steps).map(|k| if k == n_steps { t_end } else { t_end * k as f64 / n_steps as f64 }).collect()
}

impl<T: Scalar> Trajectory<T> {
    pub fn new(p: usize, m: usize, times: Vec<f64>, states: Vec<DVector<T>>) -> Result<Self> {
        validate_times(&times)?;
        if states.len() != times.len() {
            return Err(invalid("one state per time point required"));
        }
        if states.iter().any(|s| s.len() != p + m) {
            return Err(Error::DimensionMismatch(format!("every state must have dimension {}", p + m)));
        }
        Ok(Self { p, m, times, states })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DVector<T>] {
        &self.states
    }

    pub fn state(&self, k: usize) -> &DVector<T> {
        &self.states[k]
    }

    pub fn u(&self, k: usize) -> DVector<T> {
        self.states[k].rows(0, self.p).into_owned()
    }

    pub fn v(&self, k: usize) -> DVector<T> {
        self.states[k].rows(self.p, self.m).into_owned()
    }

    /// Index of the stored time within `tol` of `t`.
    pub fn index_of(&self, t: f64, tol: f64) -> Option<usize> {
        let idx = self.times.partition_point(|&s| s < t - tol);
        (idx < self.times.len() && (self.times[idx] - t).abs() <= tol).then_some(idx)
    }

    /// `max_k ‖x_k − y(t_k)‖_∞` over the times of `self`, looked up in `other`.
    pub fn max_distance(&self, other: &Trajectory<T>) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (k, &t) in self.times.iter().enumerate() {
            let j = other
                .index_of(t, 1e-9 * t.abs().max(1.0))
                .ok_or_else(|| invalid(format!("time {t} missing from the reference trajectory")))?;
            worst = worst.max(numerics::vec_norm_inf(&(&self.states[k] - &other.states[j])));
        }
        Ok(worst)
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(invalid(format!("time must be finite and non-negative, got {t}")));
    }
    Ok(())
}

fn check_panels(n_panels: usize) -> Result<()> {
    if n_panels < 2 || !n_panels.is_multiple_of(2) {
        return Err(invalid(format!("Simpson needs an even panel count >= 2, got {n_panels}")));
    }
    Ok(())
}

/// Even panel count that keeps `rate · Δs ≤ theta` on a span, at least `base`.
pub fn resolved_panels(span: f64, rate: f64, theta: f64, base: usize) -> usize {
    let needed = (span * rate / theta).ceil();
    let n = if needed.is_finite() && needed > base as f64 { needed as usize } else { base };
    (n + n % 2).max(2)
}

/// Simpson approximation of `∫_0^span weight(s)·T(s)·x ds`.
///
/// The nodes `T(kΔ)x` are generated by stepping with `e^{ΔA₀}` from chunk
/// starts evaluated directly; chunks run in parallel and partial sums are
/// added in chunk order.
fn simpson_orbit<T, W>(a0: &DMatrix<T>, x: &DMatrix<T>, span: f64, n_panels: usize, weight: W) -> Result<DMatrix<T>>
where
    T: Scalar,
    W: Fn(f64) -> T + Sync + Send,
{
    const CHUNK: usize = 512;
    check_panels(n_panels)?;
    let step = span / n_panels as f64;
    let weights = simpson_weights(n_panels, step);
    let stepper = expm(&(a0 * T::lift(step)))?;
    let nodes = n_panels + 1;
    let chunks = nodes.div_ceil(CHUNK);

    let partials = exec::try_map_indexed(chunks, |c| -> Result<DMatrix<T>> {
        let start = c * CHUNK;
        let end = ((c + 1) * CHUNK).min(nodes);
        let mut current = expm(&(a0 * T::lift(start as f64 * step)))? * x;
        let mut acc = DMatrix::<T>::zeros(x.nrows(), x.ncols());
        for (k, &w) in weights.iter().enumerate().take(end).skip(start) {
            let s = k as f64 * step;
            acc += &current * (weight(s) * T::lift(w));
            if k + 1 < end {
                current = &stepper * &current;
            }
        }
        Ok(acc)
    })?;
    let mut total = DMatrix::<T>::zeros(x.nrows(), x.ncols());
    for part in partials {
        total += part;
    }
    Ok(total)
}

/// `T(t) = e^{tA₀}`.
pub fn propagator<T: Scalar>(triple: &MaximalTriple<T>, t: f64) -> Result<DMatrix<T>> {
    check_time(t)?;
    expm(&(triple.restrict_a0() * T::lift(t)))
}

/// `Q_λ(t) = (λ − A₀)·∫_0^t T(s)·D_λ ds` with composite Simpson.
pub fn q_quadrature<T: Scalar>(triple: &MaximalTriple<T>, lambda: T, t: f64, n_panels: usize) -> Result<DMatrix<T>> {
    check_time(t)?;
    check_panels(n_panels)?;
    let a0 = triple.restrict_a0();
    let d = triple.dirichlet_map(lambda)?;
    let integral = simpson_orbit(&a0, &d.state, t, n_panels, |_| T::one())?;
    let p = triple.p();
    Ok((DMatrix::<T>::identity(p, p) * lambda - a0) * integral)
}

/// `Q(t) = (I − T(t))·D₀`, requiring `0 ∉ σ(A₀)`.
pub fn q_closed_form<T: Scalar>(triple: &MaximalTriple<T>, t: f64) -> Result<DMatrix<T>> {
    check_time(t)?;
    let d0 = triple.dirichlet_map(T::zero()).map_err(|e| match e {
        Error::LambdaInSpectrum { .. } => Error::ZeroInSpectrum,
        other => other,
    })?;
    let p = triple.p();
    Ok((DMatrix::<T>::identity(p, p) - propagator(triple, t)?) * d0.state)
}

/// `Q(t)` by the closed form, or by quadrature at a regular point when `0 ∈ σ(A₀)`.
pub fn q_family<T: Scalar>(triple: &MaximalTriple<T>, t: f64) -> Result<DMatrix<T>> {
    match q_closed_form(triple, t) {
        Err(Error::ZeroInSpectrum) => {
            let rate = norm_inf(&triple.restrict_a0());
            let panels = resolved_panels(t, rate, 0.05, 256);
            let mut last = Error::ZeroInSpectrum;
            for lambda in [1.0, 2.0, 3.5, 5.0] {
                match q_quadrature(triple, T::lift(lambda), t, panels) {
                    Err(e @ Error::LambdaInSpectrum { .. }) => last = e,
                    other => return other,
                }
            }
            Err(last)
        }
        other => other,
    }
}

/// `𝒯(t) = [[T(t), Q(t)], [0, I]]`, the semigroup of the `B = 0` generator.
pub fn block_semigroup<T: Scalar>(triple: &MaximalTriple<T>, t: f64) -> Result<BlockMatrix<T>> {
    let (p, m) = (triple.p(), triple.m());
    BlockMatrix::from_blocks(
        &propagator(triple, t)?,
        &q_family(triple, t)?,
        &DMatrix::zeros(m, p),
        &DMatrix::identity(m, m),
    )
}

fn initial_state<T: Scalar>(triple: &MaximalTriple<T>, f: &DVector<T>, g: &DVector<T>) -> Result<DVector<T>> {
    let (p, m) = (triple.p(), triple.m());
    if f.len() != p || g.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "initial data must be (p = {p}, m = {m}), got ({}, {})",
            f.len(),
            g.len()
        )));
    }
    Ok(DVector::from_iterator(p + m, f.iter().chain(g.iter()).copied()))
}

/// `𝒰(t) = e^{t𝒢}(f, g)` with `𝒢 = Ã` when the triple carries `B`, else `𝒜`.
pub fn solve_homogeneous<T: Scalar>(
    triple: &MaximalTriple<T>,
    f: &DVector<T>,
    g: &DVector<T>,
    times: &[f64],
) -> Result<Trajectory<T>> {
    validate_times(times)?;
    let x0 = initial_state(triple, f, g)?;
    let generator = triple.generator();
    let states = exec::try_map_indexed(times.len(), |k| -> Result<DVector<T>> {
        if times[k] == 0.0 {
            return Ok(x0.clone());
        }
        Ok(expm(&(generator.matrix() * T::lift(times[k])))? * &x0)
    })?;
    Trajectory::new(triple.p(), triple.m(), times.to_vec(), states)
}

/// Variation of constants `𝒰(t) = e^{t𝒢}(f,g) + ∫_0^t e^{(t−s)𝒢}(0, ψ(s)) ds`.
///
/// The convolution uses exponential Simpson weights: on each double panel
/// `ψ` is replaced by its quadratic interpolant and the product with the
/// semigroup is integrated exactly (augmented-matrix exponential), so stiff
/// bulk modes do not degrade the rule. For `B = 0` the boundary component
/// reduces to plain composite Simpson of `ψ`.
pub fn solve_inhomogeneous<T: Scalar>(
    triple: &MaximalTriple<T>,
    f: &DVector<T>,
    g: &DVector<T>,
    psi: &BoundarySignal,
    times: &[f64],
    n_panels: usize,
) -> Result<Trajectory<T>> {
    validate_times(times)?;
    check_panels(n_panels)?;
    let (p, m) = (triple.p(), triple.m());
    if psi.dim() != m {
        return Err(Error::DimensionMismatch(format!("signal dimension {} differs from m = {m}", psi.dim())));
    }
    let t_max = *times.last().unwrap();
    if !psi.covers(t_max) {
        return Err(invalid(format!("boundary signal does not cover [0, {t_max}]")));
    }
    if psi.is_zero() {
        return solve_homogeneous(triple, f, g, times);
    }
    let x0 = initial_state(triple, f, g)?;
    let generator = triple.generator();
    let dim = p + m;

    let states = exec::try_map_indexed(times.len(), |k| -> Result<DVector<T>> {
        let t = times[k];
        if t == 0.0 {
            return Ok(x0.clone());
        }
        let homogeneous = expm(&(generator.matrix() * T::lift(t)))? * &x0;
        let step = t / n_panels as f64;
        let (stepper, weights) = exponential_simpson_weights(generator.matrix(), p, m, step)?;
        let mut acc = DVector::<T>::zeros(dim);
        for panel in 0..n_panels / 2 {
            let s0 = 2.0 * panel as f64 * step;
            acc = &stepper * acc
                + &weights[0] * psi.eval_as::<T>(s0)
                + &weights[1] * psi.eval_as::<T>(s0 + step)
                + &weights[2] * psi.eval_as::<T>(s0 + 2.0 * step);
        }
        Ok(homogeneous + acc)
    })?;
    Trajectory::new(p, m, times.to_vec(), states)
}

/// `e^{2Δ𝒢}` and the weights `W_j = ∫_0^{2Δ} e^{(2Δ−σ)𝒢} E ℓ_j(σ) dσ` for the
/// quadratic Lagrange basis on `{0, Δ, 2Δ}`, `E` the boundary injection.
fn exponential_simpson_weights<T: Scalar>(
    generator: &DMatrix<T>,
    p: usize,
    m: usize,
    step: f64,
) -> Result<(DMatrix<T>, [DMatrix<T>; 3])> {
    let dim = p + m;
    let size = dim + 3 * m;
    // in the scaled variable τ = σ/Δ ∈ [0, 2] the chain E → τ → τ²/2 is nilpotent
    let mut aug = DMatrix::<T>::zeros(size, size);
    aug.view_mut((0, 0), (dim, dim)).copy_from(&(generator * T::lift(step)));
    for i in 0..m {
        aug[(p + i, dim + i)] = T::one();
        aug[(dim + i, dim + m + i)] = T::one();
        aug[(dim + m + i, dim + 2 * m + i)] = T::one();
    }
    let big = expm(&(aug * T::lift(2.0)))?;
    let stepper = big.view((0, 0), (dim, dim)).into_owned();
    // Y0 = ∫E, Y1 = ∫Eτ, Y2 = ∫Eτ²/2 against e^{(2−τ)Δ𝒢} over τ ∈ [0, 2]
    let y0 = big.view((0, dim), (dim, m)).into_owned();
    let y1 = big.view((0, dim + m), (dim, m)).into_owned();
    let y2 = big.view((0, dim + 2 * m), (dim, m)).into_owned();
    let h = T::lift(step);
    let half = T::lift(0.5);
    let three_halves = T::lift(1.5);
    let two = T::lift(2.0);
    // ℓ0 = (τ²−3τ+2)/2, ℓ1 = 2τ−τ², ℓ2 = (τ²−τ)/2
    let w0 = (&y2 - &y1 * three_halves + &y0) * h;
    let w1 = (&y1 * two - &y2 * two) * h;
    let w2 = (&y2 - &y1 * half) * h;
    Ok((stepper, [w0, w1, w2]))
}

/// What drives the boundary component in [`integrated_problem_residual`].
#[derive(Debug, Clone, Copy)]
pub enum Forcing<'a> {
    /// `v̇ = ψ(t)`.
    Signal(&'a BoundarySignal),
    /// `v̇ = B u`, using the triple's feedback operator.
    Feedback,
}

/// Largest defect of the integrated problem along a uniform-grid trajectory:
///
/// `u(t) = f + A∫_0^t u` and `L∫_0^t u = t g + ∫_0^t (B∫_0^s u + ∫_0^s ψ) ds`,
///
/// with `u(s)` the reconstructed domain element and every time integral
/// taken by the trapezoidal rule on the trajectory grid.
pub fn integrated_problem_residual<T: Scalar>(
    triple: &MaximalTriple<T>,
    trajectory: &Trajectory<T>,
    g: &DVector<T>,
    forcing: Forcing<'_>,
) -> Result<f64> {
    let times = trajectory.times();
    if times.len() < 2 {
        return Err(invalid("integrated residual needs at least two time points"));
    }
    let dt = times[1] - times[0];
    if times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1e-300)) {
        return Err(invalid("integrated residual needs a uniform time grid"));
    }
    if g.len() != triple.m() || trajectory.p() != triple.p() || trajectory.m() != triple.m() {
        return Err(Error::DimensionMismatch("trajectory does not match the triple".into()));
    }
    let feedback = match forcing {
        Forcing::Feedback => Some(triple.feedback().ok_or(Error::MissingFeedback)?),
        Forcing::Signal(psi) if psi.dim() != triple.m() => {
            return Err(Error::DimensionMismatch("signal dimension differs from m".into()))
        }
        Forcing::Signal(_) => None,
    };

    let domain: Vec<DVector<T>> =
        (0..trajectory.len()).map(|k| triple.reconstruct(&trajectory.u(k), &trajectory.v(k))).collect::<Result<_>>()?;
    let f = trajectory.u(0);
    let half_dt = T::lift(0.5 * dt);

    let n = triple.n();
    let m = triple.m();
    let mut w_int = DVector::<T>::zeros(n); // ∫_0^t w
    let mut drive_prev = DVector::<T>::zeros(m); // B∫w or ∫ψ at the previous node
    let mut drive_int = DVector::<T>::zeros(m); // ∫_0^t (…) ds
    let mut psi_int = DVector::<T>::zeros(m);
    let mut worst: f64 = 0.0;

    for k in 0..trajectory.len() {
        if k > 0 {
            w_int += (&domain[k - 1] + &domain[k]) * half_dt;
            if let Forcing::Signal(psi) = forcing {
                psi_int += (psi.eval_as::<T>(times[k - 1]) + psi.eval_as::<T>(times[k])) * half_dt;
            }
        }
        let drive = match feedback {
            Some(b) => b * &w_int,
            None => psi_int.clone(),
        };
        if k > 0 {
            drive_int += (&drive_prev + &drive) * half_dt;
        }
        drive_prev = drive;

        let bulk = trajectory.u(k) - &f - triple.maximal() * &w_int;
        let boundary = triple.trace() * &w_int - g * T::lift(times[k]) - &drive_int;
        worst = worst.max(numerics::vec_norm_inf(&bulk)).max(numerics::vec_norm_inf(&boundary));
    }
    Ok(worst)
}

/// `‖∫_0^{T_max} e^{−λt}Q(t) dt − D_λ/λ‖_∞` with composite Simpson in `t`.
pub fn laplace_transform_residual<T: Scalar>(
    triple: &MaximalTriple<T>,
    lambda: T,
    t_max: f64,
    n_panels: usize,
) -> Result<f64> {
    if lambda == T::zero() {
        return Err(invalid("Laplace check requires lambda != 0"));
    }
    check_time(t_max)?;
    let a0 = triple.restrict_a0();
    let bound = matrix_spectral_bound(&a0)?;
    if !(lambda.to_complex().re > bound) {
        return Err(invalid(format!(
            "Laplace check requires Re lambda > s(A0) = {bound:.6}, got {}",
            lambda.to_complex()
        )));
    }
    let d0 = triple.dirichlet_map(T::zero()).map_err(|e| match e {
        Error::LambdaInSpectrum { .. } => Error::ZeroInSpectrum,
        other => other,
    })?;
    let d_lambda = triple.dirichlet_map(lambda)?;
    let kernel = |t: f64| (-(lambda * T::lift(t))).exp();
    // Q(t) = D₀ − T(t)D₀
    let scalar_part: T = simpson_weights(n_panels, t_max / n_panels as f64)
        .iter()
        .enumerate()
        .map(|(k, &w)| kernel(k as f64 * t_max / n_panels as f64) * T::lift(w))
        .fold(T::zero(), |a, b| a + b);
    let orbit = simpson_orbit(&a0, &d0.state, t_max, n_panels, kernel)?;
    let transform = &d0.state * scalar_part - orbit;
    Ok(numerics::diff_norm_inf(&transform, &(d_lambda.state * (T::one() / lambda))))
}

/// Maximum real part of the spectrum of `m`.
pub fn spectral_bound<T: Scalar>(m: &DMatrix<T>) -> Result<f64> {
    matrix_spectral_bound(m)
}

/// One `(r, s)` sample of the sector estimate.
#[derive(Debug, Clone, Serialize)]
pub struct SectorSample {
    pub r: f64,
    pub s: f64,
    /// `‖s·R(r+is, A₀)‖_∞`
    pub bulk_norm: f64,
    /// `‖s·R(r+is, 𝒜)‖_∞`
    pub generator_norm: f64,
    /// bound with `C` replaced by this sample's `bulk_norm`
    pub local_bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SectorReport {
    pub mu: f64,
    /// measured `C = max ‖s·R(r+is, A₀)‖`
    pub c_measured: f64,
    pub dirichlet_norm: f64,
    /// `C + ‖D_μ‖ + C‖D_μ‖ + 1`
    pub bound: f64,
    pub samples: Vec<SectorSample>,
}

impl SectorReport {
    pub fn all_pass(&self) -> bool {
        self.samples.iter().all(|s| s.pass)
    }

    /// `max(0, ‖s·R(λ,𝒜)‖ − bound)` over the samples.
    pub fn excess(&self) -> f64 {
        self.samples.iter().map(|s| (s.generator_norm - self.bound).max(0.0)).fold(0.0, f64::max)
    }
}

/// Samples `‖s·R(r+is, 𝒜)‖ ≤ C + ‖D_μ‖ + C‖D_μ‖ + 1` with `C` measured on `A₀`.
///
/// `R(λ, 𝒜)` is taken as the dense inverse of `λ − 𝒜`, independent of the
/// block resolvent formula.
pub fn sector_estimate(
    triple: &MaximalTriple<f64>,
    r_values: &[f64],
    s_values: &[f64],
    mu: f64,
) -> Result<SectorReport> {
    if r_values.is_empty() || s_values.is_empty() {
        return Err(invalid("sector estimate needs at least one r and one s"));
    }
    if r_values.iter().any(|&r| !(r > 0.0)) || s_values.iter().any(|&s| s == 0.0 || !s.is_finite()) {
        return Err(invalid("sector samples need r > 0 and s != 0"));
    }
    let d_mu = triple.dirichlet_map(mu)?;
    let dirichlet_norm = norm_inf(&d_mu.state);
    let complex = triple.to_complex();
    let generator = complex.build_block_generator(false)?;
    let dim = generator.dim();

    let pairs: Vec<(f64, f64)> = r_values.iter().flat_map(|&r| s_values.iter().map(move |&s| (r, s))).collect();
    let norms = exec::try_map_indexed(pairs.len(), |i| -> Result<(f64, f64)> {
        let (r, s) = pairs[i];
        let lambda = Complex64::new(r, s);
        let scale = Complex64::new(s, 0.0);
        let bulk = norm_inf(&(complex.resolvent_a0(lambda)? * scale));
        let shifted = DMatrix::<Complex64>::identity(dim, dim) * lambda - generator.matrix();
        let full = norm_inf(
            &(inverse(&shifted).map_err(|_| Error::LambdaInSpectrum { lambda: format!("{lambda}") })? * scale),
        );
        Ok((bulk, full))
    })?;

    let c_measured = norms.iter().map(|n| n.0).fold(0.0, f64::max);
    let bound = c_measured + dirichlet_norm + c_measured * dirichlet_norm + 1.0;
    let samples = pairs
        .iter()
        .zip(&norms)
        .map(|(&(r, s), &(bulk_norm, generator_norm))| SectorSample {
            r,
            s,
            bulk_norm,
            generator_norm,
            local_bound: bulk_norm + dirichlet_norm + bulk_norm * dirichlet_norm + 1.0,
            pass: generator_norm <= bound,
        })
        .collect();
    Ok(SectorReport { mu, c_measured, dirichlet_norm, bound, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_diffusion_transport, build_heat_1d, sample_function, DTParams, GridSpec};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn heat(n: usize) -> MaximalTriple {
        build_heat_1d(&GridSpec::new(n).unwrap())
    }

    #[test]
    fn signal_evaluation() {
        let s = BoundarySignal::sampled(vec![0.0, 1.0, 3.0], vec![vec![0.0, 1.0], vec![2.0, 1.0], vec![2.0, -1.0]])
            .unwrap();
        assert_eq!(s.eval(0.5).as_slice(), &[1.0, 1.0]);
        assert_eq!(s.eval(2.0).as_slice(), &[2.0, 0.0]);
        assert_eq!(s.eval(5.0).as_slice(), &[2.0, -1.0]);
        assert!(s.covers(3.0) && !s.covers(3.5));
        assert!(BoundarySignal::sampled(vec![0.0, 0.0], vec![vec![1.0], vec![1.0]]).is_err());
        let sine = BoundarySignal::sine(&[1.0, 0.0], 1.0, 0.0);
        assert_abs_diff_eq!(sine.eval(1.0)[0], 1f64.sin());
        assert_eq!(sine.eval(1.0)[1], 0.0);
    }

    #[test]
    fn time_grid_validation() {
        assert!(validate_times(&[0.0, 0.1, 0.2]).is_ok());
        assert!(validate_times(&[0.1, 0.2]).is_err());
        assert!(validate_times(&[0.0, 0.2, 0.2]).is_err());
        assert!(validate_times(&[]).is_err());
        let u = uniform_times(1.0, 4);
        assert_eq!(u, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn propagator_basics() {
        let t = heat(5);
        assert_eq!(propagator(&t, 0.0).unwrap(), DMatrix::identity(3, 3));
        assert!(norm_inf(&propagator(&t, 5.0).unwrap()) < 1e-15);
        let (a, b) = (0.13, 0.4);
        let lhs = propagator(&t, a).unwrap() * propagator(&t, b).unwrap();
        assert!(numerics::diff_norm_inf(&lhs, &propagator(&t, a + b).unwrap()) <= 1e-10);
        assert!(propagator(&t, -1.0).is_err());
    }

    #[test]
    fn q_at_zero_time_vanishes() {
        let t = heat(5);
        assert_eq!(q_quadrature(&t, 1.0, 0.0, 2).unwrap(), DMatrix::zeros(3, 2));
        assert_eq!(q_closed_form(&t, 0.0).unwrap(), DMatrix::zeros(3, 2));
    }

    #[test]
    fn q_closed_form_tends_to_dirichlet_lift() {
        let t = heat(9);
        let d0 = t.dirichlet_map(0.0).unwrap().state;
        assert!(numerics::diff_norm_inf(&q_closed_form(&t, 20.0).unwrap(), &d0) < 1e-12);
    }

    #[test]
    fn q_quadrature_matches_closed_form_quarter_grid() {
        let t = heat(5);
        let q1 = q_quadrature(&t, 1.0, 0.5, 256).unwrap();
        let q6 = q_quadrature(&t, 6.0, 0.5, 256).unwrap();
        assert!(numerics::diff_norm_inf(&q1, &q6) <= 1e-6);
        assert!(numerics::diff_norm_inf(&q1, &q_closed_form(&t, 0.5).unwrap()) <= 1e-6);
    }

    #[test]
    fn q_family_fallback_when_zero_in_spectrum() {
        // shift A so that 0 becomes an eigenvalue of A0: A0 + 16·(2 - 2cos(πh))·I at h = 1/4
        let base = heat(5);
        let shift = 32.0 - 16.0 * 2f64.sqrt();
        let shifted = MaximalTriple::new(
            base.maximal() + base.embedding() * shift,
            base.trace().clone(),
            base.embedding().clone(),
            None,
        )
        .unwrap();
        assert_eq!(q_closed_form(&shifted, 0.3), Err(Error::ZeroInSpectrum));
        let q = q_family(&shifted, 0.3).unwrap();
        // compare with the upper-right block of e^{t𝒜}
        let g = shifted.build_block_generator(false).unwrap();
        let e = expm(&(g.matrix() * 0.3)).unwrap();
        assert!(numerics::diff_norm_inf(&q, &e.view((0, 3), (3, 2)).into_owned()) < 1e-8);
    }

    #[test]
    fn block_semigroup_identity_at_zero() {
        assert_eq!(block_semigroup(&heat(7), 0.0).unwrap().into_matrix(), DMatrix::identity(7, 7));
    }

    #[test]
    fn block_semigroup_matches_exponential() {
        let t = heat(9);
        let g = t.build_block_generator(false).unwrap();
        for time in [0.1, 1.0] {
            let e = expm(&(g.matrix() * time)).unwrap();
            assert!(numerics::diff_norm_inf(block_semigroup(&t, time).unwrap().matrix(), &e) <= 1e-9);
        }
    }

    #[test]
    fn stationary_trajectory() {
        let t = heat(9);
        let g = DVector::from_vec(vec![1.0, -0.5]);
        let f = t.dirichlet_map(0.0).unwrap().state * &g;
        let traj = solve_homogeneous(&t, &f, &g, &uniform_times(1.0, 10)).unwrap();
        for k in 0..traj.len() {
            assert!(numerics::vec_norm_inf(&(traj.u(k) - &f)) < 1e-12);
            assert_eq!(traj.v(k), g);
        }
    }

    #[test]
    fn sine_mode_decays_like_heat_series() {
        let grid = GridSpec::new(33).unwrap();
        let t = build_heat_1d(&grid);
        let (f, _) = sample_function(&grid, |x| (PI * x).sin());
        let traj = solve_homogeneous(&t, &f, &DVector::zeros(2), &[0.0, 0.1]).unwrap();
        let exact = &f * (-PI * PI * 0.1).exp();
        // O(h²) spatial error
        assert!(numerics::vec_norm_inf(&(traj.u(1) - exact)) < 2e-3);
    }

    #[test]
    fn zero_signal_matches_homogeneous() {
        let t = heat(9);
        let f = DVector::from_element(7, 0.3);
        let g = DVector::from_vec(vec![1.0, 0.0]);
        let times = uniform_times(0.5, 5);
        let a = solve_inhomogeneous(&t, &f, &g, &BoundarySignal::zero(2), &times, 16).unwrap();
        let b = solve_homogeneous(&t, &f, &g, &times).unwrap();
        assert_eq!(a, b);
        let c = solve_inhomogeneous(&t, &f, &g, &BoundarySignal::constant(&[0.0, 0.0]), &times, 16).unwrap();
        assert!(c.max_distance(&b).unwrap() < 1e-12);
    }

    #[test]
    fn constant_signal_ramps_boundary() {
        let t = heat(17);
        let traj = solve_inhomogeneous(
            &t,
            &DVector::zeros(15),
            &DVector::zeros(2),
            &BoundarySignal::constant(&[1.0, 1.0]),
            &uniform_times(1.0, 4),
            8,
        )
        .unwrap();
        for k in 0..traj.len() {
            let tk = traj.times()[k];
            assert_abs_diff_eq!(traj.v(k)[0], tk, epsilon = 1e-12);
            assert_abs_diff_eq!(traj.v(k)[1], tk, epsilon = 1e-12);
        }
    }

    #[test]
    fn inhomogeneous_matches_augmented_exponential() {
        // ψ(t) = (sin t, 0) is generated by the linear system (y1, y2)' = (y2, −y1)
        let grid = GridSpec::new(17).unwrap();
        let t = build_heat_1d(&grid);
        let g = t.build_block_generator(false).unwrap();
        let dim = g.dim();
        let mut aug = DMatrix::zeros(dim + 2, dim + 2);
        aug.view_mut((0, 0), (dim, dim)).copy_from(g.matrix());
        aug[(dim - 2, dim)] = 1.0;
        aug[(dim, dim + 1)] = 1.0;
        aug[(dim + 1, dim)] = -1.0;
        let mut x0 = DVector::zeros(dim + 2);
        x0[dim + 1] = 1.0;
        let exact = (expm(&aug).unwrap() * x0).rows(0, dim).into_owned();

        let traj = solve_inhomogeneous(
            &t,
            &DVector::zeros(15),
            &DVector::zeros(2),
            &BoundarySignal::sine(&[1.0, 0.0], 1.0, 0.0),
            &[0.0, 1.0],
            64,
        )
        .unwrap();
        assert!(numerics::vec_norm_inf(&(traj.state(1) - exact)) < 1e-8);
    }

    #[test]
    fn integrated_residual_detects_corruption() {
        let grid = GridSpec::new(33).unwrap();
        let t = build_heat_1d(&grid);
        let (f, g) = sample_function(&grid, |x| (PI * x).sin());
        let traj = solve_homogeneous(&t, &f, &g, &uniform_times(1.0, 1000)).unwrap();
        let zero = BoundarySignal::zero(2);
        let r = integrated_problem_residual(&t, &traj, &g, Forcing::Signal(&zero)).unwrap();
        assert!(r <= 1e-4, "residual {r}");

        let mut states = traj.states().to_vec();
        states[500][3] += 1.0;
        let bad = Trajectory::new(31, 2, traj.times().to_vec(), states).unwrap();
        assert!(integrated_problem_residual(&t, &bad, &g, Forcing::Signal(&zero)).unwrap() >= 0.5);
    }

    #[test]
    fn integrated_residual_stationary() {
        let t = heat(9);
        let g = DVector::from_vec(vec![2.0, 1.0]);
        let f = t.dirichlet_map(0.0).unwrap().state * &g;
        let traj = solve_homogeneous(&t, &f, &g, &uniform_times(1.0, 100)).unwrap();
        let r = integrated_problem_residual(&t, &traj, &g, Forcing::Signal(&BoundarySignal::zero(2))).unwrap();
        assert!(r <= 1e-9, "residual {r}");
    }

    #[test]
    fn integrated_residual_requires_feedback() {
        let t = heat(9);
        let traj = solve_homogeneous(&t, &DVector::zeros(7), &DVector::zeros(2), &uniform_times(1.0, 4)).unwrap();
        assert_eq!(
            integrated_problem_residual(&t, &traj, &DVector::zeros(2), Forcing::Feedback),
            Err(Error::MissingFeedback)
        );
    }

    #[test]
    fn laplace_residual_and_contract() {
        let t = heat(5);
        assert!(laplace_transform_residual(&t, 2.0, 20.0, 2048).unwrap() <= 1e-4);
        assert!(laplace_transform_residual(&t, -20.0, 20.0, 2048).is_err());
        assert!(laplace_transform_residual(&t, 0.0, 20.0, 2048).is_err());
    }

    #[test]
    fn spectral_bounds() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, -2.0]));
        assert_abs_diff_eq!(spectral_bound(&d).unwrap(), -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            spectral_bound(&heat(5).restrict_a0()).unwrap(),
            -32.0 + 16.0 * 2f64.sqrt(),
            epsilon = 1e-12
        );
        let b0 = DMatrix::from_row_slice(2, 2, &[-1.0, 1.0, 1.0, -1.0]);
        assert_abs_diff_eq!(spectral_bound(&b0).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn sector_samples() {
        let t = heat(17);
        let report = sector_estimate(&t, &[0.1, 1.0], &[1.0, -1.0, 10.0, -10.0, 100.0, -100.0], 1.0).unwrap();
        assert!(report.all_pass());
        assert!(report.samples.iter().all(|s| s.generator_norm <= s.local_bound));
        assert!(sector_estimate(&t, &[0.0], &[1.0], 1.0).is_err());
        assert!(sector_estimate(&t, &[1.0], &[0.0], 1.0).is_err());
    }

    #[test]
    fn feedback_generator_used_when_present() {
        let grid = GridSpec::new(9).unwrap();
        let t = build_diffusion_transport(&grid, &DTParams::new(1.0, -2.0, -2.0).unwrap()).unwrap();
        let f = DVector::from_element(7, 1.0);
        let g = DVector::from_vec(vec![1.0, 1.0]);
        let traj = solve_homogeneous(&t, &f, &g, &[0.0, 0.5]).unwrap();
        // with c, d < 0 the boundary values must move
        assert!(traj.v(1)[0] < 1.0);
    }
}
