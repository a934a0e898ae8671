//! JSON scenario configuration.
//!
//! ```json
//! {
//!   "model": "diffusion_transport",
//!   "n_nodes": 33,
//!   "params": { "k": 1.0, "c": -2.0, "d": -2.0 },
//!   "feedback": true,
//!   "initial": { "f": { "linear": { "a": 1.0, "b": 0.5 } }, "g": [1.0, 1.5] },
//!   "boundary_signal": { "type": "sine", "amplitude": [1.0, 0.0], "frequency": 1.0 },
//!   "times": { "t_end": 1.0, "n_steps": 100 },
//!   "quadrature": { "n_panels": 64 },
//!   "seed": 42
//! }
//! ```
//!
//! Unknown keys are rejected everywhere.

use std::f64::consts::PI;
use std::path::Path;

use aibvp::semigroup::{uniform_times, BoundarySignal};
use aibvp::{build_diffusion_transport, build_heat_1d, DTParams, GridSpec, MaximalTriple, Vector};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_PANELS: usize = 64;
pub const DEFAULT_SEED: u64 = 42;
pub const SEED_ENV: &str = "AIBVP_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ModelKind {
    Heat,
    DiffusionTransport,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub k: f64,
    pub c: f64,
    pub d: f64,
}

/// Initial profile `f(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Expression {
    Zero,
    /// `sin(πx)`
    SinPi,
    /// `a + b·x`
    Linear {
        a: f64,
        b: f64,
    },
    /// `exp(−(x − center)² / (2·width²))`
    Gaussian {
        center: f64,
        width: f64,
    },
    /// values at the interior nodes
    Samples(Vec<f64>),
}

impl Expression {
    fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::Zero | Self::Samples(_) => 0.0,
            Self::SinPi => (PI * x).sin(),
            Self::Linear { a, b } => a + b * x,
            Self::Gaussian { center, width } => (-(x - center).powi(2) / (2.0 * width * width)).exp(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    pub f: Expression,
    pub g: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalSpec {
    Zero,
    Constant {
        value: [f64; 2],
    },
    Sine {
        amplitude: [f64; 2],
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    Sampled {
        times: Vec<f64>,
        values: Vec<[f64; 2]>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Times {
    pub t_end: f64,
    pub n_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quadrature {
    pub n_panels: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self { n_panels: DEFAULT_PANELS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: ModelKind,
    pub n_nodes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Params>,
    #[serde(default)]
    pub feedback: bool,
    pub initial: Initial,
    #[serde(default = "zero_signal")]
    pub boundary_signal: SignalSpec,
    pub times: Times,
    #[serde(default)]
    pub quadrature: Quadrature,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn zero_signal() -> SignalSpec {
    SignalSpec::Zero
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// Everything a solve needs, built from a validated configuration.
pub struct Problem {
    pub triple: MaximalTriple,
    pub f: Vector,
    pub g: Vector,
    pub psi: BoundarySignal,
    pub times: Vec<f64>,
    pub n_panels: usize,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config: Self =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if let Ok(seed) = std::env::var(SEED_ENV) {
            config.seed = seed
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("{SEED_ENV} must be an unsigned integer, got {seed:?}")))?;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |msg: String| Err(CliError::Config(msg));
        match self.model {
            ModelKind::Heat => {
                if self.params.is_some() {
                    return fail("\"params\" is only valid for the diffusion_transport model".into());
                }
                if self.feedback {
                    return fail("the heat model has no feedback operator; set \"feedback\": false".into());
                }
            }
            ModelKind::DiffusionTransport => {
                let Some(p) = self.params else {
                    return fail("diffusion_transport requires \"params\": {k, c, d}".into());
                };
                if !(p.k >= 0.0) || !p.k.is_finite() || !p.c.is_finite() || !p.d.is_finite() {
                    return fail(format!("params need finite c, d and k >= 0, got {p:?}"));
                }
            }
        }
        let grid = GridSpec::new(self.n_nodes).map_err(|e| CliError::Config(e.to_string()))?;
        if !(self.times.t_end > 0.0) || !self.times.t_end.is_finite() {
            return fail(format!("times.t_end must be positive, got {}", self.times.t_end));
        }
        if self.times.n_steps < 1 {
            return fail("times.n_steps must be at least 1".into());
        }
        let panels = self.quadrature.n_panels;
        if panels < 2 || !panels.is_multiple_of(2) {
            return fail(format!("quadrature.n_panels must be even and >= 2, got {panels}"));
        }
        match &self.initial.f {
            Expression::Samples(v) if v.len() != grid.p() => {
                return fail(format!("initial.f samples need {} interior values, got {}", grid.p(), v.len()))
            }
            Expression::Gaussian { width, .. } if !(*width > 0.0) => {
                return fail("gaussian width must be positive".into())
            }
            _ => {}
        }
        if self.initial.g.iter().any(|x| !x.is_finite()) {
            return fail("initial.g must be finite".into());
        }
        let psi = self.signal()?;
        if !psi.covers(self.times.t_end) {
            return fail("sampled boundary signal must cover [0, t_end]".into());
        }
        Ok(())
    }

    fn signal(&self) -> Result<BoundarySignal, CliError> {
        let config = |e: aibvp::Error| CliError::Config(format!("boundary_signal: {e}"));
        Ok(match &self.boundary_signal {
            SignalSpec::Zero => BoundarySignal::zero(2),
            SignalSpec::Constant { value } => BoundarySignal::constant(value),
            SignalSpec::Sine { amplitude, frequency, phase } => BoundarySignal::sine(amplitude, *frequency, *phase),
            SignalSpec::Sampled { times, values } => {
                BoundarySignal::sampled(times.clone(), values.iter().map(|v| v.to_vec()).collect()).map_err(config)?
            }
        })
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec::new(self.n_nodes).expect("validated")
    }

    pub fn problem(&self) -> Result<Problem, CliError> {
        let grid = self.grid();
        let triple = match self.model {
            ModelKind::Heat => build_heat_1d(&grid),
            ModelKind::DiffusionTransport => {
                let p = self.params.expect("validated");
                let dt = build_diffusion_transport(&grid, &DTParams::new(p.k, p.c, p.d)?)?;
                if self.feedback {
                    dt
                } else {
                    dt.without_feedback()
                }
            }
        };
        let f = match &self.initial.f {
            Expression::Samples(v) => Vector::from_vec(v.clone()),
            expr => Vector::from_iterator(grid.p(), grid.interior_nodes().into_iter().map(|x| expr.eval(x))),
        };
        Ok(Problem {
            triple,
            f,
            g: Vector::from_column_slice(&self.initial.g),
            psi: self.signal()?,
            times: uniform_times(self.times.t_end, self.times.n_steps),
            n_panels: self.quadrature.n_panels,
        })
    }
}
