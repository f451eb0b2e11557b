//! Data generation from specified or fitted models.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use rayon::prelude::*;

use crate::arima::{build_arima, is_invertible, is_stationary, ArimaOrders};
use crate::error::{Error, Result};
use crate::estimation::FitResult;
use crate::ets::{build_ets, normalized_ring, EtsSpec, EtsState, PersistenceParams, SeasonalKind};
use crate::state_space::{StateMatrix, StateSpaceModel};

/// Source of innovations.
pub trait Randomizer: Send + Sync {
    fn name(&self) -> &str;
    fn sample(&self, rng: &mut dyn RngCore, count: usize) -> Vec<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalRandomizer {
    pub mean: f64,
    pub sd: f64,
}

impl NormalRandomizer {
    pub fn new(mean: f64, sd: f64) -> Result<Self> {
        if sd.is_nan() || sd < 0.0 || !mean.is_finite() {
            return Err(Error::Specification(format!(
                "invalid normal parameters mean={mean}, sd={sd}"
            )));
        }
        Ok(Self { mean, sd })
    }
}

impl Randomizer for NormalRandomizer {
    fn name(&self) -> &str {
        "normal"
    }

    fn sample(&self, rng: &mut dyn RngCore, count: usize) -> Vec<f64> {
        let dist = Normal::new(self.mean, self.sd).expect("validated parameters");
        (0..count).map(|_| dist.sample(rng)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceRandomizer {
    pub location: f64,
    pub scale: f64,
}

impl LaplaceRandomizer {
    pub fn new(location: f64, scale: f64) -> Result<Self> {
        if scale.is_nan() || scale < 0.0 || !location.is_finite() {
            return Err(Error::Specification(format!(
                "invalid Laplace parameters location={location}, scale={scale}"
            )));
        }
        Ok(Self { location, scale })
    }
}

impl Randomizer for LaplaceRandomizer {
    fn name(&self) -> &str {
        "laplace"
    }

    fn sample(&self, rng: &mut dyn RngCore, count: usize) -> Vec<f64> {
        (0..count)
            .map(|_| {
                // inverse CDF on u in (-1/2, 1/2)
                let u: f64 = rng.random::<f64>() - 0.5;
                self.location - self.scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
            })
            .collect()
    }
}

/// A user-supplied sampler.
pub struct FnRandomizer<F> {
    name: String,
    f: F,
}

impl<F> FnRandomizer<F>
where
    F: Fn(&mut dyn RngCore, usize) -> Vec<f64> + Send + Sync,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        Self {
            name: name.into(),
            f,
        }
    }
}

impl<F> Randomizer for FnRandomizer<F>
where
    F: Fn(&mut dyn RngCore, usize) -> Vec<f64> + Send + Sync,
{
    fn name(&self) -> &str {
        &self.name
    }

    fn sample(&self, rng: &mut dyn RngCore, count: usize) -> Vec<f64> {
        (self.f)(rng, count)
    }
}

/// Model to generate from. `None` marks a parameter to be drawn at random
/// for every replicate.
#[derive(Debug, Clone, PartialEq)]
pub enum SimModel {
    Ets {
        spec: EtsSpec,
        alpha: Option<f64>,
        beta: Option<f64>,
        gamma: Option<f64>,
        phi: Option<f64>,
        initial: Option<EtsState>,
    },
    Arima {
        orders: ArimaOrders,
        ar: Option<Vec<f64>>,
        ma: Option<Vec<f64>>,
        /// Intercept (no differencing) or drift.
        constant: Option<f64>,
        /// `K` series values preceding the sample, oldest first.
        initial: Option<Vec<f64>>,
    },
    /// A fully specified model started from the given states.
    Fixed {
        model: StateSpaceModel,
        start: StateMatrix,
    },
}

impl SimModel {
    /// ETS model with every parameter drawn at random.
    pub fn random_ets(spec: EtsSpec) -> Self {
        SimModel::Ets {
            spec,
            alpha: None,
            beta: None,
            gamma: None,
            phi: None,
            initial: None,
        }
    }
}

#[derive(Clone)]
pub struct SimulationSpec {
    pub model: SimModel,
    pub obs: usize,
    pub nsim: usize,
    pub randomizer: Arc<dyn Randomizer>,
    pub seed: u64,
}

impl fmt::Debug for SimulationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SimulationSpec")
            .field("model", &self.model)
            .field("obs", &self.obs)
            .field("nsim", &self.nsim)
            .field("randomizer", &self.randomizer.name())
            .field("seed", &self.seed)
            .finish()
    }
}

/// One generated replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedSeries {
    pub values: Vec<f64>,
    pub innovations: Vec<f64>,
    /// `max(l)` starting columns followed by one column per observation.
    pub states: StateMatrix,
    /// The model with the parameters used for this replicate.
    pub model: StateSpaceModel,
}

/// Runs the recursion forward `obs` steps for each of `nsim` replicates.
///
/// Replicate `r` draws from stream `r` of a generator seeded with `seed`.
/// Random parameters: `alpha ~ U(0.05, 0.5)`, `beta ~ U(0, alpha/2)`,
/// `gamma ~ U(0, (1 - alpha)/2)`, `phi ~ U(0.8, 1)`; level `U(50, 150)`,
/// additive trend `U(-1, 1)`, multiplicative trend `U(0.99, 1.01)`,
/// additive seasonal indices `U(-10, 10)`, multiplicative `U(0.9, 1.1)`
/// (normalized); AR and MA coefficients uniform on `(-1, 1)` restricted to
/// the stationary and invertible region; pre-sample ARIMA values `U(50, 150)`
/// and no constant.
pub fn simulate_series(spec: &SimulationSpec) -> Result<Vec<SimulatedSeries>> {
    if spec.obs == 0 || spec.nsim == 0 {
        return Err(Error::Specification(
            "obs and nsim must both be positive".into(),
        ));
    }
    (0..spec.nsim)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(r as u64);
            let (model, start) = realize(&spec.model, &mut rng)?;
            let innovations = spec.randomizer.sample(&mut rng, spec.obs);
            if innovations.len() != spec.obs {
                return Err(Error::Specification(format!(
                    "randomizer '{}' returned {} draws, expected {}",
                    spec.randomizer.name(),
                    innovations.len(),
                    spec.obs
                )));
            }
            if let Some(index) = innovations.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteDraw {
                    replicate: r + 1,
                    index: index + 1,
                });
            }
            let (values, states) = model.propagate(&start, &innovations);
            Ok(SimulatedSeries {
                values,
                innovations,
                states,
                model,
            })
        })
        .collect()
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return lo;
    }
    Uniform::new(lo, hi).expect("finite range").sample(rng)
}

fn random_coefficients(rng: &mut ChaCha8Rng, orders: &ArimaOrders, ma: bool) -> Vec<f64> {
    let counts = if ma { &orders.ma } else { &orders.ar };
    let mut out = Vec::new();
    for &n in counts {
        loop {
            let c: Vec<f64> = (0..n).map(|_| uniform(rng, -1.0, 1.0)).collect();
            let ok = if ma { is_invertible(&c) } else { is_stationary(&c) };
            if ok {
                out.extend(c);
                break;
            }
        }
    }
    out
}

fn realize(model: &SimModel, rng: &mut ChaCha8Rng) -> Result<(StateSpaceModel, StateMatrix)> {
    match model {
        SimModel::Fixed { model, start } => Ok((model.clone(), start.clone())),
        SimModel::Ets {
            spec,
            alpha,
            beta,
            gamma,
            phi,
            initial,
        } => {
            let alpha = alpha.unwrap_or_else(|| uniform(rng, 0.05, 0.5));
            let beta = beta.unwrap_or_else(|| uniform(rng, 0.0, alpha / 2.0));
            let gamma = gamma.unwrap_or_else(|| uniform(rng, 0.0, (1.0 - alpha) / 2.0));
            let phi = phi.unwrap_or_else(|| {
                if spec.trend.is_damped() {
                    uniform(rng, 0.8, 1.0)
                } else {
                    1.0
                }
            });
            let initial = match initial {
                Some(s) => s.clone(),
                None => {
                    let level = uniform(rng, 50.0, 150.0);
                    let trend = spec.has_trend().then(|| {
                        if spec.trend.is_multiplicative() {
                            uniform(rng, 0.99, 1.01)
                        } else {
                            uniform(rng, -1.0, 1.0)
                        }
                    });
                    let seasonal = spec.has_season().then(|| {
                        let ring = (0..spec.period)
                            .map(|_| match spec.seasonal {
                                SeasonalKind::Multiplicative => uniform(rng, 0.9, 1.1),
                                _ => uniform(rng, -10.0, 10.0),
                            })
                            .collect();
                        normalized_ring(ring, spec.seasonal)
                    });
                    EtsState {
                        level,
                        trend,
                        seasonal,
                    }
                }
            };
            let params = PersistenceParams {
                alpha,
                beta,
                gamma,
                phi,
            };
            let m = build_ets(spec, &params, &initial)?;
            let start = m.initial().clone();
            Ok((m, start))
        }
        SimModel::Arima {
            orders,
            ar,
            ma,
            constant,
            initial,
        } => {
            let ar = ar
                .clone()
                .unwrap_or_else(|| random_coefficients(rng, orders, false));
            let ma = ma
                .clone()
                .unwrap_or_else(|| random_coefficients(rng, orders, true));
            let k = orders.state_dim();
            let before = initial
                .clone()
                .unwrap_or_else(|| (0..k).map(|_| uniform(rng, 50.0, 150.0)).collect());
            let m = build_arima(orders, &ar, &ma, *constant, &before)?;
            let start = m.initial().clone();
            Ok((m, start))
        }
    }
}

/// Generates series from a fitted model, started from its estimated initial
/// states with Gaussian innovations of the estimated variance.
pub fn simulate_from_fitted(
    fit: &FitResult,
    obs: usize,
    nsim: usize,
    seed: u64,
) -> Result<Vec<SimulatedSeries>> {
    let spec = SimulationSpec {
        model: SimModel::Fixed {
            model: fit.model.clone(),
            start: fit.model.initial().clone(),
        },
        obs,
        nsim,
        randomizer: Arc::new(NormalRandomizer::new(0.0, fit.sigma2().sqrt())?),
        seed,
    };
    simulate_series(&spec)
}
