//! Likelihood, information criteria, fit results and initial-state heuristics.

mod optimizer;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use optimizer::{optimize, Bounds, OptimResult, OptimizerConfig};

use crate::arima::ArimaOrders;
use crate::decompose::{msdecompose, DecompositionKind};
use crate::error::{Error, Result};
use crate::ets::{EtsSpec, EtsState, SeasonalKind, TrendKind};
use crate::forecast::ForecastOrigin;
use crate::state_space::{ErrorMode, FitArtifacts, StateMatrix, StateSpaceModel};

/// Residual variances below this are treated as this value so that a perfect
/// fit yields a very large but finite log-likelihood.
pub const VARIANCE_FLOOR: f64 = 1e-300;

/// Default number of forward-backward sweeps used by backcasting.
pub const DEFAULT_BACKCAST_ITERATIONS: usize = 2;

/// How pre-sample states are obtained.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum InitialMode {
    /// Estimated jointly with the other parameters.
    #[default]
    Optimization,
    /// Produced by forward-backward sweeps over the data for every
    /// candidate parameter vector.
    Backcasting { iterations: usize },
    /// Supplied by the caller as the `K x max(l)` pre-sample matrix.
    Manual(StateMatrix),
}

impl InitialMode {
    pub fn backcasting() -> Self {
        Self::Backcasting {
            iterations: DEFAULT_BACKCAST_ITERATIONS,
        }
    }

    pub fn estimates_states(&self) -> bool {
        matches!(self, Self::Optimization)
    }
}

/// Information criterion used for selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Ic {
    Aic,
    #[default]
    Aicc,
    Bic,
}

impl fmt::Display for Ic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ic::Aic => "AIC",
            Ic::Aicc => "AICc",
            Ic::Bic => "BIC",
        })
    }
}

impl FromStr for Ic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aic" => Ok(Ic::Aic),
            "aicc" => Ok(Ic::Aicc),
            "bic" => Ok(Ic::Bic),
            _ => Err(Error::Specification(format!(
                "unknown information criterion '{s}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimationConfig {
    pub initial: InitialMode,
    pub ic: Ic,
    pub max_evals: Option<usize>,
    pub tolerance: f64,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        Self {
            initial: InitialMode::Optimization,
            ic: Ic::Aicc,
            max_evals: None,
            tolerance: 1e-8,
        }
    }
}

impl EstimationConfig {
    pub fn with_initial(mut self, initial: InitialMode) -> Self {
        self.initial = initial;
        self
    }

    pub fn with_ic(mut self, ic: Ic) -> Self {
        self.ic = ic;
        self
    }

    pub(crate) fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig {
            max_evals: self.max_evals,
            tolerance: self.tolerance,
            restarts: 1,
        }
    }
}

/// AIC, AICc and BIC of one fit. AICc is `+inf` when `T <= k + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IcValues {
    pub aic: f64,
    #[serde(with = "infinite_as_null")]
    pub aicc: f64,
    pub bic: f64,
}

impl IcValues {
    pub fn compute(log_lik: f64, n_params: usize, n_obs: usize) -> Self {
        let k = n_params as f64;
        let t = n_obs as f64;
        let aic = -2.0 * log_lik + 2.0 * k;
        let aicc = if n_obs > n_params + 1 {
            aic + 2.0 * k * (k + 1.0) / (t - k - 1.0)
        } else {
            f64::INFINITY
        };
        let bic = -2.0 * log_lik + k * t.ln();
        Self { aic, aicc, bic }
    }

    pub fn get(&self, ic: Ic) -> f64 {
        match ic {
            Ic::Aic => self.aic,
            Ic::Aicc => self.aicc,
            Ic::Bic => self.bic,
        }
    }
}

mod infinite_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// Concentrated Gaussian log-likelihood of a residual sequence:
/// `-T/2 (ln 2pi + 1 + ln(sum e^2 / T))`.
pub fn gaussian_concentrated_loglik(residuals: &[f64]) -> f64 {
    let t = residuals.len() as f64;
    let variance = (residuals.iter().map(|e| e * e).sum::<f64>() / t).max(VARIANCE_FLOOR);
    -0.5 * t * ((2.0 * std::f64::consts::PI).ln() + 1.0 + variance.ln())
}

/// Log-likelihood of a fit in the units of the observations. Relative
/// residuals of multiplicative-error models pick up the Jacobian
/// `-sum ln|yhat|`.
pub fn log_likelihood(error: ErrorMode, artifacts: &FitArtifacts) -> f64 {
    let base = gaussian_concentrated_loglik(&artifacts.residuals);
    match error {
        ErrorMode::Additive => base,
        ErrorMode::Multiplicative => {
            base - artifacts.fitted.iter().map(|f| f.abs().ln()).sum::<f64>()
        }
    }
}

/// Which model family a fit belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ModelSpec {
    Ets(EtsSpec),
    Arima { orders: ArimaOrders, constant: bool },
    Sma { order: usize },
    /// Random walk with no estimated parameters other than the variance.
    Naive,
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::Ets(spec) => write!(f, "{spec}"),
            ModelSpec::Arima { orders, constant } => {
                write!(f, "{orders}")?;
                if *constant {
                    let kind = if orders.total_i() == 0 { "constant" } else { "drift" };
                    write!(f, " with {kind}")?;
                }
                Ok(())
            }
            ModelSpec::Sma { order } => write!(f, "SMA({order})"),
            ModelSpec::Naive => f.write_str("Naive"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedParam {
    pub name: String,
    pub value: f64,
}

impl NamedParam {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
        }
    }
}

/// Diagnostic conditions raised while fitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitFlag {
    /// Backcasting was requested but the series was too short; initial
    /// states were optimized instead.
    BackcastFallback,
    /// Every candidate of a selection run failed; a fallback model was used.
    SelectionFallback,
    /// Residual variance is zero.
    ZeroVariance,
}

/// An estimated model with its in-sample artifacts and fit statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub spec: ModelSpec,
    pub params: Vec<NamedParam>,
    /// The model with its pre-sample (initial) states.
    pub model: StateSpaceModel,
    pub artifacts: FitArtifacts,
    pub log_lik: f64,
    pub ic: IcValues,
    pub n_params: usize,
    pub n_obs: usize,
    pub flags: Vec<FitFlag>,
}

impl FitResult {
    pub(crate) fn assemble(
        spec: ModelSpec,
        params: Vec<NamedParam>,
        model: StateSpaceModel,
        artifacts: FitArtifacts,
        n_params: usize,
        mut flags: Vec<FitFlag>,
    ) -> Self {
        let n_obs = artifacts.fitted.len();
        let log_lik = log_likelihood(model.error_mode(), &artifacts);
        if artifacts.sigma2 == 0.0 {
            flags.push(FitFlag::ZeroVariance);
        }
        Self {
            spec,
            params,
            ic: IcValues::compute(log_lik, n_params, n_obs),
            model,
            artifacts,
            log_lik,
            n_params,
            n_obs,
            flags,
        }
    }

    pub fn ic_value(&self, ic: Ic) -> f64 {
        self.ic.get(ic)
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|p| p.name == name).map(|p| p.value)
    }

    pub fn fitted(&self) -> &[f64] {
        &self.artifacts.fitted
    }

    pub fn residuals(&self) -> &[f64] {
        &self.artifacts.residuals
    }

    pub fn sigma2(&self) -> f64 {
        self.artifacts.sigma2
    }

    pub fn has_flag(&self, flag: FitFlag) -> bool {
        self.flags.contains(&flag)
    }

    /// Model and end-of-sample states needed for forecasting.
    pub fn origin(&self) -> ForecastOrigin {
        ForecastOrigin {
            model: self.model.clone(),
            states: self.artifacts.final_states(),
            sigma2: self.artifacts.sigma2,
        }
    }
}

/// Heuristic initial states for an ETS model: level and trend from a line
/// through the head of the (deseasonalized) trend, seasonal indices from a
/// classical decomposition of matching type.
pub fn initial_state_estimate(y: &[f64], spec: &EtsSpec) -> EtsState {
    let m = spec.period;
    let seasonal = spec.seasonal != SeasonalKind::None;
    let multiplicative_season = spec.seasonal == SeasonalKind::Multiplicative;
    let flat = if multiplicative_season { 1.0 } else { 0.0 };

    let mut ring = vec![flat; if seasonal { m } else { 0 }];
    // (position, value) pairs the level/trend line is fitted to
    let mut source: Vec<(f64, f64)> = y
        .iter()
        .enumerate()
        .map(|(i, v)| ((i + 1) as f64, *v))
        .collect();

    if seasonal && y.len() >= 2 * m {
        let kind = if multiplicative_season && y.iter().all(|v| *v > 0.0) {
            Some(DecompositionKind::Multiplicative)
        } else if !multiplicative_season {
            Some(DecompositionKind::Additive)
        } else {
            None
        };
        if let Some(kind) = kind {
            if let Ok(d) = msdecompose(y, &[m], kind) {
                ring.clone_from(&d.seasonals[0].pattern);
                source = d
                    .trend
                    .iter()
                    .enumerate()
                    .filter_map(|(i, v)| v.map(|v| ((i + 1) as f64, v)))
                    .collect();
            }
        }
    }

    let head_len = source.len().min((2 * m).max(10));
    let head = &source[..head_len];
    let (intercept, slope) = line_fit(head);
    let head_mean = head.iter().map(|p| p.1).sum::<f64>() / head.len().max(1) as f64;

    let (level, trend) = match spec.trend {
        TrendKind::None => (head_mean, None),
        TrendKind::Additive | TrendKind::AdditiveDamped => (intercept, Some(slope)),
        TrendKind::Multiplicative | TrendKind::MultiplicativeDamped => {
            if intercept > 0.0 {
                let ratio = ((intercept + slope) / intercept).clamp(0.5, 2.0);
                (intercept, Some(ratio))
            } else {
                (head_mean, Some(1.0))
            }
        }
    };

    EtsState {
        level,
        trend,
        seasonal: seasonal.then(|| normalize_ring(ring, multiplicative_season)),
    }
}

/// Additive rings are centred to sum zero, multiplicative rings scaled to
/// product one.
pub(crate) fn normalize_ring(mut ring: Vec<f64>, multiplicative: bool) -> Vec<f64> {
    if ring.is_empty() {
        return ring;
    }
    let n = ring.len() as f64;
    if multiplicative {
        if ring.iter().all(|v| *v > 0.0) {
            let log_mean = ring.iter().map(|v| v.ln()).sum::<f64>() / n;
            let scale = log_mean.exp();
            ring.iter_mut().for_each(|v| *v /= scale);
        } else {
            ring.iter_mut().for_each(|v| *v = 1.0);
        }
    } else {
        let mean = ring.iter().sum::<f64>() / n;
        ring.iter_mut().for_each(|v| *v -= mean);
    }
    ring
}

/// Least-squares line `a + b x`; a single point gives a flat line.
pub(crate) fn line_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    if points.is_empty() {
        return (0.0, 0.0);
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return (my, 0.0);
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}
