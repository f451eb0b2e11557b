//! ETS models in lagged state-space form, their estimation and the
//! branch-and-bound component selection.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{
    initial_state_estimate, log_likelihood, normalize_ring, optimize, Bounds, EstimationConfig,
    FitFlag, FitResult, Ic, InitialMode, ModelSpec, NamedParam,
};
pub use crate::state_space::ErrorMode;
use crate::state_space::{Dynamics, Reversal, StateMatrix, StateSpaceModel};
use crate::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrendKind {
    None,
    Additive,
    AdditiveDamped,
    Multiplicative,
    MultiplicativeDamped,
}

impl TrendKind {
    pub const ALL: [TrendKind; 5] = [
        TrendKind::None,
        TrendKind::Additive,
        TrendKind::AdditiveDamped,
        TrendKind::Multiplicative,
        TrendKind::MultiplicativeDamped,
    ];

    pub fn code(self) -> &'static str {
        match self {
            TrendKind::None => "N",
            TrendKind::Additive => "A",
            TrendKind::AdditiveDamped => "Ad",
            TrendKind::Multiplicative => "M",
            TrendKind::MultiplicativeDamped => "Md",
        }
    }

    pub fn is_damped(self) -> bool {
        matches!(
            self,
            TrendKind::AdditiveDamped | TrendKind::MultiplicativeDamped
        )
    }

    pub fn is_multiplicative(self) -> bool {
        matches!(
            self,
            TrendKind::Multiplicative | TrendKind::MultiplicativeDamped
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeasonalKind {
    None,
    Additive,
    Multiplicative,
}

impl SeasonalKind {
    pub const ALL: [SeasonalKind; 3] = [
        SeasonalKind::None,
        SeasonalKind::Additive,
        SeasonalKind::Multiplicative,
    ];

    pub fn code(self) -> &'static str {
        match self {
            SeasonalKind::None => "N",
            SeasonalKind::Additive => "A",
            SeasonalKind::Multiplicative => "M",
        }
    }
}

fn error_code(e: ErrorMode) -> &'static str {
    match e {
        ErrorMode::Additive => "A",
        ErrorMode::Multiplicative => "M",
    }
}

/// Component letters of an ETS model plus the seasonal period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EtsSpec {
    pub error: ErrorMode,
    pub trend: TrendKind,
    pub seasonal: SeasonalKind,
    /// Observations per seasonal cycle; 1 for non-seasonal models.
    pub period: usize,
}

impl EtsSpec {
    pub fn new(
        error: ErrorMode,
        trend: TrendKind,
        seasonal: SeasonalKind,
        period: usize,
    ) -> Result<Self> {
        if seasonal != SeasonalKind::None && period < 2 {
            return Err(Error::Specification(format!(
                "seasonal ETS needs a period of at least 2, got {period}"
            )));
        }
        let period = if seasonal == SeasonalKind::None { 1 } else { period };
        Ok(Self {
            error,
            trend,
            seasonal,
            period,
        })
    }

    /// Parses `"ETS(X,Y,Z)"` (damped trends written `Ad`/`Md`) with the given period.
    pub fn parse(s: &str, period: usize) -> Result<Self> {
        let bad = || Error::Specification(format!("invalid ETS specification '{s}'"));
        let inner = s
            .trim()
            .strip_prefix("ETS(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        let [e, t, s_] = parts.as_slice() else {
            return Err(bad());
        };
        let error = match *e {
            "A" => ErrorMode::Additive,
            "M" => ErrorMode::Multiplicative,
            _ => return Err(bad()),
        };
        let trend = TrendKind::ALL
            .into_iter()
            .find(|k| k.code() == *t)
            .ok_or_else(bad)?;
        let seasonal = SeasonalKind::ALL
            .into_iter()
            .find(|k| k.code() == *s_)
            .ok_or_else(bad)?;
        Self::new(error, trend, seasonal, period)
    }

    /// All 30 admissible combinations for a seasonal period `m >= 2`.
    pub fn all(period: usize) -> Vec<Self> {
        let mut out = Vec::with_capacity(30);
        for error in [ErrorMode::Additive, ErrorMode::Multiplicative] {
            for trend in TrendKind::ALL {
                for seasonal in SeasonalKind::ALL {
                    if let Ok(spec) = Self::new(error, trend, seasonal, period) {
                        out.push(spec);
                    }
                }
            }
        }
        out
    }

    pub fn has_trend(&self) -> bool {
        self.trend != TrendKind::None
    }

    pub fn has_season(&self) -> bool {
        self.seasonal != SeasonalKind::None
    }

    /// Linear recursions (and therefore the plain matrix form) apply.
    pub fn has_linear_components(&self) -> bool {
        !self.trend.is_multiplicative() && self.seasonal != SeasonalKind::Multiplicative
    }

    pub fn is_pure_additive(&self) -> bool {
        self.error == ErrorMode::Additive && self.has_linear_components()
    }

    /// Needs strictly positive data.
    pub fn requires_positive(&self) -> bool {
        self.error == ErrorMode::Multiplicative || !self.has_linear_components()
    }

    fn max_lag(&self) -> usize {
        if self.has_season() {
            self.period
        } else {
            1
        }
    }
}

impl fmt::Display for EtsSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ETS({},{},{})",
            error_code(self.error),
            self.trend.code(),
            self.seasonal.code()
        )
    }
}

impl FromStr for EtsSpec {
    type Err = Error;

    /// Parses with period 1; seasonal specs need [`EtsSpec::parse`].
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s, 1)
    }
}

/// Smoothing and damping parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistenceParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub phi: f64,
}

impl Default for PersistenceParams {
    fn default() -> Self {
        Self {
            alpha: 0.3,
            beta: 0.0,
            gamma: 0.0,
            phi: 1.0,
        }
    }
}

impl PersistenceParams {
    /// `0 <= alpha <= 1`, `0 <= beta <= alpha`, `0 <= gamma <= 1 - alpha`,
    /// `0.8 <= phi <= 1`, checking only the parameters the spec uses.
    pub fn within_bounds(&self, spec: &EtsSpec) -> bool {
        const EPS: f64 = 1e-12;
        let mut ok = (0.0..=1.0).contains(&self.alpha);
        if spec.has_trend() {
            ok &= self.beta >= 0.0 && self.beta <= self.alpha + EPS;
        }
        if spec.has_season() {
            ok &= self.gamma >= 0.0 && self.gamma <= 1.0 - self.alpha + EPS;
        }
        if spec.trend.is_damped() {
            ok &= (0.8..=1.0).contains(&self.phi);
        }
        ok
    }
}

/// Level, trend and seasonal ring at the start of the sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtsState {
    pub level: f64,
    pub trend: Option<f64>,
    /// Seasonal values for the first `m` observations, in order.
    pub seasonal: Option<Vec<f64>>,
}

impl EtsState {
    /// Lays the state out as the `K x max(l)` pre-sample matrix of `spec`.
    pub fn to_presample(&self, spec: &EtsSpec) -> Result<StateMatrix> {
        if spec.has_trend() != self.trend.is_some() {
            return Err(Error::Specification(format!(
                "initial trend does not match {spec}"
            )));
        }
        match (&self.seasonal, spec.has_season()) {
            (Some(ring), true) if ring.len() == spec.period => {}
            (None, false) => {}
            _ => {
                return Err(Error::Specification(format!(
                    "initial seasonal indices do not match {spec} with period {}",
                    spec.period
                )))
            }
        }
        let max_lag = spec.max_lag();
        let rows: Vec<Vec<f64>> = std::iter::once(vec![self.level; max_lag])
            .chain(self.trend.map(|b| vec![b; max_lag]))
            .chain(self.seasonal.clone())
            .collect();
        StateMatrix::from_rows(&rows)
    }
}

/// Error-correction recursions for the full taxonomy, written in terms of
/// the observation so that one rule serves both error types.
///
/// State layout: level, then trend if present, then the seasonal component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtsRecursion {
    pub trend: TrendKind,
    pub seasonal: SeasonalKind,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub phi: f64,
}

impl EtsRecursion {
    #[inline]
    fn season_index(&self, k: usize) -> usize {
        k - 1
    }

    /// Level after applying the trend, before seasonality.
    #[inline]
    fn trended_level(&self, lagged: &[f64]) -> f64 {
        let l = lagged[0];
        match self.trend {
            TrendKind::None => l,
            TrendKind::Additive => l + lagged[1],
            TrendKind::AdditiveDamped => l + self.phi * lagged[1],
            TrendKind::Multiplicative => l * lagged[1],
            TrendKind::MultiplicativeDamped => l * lagged[1].powf(self.phi),
        }
    }

    #[inline]
    pub(crate) fn predict(&self, lagged: &[f64]) -> f64 {
        let mu = self.trended_level(lagged);
        let s = lagged[self.season_index(lagged.len())];
        match self.seasonal {
            SeasonalKind::None => mu,
            SeasonalKind::Additive => mu + s,
            SeasonalKind::Multiplicative => mu * s,
        }
    }

    #[inline]
    pub(crate) fn inadmissible(&self, lagged: &[f64]) -> Option<&'static str> {
        if self.trend.is_multiplicative() && (lagged[0] <= 0.0 || lagged[1] <= 0.0) {
            return Some("nonpositive level or growth under multiplicative trend");
        }
        if self.seasonal == SeasonalKind::Multiplicative {
            if lagged[self.season_index(lagged.len())] <= 0.0 {
                return Some("nonpositive multiplicative seasonal index");
            }
            if self.trended_level(lagged) <= 0.0 {
                return Some("nonpositive level under multiplicative seasonality");
            }
        }
        None
    }

    #[inline]
    pub(crate) fn advance(&self, lagged: &[f64], y: f64, out: &mut [f64]) {
        let k = lagged.len();
        let mu = self.trended_level(lagged);
        let s = lagged[self.season_index(k)];
        let deseasonalized = match self.seasonal {
            SeasonalKind::None => y,
            SeasonalKind::Additive => y - s,
            SeasonalKind::Multiplicative => y / s,
        };
        let r = deseasonalized - mu;
        out[0] = mu + self.alpha * r;
        match self.trend {
            TrendKind::None => {}
            TrendKind::Additive => out[1] = lagged[1] + self.beta * r,
            TrendKind::AdditiveDamped => out[1] = self.phi * lagged[1] + self.beta * r,
            TrendKind::Multiplicative => out[1] = lagged[1] + self.beta * r / lagged[0],
            TrendKind::MultiplicativeDamped => {
                out[1] = lagged[1].powf(self.phi) + self.beta * r / lagged[0]
            }
        }
        match self.seasonal {
            SeasonalKind::None => {}
            SeasonalKind::Additive => out[k - 1] = s + self.gamma * (y - mu - s),
            SeasonalKind::Multiplicative => out[k - 1] = s + self.gamma * (y / mu - s),
        }
    }
}

/// Builds the lagged state-space form of an ETS model.
///
/// Components are ordered level, trend, seasonal with lags `(1, 1, m)`;
/// `w` is all ones except `phi` on a damped trend, `F` carries `[[1, phi], [0, phi]]` for the level/trend
/// block and 1 for the seasonal component, `g = (alpha, beta, gamma)`.
/// Models with a multiplicative trend or seasonal component keep this
/// layout but run through the nonlinear taxonomy recursions.
pub fn build_ets(
    spec: &EtsSpec,
    params: &PersistenceParams,
    initial: &EtsState,
) -> Result<StateSpaceModel> {
    if !params.within_bounds(spec) {
        return Err(Error::Specification(format!(
            "parameters {params:?} are outside the admissible region of {spec}"
        )));
    }
    build_unchecked(spec, params, initial.to_presample(spec)?)
}

fn build_unchecked(
    spec: &EtsSpec,
    params: &PersistenceParams,
    presample: StateMatrix,
) -> Result<StateSpaceModel> {
    let phi = if spec.trend.is_damped() { params.phi } else { 1.0 };
    let mut lags = vec![1];
    let mut persistence = vec![params.alpha];
    let mut reversal = vec![Reversal::Keep];
    if spec.has_trend() {
        lags.push(1);
        persistence.push(params.beta);
        reversal.push(if spec.trend.is_multiplicative() {
            Reversal::Invert
        } else {
            Reversal::Negate
        });
    }
    if spec.has_season() {
        lags.push(spec.period);
        persistence.push(params.gamma);
        reversal.push(Reversal::Keep);
    }
    let k = lags.len();
    let mut transition = vec![vec![0.0; k]; k];
    transition[0][0] = 1.0;
    if spec.has_trend() {
        transition[0][1] = phi;
        transition[1][1] = phi;
    }
    if spec.has_season() {
        transition[k - 1][k - 1] = 1.0;
    }
    let mut measurement = vec![1.0; k];
    if spec.has_trend() {
        measurement[1] = phi;
    }
    let model = StateSpaceModel::linear(measurement, transition, persistence, lags, presample)?
        .with_error_mode(spec.error)
        .with_reversal(reversal)?;
    if spec.has_linear_components() {
        Ok(model)
    } else {
        Ok(model.with_dynamics(Dynamics::Ets(EtsRecursion {
            trend: spec.trend,
            seasonal: spec.seasonal,
            alpha: params.alpha,
            beta: params.beta,
            gamma: params.gamma,
            phi,
        })))
    }
}

/// Number of estimated quantities: smoothing parameters, damping, the
/// residual variance and, when states are optimized, level, trend and
/// `m - 1` free seasonal indices.
pub fn parameter_count(spec: &EtsSpec, initial: &InitialMode) -> usize {
    let smoothing = 1 + usize::from(spec.has_trend()) + usize::from(spec.has_season());
    let damping = usize::from(spec.trend.is_damped());
    let states = if initial.estimates_states() {
        1 + usize::from(spec.has_trend())
            + if spec.has_season() {
                spec.period - 1
            } else {
                0
            }
    } else {
        0
    };
    smoothing + damping + 1 + states
}

/// Maps an optimizer vector onto parameters and initial states.
struct Layout {
    spec: EtsSpec,
    estimate_states: bool,
}

impl Layout {
    fn names(&self) -> Vec<String> {
        let s = &self.spec;
        let mut names = vec!["alpha".to_string()];
        if s.has_trend() {
            names.push("beta".into());
        }
        if s.has_season() {
            names.push("gamma".into());
        }
        if s.trend.is_damped() {
            names.push("phi".into());
        }
        if self.estimate_states {
            names.push("level".into());
            if s.has_trend() {
                names.push("trend".into());
            }
            if s.has_season() {
                names.extend((1..s.period).map(|i| format!("seasonal_{i}")));
            }
        }
        names
    }

    fn encode(&self, p: &PersistenceParams, st: &EtsState) -> Vec<f64> {
        let s = &self.spec;
        let mut x = vec![p.alpha];
        if s.has_trend() {
            x.push(p.beta);
        }
        if s.has_season() {
            x.push(p.gamma);
        }
        if s.trend.is_damped() {
            x.push(p.phi);
        }
        if self.estimate_states {
            x.push(st.level);
            if let Some(b) = st.trend {
                x.push(b);
            }
            if let Some(ring) = &st.seasonal {
                x.extend_from_slice(&ring[..ring.len() - 1]);
            }
        }
        x
    }

    fn decode(&self, x: &[f64], fixed: &EtsState) -> (PersistenceParams, EtsState) {
        let s = &self.spec;
        let mut it = x.iter().copied();
        let mut p = PersistenceParams {
            alpha: it.next().unwrap_or(0.0),
            ..PersistenceParams::default()
        };
        if s.has_trend() {
            p.beta = it.next().unwrap_or(0.0);
        }
        if s.has_season() {
            p.gamma = it.next().unwrap_or(0.0);
        }
        if s.trend.is_damped() {
            p.phi = it.next().unwrap_or(1.0);
        }
        if !self.estimate_states {
            return (p, fixed.clone());
        }
        let level = it.next().unwrap_or(fixed.level);
        let trend = s.has_trend().then(|| it.next().unwrap_or(0.0));
        let seasonal = s.has_season().then(|| {
            let mut ring: Vec<f64> = it.by_ref().take(s.period - 1).collect();
            let last = if s.seasonal == SeasonalKind::Multiplicative {
                1.0 / ring.iter().product::<f64>()
            } else {
                -ring.iter().sum::<f64>()
            };
            ring.push(last);
            ring
        });
        (
            p,
            EtsState {
                level,
                trend,
                seasonal,
            },
        )
    }

    fn bounds_and_steps(&self, y: &[f64], st: &EtsState) -> (Bounds, Vec<f64>) {
        let s = &self.spec;
        let mut lo = vec![0.0];
        let mut hi = vec![1.0];
        let mut steps = vec![0.1];
        if s.has_trend() {
            lo.push(0.0);
            hi.push(1.0);
            steps.push(0.02);
        }
        if s.has_season() {
            lo.push(0.0);
            hi.push(1.0);
            steps.push(0.05);
        }
        if s.trend.is_damped() {
            lo.push(0.8);
            hi.push(1.0);
            steps.push(0.02);
        }
        if self.estimate_states {
            let scale = spread(y).max(1e-3 * st.level.abs()).max(1e-8);
            lo.push(f64::NEG_INFINITY);
            hi.push(f64::INFINITY);
            steps.push(0.1 * scale);
            if s.has_trend() {
                if s.trend.is_multiplicative() {
                    lo.push(1e-6);
                    hi.push(f64::INFINITY);
                    steps.push(0.01);
                } else {
                    lo.push(f64::NEG_INFINITY);
                    hi.push(f64::INFINITY);
                    steps.push(0.02 * scale);
                }
            }
            if s.has_season() {
                for _ in 1..s.period {
                    if s.seasonal == SeasonalKind::Multiplicative {
                        lo.push(1e-6);
                        hi.push(f64::INFINITY);
                        steps.push(0.02);
                    } else {
                        lo.push(f64::NEG_INFINITY);
                        hi.push(f64::INFINITY);
                        steps.push(0.1 * scale);
                    }
                }
            }
        }
        (Bounds::new(lo, hi), steps)
    }
}

fn spread(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    (y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

fn starting_params(spec: &EtsSpec) -> PersistenceParams {
    PersistenceParams {
        alpha: 0.3,
        beta: if spec.has_trend() { 0.05 } else { 0.0 },
        gamma: if spec.has_season() { 0.05 } else { 0.0 },
        phi: if spec.trend.is_damped() { 0.95 } else { 1.0 },
    }
}

/// Estimates an ETS model on the training span of `series` by maximizing
/// the concentrated Gaussian likelihood.
pub fn fit_ets(series: &TimeSeries, spec: &EtsSpec, config: &EstimationConfig) -> Result<FitResult> {
    let y = series.train();
    let n = y.len();
    if n < 3 {
        return Err(Error::Specification(format!(
            "{spec} needs at least 3 observations, got {n}"
        )));
    }
    if spec.has_season() && n < 2 * spec.period {
        return Err(Error::Specification(format!(
            "{spec} with period {} needs at least {} observations, got {n}",
            spec.period,
            2 * spec.period
        )));
    }
    if spec.requires_positive() && y.iter().any(|v| *v <= 0.0) {
        return Err(Error::Domain(format!(
            "{spec} requires strictly positive data"
        )));
    }

    let mut flags = Vec::new();
    let mut initial = config.initial.clone();
    if let InitialMode::Backcasting { .. } = initial {
        if n < 2 * spec.max_lag() {
            initial = InitialMode::Optimization;
            flags.push(FitFlag::BackcastFallback);
        }
    }

    let heuristic = initial_state_estimate(y, spec);
    let fixed_presample = match &initial {
        InitialMode::Manual(states) => Some(states.clone()),
        _ => None,
    };
    let layout = Layout {
        spec: *spec,
        estimate_states: initial.estimates_states(),
    };
    let start = layout.encode(&starting_params(spec), &heuristic);
    let (bounds, steps) = layout.bounds_and_steps(y, &heuristic);

    let assemble_model = |x: &[f64]| -> Result<StateSpaceModel> {
        let (p, st) = layout.decode(x, &heuristic);
        if !p.within_bounds(spec) {
            return Err(Error::Specification("out of bounds".into()));
        }
        let presample = match &fixed_presample {
            Some(states) => states.clone(),
            None => st.to_presample(spec)?,
        };
        let model = build_unchecked(spec, &p, presample)?;
        match initial {
            InitialMode::Backcasting { iterations } => Ok(model.backcast(y, iterations)?.model),
            _ => Ok(model),
        }
    };
    let objective = |x: &[f64]| match assemble_model(x).and_then(|m| m.fit_values(y)) {
        Ok(a) => -log_likelihood(spec.error, &a),
        Err(_) => f64::INFINITY,
    };
    let best = optimize(objective, &bounds, &start, Some(&steps), &config.optimizer())?;

    let model = assemble_model(&best.x)?;
    let artifacts = model.fit_values(y)?;
    let mut params: Vec<NamedParam> = layout
        .names()
        .into_iter()
        .zip(&best.x)
        .map(|(name, v)| NamedParam::new(name, *v))
        .collect();
    if layout.estimate_states && spec.has_season() {
        let (_, st) = layout.decode(&best.x, &heuristic);
        let last = st.seasonal.as_ref().and_then(|r| r.last()).copied();
        if let Some(v) = last {
            params.push(NamedParam::new(format!("seasonal_{}", spec.period), v));
        }
    }
    Ok(FitResult::assemble(
        ModelSpec::Ets(*spec),
        params,
        model,
        artifacts,
        parameter_count(spec, &initial),
        flags,
    ))
}

/// Outcome of the branch-and-bound selection.
#[derive(Debug, Clone)]
pub struct EtsSelection {
    pub best: FitResult,
    /// Every spec that was fitted, with its criterion value (`+inf` when the
    /// fit failed), in the order they were visited.
    pub candidates: Vec<(EtsSpec, f64)>,
    /// Size of the final pool implied by the branch decisions.
    pub pool_size: usize,
    /// The seasonal branch was cut (no seasonal model in the final pool).
    pub seasonal_cut: bool,
    pub trend_detected: bool,
    pub seasonal: SeasonalKind,
}

impl EtsSelection {
    pub fn fitted_count(&self) -> usize {
        self.candidates.len()
    }
}

/// Selects ETS components in five steps: fit ETS(A,N,N); try ETS(A,N,A);
/// if that improves, try ETS(M,N,M) to choose the seasonal type; try an
/// additive trend with the chosen seasonality; finally fit the pool of
/// models consistent with these decisions and keep the lowest criterion.
pub fn select_ets(series: &TimeSeries, config: &EstimationConfig) -> Result<EtsSelection> {
    let y = series.train();
    let ic = config.ic;
    let positive = y.iter().all(|v| *v > 0.0);
    let period = series.seasonal_period().filter(|m| y.len() >= 2 * m + 2);

    let mut visited: Vec<(EtsSpec, f64)> = Vec::new();
    let mut fits: Vec<FitResult> = Vec::new();
    let mut record = |visited: &mut Vec<(EtsSpec, f64)>, spec: EtsSpec, fit: Result<FitResult>| -> f64 {
        let value = match fit {
            Ok(f) => {
                let v = f.ic_value(ic);
                fits.push(f);
                v
            }
            Err(_) => f64::INFINITY,
        };
        visited.push((spec, value));
        value
    };
    let spec_of = |e, t, s| EtsSpec::new(e, t, s, period.unwrap_or(1));
    use ErrorMode::{Additive as EA, Multiplicative as EM};

    // (1)
    let ann = spec_of(EA, TrendKind::None, SeasonalKind::None)?;
    let mut best_ic = record(&mut visited, ann, fit_ets(series, &ann, config));

    // (2) and (3)
    let mut seasonal = SeasonalKind::None;
    if period.is_some() {
        let ana = spec_of(EA, TrendKind::None, SeasonalKind::Additive)?;
        let ic_ana = record(&mut visited, ana, fit_ets(series, &ana, config));
        if ic_ana < best_ic {
            best_ic = ic_ana;
            seasonal = SeasonalKind::Additive;
            if positive {
                let mnm = spec_of(EM, TrendKind::None, SeasonalKind::Multiplicative)?;
                let ic_mnm = record(&mut visited, mnm, fit_ets(series, &mnm, config));
                if ic_mnm < ic_ana {
                    best_ic = ic_mnm;
                    seasonal = SeasonalKind::Multiplicative;
                }
            }
        }
    }

    // (4)
    let trend_error = if seasonal == SeasonalKind::Multiplicative {
        EM
    } else {
        EA
    };
    let trended = spec_of(trend_error, TrendKind::Additive, seasonal)?;
    let ic_trend = record(&mut visited, trended, fit_ets(series, &trended, config));
    let trend_detected = ic_trend < best_ic;

    // (5)
    let trends: &[TrendKind] = if trend_detected {
        &TrendKind::ALL
    } else {
        &[TrendKind::None]
    };
    let mut pool = Vec::new();
    for error in [EA, EM] {
        for &trend in trends {
            pool.push(spec_of(error, trend, seasonal)?);
        }
    }
    let pool_size = pool.len();
    let remaining: Vec<EtsSpec> = pool
        .into_iter()
        .filter(|s| !visited.iter().any(|(v, _)| v == s))
        .filter(|s| positive || !s.requires_positive())
        .collect();
    let results: Vec<(EtsSpec, Result<FitResult>)> = remaining
        .par_iter()
        .map(|s| (*s, fit_ets(series, s, config)))
        .collect();
    for (spec, fit) in results {
        record(&mut visited, spec, fit);
    }

    let best = fits
        .into_iter()
        .filter(|f| f.ic_value(ic).is_finite())
        .min_by(|a, b| a.ic_value(ic).total_cmp(&b.ic_value(ic)));
    let best = match best {
        Some(b) => b,
        None => fallback_fit(series, ann)?,
    };
    Ok(EtsSelection {
        best,
        candidates: visited,
        pool_size,
        seasonal_cut: seasonal == SeasonalKind::None,
        trend_detected,
        seasonal,
    })
}

/// ETS(A,N,N) with fixed smoothing and the first observation as level.
fn fallback_fit(series: &TimeSeries, spec: EtsSpec) -> Result<FitResult> {
    let y = series.train();
    let params = PersistenceParams::default();
    let state = EtsState {
        level: y[0],
        trend: None,
        seasonal: None,
    };
    let model = build_ets(&spec, &params, &state)?;
    let artifacts = model.fit_values(y)?;
    Ok(FitResult::assemble(
        ModelSpec::Ets(spec),
        vec![NamedParam::new("alpha", params.alpha)],
        model,
        artifacts,
        2,
        vec![FitFlag::SelectionFallback],
    ))
}

/// Restricts a selection to non-seasonal models (used for trend extrapolation).
pub(crate) fn select_nonseasonal(y: &[f64], ic: Ic) -> Result<FitResult> {
    let series = TimeSeries::from_values(y.to_vec())?;
    let config = EstimationConfig::default().with_ic(ic);
    Ok(select_ets(&series, &config)?.best)
}

/// Seasonal ring normalization exposed for simulation.
pub(crate) fn normalized_ring(ring: Vec<f64>, seasonal: SeasonalKind) -> Vec<f64> {
    normalize_ring(ring, seasonal == SeasonalKind::Multiplicative)
}
