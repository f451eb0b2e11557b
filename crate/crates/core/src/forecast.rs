//! Point forecasts and simulation-based prediction intervals.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::state_space::{Dynamics, ErrorMode, StateMatrix, StateSpaceModel};

/// A model positioned at the end of its sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastOrigin {
    pub model: StateSpaceModel,
    /// The last `max(l)` state columns.
    pub states: StateMatrix,
    pub sigma2: f64,
}

impl ForecastOrigin {
    pub fn point(&self, h: usize) -> Result<Vec<f64>> {
        point_forecast(self, h)
    }

    /// One trajectory driven by the given error-scale draws.
    pub fn path(&self, errors: &[f64]) -> Vec<f64> {
        self.model.propagate(&self.states, errors).0
    }

    /// Lower bounds of multiplicative models are clamped at zero.
    fn nonnegative(&self) -> bool {
        self.model.error_mode() == ErrorMode::Multiplicative
            || matches!(self.model.dynamics(), Dynamics::Ets(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Side {
    #[default]
    Both,
    Upper,
    Lower,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Both => "both",
            Side::Upper => "upper",
            Side::Lower => "lower",
        })
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "both" => Ok(Side::Both),
            "upper" => Ok(Side::Upper),
            "lower" => Ok(Side::Lower),
            _ => Err(Error::Specification(format!(
                "side must be both, upper or lower, got '{s}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalConfig {
    pub level: f64,
    pub side: Side,
    pub cumulative: bool,
    pub n_paths: usize,
    pub seed: u64,
}

impl Default for IntervalConfig {
    fn default() -> Self {
        Self {
            level: 0.95,
            side: Side::Both,
            cumulative: false,
            n_paths: 10_000,
            seed: 0,
        }
    }
}

impl IntervalConfig {
    fn validate(&self) -> Result<()> {
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::Specification(format!(
                "interval level must lie in (0, 1), got {}",
                self.level
            )));
        }
        if self.n_paths < 1000 {
            return Err(Error::Specification(format!(
                "at least 1000 paths are needed, got {}",
                self.n_paths
            )));
        }
        Ok(())
    }

    /// Quantile probabilities of the lower and upper bound.
    fn probabilities(&self) -> (Option<f64>, Option<f64>) {
        match self.side {
            Side::Both => (
                Some((1.0 - self.level) / 2.0),
                Some((1.0 + self.level) / 2.0),
            ),
            Side::Upper => (None, Some(self.level)),
            Side::Lower => (Some(1.0 - self.level), None),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastResult {
    /// Point forecasts; a single sum when `cumulative`.
    pub mean: Vec<f64>,
    pub lower: Option<Vec<f64>>,
    pub upper: Option<Vec<f64>>,
    pub level: f64,
    pub side: Side,
    pub cumulative: bool,
    /// Zero residual variance: bounds collapsed onto the mean.
    pub collapsed: bool,
}

/// Iterates the recursion with zero innovations.
pub fn point_forecast(origin: &ForecastOrigin, h: usize) -> Result<Vec<f64>> {
    if h == 0 {
        return Err(Error::Specification("forecast horizon must be positive".into()));
    }
    check_origin(origin)?;
    Ok(origin.path(&vec![0.0; h]))
}

fn check_origin(origin: &ForecastOrigin) -> Result<()> {
    let m = &origin.model;
    if origin.states.rows() != m.dim() || origin.states.cols() != m.max_lag() {
        return Err(Error::Structural(format!(
            "origin states are {}x{}, model needs {}x{}",
            origin.states.rows(),
            origin.states.cols(),
            m.dim(),
            m.max_lag()
        )));
    }
    if origin.sigma2.is_nan() || origin.sigma2 < 0.0 {
        return Err(Error::Specification("residual variance must be nonnegative".into()));
    }
    Ok(())
}

/// Simulated future trajectories, one per path. Path `i` uses its own
/// stream of the generator seeded with `seed`, so results do not depend on
/// execution order.
pub fn simulate_paths(origin: &ForecastOrigin, h: usize, n_paths: usize, seed: u64) -> Vec<Vec<f64>> {
    let sd = origin.sigma2.sqrt();
    (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let errors: Vec<f64> = (0..h)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    sd * z
                })
                .collect();
            origin.path(&errors)
        })
        .collect()
}

/// Type-7 sample quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    let pos = p.clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Point forecasts with simulated prediction intervals.
///
/// Two-sided bounds are the `(1 - level)/2` and `(1 + level)/2` quantiles of
/// the simulated values at each step; one-sided bounds use `level` on the
/// requested side. Cumulative intervals take quantiles of the per-path sums.
pub fn prediction_interval(
    origin: &ForecastOrigin,
    h: usize,
    config: &IntervalConfig,
) -> Result<ForecastResult> {
    config.validate()?;
    let mean = point_forecast(origin, h)?;
    let mean = if config.cumulative {
        vec![mean.iter().sum()]
    } else {
        mean
    };
    let (p_lo, p_hi) = config.probabilities();
    if origin.sigma2 == 0.0 {
        return Ok(ForecastResult {
            lower: p_lo.map(|_| mean.clone()),
            upper: p_hi.map(|_| mean.clone()),
            mean,
            level: config.level,
            side: config.side,
            cumulative: config.cumulative,
            collapsed: true,
        });
    }

    let paths = simulate_paths(origin, h, config.n_paths, config.seed);
    let columns: Vec<Vec<f64>> = if config.cumulative {
        vec![paths.iter().map(|p| p.iter().sum()).collect()]
    } else {
        (0..h).map(|s| paths.iter().map(|p| p[s]).collect()).collect()
    };
    let clamp = origin.nonnegative();
    let mut lower = p_lo.map(|_| Vec::with_capacity(columns.len()));
    let mut upper = p_hi.map(|_| Vec::with_capacity(columns.len()));
    for mut col in columns {
        col.retain(|v| !v.is_nan());
        col.sort_by(f64::total_cmp);
        if let (Some(p), Some(out)) = (p_lo, lower.as_mut()) {
            let q = quantile_sorted(&col, p);
            out.push(if clamp { q.max(0.0) } else { q });
        }
        if let (Some(p), Some(out)) = (p_hi, upper.as_mut()) {
            out.push(quantile_sorted(&col, p));
        }
    }
    Ok(ForecastResult {
        mean,
        lower,
        upper,
        level: config.level,
        side: config.side,
        cumulative: config.cumulative,
        collapsed: false,
    })
}

/// Response of `y_{T+1+j}` to a unit innovation at `T+1`, `j = 0..h`.
/// Only defined for linear models with additive error.
pub fn impulse_response(origin: &ForecastOrigin, h: usize) -> Result<Vec<f64>> {
    if !origin.model.is_pure_additive() {
        return Err(Error::Specification(
            "analytic variances need a linear additive-error model".into(),
        ));
    }
    check_origin(origin)?;
    let base = origin.path(&vec![0.0; h]);
    let mut unit = vec![0.0; h];
    unit[0] = 1.0;
    let shocked = origin.path(&unit);
    Ok(shocked.iter().zip(&base).map(|(s, b)| s - b).collect())
}

/// `h`-step forecast variances `sigma2 (1 + sum_{j<h} c_j^2)`, or the single
/// variance of the sum over `h` steps when `cumulative`.
pub fn analytic_variance(origin: &ForecastOrigin, h: usize, cumulative: bool) -> Result<Vec<f64>> {
    let c = impulse_response(origin, h)?;
    if cumulative {
        // innovation at step i feeds steps i..h, contributing sum_{j=0}^{h-i} c_j
        let mut partial = 0.0;
        let mut total = 0.0;
        for cj in &c {
            partial += cj;
            total += partial * partial;
        }
        return Ok(vec![origin.sigma2 * total]);
    }
    let mut acc = 0.0;
    Ok(c.iter()
        .map(|cj| {
            acc += cj * cj;
            origin.sigma2 * acc
        })
        .collect())
}

/// Gaussian intervals from [`analytic_variance`].
pub fn analytic_interval(
    origin: &ForecastOrigin,
    h: usize,
    config: &IntervalConfig,
) -> Result<ForecastResult> {
    if !(config.level > 0.0 && config.level < 1.0) {
        return Err(Error::Specification("interval level must lie in (0, 1)".into()));
    }
    let mean = point_forecast(origin, h)?;
    let mean = if config.cumulative {
        vec![mean.iter().sum()]
    } else {
        mean
    };
    let var = analytic_variance(origin, h, config.cumulative)?;
    let normal = Normal::standard();
    let (p_lo, p_hi) = config.probabilities();
    let bound = |p: f64| -> Vec<f64> {
        let z = normal.inverse_cdf(p);
        mean.iter().zip(&var).map(|(m, v)| m + z * v.sqrt()).collect()
    };
    Ok(ForecastResult {
        lower: p_lo.map(bound),
        upper: p_hi.map(bound),
        mean: mean.clone(),
        level: config.level,
        side: config.side,
        cumulative: config.cumulative,
        collapsed: origin.sigma2 == 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ets::{build_ets, EtsSpec, EtsState, PersistenceParams, SeasonalKind, TrendKind};

    fn ets_origin(trend: TrendKind, alpha: f64, beta: f64, sigma2: f64) -> ForecastOrigin {
        let spec = EtsSpec::new(ErrorMode::Additive, trend, SeasonalKind::None, 1).unwrap();
        let init = EtsState {
            level: 10.0,
            trend: (trend != TrendKind::None).then_some(2.0),
            seasonal: None,
        };
        let p = PersistenceParams {
            alpha,
            beta,
            gamma: 0.0,
            phi: 1.0,
        };
        let model = build_ets(&spec, &p, &init).unwrap();
        ForecastOrigin {
            states: model.initial().clone(),
            model,
            sigma2,
        }
    }

    #[test]
    fn level_model_is_flat() {
        let o = ets_origin(TrendKind::None, 0.4, 0.0, 1.0);
        assert_eq!(o.point(5).unwrap(), vec![10.0; 5]);
    }

    #[test]
    fn trend_model_is_linear() {
        let o = ets_origin(TrendKind::Additive, 0.4, 0.1, 1.0);
        assert_eq!(o.point(3).unwrap(), vec![12.0, 14.0, 16.0]);
    }

    #[test]
    fn local_level_variance() {
        let alpha: f64 = 0.3;
        let o = ets_origin(TrendKind::None, alpha, 0.0, 2.0);
        let v = analytic_variance(&o, 6, false).unwrap();
        for (h, vh) in v.iter().enumerate() {
            let expected = 2.0 * (1.0 + h as f64 * alpha * alpha);
            assert!((vh - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn cumulative_one_step_equals_ordinary() {
        let o = ets_origin(TrendKind::None, 0.3, 0.0, 1.0);
        let cfg = IntervalConfig {
            n_paths: 2000,
            seed: 9,
            ..Default::default()
        };
        let a = prediction_interval(&o, 1, &cfg).unwrap();
        let b = prediction_interval(&o, 1, &IntervalConfig { cumulative: true, ..cfg }).unwrap();
        assert_eq!(a.lower, b.lower);
        assert_eq!(a.upper, b.upper);
    }

    #[test]
    fn zero_variance_collapses() {
        let o = ets_origin(TrendKind::None, 0.3, 0.0, 0.0);
        let r = prediction_interval(&o, 3, &IntervalConfig::default()).unwrap();
        assert!(r.collapsed);
        assert_eq!(r.lower.as_ref(), Some(&r.mean));
    }

    #[test]
    fn one_sided_bounds() {
        let o = ets_origin(TrendKind::None, 0.3, 0.0, 1.0);
        let up = prediction_interval(
            &o,
            2,
            &IntervalConfig {
                side: Side::Upper,
                n_paths: 2000,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(up.lower.is_none() && up.upper.is_some());
        let lo = prediction_interval(
            &o,
            2,
            &IntervalConfig {
                side: Side::Lower,
                n_paths: 2000,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(lo.upper.is_none() && lo.lower.is_some());
    }

    #[test]
    fn quantile_type_seven() {
        let d = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&d, 0.0), 1.0);
        assert_eq!(quantile_sorted(&d, 1.0), 4.0);
        assert_eq!(quantile_sorted(&d, 0.5), 2.5);
    }

    #[test]
    fn rejects_bad_config() {
        let o = ets_origin(TrendKind::None, 0.3, 0.0, 1.0);
        let bad = IntervalConfig {
            level: 1.0,
            ..Default::default()
        };
        assert!(prediction_interval(&o, 2, &bad).is_err());
        let few = IntervalConfig {
            n_paths: 10,
            ..Default::default()
        };
        assert!(prediction_interval(&o, 2, &few).is_err());
        assert!(point_forecast(&o, 0).is_err());
    }
}
