//! Classical decomposition with several seasonal cycles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{line_fit, Ic};
use crate::ets::select_nonseasonal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum DecompositionKind {
    #[default]
    Additive,
    Multiplicative,
}

/// Seasonal indices of one cycle; `pattern[k]` applies to observations
/// whose zero-based position `t` satisfies `t % lag == k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonalRing {
    pub lag: usize,
    pub pattern: Vec<f64>,
}

impl SeasonalRing {
    pub fn at(&self, t: usize) -> f64 {
        self.pattern[t % self.lag]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    /// Centered moving average; `None` on the edges where the window does
    /// not fit.
    pub trend: Vec<Option<f64>>,
    /// One ring per seasonal lag, ascending.
    pub seasonals: Vec<SeasonalRing>,
    pub residual: Vec<Option<f64>>,
    pub kind: DecompositionKind,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.trend.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trend.is_empty()
    }

    /// Combined seasonal effect at position `t`.
    pub fn seasonal_at(&self, t: usize) -> f64 {
        match self.kind {
            DecompositionKind::Additive => self.seasonals.iter().map(|r| r.at(t)).sum(),
            DecompositionKind::Multiplicative => self.seasonals.iter().map(|r| r.at(t)).product(),
        }
    }

    /// Trend, seasonal and residual recombined where the trend is defined.
    pub fn reconstruct(&self) -> Vec<Option<f64>> {
        (0..self.len())
            .map(|t| {
                let (tr, res) = (self.trend[t]?, self.residual[t]?);
                Some(match self.kind {
                    DecompositionKind::Additive => tr + self.seasonal_at(t) + res,
                    DecompositionKind::Multiplicative => tr * self.seasonal_at(t) * res,
                })
            })
            .collect()
    }
}

/// Centered moving average of width `window`; even widths use half
/// weights on the two end points.
pub fn centered_moving_average(y: &[f64], window: usize) -> Vec<Option<f64>> {
    let n = y.len();
    let half = window / 2;
    let mut out = vec![None; n];
    if window == 0 || n < 2 * half + 1 {
        return out;
    }
    for (t, slot) in out.iter_mut().enumerate().take(n - half).skip(half) {
        let span = &y[t - half..=t + half];
        let value = if window % 2 == 1 {
            span.iter().sum::<f64>() / window as f64
        } else {
            let inner: f64 = span[1..span.len() - 1].iter().sum();
            (inner + 0.5 * (span[0] + span[span.len() - 1])) / window as f64
        };
        *slot = Some(value);
    }
    out
}

/// Decomposes `y` with a single pass; see [`msdecompose_iter`].
pub fn msdecompose(y: &[f64], lags: &[usize], kind: DecompositionKind) -> Result<Decomposition> {
    msdecompose_iter(y, lags, kind, 1)
}

/// Multiplicative decompositions work on logs and exponentiate at the end.
/// The trend is a centered moving average of width `max(lags)`; rings are
/// per-position means of the detrended remainder, centred and removed lag by
/// lag in ascending order. With `iterations > 1` the trend is re-estimated
/// from the seasonally adjusted series and the rings extracted again.
///
/// A lag of 1 in `lags` is ignored.
pub fn msdecompose_iter(
    y: &[f64],
    lags: &[usize],
    kind: DecompositionKind,
    iterations: usize,
) -> Result<Decomposition> {
    let mut lags: Vec<usize> = lags.iter().copied().filter(|l| *l > 1).collect();
    lags.sort_unstable();
    lags.dedup();
    let Some(&max_lag) = lags.last() else {
        return Err(Error::Specification(
            "decomposition needs at least one seasonal lag greater than 1".into(),
        ));
    };
    if y.len() < 2 * max_lag {
        return Err(Error::Specification(format!(
            "decomposition with lag {max_lag} needs at least {} observations, got {}",
            2 * max_lag,
            y.len()
        )));
    }
    if iterations == 0 {
        return Err(Error::Specification("iterations must be positive".into()));
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("value at position {} is not finite", i + 1)));
    }
    let x: Vec<f64> = match kind {
        DecompositionKind::Additive => y.to_vec(),
        DecompositionKind::Multiplicative => {
            if let Some(i) = y.iter().position(|v| *v <= 0.0) {
                return Err(Error::Domain(format!(
                    "multiplicative decomposition needs positive values; position {} is {}",
                    i + 1,
                    y[i]
                )));
            }
            y.iter().map(|v| v.ln()).collect()
        }
    };

    let n = x.len();
    let mut adjusted = x.clone();
    let mut trend = Vec::new();
    let mut rings: Vec<SeasonalRing> = Vec::new();
    let mut remainder: Vec<Option<f64>> = Vec::new();
    for _ in 0..iterations {
        trend = centered_moving_average(&adjusted, max_lag);
        remainder = (0..n).map(|t| trend[t].map(|tr| x[t] - tr)).collect();
        rings.clear();
        for &lag in &lags {
            let mut sums = vec![0.0; lag];
            let mut counts = vec![0usize; lag];
            for (t, r) in remainder.iter().enumerate() {
                if let Some(r) = r {
                    sums[t % lag] += r;
                    counts[t % lag] += 1;
                }
            }
            let mut pattern: Vec<f64> = sums
                .iter()
                .zip(&counts)
                .map(|(s, c)| if *c > 0 { s / *c as f64 } else { 0.0 })
                .collect();
            let centre = pattern.iter().sum::<f64>() / lag as f64;
            pattern.iter_mut().for_each(|p| *p -= centre);
            for (t, r) in remainder.iter_mut().enumerate() {
                if let Some(r) = r {
                    *r -= pattern[t % lag];
                }
            }
            rings.push(SeasonalRing { lag, pattern });
        }
        adjusted = (0..n)
            .map(|t| x[t] - rings.iter().map(|r| r.at(t)).sum::<f64>())
            .collect();
    }

    let out = |v: f64| match kind {
        DecompositionKind::Additive => v,
        DecompositionKind::Multiplicative => v.exp(),
    };
    Ok(Decomposition {
        trend: trend.into_iter().map(|v| v.map(out)).collect(),
        seasonals: rings
            .into_iter()
            .map(|r| SeasonalRing {
                lag: r.lag,
                pattern: r.pattern.into_iter().map(out).collect(),
            })
            .collect(),
        residual: remainder.into_iter().map(|v| v.map(out)).collect(),
        kind,
    })
}

/// Forecasts `h` steps past the end of the decomposed series by
/// extrapolating the trend with a non-seasonal ETS model (selected by
/// AICc) and reapplying the rings. Trends with fewer than 10 defined points
/// are extrapolated linearly.
pub fn decompose_forecast(result: &Decomposition, h: usize) -> Result<Vec<f64>> {
    if h == 0 {
        return Err(Error::Specification("forecast horizon must be positive".into()));
    }
    let n = result.len();
    let to_model = |v: f64| match result.kind {
        DecompositionKind::Additive => v,
        DecompositionKind::Multiplicative => v.ln(),
    };
    let defined: Vec<(usize, f64)> = result
        .trend
        .iter()
        .enumerate()
        .filter_map(|(t, v)| v.map(|v| (t, to_model(v))))
        .collect();
    let Some(&(last_t, _)) = defined.last() else {
        return Err(Error::Specification("trend is undefined everywhere".into()));
    };
    // steps from the last defined trend point to the end of the forecast
    let gap = n - 1 - last_t;
    let steps = gap + h;

    let values: Vec<f64> = defined.iter().map(|p| p.1).collect();
    let extrapolated = if values.len() >= 10 {
        select_nonseasonal(&values, Ic::Aicc)
            .and_then(|fit| fit.origin().point(steps))
            .ok()
    } else {
        None
    };
    let trend_path = match extrapolated {
        Some(path) if path.iter().all(|v| v.is_finite()) => path,
        _ => {
            let points: Vec<(f64, f64)> = defined.iter().map(|(t, v)| (*t as f64, *v)).collect();
            let (a, b) = line_fit(&points);
            (1..=steps).map(|s| a + b * (last_t + s) as f64).collect()
        }
    };

    Ok((0..h)
        .map(|i| {
            let t = n + i;
            let tr = trend_path[gap + i];
            match result.kind {
                DecompositionKind::Additive => tr + result.seasonal_at(t),
                DecompositionKind::Multiplicative => tr.exp() * result.seasonal_at(t),
            }
        })
        .collect())
}
