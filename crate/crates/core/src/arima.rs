//! Multi-lag ARIMA in lagged state-space form, order selection and SMA.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{
    log_likelihood, optimize, Bounds, EstimationConfig, FitFlag, FitResult, Ic, InitialMode,
    ModelSpec, NamedParam,
};
use crate::state_space::{ErrorMode, StateMatrix, StateSpaceModel};
use crate::TimeSeries;

/// AR, differencing and MA orders for each seasonal lag.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArimaOrders {
    pub lags: Vec<usize>,
    pub ar: Vec<usize>,
    pub i: Vec<usize>,
    pub ma: Vec<usize>,
}

impl ArimaOrders {
    pub fn new(lags: Vec<usize>, ar: Vec<usize>, i: Vec<usize>, ma: Vec<usize>) -> Result<Self> {
        let n = lags.len();
        if n == 0 {
            return Err(Error::Specification("ARIMA orders need at least one lag".into()));
        }
        if ar.len() != n || i.len() != n || ma.len() != n {
            return Err(Error::Specification(format!(
                "orders ar={ar:?} i={i:?} ma={ma:?} do not match lags {lags:?}"
            )));
        }
        if lags.contains(&0) || lags.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Specification(format!(
                "ARIMA lags must be positive and strictly increasing, got {lags:?}"
            )));
        }
        Ok(Self { lags, ar, i, ma })
    }

    /// Non-seasonal ARIMA(p, d, q).
    pub fn simple(p: usize, d: usize, q: usize) -> Self {
        Self {
            lags: vec![1],
            ar: vec![p],
            i: vec![d],
            ma: vec![q],
        }
    }

    /// Zero orders on the given lags.
    pub fn zeros(lags: Vec<usize>) -> Result<Self> {
        let n = lags.len();
        Self::new(lags, vec![0; n], vec![0; n], vec![0; n])
    }

    /// Parses `"ar=1,2;i=1,1;ma=2,2"` against a lag list; omitted keys are zero.
    pub fn parse(text: &str, lags: &[usize]) -> Result<Self> {
        let n = lags.len();
        let mut ar = vec![0; n];
        let mut i = vec![0; n];
        let mut ma = vec![0; n];
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, values) = part.split_once('=').ok_or_else(|| {
                Error::Specification(format!("expected key=values in orders, got '{part}'"))
            })?;
            let parsed: Vec<usize> = values
                .split(',')
                .map(|v| {
                    v.trim().parse::<usize>().map_err(|_| {
                        Error::Specification(format!("invalid order '{v}' in '{part}'"))
                    })
                })
                .collect::<Result<_>>()?;
            if parsed.len() != n {
                return Err(Error::Specification(format!(
                    "'{key}' has {} orders for {n} lags",
                    parsed.len()
                )));
            }
            match key.trim() {
                "ar" => ar = parsed,
                "i" => i = parsed,
                "ma" => ma = parsed,
                other => {
                    return Err(Error::Specification(format!(
                        "unknown order key '{other}'"
                    )))
                }
            }
        }
        Self::new(lags.to_vec(), ar, i, ma)
    }

    pub fn total_ar(&self) -> usize {
        self.ar.iter().sum()
    }

    pub fn total_i(&self) -> usize {
        self.i.iter().sum()
    }

    pub fn total_ma(&self) -> usize {
        self.ma.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_ar() + self.total_i() + self.total_ma() == 0
    }

    /// Degree of the ARI polynomial.
    pub fn ari_degree(&self) -> usize {
        self.lags
            .iter()
            .zip(self.ar.iter().zip(&self.i))
            .map(|(l, (p, d))| l * (p + d))
            .sum()
    }

    pub fn ma_degree(&self) -> usize {
        self.lags.iter().zip(&self.ma).map(|(l, q)| l * q).sum()
    }

    /// State dimension `K` (at least one).
    pub fn state_dim(&self) -> usize {
        self.ari_degree().max(self.ma_degree()).max(1)
    }
}

impl fmt::Display for ArimaOrders {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ARIMA")?;
        for (k, lag) in self.lags.iter().enumerate() {
            write!(f, "({},{},{})", self.ar[k], self.i[k], self.ma[k])?;
            if *lag != 1 {
                write!(f, "[{lag}]")?;
            }
        }
        Ok(())
    }
}

/// Coefficients of `1 - sum eta_j B^j` (ARI) and `1 + sum theta_j B^j` (MA).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArimaPolynomials {
    pub eta: Vec<f64>,
    pub theta: Vec<f64>,
}

impl ArimaPolynomials {
    pub fn k(&self) -> usize {
        self.eta.len()
    }

    /// Pre-sample states implied by `K` values of the series before the
    /// sample (oldest first) with zero innovations: `v_{j,s} = eta_j y_s`.
    pub fn presample(&self, y_before: &[f64]) -> Result<StateMatrix> {
        let k = self.k();
        if y_before.len() != k {
            return Err(Error::Structural(format!(
                "{} pre-sample values for state dimension {k}",
                y_before.len()
            )));
        }
        let columns: Vec<Vec<f64>> = y_before
            .iter()
            .map(|y| self.eta.iter().map(|e| e * y).collect())
            .collect();
        StateMatrix::from_columns(&columns)
    }
}

/// Product of two coefficient vectors (index = power of B).
pub fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0.0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `1 + sign * sum c_k B^{k lag}`.
fn lag_polynomial(coefs: &[f64], lag: usize, sign: f64) -> Vec<f64> {
    let mut p = vec![0.0; coefs.len() * lag + 1];
    p[0] = 1.0;
    for (k, c) in coefs.iter().enumerate() {
        p[(k + 1) * lag] = sign * c;
    }
    p
}

/// Multiplies out the AR, differencing and MA polynomials over all lags.
///
/// `ar` and `ma` hold the coefficients lag by lag, in the order of
/// `orders.lags`.
pub fn expand_polynomials(orders: &ArimaOrders, ar: &[f64], ma: &[f64]) -> Result<ArimaPolynomials> {
    if ar.len() != orders.total_ar() || ma.len() != orders.total_ma() {
        return Err(Error::Specification(format!(
            "{} AR and {} MA coefficients for {orders}",
            ar.len(),
            ma.len()
        )));
    }
    let mut ari = vec![1.0];
    let mut mapoly = vec![1.0];
    let (mut ar_at, mut ma_at) = (0, 0);
    for (k, &lag) in orders.lags.iter().enumerate() {
        let phi = &ar[ar_at..ar_at + orders.ar[k]];
        ar_at += orders.ar[k];
        ari = poly_mul(&ari, &lag_polynomial(phi, lag, -1.0));
        for _ in 0..orders.i[k] {
            ari = poly_mul(&ari, &lag_polynomial(&[1.0], lag, -1.0));
        }
        let theta = &ma[ma_at..ma_at + orders.ma[k]];
        ma_at += orders.ma[k];
        mapoly = poly_mul(&mapoly, &lag_polynomial(theta, lag, 1.0));
    }
    let k = orders.state_dim();
    let mut eta: Vec<f64> = ari[1..].iter().map(|c| -c).collect();
    let mut theta: Vec<f64> = mapoly[1..].to_vec();
    eta.resize(k, 0.0);
    theta.resize(k, 0.0);
    Ok(ArimaPolynomials { eta, theta })
}

/// Lagged form: `F` rows constant at `eta_j`, `w` ones,
/// `g = eta + theta`, lags `1..=K`, with zero pre-sample states.
pub fn build_arima_state_space(poly: &ArimaPolynomials) -> Result<StateSpaceModel> {
    let k = poly.k();
    if k == 0 || poly.theta.len() != k {
        return Err(Error::Structural(format!(
            "ARI and MA polynomials of lengths {} and {}",
            k,
            poly.theta.len()
        )));
    }
    let transition = poly.eta.iter().map(|e| vec![*e; k]).collect();
    let persistence = poly.eta.iter().zip(&poly.theta).map(|(e, t)| e + t).collect();
    StateSpaceModel::linear(
        vec![1.0; k],
        transition,
        persistence,
        (1..=k).collect(),
        StateMatrix::zeros(k, k),
    )
}

/// Full ARIMA model: polynomials, optional constant (intercept when there
/// is no differencing, drift otherwise) and pre-sample series values.
pub fn build_arima(
    orders: &ArimaOrders,
    ar: &[f64],
    ma: &[f64],
    constant: Option<f64>,
    y_before: &[f64],
) -> Result<StateSpaceModel> {
    let poly = expand_polynomials(orders, ar, ma)?;
    let model = build_arima_state_space(&poly)?.with_initial(poly.presample(y_before)?)?;
    match constant {
        Some(c) => model.with_intercept(c, poly.eta.clone()),
        None => Ok(model),
    }
}

/// All roots of `1 - sum phi_k z^k` lie outside the unit circle
/// (step-down recursion on the reflection coefficients).
pub fn is_stationary(phi: &[f64]) -> bool {
    let mut a = phi.to_vec();
    while let Some(&kappa) = a.last() {
        if !kappa.is_finite() || kappa.abs() >= 1.0 {
            return false;
        }
        let p = a.len();
        let denom = 1.0 - kappa * kappa;
        let prev: Vec<f64> = (0..p - 1)
            .map(|i| (a[i] + kappa * a[p - 2 - i]) / denom)
            .collect();
        a = prev;
    }
    true
}

/// All roots of `1 + sum theta_k z^k` lie outside the unit circle.
pub fn is_invertible(theta: &[f64]) -> bool {
    let neg: Vec<f64> = theta.iter().map(|t| -t).collect();
    is_stationary(&neg)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Stationarity of every per-lag AR factor and invertibility of every MA factor.
fn admissible(orders: &ArimaOrders, ar: &[f64], ma: &[f64]) -> bool {
    let (mut ar_at, mut ma_at) = (0, 0);
    for k in 0..orders.lags.len() {
        if !is_stationary(&ar[ar_at..ar_at + orders.ar[k]]) {
            return false;
        }
        if !is_invertible(&ma[ma_at..ma_at + orders.ma[k]]) {
            return false;
        }
        ar_at += orders.ar[k];
        ma_at += orders.ma[k];
    }
    true
}

/// Estimated quantities: AR and MA coefficients, the constant, the
/// variance and, when optimized, the `K` pre-sample values.
pub fn arima_parameter_count(orders: &ArimaOrders, constant: bool, initial: &InitialMode) -> usize {
    let states = if initial.estimates_states() {
        orders.state_dim()
    } else {
        0
    };
    orders.total_ar() + orders.total_ma() + usize::from(constant) + 1 + states
}

fn coef_names(orders: &ArimaOrders, prefix: &str, counts: &[usize]) -> Vec<String> {
    orders
        .lags
        .iter()
        .zip(counts)
        .flat_map(|(lag, &n)| (1..=n).map(move |k| format!("{prefix}{k}[{lag}]")))
        .collect()
}

fn mean(y: &[f64]) -> f64 {
    y.iter().sum::<f64>() / y.len() as f64
}

fn std_dev(y: &[f64]) -> f64 {
    let m = mean(y);
    (y.iter().map(|v| (v - m).powi(2)).sum::<f64>() / y.len() as f64).sqrt()
}

/// Estimates an ARIMA model on the training span of `series`.
///
/// The default initialization for ARIMA in this crate is backcasting; pass
/// [`EstimationConfig`] with another [`InitialMode`] to override.
pub fn fit_arima(
    series: &TimeSeries,
    orders: &ArimaOrders,
    constant: bool,
    config: &EstimationConfig,
) -> Result<FitResult> {
    let y = series.train();
    let n = y.len();
    if orders.is_zero() && !constant {
        return Err(Error::Specification(
            "ARIMA(0,0,0) needs a constant".into(),
        ));
    }
    let k = orders.state_dim();
    let n_params_guess = arima_parameter_count(orders, constant, &config.initial);
    if n < 3 || n <= n_params_guess {
        return Err(Error::Specification(format!(
            "{orders} needs more than {n_params_guess} observations, got {n}"
        )));
    }

    let mut flags = Vec::new();
    let mut initial = config.initial.clone();
    if let InitialMode::Backcasting { .. } = initial {
        if n < 2 * k {
            initial = InitialMode::Optimization;
            flags.push(FitFlag::BackcastFallback);
        }
    }
    if let InitialMode::Manual(states) = &initial {
        if states.rows() != k || states.cols() != k {
            return Err(Error::Specification(format!(
                "manual initial states for {orders} must be {k}x{k}"
            )));
        }
    }

    let n_ar = orders.total_ar();
    let n_ma = orders.total_ma();
    let estimate_states = initial.estimates_states();
    let scale = std_dev(y).max(1e-8);

    let mut start = vec![0.0; n_ar + n_ma];
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut steps = vec![0.1; n_ar + n_ma];
    for (count, _) in orders.ar.iter().zip(&orders.lags).chain(orders.ma.iter().zip(&orders.lags)) {
        for j in 1..=*count {
            let b = binomial(*count, j);
            lower.push(-b);
            upper.push(b);
        }
    }
    if constant {
        let c0 = if orders.total_i() == 0 {
            mean(y)
        } else {
            let diffs: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
            if diffs.is_empty() {
                0.0
            } else {
                mean(&diffs)
            }
        };
        start.push(c0);
        lower.push(f64::NEG_INFINITY);
        upper.push(f64::INFINITY);
        steps.push(0.1 * scale);
    }
    if estimate_states {
        start.extend(std::iter::repeat_n(y[0], k));
        lower.extend(std::iter::repeat_n(f64::NEG_INFINITY, k));
        upper.extend(std::iter::repeat_n(f64::INFINITY, k));
        steps.extend(std::iter::repeat_n(0.1 * scale, k));
    }
    let bounds = Bounds::new(lower, upper);

    let head = vec![y[0]; k];
    let assemble_model = |x: &[f64]| -> Result<StateSpaceModel> {
        let ar = &x[..n_ar];
        let ma = &x[n_ar..n_ar + n_ma];
        if !admissible(orders, ar, ma) {
            return Err(Error::Estimation("non-stationary or non-invertible".into()));
        }
        let c = constant.then(|| x[n_ar + n_ma]);
        let rest = &x[n_ar + n_ma + usize::from(constant)..];
        let y_before = if estimate_states { rest } else { &head[..] };
        let model = build_arima(orders, ar, ma, c, y_before)?;
        match &initial {
            InitialMode::Backcasting { iterations } => Ok(model.backcast(y, *iterations)?.model),
            InitialMode::Manual(states) => model.with_initial(states.clone()),
            InitialMode::Optimization => Ok(model),
        }
    };
    let objective = |x: &[f64]| match assemble_model(x).and_then(|m| m.fit_values(y)) {
        Ok(a) => -log_likelihood(ErrorMode::Additive, &a),
        Err(_) => f64::INFINITY,
    };
    let best = optimize(objective, &bounds, &start, Some(&steps), &config.optimizer())?;
    let model = assemble_model(&best.x)?;
    let artifacts = model.fit_values(y)?;

    let mut names = coef_names(orders, "ar", &orders.ar);
    names.extend(coef_names(orders, "ma", &orders.ma));
    if constant {
        names.push(if orders.total_i() == 0 { "constant" } else { "drift" }.into());
    }
    if estimate_states {
        names.extend((1..=k).map(|s| format!("y0_{s}")));
    }
    let params = names
        .into_iter()
        .zip(&best.x)
        .map(|(name, v)| NamedParam::new(name, *v))
        .collect();
    Ok(FitResult::assemble(
        ModelSpec::Arima {
            orders: orders.clone(),
            constant,
        },
        params,
        model,
        artifacts,
        arima_parameter_count(orders, constant, &initial),
        flags,
    ))
}

/// ARIMA estimation config with backcast initialization.
pub fn default_arima_config() -> EstimationConfig {
    EstimationConfig::default().with_initial(InitialMode::backcasting())
}

/// Outcome of the order search.
#[derive(Debug, Clone)]
pub struct ArimaSelection {
    pub best: FitResult,
    /// Every visited candidate with its criterion value (`+inf` for failures).
    pub candidates: Vec<(ArimaOrders, bool, f64)>,
}

/// Largest orders searched by default on lags `(1, m)`.
pub fn default_max_orders(lags: &[usize]) -> ArimaOrders {
    let lags: Vec<usize> = match lags.iter().copied().filter(|l| *l > 1).max() {
        Some(m) => vec![1, m],
        None => vec![1],
    };
    let n = lags.len();
    let pick = |a: usize, b: usize| if n == 2 { vec![a, b] } else { vec![a] };
    ArimaOrders {
        lags,
        ar: pick(3, 2),
        i: pick(2, 1),
        ma: pick(3, 2),
    }
}

/// Greedy order search: differencing orders first (no ARMA terms), then AR
/// orders lag by lag in ascending order, then MA orders likewise; each
/// ascent stops after two consecutive non-improving candidates. The
/// constant-only model is always among the candidates.
pub fn select_arima_orders(
    series: &TimeSeries,
    max_orders: &ArimaOrders,
    config: &EstimationConfig,
) -> Result<ArimaSelection> {
    let y = series.train();
    let ic = config.ic;
    let mut visited: Vec<(ArimaOrders, bool, f64)> = Vec::new();
    let mut best: Option<FitResult> = None;

    let feasible = |o: &ArimaOrders| 2 * o.state_dim() <= y.len();
    let consider = |cands: Vec<(ArimaOrders, bool)>,
                        visited: &mut Vec<(ArimaOrders, bool, f64)>,
                        best: &mut Option<FitResult>|
     -> Vec<f64> {
        let fits: Vec<Result<FitResult>> = cands
            .par_iter()
            .map(|(o, c)| {
                if feasible(o) {
                    fit_arima(series, o, *c, config)
                } else {
                    Err(Error::Specification("series too short".into()))
                }
            })
            .collect();
        let mut values = Vec::with_capacity(fits.len());
        for ((o, c), fit) in cands.into_iter().zip(fits) {
            let v = match fit {
                Ok(f) => {
                    let v = f.ic_value(ic);
                    if v.is_finite() && best.as_ref().is_none_or(|b| v < b.ic_value(ic)) {
                        *best = Some(f);
                    }
                    v
                }
                Err(_) => f64::INFINITY,
            };
            visited.push((o, c, v));
            values.push(v);
        }
        values
    };

    let lags = max_orders.lags.clone();
    let zero = ArimaOrders::zeros(lags.clone())?;

    // constant-only model and all differencing combinations
    let mut diff_cands = vec![(zero.clone(), true)];
    let mut combos: Vec<Vec<usize>> = vec![vec![]];
    for &max_i in &max_orders.i {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                (0..=max_i).map(move |d| {
                    let mut c = c.clone();
                    c.push(d);
                    c
                })
            })
            .collect();
    }
    for combo in combos.into_iter().filter(|c| c.iter().any(|d| *d > 0)) {
        let o = ArimaOrders {
            i: combo,
            ..zero.clone()
        };
        diff_cands.push((o, false));
    }
    consider(diff_cands, &mut visited, &mut best);

    let current = |best: &Option<FitResult>| -> Option<(ArimaOrders, bool)> {
        match best.as_ref().map(|b| &b.spec) {
            Some(ModelSpec::Arima { orders, constant }) => Some((orders.clone(), *constant)),
            _ => None,
        }
    };

    for ma_stage in [false, true] {
        for k in 0..lags.len() {
            let max = if ma_stage {
                max_orders.ma[k]
            } else {
                max_orders.ar[k]
            };
            let Some((base, constant)) = current(&best) else {
                break;
            };
            let mut worse = 0;
            let mut incumbent = best.as_ref().map_or(f64::INFINITY, |b| b.ic_value(ic));
            for order in 1..=max {
                let mut cand = base.clone();
                if ma_stage {
                    cand.ma[k] = order;
                } else {
                    cand.ar[k] = order;
                }
                let v = consider(vec![(cand, constant)], &mut visited, &mut best)[0];
                if v < incumbent {
                    incumbent = v;
                    worse = 0;
                } else {
                    worse += 1;
                    if worse >= 2 {
                        break;
                    }
                }
            }
        }
    }

    if let Some((orders, constant)) = current(&best) {
        if orders.total_i() > 0 {
            consider(vec![(orders, !constant)], &mut visited, &mut best);
        }
    }

    let best = match best {
        Some(b) => b,
        None => random_walk_fallback(series)?,
    };
    Ok(ArimaSelection {
        best,
        candidates: visited,
    })
}

fn random_walk_fallback(series: &TimeSeries) -> Result<FitResult> {
    let mut fit = fit_naive(series)?;
    fit.flags.push(FitFlag::SelectionFallback);
    Ok(fit)
}

/// Random walk: `yhat_t = y_{t-1}`, started from the first observation.
pub fn fit_naive(series: &TimeSeries) -> Result<FitResult> {
    let y = series.train();
    if y.is_empty() {
        return Err(Error::Specification("empty series".into()));
    }
    let orders = ArimaOrders::simple(0, 1, 0);
    let model = build_arima(&orders, &[], &[], None, &[y[0]])?;
    let artifacts = model.fit_values(y)?;
    Ok(FitResult::assemble(
        ModelSpec::Naive,
        Vec::new(),
        model,
        artifacts,
        1,
        Vec::new(),
    ))
}

/// SMA(p) as AR(p) with every coefficient fixed at `1/p`. Pre-sample
/// values are set to the mean of the first `p` observations.
pub fn sma_model(series: &TimeSeries, p: usize) -> Result<FitResult> {
    let y = series.train();
    if p == 0 || p > y.len() {
        return Err(Error::Specification(format!(
            "SMA order {p} outside 1..={}",
            y.len()
        )));
    }
    let orders = ArimaOrders::simple(p, 0, 0);
    let w = 1.0 / p as f64;
    let head = mean(&y[..p]);
    let model = build_arima(&orders, &vec![w; p], &[], None, &vec![head; p])?;
    let artifacts = model.fit_values(y)?;
    Ok(FitResult::assemble(
        ModelSpec::Sma { order: p },
        Vec::new(),
        model,
        artifacts,
        1,
        Vec::new(),
    ))
}

/// Lowest-criterion SMA order in `1..=min(max_p, T)`.
pub fn select_sma_order(series: &TimeSeries, max_p: usize, ic: Ic) -> Result<FitResult> {
    if max_p == 0 {
        return Err(Error::Specification("maximum SMA order must be positive".into()));
    }
    let upper = max_p.min(series.train().len());
    let fits: Vec<FitResult> = (1..=upper)
        .into_par_iter()
        .map(|p| sma_model(series, p))
        .collect::<Result<_>>()?;
    fits.into_iter()
        .min_by(|a, b| a.ic_value(ic).total_cmp(&b.ic_value(ic)))
        .ok_or_else(|| Error::Estimation("no SMA order could be fitted".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arima_112_matrices() {
        let (phi, t1, t2) = (0.4, 0.3, -0.2);
        let poly = expand_polynomials(&ArimaOrders::simple(1, 1, 2), &[phi], &[t1, t2]).unwrap();
        assert_eq!(poly.eta, vec![1.0 + phi, -phi]);
        assert_eq!(poly.theta, vec![t1, t2]);
        let m = build_arima_state_space(&poly).unwrap();
        assert_eq!(m.transition(), &[vec![1.0 + phi, 1.0 + phi], vec![-phi, -phi]]);
        assert_eq!(m.persistence(), &[1.0 + phi + t1, -phi + t2]);
        assert_eq!(m.measurement(), &[1.0, 1.0]);
        assert_eq!(m.lags(), &[1, 2]);
    }

    #[test]
    fn random_walk_polynomials() {
        let poly = expand_polynomials(&ArimaOrders::simple(0, 1, 0), &[], &[]).unwrap();
        assert_eq!(poly.eta, vec![1.0]);
        assert_eq!(poly.theta, vec![0.0]);
    }

    #[test]
    fn airline_polynomials() {
        let orders = ArimaOrders::new(vec![1, 12], vec![0, 0], vec![1, 1], vec![1, 1]).unwrap();
        let poly = expand_polynomials(&orders, &[], &[0.5, 0.25]).unwrap();
        assert_eq!(poly.k(), 13);
        for (j, e) in poly.eta.iter().enumerate() {
            let expected = match j + 1 {
                1 | 12 => 1.0,
                13 => -1.0,
                _ => 0.0,
            };
            assert_eq!(*e, expected, "eta_{}", j + 1);
        }
        assert_eq!(poly.theta[0], 0.5);
        assert_eq!(poly.theta[11], 0.25);
        assert_eq!(poly.theta[12], 0.125);
    }

    #[test]
    fn order_syntax() {
        let o = ArimaOrders::parse("ar=1,2;i=1,1;ma=2,2", &[1, 12]).unwrap();
        assert_eq!(o.ar, vec![1, 2]);
        assert_eq!(o.i, vec![1, 1]);
        assert_eq!(o.ma, vec![2, 2]);
        let o = ArimaOrders::parse("i=2,2;ma=2,2", &[1, 12]).unwrap();
        assert_eq!(o.ar, vec![0, 0]);
        assert_eq!(o.to_string(), "ARIMA(0,2,2)(0,2,2)[12]");
        assert!(ArimaOrders::parse("ar=1", &[1, 12]).is_err());
        assert!(ArimaOrders::parse("xx=1,1", &[1, 12]).is_err());
        assert!(ArimaOrders::parse("ar=a,1", &[1, 12]).is_err());
    }

    #[test]
    fn stationarity_checks() {
        assert!(is_stationary(&[0.5]));
        assert!(!is_stationary(&[1.0]));
        assert!(!is_stationary(&[-1.2]));
        assert!(is_stationary(&[0.5, 0.3]));
        assert!(!is_stationary(&[1.5, -0.5]));
        assert!(!is_stationary(&[0.5, 0.6]));
        assert!(is_invertible(&[0.9]));
        assert!(!is_invertible(&[1.1]));
        assert!(is_stationary(&[]));
    }

    #[test]
    fn rows_of_f_are_constant_and_g_minus_theta_is_first_column() {
        let orders = ArimaOrders::new(vec![1, 4], vec![2, 1], vec![1, 0], vec![1, 1]).unwrap();
        let poly = expand_polynomials(&orders, &[0.2, 0.1, 0.3], &[0.4, -0.3]).unwrap();
        let m = build_arima_state_space(&poly).unwrap();
        for (j, row) in m.transition().iter().enumerate() {
            assert!(row.iter().all(|v| *v == row[0]));
            assert!((m.persistence()[j] - poly.theta[j] - row[0]).abs() < 1e-15);
        }
        assert_eq!(m.lags(), (1..=poly.k()).collect::<Vec<_>>().as_slice());
    }

    #[test]
    fn constant_gives_intercept_in_levels() {
        // AR(1) with intercept c: mean c / (1 - phi)
        let orders = ArimaOrders::simple(1, 0, 0);
        let model = build_arima(&orders, &[0.5], &[], Some(2.0), &[4.0]).unwrap();
        let y = [4.0; 6];
        let fit = model.fit_values(&y).unwrap();
        assert!(fit.residuals.iter().all(|e| e.abs() < 1e-12));
    }

    #[test]
    fn sma_forecast_is_trailing_mean() {
        let series = TimeSeries::from_values(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let fit = sma_model(&series, 3).unwrap();
        let next = fit.origin().point(1).unwrap();
        assert!((next[0] - 5.0).abs() < 1e-12);
        assert!(sma_model(&series, 7).is_err());
        assert!(sma_model(&series, 0).is_err());
    }

    #[test]
    fn sma_one_is_naive() {
        let series = TimeSeries::from_values(vec![3.0, 1.0, 4.0, 1.0, 5.0]).unwrap();
        let fit = sma_model(&series, 1).unwrap();
        for t in 1..5 {
            assert_eq!(fit.fitted()[t], series.values()[t - 1]);
        }
    }

    #[test]
    fn sma_selection_caps_order() {
        let series = TimeSeries::from_values(vec![1.0, 3.0, 2.0, 4.0]).unwrap();
        let fit = select_sma_order(&series, 10, Ic::Aic).unwrap();
        match fit.spec {
            ModelSpec::Sma { order } => assert!(order <= 4),
            _ => panic!("not an SMA fit"),
        }
    }

    #[test]
    fn zero_orders_without_constant_rejected() {
        let series = TimeSeries::from_values((0..30).map(f64::from).collect()).unwrap();
        assert!(fit_arima(&series, &ArimaOrders::simple(0, 0, 0), false, &default_arima_config()).is_err());
    }

    #[test]
    fn default_max_orders_follow_lags() {
        let o = default_max_orders(&[1, 12]);
        assert_eq!(o.lags, vec![1, 12]);
        assert_eq!((o.ar.clone(), o.i.clone(), o.ma.clone()), (vec![3, 2], vec![2, 1], vec![3, 2]));
        assert_eq!(default_max_orders(&[1]).ar, vec![3]);
    }
}
