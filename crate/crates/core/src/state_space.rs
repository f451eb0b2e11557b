//! Lagged single-source-of-error state-space engine.
//!
//! Every model in the crate is expressed as
//!
//! ```text
//! y_t = w' v_{t-l} + e_t
//! v_t = F v_{t-l} + g e_t
//! ```
//!
//! where component `j` of the state is read at its own lag `l_j`. States are
//! kept in a column-major matrix whose first `max(l)` columns hold the
//! pre-sample values; column `max(l) + t - 1` holds the state after
//! observation `t` (1-based).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ets::EtsRecursion;

/// How the innovation enters the observation equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum ErrorMode {
    /// `y = yhat + e`
    #[default]
    Additive,
    /// `y = yhat * (1 + e)`
    Multiplicative,
}

/// Column-major matrix of state values, one row per component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl StateMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds a matrix from columns; all columns must have the same length.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::Structural("ragged state columns".into()));
        }
        Ok(Self {
            rows,
            cols: columns.len(),
            data: columns.concat(),
        })
    }

    /// Builds a matrix from rows; all rows must have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Structural("ragged state rows".into()));
        }
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                m.set(i, c, *v);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[col * self.rows + row]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[col * self.rows + row] = value;
    }

    pub fn column(&self, col: usize) -> &[f64] {
        &self.data[col * self.rows..(col + 1) * self.rows]
    }

    pub fn column_mut(&mut self, col: usize) -> &mut [f64] {
        &mut self.data[col * self.rows..(col + 1) * self.rows]
    }

    pub fn row(&self, row: usize) -> Vec<f64> {
        (0..self.cols).map(|c| self.get(row, c)).collect()
    }

    /// The last `n` columns.
    pub fn tail(&self, n: usize) -> Self {
        let n = n.min(self.cols);
        Self {
            rows: self.rows,
            cols: n,
            data: self.data[(self.cols - n) * self.rows..].to_vec(),
        }
    }

    /// The first `n` columns.
    pub fn head(&self, n: usize) -> Self {
        let n = n.min(self.cols);
        Self {
            rows: self.rows,
            cols: n,
            data: self.data[..n * self.rows].to_vec(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// How a component maps between forward and time-reversed runs during
/// backcasting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reversal {
    Keep,
    /// Additive slope changes sign when time runs backwards.
    Negate,
    /// Multiplicative growth rate is inverted when time runs backwards.
    Invert,
}

impl Reversal {
    fn apply(self, value: f64) -> f64 {
        match self {
            Reversal::Keep => value,
            Reversal::Negate => -value,
            Reversal::Invert => 1.0 / value,
        }
    }
}

/// Measurement and transition rule applied to the lagged state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Dynamics {
    /// `yhat = w'v + c`, `v_t = F v + g e + d c`.
    Linear {
        intercept: f64,
        intercept_loading: Vec<f64>,
    },
    /// Error-correction recursions for ETS models with multiplicative
    /// trend or seasonal components.
    Ets(EtsRecursion),
}

/// A model in lagged SSOE form together with its pre-sample states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSpaceModel {
    measurement: Vec<f64>,
    transition: Vec<Vec<f64>>,
    persistence: Vec<f64>,
    lags: Vec<usize>,
    error: ErrorMode,
    dynamics: Dynamics,
    reversal: Vec<Reversal>,
    initial: StateMatrix,
}

/// Output of a pass over the training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitArtifacts {
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Full state history: `max(l)` pre-sample columns then one per observation.
    pub states: StateMatrix,
    pub sigma2: f64,
}

impl FitArtifacts {
    /// States needed to continue the recursion after the last observation.
    pub fn final_states(&self) -> StateMatrix {
        self.states.tail(self.states.cols() - self.fitted.len())
    }
}

/// Result of backcasting the pre-sample states.
#[derive(Debug, Clone)]
pub struct Backcast {
    pub model: StateSpaceModel,
    /// Set when the series was too short and the initial states were left
    /// untouched; the caller should estimate them instead.
    pub fell_back: bool,
}

/// Component `j` of the state at time `t - l_j`, for observation `t` (1-based).
///
/// `history` must carry `max(lags)` pre-sample columns.
pub fn lagged_state(history: &StateMatrix, t: usize, lags: &[usize]) -> Result<Vec<f64>> {
    if lags.len() != history.rows() {
        return Err(Error::Structural(format!(
            "{} lags for a state of dimension {}",
            lags.len(),
            history.rows()
        )));
    }
    let max_lag = lags.iter().copied().max().unwrap_or(1);
    if t == 0 {
        return Err(Error::Structural("observation index is 1-based".into()));
    }
    lags.iter()
        .enumerate()
        .map(|(j, &l)| {
            let col = (t + max_lag - 1)
                .checked_sub(l)
                .filter(|&c| c < history.cols())
                .ok_or_else(|| {
                    Error::Structural(format!(
                        "state {j} at lag {l} for observation {t} is outside the stored history"
                    ))
                })?;
            Ok(history.get(j, col))
        })
        .collect()
}

impl StateSpaceModel {
    /// Linear model with zero intercept. `initial` must be `K x max(l)`.
    pub fn linear(
        measurement: Vec<f64>,
        transition: Vec<Vec<f64>>,
        persistence: Vec<f64>,
        lags: Vec<usize>,
        initial: StateMatrix,
    ) -> Result<Self> {
        let k = measurement.len();
        let model = Self {
            dynamics: Dynamics::Linear {
                intercept: 0.0,
                intercept_loading: vec![0.0; k],
            },
            reversal: vec![Reversal::Keep; k],
            measurement,
            transition,
            persistence,
            lags,
            error: ErrorMode::Additive,
            initial,
        };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        let k = self.measurement.len();
        if k == 0 {
            return Err(Error::Structural("state dimension must be positive".into()));
        }
        let square = self.transition.len() == k && self.transition.iter().all(|r| r.len() == k);
        if !square || self.persistence.len() != k || self.lags.len() != k {
            return Err(Error::Structural(format!(
                "inconsistent dimensions: w {k}, F {}x{}, g {}, l {}",
                self.transition.len(),
                self.transition.first().map_or(0, Vec::len),
                self.persistence.len(),
                self.lags.len()
            )));
        }
        if self.lags.contains(&0) {
            return Err(Error::Structural("lags must be positive".into()));
        }
        if self.reversal.len() != k {
            return Err(Error::Structural("reversal map has wrong length".into()));
        }
        if let Dynamics::Linear {
            intercept_loading, ..
        } = &self.dynamics
        {
            if intercept_loading.len() != k {
                return Err(Error::Structural("intercept loading has wrong length".into()));
            }
        }
        if self.initial.rows() != k || self.initial.cols() != self.max_lag() {
            return Err(Error::Structural(format!(
                "initial states must be {k}x{}, got {}x{}",
                self.max_lag(),
                self.initial.rows(),
                self.initial.cols()
            )));
        }
        Ok(())
    }

    pub fn with_error_mode(mut self, error: ErrorMode) -> Self {
        self.error = error;
        self
    }

    /// Adds a constant `c` to the measurement and `loading * c` to the transition.
    pub fn with_intercept(mut self, intercept: f64, loading: Vec<f64>) -> Result<Self> {
        self.dynamics = Dynamics::Linear {
            intercept,
            intercept_loading: loading,
        };
        self.validate()?;
        Ok(self)
    }

    pub(crate) fn with_dynamics(mut self, dynamics: Dynamics) -> Self {
        self.dynamics = dynamics;
        self
    }

    pub fn with_reversal(mut self, reversal: Vec<Reversal>) -> Result<Self> {
        self.reversal = reversal;
        self.validate()?;
        Ok(self)
    }

    pub fn with_initial(mut self, initial: StateMatrix) -> Result<Self> {
        self.initial = initial;
        self.validate()?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.measurement.len()
    }

    pub fn max_lag(&self) -> usize {
        self.lags.iter().copied().max().unwrap_or(1)
    }

    pub fn measurement(&self) -> &[f64] {
        &self.measurement
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn persistence(&self) -> &[f64] {
        &self.persistence
    }

    pub fn lags(&self) -> &[usize] {
        &self.lags
    }

    pub fn error_mode(&self) -> ErrorMode {
        self.error
    }

    pub fn dynamics(&self) -> &Dynamics {
        &self.dynamics
    }

    pub fn initial(&self) -> &StateMatrix {
        &self.initial
    }

    /// True when the model is linear with additive error, so that the
    /// forecast distribution is Gaussian with an analytic variance.
    pub fn is_pure_additive(&self) -> bool {
        self.error == ErrorMode::Additive && matches!(self.dynamics, Dynamics::Linear { .. })
    }

    #[inline]
    fn predict(&self, lagged: &[f64]) -> f64 {
        match &self.dynamics {
            Dynamics::Linear { intercept, .. } => {
                self.measurement
                    .iter()
                    .zip(lagged)
                    .map(|(w, v)| w * v)
                    .sum::<f64>()
                    + intercept
            }
            Dynamics::Ets(r) => r.predict(lagged),
        }
    }

    /// Reason the recursion cannot proceed from this point, if any.
    #[inline]
    fn inadmissible(&self, lagged: &[f64], yhat: f64) -> Option<&'static str> {
        if !yhat.is_finite() {
            return Some("non-finite prediction");
        }
        if self.error == ErrorMode::Multiplicative && yhat <= 0.0 {
            return Some("nonpositive prediction under multiplicative error");
        }
        match &self.dynamics {
            Dynamics::Linear { .. } => None,
            Dynamics::Ets(r) => r.inadmissible(lagged),
        }
    }

    /// Per-row constants when every row of `F` is constant (the ARIMA
    /// form), which turns `F v` into `eta * sum(v)`.
    fn constant_rows(&self) -> Option<Vec<f64>> {
        if !matches!(self.dynamics, Dynamics::Linear { .. }) {
            return None;
        }
        self.transition
            .iter()
            .all(|row| row.iter().all(|v| *v == row[0]))
            .then(|| self.transition.iter().map(|row| row[0]).collect())
    }

    /// Writes the next state given the lagged state and the additive-scale
    /// innovation `y - yhat`.
    #[inline]
    fn advance(
        &self,
        lagged: &[f64],
        yhat: f64,
        innovation: f64,
        rows: Option<&[f64]>,
        out: &mut [f64],
    ) {
        match &self.dynamics {
            Dynamics::Linear {
                intercept,
                intercept_loading,
            } => {
                let sum: f64 = if rows.is_some() { lagged.iter().sum() } else { 0.0 };
                for (i, slot) in out.iter_mut().enumerate() {
                    let acc = match rows {
                        Some(eta) => eta[i] * sum,
                        None => self.transition[i]
                            .iter()
                            .zip(lagged)
                            .map(|(f, v)| f * v)
                            .sum(),
                    };
                    *slot = acc + self.persistence[i] * innovation + intercept_loading[i] * intercept;
                }
            }
            Dynamics::Ets(r) => r.advance(lagged, yhat + innovation, out),
        }
    }

    #[inline]
    fn residual(&self, y: f64, yhat: f64) -> f64 {
        match self.error {
            ErrorMode::Additive => y - yhat,
            ErrorMode::Multiplicative => y / yhat - 1.0,
        }
    }

    /// Converts an error-scale draw into an additive innovation.
    #[inline]
    fn innovation(&self, yhat: f64, error: f64) -> f64 {
        match self.error {
            ErrorMode::Additive => error,
            ErrorMode::Multiplicative => yhat * error,
        }
    }

    #[inline]
    fn gather(&self, states: &StateMatrix, col: usize, lagged: &mut [f64]) {
        for (j, (&l, slot)) in self.lags.iter().zip(lagged.iter_mut()).enumerate() {
            *slot = states.get(j, col - l);
        }
    }

    /// Runs the recursion over `y` from the pre-sample states.
    pub fn fit_values(&self, y: &[f64]) -> Result<FitArtifacts> {
        let k = self.dim();
        let max_lag = self.max_lag();
        let n = y.len();
        let mut states = StateMatrix::zeros(k, n + max_lag);
        for c in 0..max_lag {
            states.column_mut(c).copy_from_slice(self.initial.column(c));
        }
        let mut fitted = Vec::with_capacity(n);
        let mut residuals = Vec::with_capacity(n);
        let mut lagged = vec![0.0; k];
        let mut next = vec![0.0; k];
        let rows = self.constant_rows();
        for (t, &obs) in y.iter().enumerate() {
            let col = t + max_lag;
            self.gather(&states, col, &mut lagged);
            let yhat = self.predict(&lagged);
            if let Some(reason) = self.inadmissible(&lagged, yhat) {
                return Err(Error::Degenerate {
                    index: t + 1,
                    reason: reason.into(),
                });
            }
            self.advance(&lagged, yhat, obs - yhat, rows.as_deref(), &mut next);
            if next.iter().any(|v| !v.is_finite()) {
                return Err(Error::Degenerate {
                    index: t + 1,
                    reason: "non-finite state".into(),
                });
            }
            states.column_mut(col).copy_from_slice(&next);
            fitted.push(yhat);
            residuals.push(self.residual(obs, yhat));
        }
        let sigma2 = if n == 0 {
            0.0
        } else {
            residuals.iter().map(|e| e * e).sum::<f64>() / n as f64
        };
        Ok(FitArtifacts {
            fitted,
            residuals,
            states,
            sigma2,
        })
    }

    /// [`fit_values`](Self::fit_values) over the training span of `series`.
    pub fn fit_pass(&self, series: &crate::TimeSeries) -> Result<FitArtifacts> {
        self.fit_values(series.train())
    }

    /// Propagates the recursion from `start` (the last `max(l)` state
    /// columns) driven by error-scale draws, returning the generated
    /// observations and the state history (`max(l)` leading columns followed
    /// by one column per step).
    ///
    /// No admissibility checks are made; a path that leaves the domain of a
    /// multiplicative model produces non-finite values.
    pub fn propagate(&self, start: &StateMatrix, errors: &[f64]) -> (Vec<f64>, StateMatrix) {
        let k = self.dim();
        let max_lag = self.max_lag();
        let mut states = StateMatrix::zeros(k, errors.len() + max_lag);
        for c in 0..max_lag {
            states.column_mut(c).copy_from_slice(start.column(c));
        }
        let mut values = Vec::with_capacity(errors.len());
        let mut lagged = vec![0.0; k];
        let mut next = vec![0.0; k];
        let rows = self.constant_rows();
        for (t, &err) in errors.iter().enumerate() {
            let col = t + max_lag;
            self.gather(&states, col, &mut lagged);
            let yhat = self.predict(&lagged);
            let innovation = self.innovation(yhat, err);
            self.advance(&lagged, yhat, innovation, rows.as_deref(), &mut next);
            states.column_mut(col).copy_from_slice(&next);
            values.push(yhat + innovation);
        }
        (values, states)
    }

    /// Replaces the pre-sample states by running the recursion forward over
    /// `y` and then backward over the reversed data, `iterations` times.
    ///
    /// The backward sweep continues past the first observation with zero
    /// innovation to fill the `max(l)` pre-sample columns. Requires at least
    /// `2 * max(l)` observations; otherwise the model is returned unchanged
    /// with `fell_back` set.
    pub fn backcast(&self, y: &[f64], iterations: usize) -> Result<Backcast> {
        let max_lag = self.max_lag();
        let n = y.len();
        if n < 2 * max_lag || iterations == 0 {
            return Ok(Backcast {
                model: self.clone(),
                fell_back: true,
            });
        }
        let k = self.dim();
        // position p in 1-max_lag ..= n+max_lag lives in column p + max_lag - 1
        let col_of = |p: isize| (p + max_lag as isize - 1) as usize;
        let mut buf = StateMatrix::zeros(k, n + 2 * max_lag);
        let mut initial = self.initial.clone();
        let mut lagged = vec![0.0; k];
        let mut next = vec![0.0; k];
        let rows = self.constant_rows();

        for _ in 0..iterations {
            for c in 0..max_lag {
                buf.column_mut(c).copy_from_slice(initial.column(c));
            }
            for t in 1..=n {
                let col = col_of(t as isize);
                self.gather(&buf, col, &mut lagged);
                let yhat = self.predict(&lagged);
                if let Some(reason) = self.inadmissible(&lagged, yhat) {
                    return Err(Error::Degenerate {
                        index: t,
                        reason: reason.into(),
                    });
                }
                self.advance(&lagged, yhat, y[t - 1] - yhat, rows.as_deref(), &mut next);
                buf.column_mut(col).copy_from_slice(&next);
            }

            // seed the reversed run with the forward end states
            for step in 1..=max_lag {
                let p = (n + step) as isize;
                for j in 0..k {
                    let src = p - self.lags[j] as isize;
                    let v = buf.get(j, col_of(src));
                    let v = if src <= n as isize {
                        self.reversal[j].apply(v)
                    } else {
                        v
                    };
                    buf.set(j, col_of(p), v);
                }
            }

            for t in (1..=n).rev() {
                let col = col_of(t as isize);
                for (j, (slot, lag)) in lagged.iter_mut().zip(&self.lags).enumerate() {
                    *slot = buf.get(j, col + lag);
                }
                let yhat = self.predict(&lagged);
                if let Some(reason) = self.inadmissible(&lagged, yhat) {
                    return Err(Error::Degenerate {
                        index: t,
                        reason: format!("{reason} (backward pass)"),
                    });
                }
                self.advance(&lagged, yhat, y[t - 1] - yhat, rows.as_deref(), &mut next);
                buf.column_mut(col).copy_from_slice(&next);
            }
            for p in (1 - max_lag as isize..=0).rev() {
                let col = col_of(p);
                for (j, (slot, lag)) in lagged.iter_mut().zip(&self.lags).enumerate() {
                    *slot = buf.get(j, col + lag);
                }
                let yhat = self.predict(&lagged);
                self.advance(&lagged, yhat, 0.0, rows.as_deref(), &mut next);
                buf.column_mut(col).copy_from_slice(&next);
            }

            for c in 0..max_lag {
                for j in 0..k {
                    initial.set(j, c, self.reversal[j].apply(buf.get(j, c)));
                }
            }
            if !initial.is_finite() {
                return Err(Error::Degenerate {
                    index: 0,
                    reason: "non-finite backcast states".into(),
                });
            }
        }
        Ok(Backcast {
            model: self.clone().with_initial(initial)?,
            fell_back: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn local_level(alpha: f64, level: f64) -> StateSpaceModel {
        StateSpaceModel::linear(
            vec![1.0],
            vec![vec![1.0]],
            vec![alpha],
            vec![1],
            StateMatrix::from_columns(&[vec![level]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn lagged_state_reads_each_component_at_its_lag() {
        // three components, lags (1, 1, 12); value encodes (component, column)
        let lags = [1, 1, 12];
        let cols: Vec<Vec<f64>> = (0..30)
            .map(|c| (0..3).map(|j| (j * 1000 + c) as f64).collect())
            .collect();
        let history = StateMatrix::from_columns(&cols).unwrap();
        // observation t=13 reads times 12, 12 and 1; time s lives in column s + 11
        let v = lagged_state(&history, 13, &lags).unwrap();
        assert_eq!(v, vec![23.0, 1023.0, 2012.0]);
    }

    #[test]
    fn lagged_state_single_lag_is_previous_value() {
        let history = StateMatrix::from_columns(&[vec![5.0], vec![6.0], vec![7.0]]).unwrap();
        assert_eq!(lagged_state(&history, 1, &[1]).unwrap(), vec![5.0]);
        assert_eq!(lagged_state(&history, 3, &[1]).unwrap(), vec![7.0]);
    }

    #[test]
    fn lagged_state_lags_one_and_two() {
        // l = (1, 2), t = 3 reads times 2 and 1; max lag 2 so time s is column s + 1
        let cols: Vec<Vec<f64>> = (0..6).map(|c| vec![c as f64, 100.0 + c as f64]).collect();
        let history = StateMatrix::from_columns(&cols).unwrap();
        assert_eq!(lagged_state(&history, 3, &[1, 2]).unwrap(), vec![3.0, 102.0]);
    }

    #[test]
    fn lagged_state_out_of_range_is_structural() {
        let history = StateMatrix::from_columns(&[vec![1.0], vec![2.0]]).unwrap();
        assert!(matches!(
            lagged_state(&history, 5, &[1]),
            Err(Error::Structural(_))
        ));
        assert!(matches!(
            lagged_state(&history, 0, &[1]),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn unit_persistence_is_naive() {
        let y = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0];
        let fit = local_level(1.0, 3.0).fit_values(&y).unwrap();
        assert_eq!(fit.fitted[0], 3.0);
        for t in 1..y.len() {
            assert_eq!(fit.fitted[t], y[t - 1]);
        }
        for ((f, e), obs) in fit.fitted.iter().zip(&fit.residuals).zip(&y) {
            assert_eq!(f + e, *obs);
        }
    }

    #[test]
    fn zero_persistence_freezes_states() {
        let model = StateSpaceModel::linear(
            vec![1.0, 1.0],
            vec![vec![1.0, 1.0], vec![0.0, 1.0]],
            vec![0.0, 0.0],
            vec![1, 1],
            StateMatrix::from_columns(&[vec![10.0, 2.0]]).unwrap(),
        )
        .unwrap();
        let a = model.fit_values(&[1.0, 50.0, -3.0, 8.0]).unwrap();
        let b = model.fit_values(&[100.0, 0.0, 7.0, 2.0]).unwrap();
        assert_eq!(a.states, b.states);
        assert_eq!(a.fitted, vec![12.0, 14.0, 16.0, 18.0]);
    }

    #[test]
    fn state_columns_cover_training_plus_presample() {
        let model = StateSpaceModel::linear(
            vec![1.0, 1.0],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![0.2, 0.1],
            vec![1, 4],
            StateMatrix::zeros(2, 4),
        )
        .unwrap();
        let fit = model.fit_values(&[1.0; 9]).unwrap();
        assert_eq!(fit.states.cols(), 13);
        assert_eq!(fit.final_states().cols(), 4);
    }

    #[test]
    fn multiplicative_error_rejects_nonpositive_prediction() {
        let model = local_level(0.5, -1.0).with_error_mode(ErrorMode::Multiplicative);
        assert!(matches!(
            model.fit_values(&[1.0, 2.0]),
            Err(Error::Degenerate { index: 1, .. })
        ));
    }

    #[test]
    fn sigma2_is_mean_squared_residual() {
        let fit = local_level(0.0, 0.0).fit_values(&[1.0, -1.0, 2.0, -2.0]).unwrap();
        assert_eq!(fit.sigma2, 2.5);
    }

    #[test]
    fn backcast_constant_series_recovers_level() {
        let y = vec![4.2; 20];
        let out = local_level(0.3, 0.0).backcast(&y, 2).unwrap();
        assert!(!out.fell_back);
        assert!((out.model.initial().get(0, 0) - 4.2).abs() < 1e-3);
    }

    #[test]
    fn backcast_single_iteration_matches_hand_rolled_passes() {
        let y = [5.0, 7.0, 6.0, 9.0, 8.0, 10.0, 12.0, 11.0, 13.0, 12.0];
        let alpha = 0.5;
        let start = 2.0;
        // forward smoothing
        let mut level = start;
        for v in y {
            level += alpha * (v - level);
        }
        // backward smoothing from the forward end level
        let mut back = level;
        for v in y.iter().rev() {
            back += alpha * (v - back);
        }
        let out = local_level(alpha, start).backcast(&y, 1).unwrap();
        assert!((out.model.initial().get(0, 0) - back).abs() < 1e-12);
    }

    #[test]
    fn backcast_short_series_falls_back() {
        let model = StateSpaceModel::linear(
            vec![1.0],
            vec![vec![1.0]],
            vec![0.1],
            vec![6],
            StateMatrix::zeros(1, 6),
        )
        .unwrap();
        let out = model.backcast(&[1.0; 11], 2).unwrap();
        assert!(out.fell_back);
        assert_eq!(out.model, model);
    }

    #[test]
    fn propagate_with_zero_errors_matches_fitted_on_own_output() {
        let model = StateSpaceModel::linear(
            vec![1.0, 1.0],
            vec![vec![1.0, 1.0], vec![0.0, 1.0]],
            vec![0.4, 0.1],
            vec![1, 1],
            StateMatrix::from_columns(&[vec![1.0, 0.5]]).unwrap(),
        )
        .unwrap();
        let (path, _) = model.propagate(model.initial(), &[0.0; 5]);
        assert_eq!(path, vec![1.5, 2.0, 2.5, 3.0, 3.5]);
        let fit = model.fit_values(&path).unwrap();
        assert!(fit.residuals.iter().all(|e| *e == 0.0));
    }

    #[test]
    fn dimension_mismatch_is_structural() {
        let err = StateSpaceModel::linear(
            vec![1.0, 1.0],
            vec![vec![1.0]],
            vec![0.1, 0.1],
            vec![1, 1],
            StateMatrix::zeros(2, 1),
        );
        assert!(matches!(err, Err(Error::Structural(_))));
    }
}
