use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A univariate series with its seasonal lag structure and holdout split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    values: Vec<f64>,
    lags: Vec<usize>,
    holdout: usize,
}

impl TimeSeries {
    /// Creates a series. `lags` must start with 1 and be strictly increasing;
    /// the training span must be non-empty and free of non-finite values.
    pub fn new(values: Vec<f64>, lags: Vec<usize>, holdout: usize) -> Result<Self> {
        if lags.first() != Some(&1) {
            return Err(Error::Specification(format!(
                "lags must begin with 1, got {lags:?}"
            )));
        }
        if lags.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Specification(format!(
                "lags must be strictly increasing, got {lags:?}"
            )));
        }
        if holdout >= values.len() {
            return Err(Error::Specification(format!(
                "holdout of {holdout} leaves no training data in a series of length {}",
                values.len()
            )));
        }
        let train = values.len() - holdout;
        if let Some(i) = values[..train].iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "training value at position {} is not finite",
                i + 1
            )));
        }
        Ok(Self {
            values,
            lags,
            holdout,
        })
    }

    /// Non-seasonal series with no holdout.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::new(values, vec![1], 0)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn lags(&self) -> &[usize] {
        &self.lags
    }

    pub fn holdout_len(&self) -> usize {
        self.holdout
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn train(&self) -> &[f64] {
        &self.values[..self.values.len() - self.holdout]
    }

    pub fn holdout(&self) -> &[f64] {
        &self.values[self.values.len() - self.holdout..]
    }

    pub fn max_lag(&self) -> usize {
        *self.lags.last().expect("lags is never empty")
    }

    /// Longest seasonal lag, if the series has one.
    pub fn seasonal_period(&self) -> Option<usize> {
        let m = self.max_lag();
        (m > 1).then_some(m)
    }

    /// Same values and lags with a different holdout length.
    pub fn with_holdout(&self, holdout: usize) -> Result<Self> {
        Self::new(self.values.clone(), self.lags.clone(), holdout)
    }

    /// Training span as a standalone series (no holdout).
    pub fn training_series(&self) -> Self {
        Self {
            values: self.train().to_vec(),
            lags: self.lags.clone(),
            holdout: 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_lags() {
        assert!(TimeSeries::new(vec![1.0; 10], vec![12], 0).is_err());
        assert!(TimeSeries::new(vec![1.0; 10], vec![1, 4, 4], 0).is_err());
        assert!(TimeSeries::new(vec![1.0; 10], vec![1, 4], 0).is_ok());
    }

    #[test]
    fn holdout_must_leave_training_data() {
        assert!(TimeSeries::new(vec![1.0; 5], vec![1], 5).is_err());
        let s = TimeSeries::new((0..6).map(f64::from).collect(), vec![1], 2).unwrap();
        assert_eq!(s.train(), &[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(s.holdout(), &[4.0, 5.0]);
    }

    #[test]
    fn holdout_may_contain_nan() {
        let s = TimeSeries::new(vec![1.0, 2.0, f64::NAN], vec![1], 1).unwrap();
        assert_eq!(s.train().len(), 2);
        assert!(TimeSeries::new(vec![1.0, f64::NAN, 2.0], vec![1], 1).is_err());
    }
}
