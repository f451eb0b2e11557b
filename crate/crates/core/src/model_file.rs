//! Versioned JSON representation of fitted models.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{FitFlag, FitResult, IcValues, ModelSpec, NamedParam};
use crate::forecast::ForecastOrigin;
use crate::state_space::{StateMatrix, StateSpaceModel};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SerializedModel {
    pub format_version: u32,
    pub library_version: String,
    /// `ets`, `arima`, `sma` or `naive`.
    pub family: String,
    /// Display form, e.g. `ETS(M,Ad,M)`.
    pub spec: String,
    pub definition: ModelSpec,
    pub params: Vec<NamedParam>,
    pub lags: Vec<usize>,
    /// Model with its initial (pre-sample) states.
    pub model: StateSpaceModel,
    pub final_states: StateMatrix,
    pub sigma2: f64,
    pub log_lik: f64,
    pub ic: IcValues,
    pub n_params: usize,
    pub n_obs: usize,
    pub flags: Vec<FitFlag>,
}

fn family(spec: &ModelSpec) -> &'static str {
    match spec {
        ModelSpec::Ets(_) => "ets",
        ModelSpec::Arima { .. } => "arima",
        ModelSpec::Sma { .. } => "sma",
        ModelSpec::Naive => "naive",
    }
}

impl SerializedModel {
    pub fn from_fit(fit: &FitResult, lags: &[usize]) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            family: family(&fit.spec).to_string(),
            spec: fit.spec.to_string(),
            definition: fit.spec.clone(),
            params: fit.params.clone(),
            lags: lags.to_vec(),
            model: fit.model.clone(),
            final_states: fit.artifacts.final_states(),
            sigma2: fit.sigma2(),
            log_lik: fit.log_lik,
            ic: fit.ic,
            n_params: fit.n_params,
            n_obs: fit.n_obs,
            flags: fit.flags.clone(),
        }
    }

    pub fn origin(&self) -> ForecastOrigin {
        ForecastOrigin {
            model: self.model.clone(),
            states: self.final_states.clone(),
            sigma2: self.sigma2,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parses and checks a model file; errors name the offending field.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value.get("format_version").and_then(serde_json::Value::as_u64) {
            Some(v) if v == u64::from(FORMAT_VERSION) => {}
            Some(v) => {
                return Err(Error::Format(format!(
                    "format_version {v} is not supported (expected {FORMAT_VERSION})"
                )))
            }
            None => return Err(Error::Format("missing or invalid field `format_version`".into())),
        }
        let parsed: Self = serde_json::from_value(value)?;
        parsed.check()?;
        Ok(parsed)
    }

    fn check(&self) -> Result<()> {
        let m = &self.model;
        let fs = &self.final_states;
        if fs.rows() != m.dim() || fs.cols() != m.max_lag() {
            return Err(Error::Format(format!(
                "field `final_states` is {}x{}, model needs {}x{}",
                fs.rows(),
                fs.cols(),
                m.dim(),
                m.max_lag()
            )));
        }
        if !fs.is_finite() {
            return Err(Error::Format("field `final_states` holds non-finite values".into()));
        }
        if !self.sigma2.is_finite() || self.sigma2 < 0.0 {
            return Err(Error::Format("field `sigma2` must be a nonnegative number".into()));
        }
        if self.family != family(&self.definition) {
            return Err(Error::Format(format!(
                "field `family` is '{}' but the definition is {}",
                self.family, self.spec
            )));
        }
        // the model rejects inconsistent dimensions on construction
        m.clone().with_initial(m.initial().clone()).map_err(|e| {
            Error::Format(format!("field `model` is inconsistent: {e}"))
        })?;
        Ok(())
    }
}
