//! Univariate forecasting with ETS, ARIMA and SMA models written in lagged
//! single-source-of-error state-space form.
//!
//! ```
//! use ssoe::{select_ets, EstimationConfig, IntervalConfig, TimeSeries, prediction_interval};
//!
//! let y: Vec<f64> = (0..48).map(|t| 10.0 + (t % 12) as f64 + 0.1 * t as f64).collect();
//! let series = TimeSeries::new(y, vec![1, 12], 0).unwrap();
//! let fit = select_ets(&series, &EstimationConfig::default()).unwrap().best;
//! let fc = prediction_interval(&fit.origin(), 12, &IntervalConfig { n_paths: 1000, ..Default::default() }).unwrap();
//! assert_eq!(fc.mean.len(), 12);
//! ```

pub mod arima;
pub mod benchmark;
pub mod decompose;
pub mod error;
pub mod estimation;
pub mod ets;
pub mod forecast;
pub mod io;
pub mod metrics;
pub mod model_file;
mod series;
pub mod simulate;
pub mod state_space;

pub use arima::{
    build_arima, build_arima_state_space, expand_polynomials, fit_arima, fit_naive,
    select_arima_orders, select_sma_order, sma_model, ArimaOrders, ArimaPolynomials,
};
pub use decompose::{decompose_forecast, msdecompose, Decomposition, DecompositionKind};
pub use error::{Error, Result};
pub use estimation::{EstimationConfig, FitFlag, FitResult, Ic, IcValues, InitialMode, ModelSpec};
pub use ets::{
    build_ets, fit_ets, select_ets, EtsSpec, EtsState, PersistenceParams, SeasonalKind, TrendKind,
};
pub use forecast::{
    point_forecast, prediction_interval, ForecastOrigin, ForecastResult, IntervalConfig, Side,
};
pub use series::TimeSeries;
pub use simulate::{simulate_from_fitted, simulate_series, Randomizer, SimModel, SimulationSpec};
pub use state_space::{ErrorMode, FitArtifacts, StateMatrix, StateSpaceModel};
