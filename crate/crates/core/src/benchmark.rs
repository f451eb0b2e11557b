//! Holdout benchmark harness and the bundled synthetic corpus.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use crate::arima::{default_arima_config, default_max_orders, fit_naive, select_arima_orders, select_sma_order};
use crate::error::{Error, Result};
use crate::estimation::{EstimationConfig, FitResult, Ic};
use crate::ets::{select_ets, EtsSpec, EtsState, ErrorMode, SeasonalKind, TrendKind};
use crate::forecast::{prediction_interval, IntervalConfig, Side};
use crate::io::{parse_lags, read_series_file, series_csv, ColumnSelector};
use crate::metrics::{aggregate, EvaluationRecord, SummaryRow};
use crate::simulate::{simulate_series, NormalRandomizer, SimModel, SimulationSpec};
use crate::TimeSeries;

/// One manifest entry with its data loaded.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSeries {
    pub id: String,
    pub values: Vec<f64>,
    pub lags: Vec<usize>,
    pub h: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BenchmarkModel {
    EtsAuto,
    SsarimaAuto,
    Sma,
    Naive,
}

impl BenchmarkModel {
    pub const ALL: [BenchmarkModel; 4] = [
        BenchmarkModel::EtsAuto,
        BenchmarkModel::SsarimaAuto,
        BenchmarkModel::Sma,
        BenchmarkModel::Naive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchmarkModel::EtsAuto => "ets-auto",
            BenchmarkModel::SsarimaAuto => "ssarima-auto",
            BenchmarkModel::Sma => "sma",
            BenchmarkModel::Naive => "naive",
        }
    }

    /// Fits the model on the whole of `train` (no holdout).
    pub fn fit(self, train: &TimeSeries, ic: Ic) -> Result<FitResult> {
        match self {
            BenchmarkModel::EtsAuto => {
                Ok(select_ets(train, &EstimationConfig::default().with_ic(ic))?.best)
            }
            BenchmarkModel::SsarimaAuto => {
                let max = default_max_orders(train.lags());
                Ok(select_arima_orders(train, &max, &default_arima_config().with_ic(ic))?.best)
            }
            BenchmarkModel::Sma => select_sma_order(train, train.len(), ic),
            BenchmarkModel::Naive => fit_naive(train),
        }
    }
}

impl fmt::Display for BenchmarkModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchmarkModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::Specification(format!(
                    "unknown benchmark model '{s}' (expected ets-auto, ssarima-auto, sma or naive)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkConfig {
    pub seed: u64,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    pub level: f64,
    pub n_paths: usize,
    pub ic: Ic,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            jobs: None,
            level: 0.95,
            n_paths: 10_000,
            ic: Ic::Aicc,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkFailure {
    pub series_id: String,
    pub model: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    /// One record per (series, model), in manifest then model order.
    pub records: Vec<EvaluationRecord>,
    pub failures: Vec<BenchmarkFailure>,
    pub summary: Vec<SummaryRow>,
}

/// FNV-1a hash of the global seed and the series id.
pub fn series_seed(global: u64, id: &str) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    global
        .to_le_bytes()
        .iter()
        .chain(id.as_bytes())
        .fold(OFFSET, |h, b| (h ^ u64::from(*b)).wrapping_mul(PRIME))
}

fn evaluate_one(
    series: &BenchmarkSeries,
    model: BenchmarkModel,
    config: &BenchmarkConfig,
) -> Result<EvaluationRecord> {
    let start = Instant::now();
    let full = TimeSeries::new(series.values.clone(), series.lags.clone(), series.h)?;
    let train = full.training_series();
    let fit = model.fit(&train, config.ic)?;
    let interval = IntervalConfig {
        level: config.level,
        side: Side::Both,
        cumulative: false,
        n_paths: config.n_paths,
        seed: series_seed(config.seed, &series.id),
    };
    let forecast = prediction_interval(&fit.origin(), series.h, &interval)?;
    let elapsed = start.elapsed().as_secs_f64();
    let (lower, upper) = match (&forecast.lower, &forecast.upper) {
        (Some(l), Some(u)) => (l, u),
        _ => return Err(Error::Estimation("interval bounds missing".into())),
    };
    EvaluationRecord::evaluate(
        &series.id,
        model.name(),
        full.train(),
        full.holdout(),
        &forecast.mean,
        lower,
        upper,
        config.level,
        elapsed,
    )
}

/// Fits every model on the training span of every series, forecasts the
/// holdout with intervals and aggregates the metrics. Failures are recorded
/// with empty metrics and never abort the run.
pub fn run_benchmark(
    series: &[BenchmarkSeries],
    models: &[BenchmarkModel],
    config: &BenchmarkConfig,
) -> Result<BenchmarkReport> {
    if series.is_empty() || models.is_empty() {
        return Err(Error::Specification("benchmark needs series and models".into()));
    }
    for s in series {
        if s.h == 0 || s.h >= s.values.len() {
            return Err(Error::Specification(format!(
                "series '{}' has horizon {} for {} values",
                s.id,
                s.h,
                s.values.len()
            )));
        }
    }
    let jobs: Vec<(&BenchmarkSeries, BenchmarkModel)> = series
        .iter()
        .flat_map(|s| models.iter().map(move |m| (s, *m)))
        .collect();
    let work = || -> Vec<(EvaluationRecord, Option<BenchmarkFailure>)> {
        jobs.par_iter()
            .map(|(s, m)| match evaluate_one(s, *m, config) {
                Ok(r) => (r, None),
                Err(e) => (
                    EvaluationRecord {
                        series_id: s.id.clone(),
                        model: m.name().to_string(),
                        mase: None,
                        rmsse: None,
                        coverage: None,
                        smis: None,
                        time_seconds: 0.0,
                    },
                    Some(BenchmarkFailure {
                        series_id: s.id.clone(),
                        model: m.name().to_string(),
                        message: e.to_string(),
                    }),
                ),
            })
            .collect()
    };
    let results = match config.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Specification(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    let mut records = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (r, f) in results {
        records.push(r);
        failures.extend(f);
    }
    let summary = aggregate(&records)?;
    Ok(BenchmarkReport {
        records,
        failures,
        summary,
    })
}

/// Per-series records as CSV.
pub fn records_csv(records: &[EvaluationRecord]) -> String {
    let cell = |v: Option<f64>| v.map_or_else(String::new, |v| format!("{v}"));
    let mut out = String::from("series_id,model,MASE,RMSSE,Coverage,sMIS,Time\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.series_id,
            r.model,
            cell(r.mase),
            cell(r.rmsse),
            cell(r.coverage),
            cell(r.smis),
            r.time_seconds
        ));
    }
    out
}

/// Reads a manifest CSV with columns `series_id,path,lags,h`; lags are
/// separated by `;` and paths are relative to the manifest.
pub fn read_manifest(path: &Path) -> Result<Vec<BenchmarkSeries>> {
    let base = path.parent().unwrap_or(Path::new("."));
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let headers = rdr
        .headers()
        .map_err(|e| Error::Input {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Input {
                line: 1,
                message: format!("manifest lacks column '{name}'"),
            })
    };
    let (c_id, c_path, c_lags, c_h) = (col("series_id")?, col("path")?, col("lags")?, col("h")?);
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Input {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = |c: usize| record.get(c).unwrap_or("");
        let bad = |message: String| Error::Input { line, message };
        let h: usize = field(c_h)
            .parse()
            .map_err(|_| bad(format!("invalid horizon '{}'", field(c_h))))?;
        if h == 0 {
            return Err(bad("horizon must be at least 1".into()));
        }
        let lags = parse_lags(field(c_lags)).map_err(|e| bad(e.to_string()))?;
        let file = base.join(field(c_path));
        if !file.exists() {
            return Err(bad(format!("cannot resolve path '{}'", file.display())));
        }
        let values = read_series_file(&file, &ColumnSelector::Auto)?;
        out.push(BenchmarkSeries {
            id: field(c_id).to_string(),
            values,
            lags,
            h,
        });
    }
    Ok(out)
}

/// Writes each series as `<id>.csv` plus `manifest.csv` into `dir` and
/// returns the manifest path.
pub fn write_corpus(dir: &Path, series: &[BenchmarkSeries]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let mut manifest = String::from("series_id,path,lags,h\n");
    for s in series {
        let file = format!("{}.csv", s.id);
        std::fs::write(dir.join(&file), series_csv(&s.values))?;
        let lags: Vec<String> = s.lags.iter().map(ToString::to_string).collect();
        manifest.push_str(&format!("{},{},{},{}\n", s.id, file, lags.join(";"), s.h));
    }
    let path = dir.join("manifest.csv");
    std::fs::write(&path, manifest)?;
    Ok(path)
}

/// Fifty synthetic series: ten each of local level, local trend, additive
/// monthly seasonality, multiplicative monthly seasonality and damped-trend
/// quarterly seasonality.
pub fn synthetic_corpus(seed: u64) -> Result<Vec<BenchmarkSeries>> {
    use ErrorMode::{Additive as A, Multiplicative as M};
    let groups: [(&str, ErrorMode, TrendKind, SeasonalKind, usize, usize, f64); 5] = [
        ("level", A, TrendKind::None, SeasonalKind::None, 1, 6, 3.0),
        ("trend", A, TrendKind::Additive, SeasonalKind::None, 1, 6, 3.0),
        ("monthly-add", A, TrendKind::Additive, SeasonalKind::Additive, 12, 12, 3.0),
        ("monthly-mult", M, TrendKind::None, SeasonalKind::Multiplicative, 12, 12, 0.03),
        ("quarterly", A, TrendKind::AdditiveDamped, SeasonalKind::Additive, 4, 8, 3.0),
    ];
    let mut out = Vec::with_capacity(50);
    for (g, (name, error, trend, seasonal, m, h, sd)) in groups.into_iter().enumerate() {
        let spec = EtsSpec::new(error, trend, seasonal, m)?;
        for i in 0..10 {
            let id = format!("{name}-{:02}", i + 1);
            let obs = match m {
                12 => 96 + 12 * (i % 5),
                4 => 48 + 4 * (i % 5),
                _ => 60 + 10 * (i % 5),
            } + h;
            let sim = SimulationSpec {
                model: SimModel::Ets {
                    spec,
                    alpha: None,
                    beta: None,
                    gamma: None,
                    phi: None,
                    initial: None::<EtsState>,
                },
                obs,
                nsim: 1,
                randomizer: Arc::new(NormalRandomizer::new(0.0, sd)?),
                seed: series_seed(seed ^ g as u64, &id),
            };
            let values = simulate_series(&sim)?.remove(0).values;
            let lags = if m > 1 { vec![1, m] } else { vec![1] };
            out.push(BenchmarkSeries { id, values, lags, h });
        }
    }
    Ok(out)
}
