//! Forecast accuracy and interval quality measures.
//!
//! Scaled measures return `None` when the in-sample scale is zero (for
//! example a constant training series); aggregation skips those values and
//! counts them.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean absolute (`power = 1`) or squared (`power = 2`) in-sample difference
/// at the given seasonal distance.
fn naive_scale(insample: &[f64], distance: usize, power: i32) -> Option<f64> {
    if insample.len() <= distance {
        return None;
    }
    let diffs: Vec<f64> = insample
        .windows(distance + 1)
        .map(|w| (w[distance] - w[0]).abs().powi(power))
        .collect();
    let scale = diffs.iter().sum::<f64>() / diffs.len() as f64;
    (scale > 0.0 && scale.is_finite()).then_some(scale)
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b || a == 0 {
        return Err(Error::Specification(format!(
            "holdout and forecast lengths differ or are empty ({a} vs {b})"
        )));
    }
    Ok(())
}

/// Mean absolute scaled error with the first-difference scale.
pub fn mase(holdout: &[f64], forecasts: &[f64], insample: &[f64]) -> Result<Option<f64>> {
    mase_seasonal(holdout, forecasts, insample, 1)
}

/// MASE scaled by the mean absolute `period`-step in-sample difference.
pub fn mase_seasonal(
    holdout: &[f64],
    forecasts: &[f64],
    insample: &[f64],
    period: usize,
) -> Result<Option<f64>> {
    check_lengths(holdout.len(), forecasts.len())?;
    if insample.len() < 2 || period == 0 {
        return Err(Error::Specification("MASE needs at least 2 in-sample values".into()));
    }
    let mae = holdout
        .iter()
        .zip(forecasts)
        .map(|(y, f)| (y - f).abs())
        .sum::<f64>()
        / holdout.len() as f64;
    Ok(naive_scale(insample, period, 1).map(|s| mae / s))
}

/// Root mean squared scaled error with the squared first-difference scale.
pub fn rmsse(holdout: &[f64], forecasts: &[f64], insample: &[f64]) -> Result<Option<f64>> {
    check_lengths(holdout.len(), forecasts.len())?;
    if insample.len() < 2 {
        return Err(Error::Specification("RMSSE needs at least 2 in-sample values".into()));
    }
    let mse = holdout
        .iter()
        .zip(forecasts)
        .map(|(y, f)| (y - f).powi(2))
        .sum::<f64>()
        / holdout.len() as f64;
    Ok(naive_scale(insample, 1, 2).map(|s| (mse / s).sqrt()))
}

/// Fraction of holdout values inside `[lower, upper]`.
pub fn coverage(holdout: &[f64], lower: &[f64], upper: &[f64]) -> Result<f64> {
    check_lengths(holdout.len(), lower.len())?;
    check_lengths(holdout.len(), upper.len())?;
    let inside = holdout
        .iter()
        .zip(lower.iter().zip(upper))
        .filter(|(y, (l, u))| *l <= *y && *y <= *u)
        .count();
    Ok(inside as f64 / holdout.len() as f64)
}

/// Mean interval score scaled by the MASE denominator.
pub fn smis(
    holdout: &[f64],
    lower: &[f64],
    upper: &[f64],
    level: f64,
    insample: &[f64],
) -> Result<Option<f64>> {
    check_lengths(holdout.len(), lower.len())?;
    check_lengths(holdout.len(), upper.len())?;
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Specification(format!("level {level} outside (0, 1)")));
    }
    if insample.len() < 2 {
        return Err(Error::Specification("sMIS needs at least 2 in-sample values".into()));
    }
    let a = 1.0 - level;
    let score = holdout
        .iter()
        .zip(lower.iter().zip(upper))
        .map(|(y, (l, u))| {
            let mut s = u - l;
            if y < l {
                s += 2.0 / a * (l - y);
            }
            if y > u {
                s += 2.0 / a * (y - u);
            }
            s
        })
        .sum::<f64>()
        / holdout.len() as f64;
    Ok(naive_scale(insample, 1, 1).map(|s| score / s))
}

/// Evaluation of one model on one series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    pub series_id: String,
    pub model: String,
    pub mase: Option<f64>,
    pub rmsse: Option<f64>,
    pub coverage: Option<f64>,
    pub smis: Option<f64>,
    pub time_seconds: f64,
}

impl EvaluationRecord {
    /// Evaluates point forecasts and two-sided bounds against a holdout.
    #[allow(clippy::too_many_arguments)]
    pub fn evaluate(
        series_id: impl Into<String>,
        model: impl Into<String>,
        insample: &[f64],
        holdout: &[f64],
        mean: &[f64],
        lower: &[f64],
        upper: &[f64],
        level: f64,
        time_seconds: f64,
    ) -> Result<Self> {
        Ok(Self {
            series_id: series_id.into(),
            model: model.into(),
            mase: mase(holdout, mean, insample)?,
            rmsse: rmsse(holdout, mean, insample)?,
            coverage: Some(coverage(holdout, lower, upper)?),
            smis: smis(holdout, lower, upper, level, insample)?,
            time_seconds,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Mase,
    Rmsse,
    Coverage,
    Smis,
    Time,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::Mase,
        Metric::Rmsse,
        Metric::Coverage,
        Metric::Smis,
        Metric::Time,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Metric::Mase => "MASE",
            Metric::Rmsse => "RMSSE",
            Metric::Coverage => "Coverage",
            Metric::Smis => "sMIS",
            Metric::Time => "Time",
        }
    }

    fn of(self, r: &EvaluationRecord) -> Option<f64> {
        match self {
            Metric::Mase => r.mase,
            Metric::Rmsse => r.rmsse,
            Metric::Coverage => r.coverage,
            Metric::Smis => r.smis,
            Metric::Time => Some(r.time_seconds),
        }
    }
}

/// Mean of one metric with the number of undefined values left out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricMean {
    pub mean: Option<f64>,
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub model: String,
    pub series: usize,
    pub mase: MetricMean,
    pub rmsse: MetricMean,
    pub coverage: MetricMean,
    pub smis: MetricMean,
    pub time: MetricMean,
}

impl SummaryRow {
    pub fn get(&self, metric: Metric) -> MetricMean {
        match metric {
            Metric::Mase => self.mase,
            Metric::Rmsse => self.rmsse,
            Metric::Coverage => self.coverage,
            Metric::Smis => self.smis,
            Metric::Time => self.time,
        }
    }
}

/// Per-model means of each metric, models in order of first appearance.
pub fn aggregate(records: &[EvaluationRecord]) -> Result<Vec<SummaryRow>> {
    if records.is_empty() {
        return Err(Error::Specification("nothing to aggregate".into()));
    }
    let mut models: Vec<&str> = Vec::new();
    for r in records {
        if !models.contains(&r.model.as_str()) {
            models.push(&r.model);
        }
    }
    Ok(models
        .into_iter()
        .map(|model| {
            let rows: Vec<&EvaluationRecord> = records.iter().filter(|r| r.model == model).collect();
            let mean_of = |metric: Metric| {
                let values: Vec<f64> = rows.iter().filter_map(|r| metric.of(r)).collect();
                MetricMean {
                    mean: (!values.is_empty())
                        .then(|| values.iter().sum::<f64>() / values.len() as f64),
                    excluded: rows.len() - values.len(),
                }
            };
            SummaryRow {
                model: model.to_string(),
                series: rows.len(),
                mase: mean_of(Metric::Mase),
                rmsse: mean_of(Metric::Rmsse),
                coverage: mean_of(Metric::Coverage),
                smis: mean_of(Metric::Smis),
                time: mean_of(Metric::Time),
            }
        })
        .collect())
}

/// Sorts rows ascending by a metric; undefined means go last.
pub fn sort_summary(rows: &mut [SummaryRow], by: Metric) {
    rows.sort_by(|a, b| {
        let key = |r: &SummaryRow| r.get(by).mean.unwrap_or(f64::INFINITY);
        key(a).total_cmp(&key(b))
    });
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| format!("{v:.4}"))
}

/// Summary as CSV: model, the five metric columns, series count and the
/// number of excluded values per metric.
pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from("model,MASE,RMSSE,Coverage,sMIS,Time,series,excluded_MASE,excluded_RMSSE,excluded_Coverage,excluded_sMIS\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.model,
            cell(r.mase.mean),
            cell(r.rmsse.mean),
            cell(r.coverage.mean),
            cell(r.smis.mean),
            cell(r.time.mean),
            r.series,
            r.mase.excluded,
            r.rmsse.excluded,
            r.coverage.excluded,
            r.smis.excluded
        );
    }
    out
}

/// Summary as an aligned text table.
pub fn summary_table(rows: &[SummaryRow]) -> String {
    let header: Vec<String> = std::iter::once("Model".to_string())
        .chain(Metric::ALL.iter().map(|m| m.label().to_string()))
        .collect();
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            std::iter::once(r.model.clone())
                .chain(Metric::ALL.iter().map(|m| {
                    r.get(*m)
                        .mean
                        .map_or_else(|| "-".to_string(), |v| format!("{v:.4}"))
                }))
                .collect()
        })
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            std::iter::once(&header)
                .chain(&body)
                .map(|row| row[c].len())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in std::iter::once(&header).chain(&body) {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, v)| {
                if c == 0 {
                    format!("{v:<w$}", w = widths[c])
                } else {
                    format!("{v:>w$}", w = widths[c])
                }
            })
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}
