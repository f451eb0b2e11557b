use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ssoe::arima::{default_arima_config, default_max_orders, select_arima_orders};
use ssoe::benchmark::{
    read_manifest, records_csv, run_benchmark, synthetic_corpus, BenchmarkConfig, BenchmarkModel,
};
use ssoe::decompose::msdecompose;
use ssoe::io::{parse_lags, read_series_file, ColumnSelector};
use ssoe::metrics::{summary_csv, summary_table, EvaluationRecord};
use ssoe::model_file::SerializedModel;
use ssoe::simulate::{LaplaceRandomizer, NormalRandomizer, SimulatedSeries};
use ssoe::{
    fit_arima, fit_ets, fit_naive, prediction_interval, select_ets, select_sma_order, sma_model,
    simulate_series, ArimaOrders, DecompositionKind, Error, EstimationConfig, EtsSpec, FitResult,
    Ic, InitialMode, IntervalConfig, Randomizer, Side, SimModel, SimulationSpec, TimeSeries,
};

#[derive(Debug, Parser)]
#[command(name = "ssoe", version, about = "Forecasting with ETS, ARIMA and SMA state-space models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a model to a CSV series and optionally save it.
    Fit(FitArgs),
    /// Forecast from a saved model.
    Forecast(ForecastArgs),
    /// Classical decomposition with one seasonal column per lag.
    Decompose(DecomposeArgs),
    /// Generate series from a model.
    Simulate(SimulateArgs),
    /// Holdout benchmark over a manifest of series.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// CSV file with a header row.
    #[arg(long)]
    input: PathBuf,
    /// Value column, by header name or 1-based position.
    #[arg(long)]
    column: Option<String>,
    /// Seasonal lags, e.g. "1,12".
    #[arg(long, default_value = "1")]
    lags: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InitialArg {
    Optimal,
    Backcasting,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[command(flatten)]
    input: InputArgs,
    /// ets-auto, "ETS(X,X,X)", arima, sarima, ssarima-auto, sma or naive.
    #[arg(long, default_value = "ets-auto")]
    model: String,
    /// ARIMA orders, e.g. "ar=1,0;i=1,1;ma=1,1".
    #[arg(long)]
    orders: Option<String>,
    /// Include an intercept (or drift when differenced) in ARIMA models.
    #[arg(long)]
    constant: bool,
    /// SMA order; selected by the information criterion when absent.
    #[arg(long)]
    order: Option<usize>,
    /// Forecast horizon.
    #[arg(long)]
    h: Option<usize>,
    /// Withhold the last h observations and report accuracy on them.
    #[arg(long)]
    holdout: bool,
    #[arg(long, default_value = "aicc")]
    ic: String,
    #[arg(long, value_enum)]
    initial: Option<InitialArg>,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    paths: usize,
    /// Write the fitted model as JSON.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ForecastArgs {
    /// Model file written by `fit`.
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    h: usize,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    #[arg(long, default_value = "both")]
    side: String,
    /// Forecast the sum of the next h values.
    #[arg(long)]
    cumulative: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    paths: usize,
    /// CSV destination; an aligned table is printed instead of CSV.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Additive,
    Multiplicative,
}

#[derive(Debug, Args)]
struct DecomposeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "additive")]
    kind: KindArg,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Long,
    Wide,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DistributionArg {
    Normal,
    Laplace,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// "ETS(X,X,X)" or arima; ignored with --from.
    #[arg(long, default_value = "ETS(A,N,N)")]
    model: String,
    /// Simulate from a saved model, started at its initial states.
    #[arg(long)]
    from: Option<PathBuf>,
    #[arg(long, default_value = "1")]
    lags: String,
    #[arg(long)]
    orders: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    phi: Option<f64>,
    /// AR coefficients, comma separated, in lag order.
    #[arg(long, allow_hyphen_values = true)]
    ar: Option<String>,
    /// MA coefficients, comma separated, in lag order.
    #[arg(long, allow_hyphen_values = true)]
    ma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    constant: Option<f64>,
    #[arg(long, default_value_t = 100)]
    obs: usize,
    #[arg(long, default_value_t = 1)]
    nsim: usize,
    #[arg(long, value_enum, default_value = "normal")]
    distribution: DistributionArg,
    /// Innovation scale (standard deviation for normal).
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "long")]
    format: FormatArg,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchmarkArgs {
    /// Manifest CSV with columns series_id,path,lags,h.
    #[arg(long, required_unless_present = "synthetic")]
    manifest: Option<PathBuf>,
    /// Use the bundled 50-series synthetic corpus.
    #[arg(long, conflicts_with = "manifest")]
    synthetic: bool,
    #[arg(long, default_value = "ets-auto,ssarima-auto,sma")]
    models: String,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    paths: usize,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    #[arg(long, default_value = "aicc")]
    ic: String,
    /// Summary CSV destination.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Per-series records CSV destination.
    #[arg(long)]
    records: Option<PathBuf>,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Estimation(_)
        | Error::Degenerate { .. }
        | Error::Structural(_)
        | Error::NonFiniteDraw { .. } => 2,
        Error::Specification(_)
        | Error::Domain(_)
        | Error::Input { .. }
        | Error::Format(_)
        | Error::Io(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Forecast(a) => cmd_forecast(a),
        Command::Decompose(a) => cmd_decompose(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Benchmark(a) => cmd_benchmark(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn read_input(args: &InputArgs) -> ssoe::Result<(Vec<f64>, Vec<usize>)> {
    let column = args
        .column
        .as_deref()
        .map_or(ColumnSelector::Auto, ColumnSelector::parse);
    let values = read_series_file(&args.input, &column)?;
    let lags = parse_lags(&args.lags)?;
    Ok((values, lags))
}

fn write_file(path: &Path, text: &str) -> ssoe::Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Writes CSV to `output` and prints it aligned, or prints the CSV itself.
fn emit(csv: &str, output: Option<&Path>) -> ssoe::Result<()> {
    match output {
        Some(path) => {
            write_file(path, csv)?;
            print!("{}", align(csv));
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn align(csv: &str) -> String {
    let rows: Vec<Vec<&str>> = csv.lines().map(|l| l.split(',').collect()).collect();
    let ncol = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..ncol)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|v| v.len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &rows {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, v)| format!("{v:>w$}", w = widths[c]))
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| format!("{v}"))
}

fn parse_coefficients(text: &str) -> ssoe::Result<Vec<f64>> {
    text.split([',', ';'])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::Specification(format!("invalid coefficient '{s}'")))
        })
        .collect()
}

fn estimation_config(initial: Option<InitialArg>, ic: Ic, arima: bool) -> EstimationConfig {
    let base = if arima {
        default_arima_config()
    } else {
        EstimationConfig::default()
    };
    let base = base.with_ic(ic);
    match initial {
        Some(InitialArg::Optimal) => base.with_initial(InitialMode::Optimization),
        Some(InitialArg::Backcasting) => base.with_initial(InitialMode::backcasting()),
        None => base,
    }
}

fn fit_model(args: &FitArgs, series: &TimeSeries, ic: Ic) -> ssoe::Result<FitResult> {
    let model = args.model.trim();
    let arima_orders = || -> ssoe::Result<ArimaOrders> {
        let text = args.orders.as_deref().ok_or_else(|| {
            Error::Specification(format!("model '{model}' needs --orders"))
        })?;
        ArimaOrders::parse(text, series.lags())
    };
    match model.to_ascii_lowercase().as_str() {
        "ets-auto" | "auto" => {
            Ok(select_ets(series, &estimation_config(args.initial, ic, false))?.best)
        }
        "arima" | "sarima" | "ssarima" => fit_arima(
            series,
            &arima_orders()?,
            args.constant,
            &estimation_config(args.initial, ic, true),
        ),
        "ssarima-auto" | "arima-auto" => {
            let max = default_max_orders(series.lags());
            Ok(select_arima_orders(series, &max, &estimation_config(args.initial, ic, true))?.best)
        }
        "sma" => match args.order {
            Some(p) => sma_model(series, p),
            None => select_sma_order(series, series.train().len(), ic),
        },
        "naive" => fit_naive(series),
        _ if model.to_ascii_uppercase().starts_with("ETS(") => {
            let spec = EtsSpec::parse(model, series.max_lag())?;
            fit_ets(series, &spec, &estimation_config(args.initial, ic, false))
        }
        _ => Err(Error::Specification(format!("unknown model '{model}'"))),
    }
}

fn cmd_fit(args: FitArgs) -> ssoe::Result<()> {
    let (values, lags) = read_input(&args.input)?;
    let ic = Ic::from_str(&args.ic)?;
    if args.holdout && args.h.is_none() {
        return Err(Error::Specification("--holdout needs --h".into()));
    }
    let holdout = if args.holdout { args.h.unwrap_or(0) } else { 0 };
    let series = TimeSeries::new(values, lags, holdout)?;
    let fit = fit_model(&args, &series, ic)?;
    let saved = SerializedModel::from_fit(&fit, series.lags());

    println!("model: {}", saved.spec);
    println!("observations: {}", fit.n_obs);
    for p in &fit.params {
        println!("{}: {}", p.name, p.value);
    }
    println!("sigma2: {}", fit.sigma2());
    println!("loglik: {}", fit.log_lik);
    println!("AIC: {}", fit.ic.aic);
    println!("AICc: {}", fit.ic.aicc);
    println!("BIC: {}", fit.ic.bic);
    println!("parameters: {}", fit.n_params);
    for flag in &fit.flags {
        println!("flag: {flag:?}");
    }

    if let Some(h) = args.h {
        let config = IntervalConfig {
            level: args.level,
            side: Side::Both,
            cumulative: false,
            n_paths: args.paths,
            seed: args.seed,
        };
        let fc = prediction_interval(&fit.origin(), h, &config)?;
        if args.holdout {
            let lower = fc.lower.clone().unwrap_or_default();
            let upper = fc.upper.clone().unwrap_or_default();
            let record = EvaluationRecord::evaluate(
                args.input.input.display().to_string(),
                saved.spec.clone(),
                series.train(),
                series.holdout(),
                &fc.mean,
                &lower,
                &upper,
                args.level,
                0.0,
            )?;
            println!("holdout: {h}");
            println!("MASE: {}", cell(record.mase));
            println!("RMSSE: {}", cell(record.rmsse));
            println!("Coverage: {}", cell(record.coverage));
            println!("sMIS: {}", cell(record.smis));
        }
        println!();
        print!("{}", align(&forecast_csv(&fc, h)));
    }

    if let Some(path) = &args.output {
        write_file(path, &saved.to_json()?)?;
    }
    Ok(())
}

fn forecast_csv(fc: &ssoe::ForecastResult, h: usize) -> String {
    let mut out = String::from("step,mean,lower,upper\n");
    let bound = |b: &Option<Vec<f64>>, i: usize| cell(b.as_ref().map(|v| v[i]));
    for (i, m) in fc.mean.iter().enumerate() {
        let step = if fc.cumulative { h } else { i + 1 };
        out.push_str(&format!(
            "{step},{m},{},{}\n",
            bound(&fc.lower, i),
            bound(&fc.upper, i)
        ));
    }
    out
}

fn cmd_forecast(args: ForecastArgs) -> ssoe::Result<()> {
    let text = fs::read_to_string(&args.model)
        .map_err(|e| Error::Io(format!("{}: {e}", args.model.display())))?;
    let saved = SerializedModel::from_json(&text)?;
    let config = IntervalConfig {
        level: args.level,
        side: Side::from_str(&args.side)?,
        cumulative: args.cumulative,
        n_paths: args.paths,
        seed: args.seed,
    };
    let fc = prediction_interval(&saved.origin(), args.h, &config)?;
    emit(&forecast_csv(&fc, args.h), args.output.as_deref())
}

fn cmd_decompose(args: DecomposeArgs) -> ssoe::Result<()> {
    let (values, lags) = read_input(&args.input)?;
    let kind = match args.kind {
        KindArg::Additive => DecompositionKind::Additive,
        KindArg::Multiplicative => DecompositionKind::Multiplicative,
    };
    let d = msdecompose(&values, &lags, kind)?;
    let mut out = String::from("t,trend");
    for ring in &d.seasonals {
        out.push_str(&format!(",seasonal_{}", ring.lag));
    }
    out.push_str(",residual\n");
    for t in 0..d.len() {
        out.push_str(&format!("{},{}", t + 1, cell(d.trend[t])));
        for ring in &d.seasonals {
            out.push_str(&format!(",{}", ring.at(t)));
        }
        out.push_str(&format!(",{}\n", cell(d.residual[t])));
    }
    emit(&out, args.output.as_deref())
}

fn cmd_simulate(args: SimulateArgs) -> ssoe::Result<()> {
    let randomizer: Arc<dyn Randomizer> = match args.distribution {
        DistributionArg::Normal => Arc::new(NormalRandomizer::new(0.0, args.scale)?),
        DistributionArg::Laplace => Arc::new(LaplaceRandomizer::new(0.0, args.scale)?),
    };
    let model = match &args.from {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let saved = SerializedModel::from_json(&text)?;
            SimModel::Fixed {
                start: saved.model.initial().clone(),
                model: saved.model,
            }
        }
        None => {
            let lags = parse_lags(&args.lags)?;
            let name = args.model.trim();
            if name.to_ascii_uppercase().starts_with("ETS(") {
                let period = lags.iter().copied().max().unwrap_or(1);
                SimModel::Ets {
                    spec: EtsSpec::parse(name, period)?,
                    alpha: args.alpha,
                    beta: args.beta,
                    gamma: args.gamma,
                    phi: args.phi,
                    initial: None,
                }
            } else if matches!(name.to_ascii_lowercase().as_str(), "arima" | "sarima") {
                let text = args
                    .orders
                    .as_deref()
                    .ok_or_else(|| Error::Specification("arima simulation needs --orders".into()))?;
                SimModel::Arima {
                    orders: ArimaOrders::parse(text, &lags)?,
                    ar: args.ar.as_deref().map(parse_coefficients).transpose()?,
                    ma: args.ma.as_deref().map(parse_coefficients).transpose()?,
                    constant: args.constant,
                    initial: None,
                }
            } else {
                return Err(Error::Specification(format!("cannot simulate model '{name}'")));
            }
        }
    };
    let spec = SimulationSpec {
        model,
        obs: args.obs,
        nsim: args.nsim,
        randomizer,
        seed: args.seed,
    };
    let sims = simulate_series(&spec)?;
    let csv = match args.format {
        FormatArg::Long => long_csv(&sims),
        FormatArg::Wide => wide_csv(&sims, args.obs),
    };
    emit(&csv, args.output.as_deref())
}

fn long_csv(sims: &[SimulatedSeries]) -> String {
    let mut out = String::from("replicate,t,value\n");
    for (r, s) in sims.iter().enumerate() {
        for (t, v) in s.values.iter().enumerate() {
            out.push_str(&format!("{},{},{v}\n", r + 1, t + 1));
        }
    }
    out
}

fn wide_csv(sims: &[SimulatedSeries], obs: usize) -> String {
    let mut out = String::from("t");
    for r in 0..sims.len() {
        out.push_str(&format!(",replicate_{}", r + 1));
    }
    out.push('\n');
    for t in 0..obs {
        out.push_str(&format!("{}", t + 1));
        for s in sims {
            out.push_str(&format!(",{}", s.values[t]));
        }
        out.push('\n');
    }
    out
}

fn cmd_benchmark(args: BenchmarkArgs) -> ssoe::Result<()> {
    let series = match &args.manifest {
        Some(path) => read_manifest(path)?,
        None => synthetic_corpus(args.seed)?,
    };
    let models = args
        .models
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(BenchmarkModel::from_str)
        .collect::<ssoe::Result<Vec<_>>>()?;
    let config = BenchmarkConfig {
        seed: args.seed,
        jobs: args.jobs,
        level: args.level,
        n_paths: args.paths,
        ic: Ic::from_str(&args.ic)?,
    };
    let report = run_benchmark(&series, &models, &config)?;
    if let Some(path) = &args.records {
        write_file(path, &records_csv(&report.records))?;
    }
    if let Some(path) = &args.output {
        write_file(path, &summary_csv(&report.summary))?;
    }
    print!("{}", summary_table(&report.summary));
    for f in &report.failures {
        eprintln!("failed: {} / {}: {}", f.series_id, f.model, f.message);
    }
    if !report.failures.is_empty() {
        eprintln!("{} of {} fits failed", report.failures.len(), report.records.len());
    }
    Ok(())
}
