//! Argument parsing and subcommand execution for the `telu-lab` binary.
//!
//! Every subcommand renders a single document (CSV, JSON or SVG) that the
//! binary writes to `--out` or stdout. Exit codes: 0 success, 1 I/O, 2 usage,
//! 3 numerical failure.

pub mod plot;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use telu_lab::activations::ActivationId;
use telu_lab::analysis::{
    self, decay_classify, gradient_check, underflow_scan, AnalysisError, ScanRange, TableFormat, TableOptions,
    DEFAULT_DECAY_POINTS,
};
use telu_lab::bench::{self, BenchConfig, ExportFormat};
use telu_lab::format::{round6, sig6};
use telu_lab::nn::{self, experiment::RecoverySetup, NnError};
use telu_lab::quadrature::{QuadratureConfig, QuadratureError};
use telu_lab::Precision;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::InvalidFilter(_) | AnalysisError::InvalidArgument(_) | AnalysisError::Activation(_) => {
                CliError::Usage(e.to_string())
            }
            AnalysisError::Quadrature(QuadratureError::InvalidSigma(_)) => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<NnError> for CliError {
    fn from(e: NnError) -> Self {
        match e {
            NnError::NonFiniteLoss { .. } => CliError::Numerical(e.to_string()),
            NnError::Io(io) => CliError::Io(io),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<bench::BenchError> for CliError {
    fn from(e: bench::BenchError) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Parser)]
#[command(name = "telu-lab", version, about = "TeLU activation analysis laboratory")]
pub struct Cli {
    /// Comma-separated activation names, e.g. `telu,relu`.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_id)]
    pub only: Option<Vec<ActivationId>>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Absolute quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Underflow scan step.
    #[arg(long, global = true, default_value_t = 1e-4)]
    pub step: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Near-linearity, ReLU proximity, output bias, null domain and decay tables.
    Tables,
    /// Underflow null-domain scan of the derivative.
    Scan(ScanArgs),
    /// Asymptotic decay classification against TeLU.
    Decay(DecayArgs),
    /// Closed-form derivatives against central differences.
    Gradcheck(GradcheckArgs),
    /// Forward/backward timing.
    Bench(BenchArgs),
    /// Negative-bias recovery experiment.
    Recovery(RecoveryArgs),
    /// Accuracy under Gaussian input noise.
    Noise(NoiseArgs),
    /// SVG of values and derivatives.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, default_value = "f32", value_parser = parse_precision)]
    pub precision: Precision,
    #[arg(long, default_value_t = -200.0, allow_hyphen_values = true)]
    pub start: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub end: f64,
}

#[derive(Debug, Args)]
pub struct DecayArgs {
    #[arg(long, value_delimiter = ',')]
    pub points: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    #[arg(long, default_value_t = -20.0, allow_hyphen_values = true)]
    pub lo: f64,
    #[arg(long, default_value_t = 20.0, allow_hyphen_values = true)]
    pub hi: f64,
    #[arg(long, default_value_t = 4001)]
    pub points: usize,
    #[arg(long, default_value_t = 1e-5)]
    pub h: f64,
    /// Largest acceptable relative error.
    #[arg(long, default_value_t = 1e-6)]
    pub threshold: f64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub vector_len: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub repetitions: Option<usize>,
    /// One million iterations per batch.
    #[arg(long)]
    pub full_scale: bool,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub momentum: Option<f64>,
    #[arg(long)]
    pub weight_decay: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub hidden: Option<Vec<usize>>,
    #[arg(long)]
    pub per_class: Option<usize>,
    #[arg(long)]
    pub spread: Option<f64>,
    /// Feature multiplier applied after standardization.
    #[arg(long)]
    pub input_scale: Option<f64>,
    /// Skip feature standardization.
    #[arg(long)]
    pub raw_features: bool,
    /// IDX image file; requires --idx-labels.
    #[arg(long, requires = "idx_labels")]
    pub idx_images: Option<PathBuf>,
    #[arg(long, requires = "idx_images")]
    pub idx_labels: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RecoveryArgs {
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
    pub bias: f64,
    #[command(flatten)]
    pub train: TrainArgs,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1"
    )]
    pub sigmas: Vec<f64>,
    #[command(flatten)]
    pub train: TrainArgs,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long, default_value_t = -6.0, allow_hyphen_values = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 600)]
    pub samples: usize,
}

fn parse_id(s: &str) -> Result<ActivationId, String> {
    s.parse()
        .map_err(|e: telu_lab::activations::ActivationError| e.to_string())
}

fn parse_precision(s: &str) -> Result<Precision, String> {
    s.parse()
        .map_err(|e: telu_lab::activations::ActivationError| e.to_string())
}

/// A rendered document plus whether a numerical failure was recorded in it.
#[derive(Debug)]
pub struct Rendered {
    pub document: String,
    pub numerical_failure: Option<String>,
}

impl Rendered {
    fn ok(document: String) -> Self {
        Rendered {
            document,
            numerical_failure: None,
        }
    }
}

fn ids_or(cli: &Cli, default: &[ActivationId]) -> Result<Vec<ActivationId>, CliError> {
    match &cli.only {
        Some(ids) if ids.is_empty() => Err(CliError::Usage("empty activation list".into())),
        Some(ids) => Ok(ids.clone()),
        None => Ok(default.to_vec()),
    }
}

fn tabular(cli: &Cli) -> Result<TableFormat, CliError> {
    match cli.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => Ok(TableFormat::Csv),
        OutputFormat::Json => Ok(TableFormat::Json),
        OutputFormat::Svg => Err(CliError::Usage("svg output is only available for `plot`".into())),
    }
}

fn quadrature(cli: &Cli) -> Result<QuadratureConfig, CliError> {
    if !(cli.tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", cli.tol)));
    }
    Ok(QuadratureConfig::default().with_abs_tol(cli.tol))
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(round6(x))
    } else {
        json!(sig6(x))
    }
}

pub fn run(cli: &Cli) -> Result<Rendered, CliError> {
    match &cli.command {
        Command::Tables => cmd_tables(cli),
        Command::Scan(a) => cmd_scan(cli, a),
        Command::Decay(a) => cmd_decay(cli, a),
        Command::Gradcheck(a) => cmd_gradcheck(cli, a),
        Command::Bench(a) => cmd_bench(cli, a),
        Command::Recovery(a) => cmd_recovery(cli, a),
        Command::Noise(a) => cmd_noise(cli, a),
        Command::Plot(a) => cmd_plot(cli, a),
    }
}

fn cmd_tables(cli: &Cli) -> Result<Rendered, CliError> {
    let format = tabular(cli)?;
    let ids = ids_or(cli, &ActivationId::LINEAR_UNITS)?;
    let opts = TableOptions {
        quadrature: quadrature(cli)?,
        scan: ScanRange {
            step: cli.step,
            ..ScanRange::default()
        },
        ..TableOptions::default()
    };
    Ok(Rendered::ok(analysis::render_tables(&ids, format, &opts)?))
}

fn cmd_scan(cli: &Cli, args: &ScanArgs) -> Result<Rendered, CliError> {
    let format = tabular(cli)?;
    let ids = ids_or(cli, &ActivationId::LINEAR_UNITS)?;
    let range = ScanRange {
        start: args.start,
        end: args.end,
        step: cli.step,
    };
    let mut rows = Vec::with_capacity(ids.len());
    for &id in &ids {
        let row = match underflow_scan(id, args.precision, range) {
            Ok(r) => (id, Some(r.boundary)),
            Err(AnalysisError::NoNullRegion { .. }) => (id, None),
            Err(e) => return Err(e.into()),
        };
        rows.push(row);
    }
    let probe = |id: ActivationId, x: f64| telu_lab::activations::eval_derivative(id, x, args.precision);
    let doc = match format {
        TableFormat::Csv => {
            let mut s = String::from("id,precision,boundary,d_at_-10,d_at_-100\n");
            for (id, b) in &rows {
                s.push_str(&format!(
                    "{id},{},{},{},{}\n",
                    args.precision,
                    b.map_or_else(|| "none".to_string(), sig6),
                    sig6(probe(*id, -10.0)),
                    sig6(probe(*id, -100.0))
                ));
            }
            s
        }
        TableFormat::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|(id, b)| {
                    json!({
                        "id": id,
                        "precision": args.precision.to_string(),
                        "boundary": b.map_or(json!("none"), num),
                        "probes": {"-10": num(probe(*id, -10.0)), "-100": num(probe(*id, -100.0))},
                    })
                })
                .collect();
            json!({"scan": {"start": range.start, "end": range.end, "step": range.step}, "rows": rows}).to_string()
        }
    };
    Ok(Rendered::ok(doc))
}

fn cmd_decay(cli: &Cli, args: &DecayArgs) -> Result<Rendered, CliError> {
    let format = tabular(cli)?;
    let ids = ids_or(cli, &ActivationId::LINEAR_UNITS)?;
    let points = args.points.clone().unwrap_or_else(|| DEFAULT_DECAY_POINTS.to_vec());
    let reports = ids
        .iter()
        .map(|&id| decay_classify(id, &points))
        .collect::<Result<Vec<_>, _>>()?;
    let doc = match format {
        TableFormat::Csv => {
            let mut s = String::from("id,limit,class");
            for x in &points {
                s.push_str(&format!(",ratio_x{}", sig6(*x)));
            }
            s.push('\n');
            for r in &reports {
                s.push_str(&format!("{},{},{}", r.id, r.limit_estimate, r.assigned_class));
                for p in &r.ratio_samples {
                    s.push_str(&format!(",{}", sig6(p.ratio)));
                }
                s.push('\n');
            }
            s
        }
        TableFormat::Json => {
            let rows: Vec<Value> = reports
                .iter()
                .map(|r| {
                    let limit = match r.limit_estimate {
                        analysis::LimitEstimate::Finite(v) => num(v),
                        other => json!(other.to_string()),
                    };
                    json!({
                        "id": r.id,
                        "limit": limit,
                        "class": r.assigned_class.to_string(),
                        "ratios": r.ratio_samples.iter().map(|s| json!({"x": num(s.x), "ratio": num(s.ratio)})).collect::<Vec<_>>(),
                    })
                })
                .collect();
            json!({"decay": rows}).to_string()
        }
    };
    Ok(Rendered::ok(doc))
}

fn cmd_gradcheck(cli: &Cli, args: &GradcheckArgs) -> Result<Rendered, CliError> {
    let format = tabular(cli)?;
    if !(args.points >= 2 && args.hi > args.lo && args.h > 0.0) {
        return Err(CliError::Usage("need --points >= 2, --hi > --lo and --h > 0".into()));
    }
    let ids = ids_or(cli, &ActivationId::LINEAR_UNITS)?;
    let reports: Vec<_> = ids
        .iter()
        .map(|&id| gradient_check(id, args.lo, args.hi, args.points, args.h))
        .collect();
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !(r.max_rel_error < args.threshold))
        .map(|r| r.id.to_string())
        .collect();
    let doc = match format {
        TableFormat::Csv => {
            let mut s = String::from("id,max_rel_error,worst_x\n");
            for r in &reports {
                s.push_str(&format!("{},{},{}\n", r.id, sig6(r.max_rel_error), sig6(r.worst_x)));
            }
            s
        }
        TableFormat::Json => {
            let rows: Vec<Value> = reports
                .iter()
                .map(|r| json!({"id": r.id, "max_rel_error": num(r.max_rel_error), "worst_x": num(r.worst_x)}))
                .collect();
            json!({"threshold": args.threshold, "points": args.points, "h": args.h, "rows": rows}).to_string()
        }
    };
    Ok(Rendered {
        document: doc,
        numerical_failure: (!failed.is_empty())
            .then(|| format!("gradient check above {} for {}", args.threshold, failed.join(","))),
    })
}

fn cmd_bench(cli: &Cli, args: &BenchArgs) -> Result<Rendered, CliError> {
    let format = match tabular(cli)? {
        TableFormat::Csv => ExportFormat::Csv,
        TableFormat::Json => ExportFormat::Json,
    };
    let ids = ids_or(cli, &ActivationId::LINEAR_UNITS)?;
    let base = if args.full_scale {
        BenchConfig::full_scale(cli.seed)
    } else {
        BenchConfig {
            seed: cli.seed,
            ..BenchConfig::default()
        }
    };
    let cfg = BenchConfig {
        vector_len: args.vector_len.unwrap_or(base.vector_len),
        iterations: args.iterations.unwrap_or(base.iterations),
        repetitions: args.repetitions.unwrap_or(base.repetitions),
        ..base
    };
    let report = bench::run_bench(&ids, &cfg)?;
    eprintln!("checksum {}", report.checksum);
    let records: Vec<_> = report
        .records
        .into_iter()
        .map(|mut r| {
            r.median_per_iter_ns = round6(r.median_per_iter_ns);
            r
        })
        .collect();
    Ok(Rendered::ok(bench::export_bench(&records, format)?))
}

fn training_data(setup: &RecoverySetup, args: &TrainArgs) -> Result<(nn::Dataset, nn::Dataset), CliError> {
    match (&args.idx_images, &args.idx_labels) {
        (Some(images), Some(labels)) => {
            let data = nn::load_idx(images, labels)?;
            let (train, val) = data.split_stratified(setup.val_fraction, setup.train.seed)?;
            Ok(setup.prepare(train, val)?)
        }
        _ => Ok(setup.datasets()?),
    }
}

fn apply_train_args(setup: &mut RecoverySetup, args: &TrainArgs) -> Result<(), CliError> {
    let t = &mut setup.train;
    if let Some(v) = args.epochs {
        t.epochs = v;
    }
    if let Some(v) = args.lr {
        t.learning_rate = v;
    }
    if let Some(v) = args.momentum {
        t.momentum = v;
    }
    if let Some(v) = args.weight_decay {
        t.weight_decay = v;
    }
    if let Some(v) = args.batch_size {
        t.batch_size = v;
    }
    if let Some(v) = &args.hidden {
        setup.hidden = v.clone();
    }
    if let Some(v) = args.per_class {
        setup.blobs.per_class = v;
    }
    if let Some(v) = args.spread {
        setup.blobs.spread = v;
    }
    if let Some(v) = args.input_scale {
        setup.input_scale = v;
    }
    if args.raw_features {
        setup.standardize = false;
    }
    setup.train.validate()?;
    Ok(())
}

fn cmd_recovery(cli: &Cli, args: &RecoveryArgs) -> Result<Rendered, CliError> {
    let format = tabular(cli)?;
    let ids = ids_or(cli, &ActivationId::LINEAR_UNITS)?;
    let mut setup = RecoverySetup::desk(cli.seed);
    setup.train.bias_init = args.bias;
    apply_train_args(&mut setup, &args.train)?;
    let (train_set, val_set) = training_data(&setup, &args.train)?;
    let outcomes = nn::recovery_experiment(&ids, &setup, &train_set, &val_set)?;
    let halted: Vec<String> = outcomes
        .iter()
        .filter(|o| o.non_finite_loss.is_some())
        .map(|o| o.id.to_string())
        .collect();
    let epoch_token = |e: Option<usize>| e.map_or_else(|| "never".to_string(), |e| e.to_string());
    let doc = match format {
        TableFormat::Csv => {
            let mut s = String::from("id,first_recovery_epoch,final_val_acc,threshold,non_finite_loss_epoch\n");
            for o in &outcomes {
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    o.id,
                    epoch_token(o.first_recovery_epoch),
                    sig6(o.final_val_accuracy),
                    sig6(o.threshold),
                    o.non_finite_loss.map_or_else(|| "none".to_string(), |e| e.to_string())
                ));
            }
            for o in &outcomes {
                s.push_str(&format!("\n# metrics {}\n", o.id));
                s.push_str(&nn::export_metrics_csv(&o.metrics));
            }
            s
        }
        TableFormat::Json => {
            let rows: Vec<Value> = outcomes
                .iter()
                .map(|o| {
                    json!({
                        "id": o.id,
                        "first_recovery_epoch": o.first_recovery_epoch.map_or(json!("never"), |e| json!(e)),
                        "final_val_accuracy": num(o.final_val_accuracy),
                        "threshold": num(o.threshold),
                        "non_finite_loss_epoch": o.non_finite_loss,
                        "metrics": o.metrics.iter().map(|m| json!({
                            "epoch": m.epoch,
                            "train_loss": num(m.train_loss),
                            "train_acc": num(m.train_accuracy),
                            "val_acc": num(m.val_accuracy),
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            json!({"config": setup_json(&setup), "outcomes": rows}).to_string()
        }
    };
    Ok(Rendered {
        document: doc,
        numerical_failure: (!halted.is_empty()).then(|| format!("non-finite loss for {}", halted.join(","))),
    })
}

fn setup_json(setup: &RecoverySetup) -> Value {
    let t = &setup.train;
    json!({
        "seed": t.seed,
        "learning_rate": t.learning_rate,
        "momentum": t.momentum,
        "weight_decay": t.weight_decay,
        "batch_size": t.batch_size,
        "epochs": t.epochs,
        "bias_init": t.bias_init,
        "weight_init": t.weight_init,
        "hidden": setup.hidden,
        "blobs": setup.blobs,
        "val_fraction": setup.val_fraction,
        "standardize": setup.standardize,
        "input_scale": setup.input_scale,
    })
}

fn cmd_noise(cli: &Cli, args: &NoiseArgs) -> Result<Rendered, CliError> {
    let format = tabular(cli)?;
    let ids = ids_or(cli, &[ActivationId::TeLU])?;
    let mut setup = RecoverySetup::desk(cli.seed);
    setup.train.bias_init = 0.0;
    setup.train.epochs = 20;
    setup.input_scale = 1.0;
    apply_train_args(&mut setup, &args.train)?;
    let (train_set, val_set) = training_data(&setup, &args.train)?;
    let widths = setup.widths(&train_set);
    let mut rows = Vec::new();
    for &id in &ids {
        let mut model = nn::init_model(
            &widths,
            id,
            setup.train.weight_init,
            setup.train.bias_init,
            setup.train.seed,
        )?;
        nn::train(&mut model, &train_set, &val_set, &setup.train)?.into_result()?;
        for p in nn::evaluate_with_noise(&model, &val_set, &args.sigmas, cli.seed)? {
            rows.push((id, p));
        }
    }
    let doc = match format {
        TableFormat::Csv => {
            let mut s = String::from("id,sigma,accuracy\n");
            for (id, p) in &rows {
                s.push_str(&format!("{id},{},{}\n", sig6(p.sigma), sig6(p.accuracy)));
            }
            s
        }
        TableFormat::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|(id, p)| json!({"id": id, "sigma": num(p.sigma), "accuracy": num(p.accuracy)}))
                .collect();
            json!({"config": setup_json(&setup), "rows": rows}).to_string()
        }
    };
    Ok(Rendered::ok(doc))
}

fn cmd_plot(cli: &Cli, args: &PlotArgs) -> Result<Rendered, CliError> {
    if let Some(f) = cli.format {
        if f != OutputFormat::Svg {
            return Err(CliError::Usage("plot only renders svg".into()));
        }
    }
    let ids = ids_or(
        cli,
        &[
            ActivationId::TeLU,
            ActivationId::ReLU,
            ActivationId::GELU,
            ActivationId::SiLU,
        ],
    )?;
    if !(args.x_max > args.x_min) || args.samples < 2 {
        return Err(CliError::Usage("need --x-max > --x-min and --samples >= 2".into()));
    }
    let data = plot::plot_data(&ids, (args.x_min, args.x_max), args.samples);
    Ok(Rendered::ok(plot::render_svg(&data)))
}
