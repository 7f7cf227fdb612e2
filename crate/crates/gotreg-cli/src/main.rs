//! Command-line front end: ingest datasets described by a JSON manifest,
//! fit and apply transport-chain regression models, run leave-one-out
//! comparisons and simulation studies, and convert two public-data layouts
//! into ingestible files.

use clap::{Args, Parser, Subcommand, ValueEnum};
use gotreg::data::convert::{convert_hmd_lifetable, convert_noaa_daily};
use gotreg::data::{
    emit_plot_data, emit_points, load_dataset, load_predictors, native_format, DatasetManifest,
};
use gotreg::harness::{
    alpha_recovery_experiment, delta_experiment, dominance_experiment, loo_evaluate,
    order_recovery_experiment, ExperimentConfig, ExperimentReport, LooMethod, LooReport,
};
use gotreg::nadaraya::NwConfig;
use gotreg::regression::{fit, predict, FitConfig, GotModel, ModelDocument};
use gotreg::{Error, Result, SpaceDescriptor};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "gotreg",
    version,
    about = "Regression for metric-space-valued data via geodesic transport chains"
)]
struct Cli {
    /// Worker threads for parallel sections (0 keeps the library default).
    /// Outputs are identical for any thread count.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model to the dataset described by a manifest.
    Fit(FitCmd),
    /// Apply a fitted model to new predictor files.
    Predict(PredictCmd),
    /// Leave-one-out comparison of the model and a kernel baseline.
    Loo(LooCmd),
    /// Replicated simulation studies against known generating truths.
    Simulate(SimulateCmd),
    /// Convert public-data layouts into ingestible CSV files.
    Convert(ConvertCmd),
}

/// Optimizer settings shared by fitting commands. The coarse grid has
/// `grid_size` evenly spaced values spanning three quarters of the
/// coefficient box in each direction.
#[derive(Args)]
struct OptimArgs {
    /// Coefficient box bound B; the search stays inside [-B, B].
    #[arg(long, default_value_t = 2.0)]
    alpha_bound: f64,
    /// Coarse-grid values per coordinate used to seed the search.
    #[arg(long, default_value_t = 5)]
    grid_size: usize,
    /// Convergence tolerance of the simplex search.
    #[arg(long, default_value_t = 1e-6)]
    simplex_tolerance: f64,
    /// Master random seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn coarse_grid(bound: f64, size: usize) -> Vec<f64> {
    let half = 0.75 * bound;
    if size <= 1 {
        return vec![0.0];
    }
    (0..size)
        .map(|i| -half + 2.0 * half * i as f64 / (size - 1) as f64)
        .collect()
}

impl OptimArgs {
    fn fit_config(&self) -> Result<FitConfig> {
        let config = FitConfig {
            alpha_bound: self.alpha_bound,
            coarse_grid: coarse_grid(self.alpha_bound, self.grid_size),
            simplex_tolerance: self.simplex_tolerance,
            seed: self.seed,
            ..Default::default()
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
struct FitCmd {
    /// Dataset manifest (JSON).
    #[arg(long)]
    manifest: PathBuf,
    #[command(flatten)]
    optim: OptimArgs,
    /// Directory for model.json.
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
}

#[derive(Args)]
struct PredictCmd {
    /// Fitted model document (model.json).
    #[arg(long)]
    model: PathBuf,
    /// Manifest describing predictor files (response optional, ignored).
    #[arg(long)]
    manifest: PathBuf,
    /// Directory for predictions.csv and plot_data.csv.
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodFlag {
    Got,
    Nw,
    Both,
}

#[derive(Args)]
struct LooCmd {
    /// Dataset manifest (JSON).
    #[arg(long)]
    manifest: PathBuf,
    /// Which predictor to evaluate.
    #[arg(long, value_enum, default_value_t = MethodFlag::Both)]
    method: MethodFlag,
    #[command(flatten)]
    optim: OptimArgs,
    /// Directory for loo_<method>.json and loo_<method>.csv.
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceFlag {
    Euclidean,
    Wasserstein,
    Sphere,
    Spd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scenario {
    /// How often greedy selection returns the generating order.
    OrderRecovery,
    /// Excess held-out loss of the fitted coefficients.
    Delta,
    /// Leave-one-out comparison against the kernel baseline.
    Dominance,
    /// Worst-coordinate coefficient error against the truth.
    AlphaRecovery,
}

#[derive(Args)]
struct SimulateCmd {
    /// Geometry of the simulated data.
    #[arg(long, value_enum)]
    space: SpaceFlag,
    #[arg(long, value_enum, default_value_t = Scenario::OrderRecovery)]
    scenario: Scenario,
    /// Training observations per replication.
    #[arg(long, default_value_t = 500)]
    n: usize,
    /// Number of predictors.
    #[arg(long, default_value_t = 2)]
    p: usize,
    /// True coefficients, one per predictor (applied in index order).
    #[arg(long, value_delimiter = ',', default_value = "0.8,0.3")]
    alpha: Vec<f64>,
    /// Perturbation amplitude.
    #[arg(long, default_value_t = 0.05)]
    sigma: f64,
    #[arg(long, default_value_t = 100)]
    replications: usize,
    /// Held-out observations for the delta scenario.
    #[arg(long, default_value_t = 200)]
    test_size: usize,
    /// Quantile-grid resolution for the distribution space.
    #[arg(long, default_value_t = 64)]
    grid_size: usize,
    /// Coordinate dimension for the Euclidean and sphere spaces.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Matrix size for the SPD space.
    #[arg(long, default_value_t = 2)]
    matrix_size: usize,
    /// Coefficient box bound.
    #[arg(long, default_value_t = 2.0)]
    alpha_bound: f64,
    /// Coarse-grid values per coordinate for the experiment fits.
    #[arg(long, default_value_t = 3)]
    coarse_grid: usize,
    /// Convergence tolerance of the simplex search.
    #[arg(long, default_value_t = 1e-5)]
    simplex_tolerance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for experiment.json.
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConvertKind {
    /// Period life table text export: one age-at-death quantile row per year.
    Hmd,
    /// Daily temperature summaries: summer (tmax, tmin) sample pairs.
    Noaa,
}

#[derive(Args)]
struct ConvertCmd {
    #[arg(long, value_enum)]
    dataset: ConvertKind,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Quantile count per observation (life table conversion).
    #[arg(long, default_value_t = 100)]
    grid_size: usize,
    /// Group temperature records by station-year instead of station.
    #[arg(long)]
    per_year: bool,
}

fn main() {
    let cli = Cli::parse();
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .ok();
    }
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(match e {
            Error::Config(_) => 2,
            Error::Ingestion(_) | Error::Io(_) => 3,
            Error::Geometry(_) | Error::SpaceMismatch(_) => 4,
            Error::Numeric(_) => 5,
        });
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Fit(cmd) => run_fit(cmd),
        Command::Predict(cmd) => run_predict(cmd),
        Command::Loo(cmd) => run_loo(cmd),
        Command::Simulate(cmd) => run_simulate(cmd),
        Command::Convert(cmd) => run_convert(cmd),
    }
}

/// Twelve significant digits, plain notation where possible.
fn sig12(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exponent = v.abs().log10().floor() as i32;
    let scale = 10f64.powi(11 - exponent);
    let rounded = (v * scale).round() / scale;
    format!("{rounded}")
}

fn manifest_base(path: &Path) -> PathBuf {
    path.parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn write_json<T: serde::Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::numeric(format!("cannot serialize report: {e}")))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

fn run_fit(cmd: FitCmd) -> Result<()> {
    let manifest = DatasetManifest::from_file(&cmd.manifest)?;
    let dataset = load_dataset(&manifest, &manifest_base(&cmd.manifest))?;
    let config = cmd.optim.fit_config()?;
    let model = fit(&dataset.x, &dataset.y, &config)?;
    let document = model.to_document();

    ensure_dir(&cmd.output_dir)?;
    let model_path = cmd.output_dir.join("model.json");
    write_json(&document, &model_path)?;

    println!("observations: {}", dataset.y.len());
    println!("predictors: {}", dataset.x[0].len());
    println!(
        "ordering: {}",
        document
            .ordering
            .iter()
            .map(|j| j.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    );
    println!(
        "alpha: {}",
        document
            .alpha
            .iter()
            .map(|a| sig12(*a))
            .collect::<Vec<_>>()
            .join(" ")
    );
    println!("training loss: {}", sig12(document.training_loss));
    for warning in &document.diagnostics.warnings {
        println!("warning: {warning}");
    }
    println!("model: {}", model_path.display());
    Ok(())
}

fn run_predict(cmd: PredictCmd) -> Result<()> {
    let text = std::fs::read_to_string(&cmd.model)
        .map_err(|e| Error::ingestion(format!("cannot read model {}: {e}", cmd.model.display())))?;
    let document: ModelDocument = serde_json::from_str(&text)
        .map_err(|e| Error::ingestion(format!("model {}: {e}", cmd.model.display())))?;
    let model = GotModel::from_document(document)?;

    let manifest = DatasetManifest::from_file(&cmd.manifest)?;
    let space = manifest.space.to_descriptor()?;
    if *space != *model.space {
        return Err(Error::mismatch(
            "manifest declares a different space than the model was fitted in",
        ));
    }
    let (ids, rows) = load_predictors(&manifest, &manifest_base(&cmd.manifest))?;
    if rows[0].len() != model.mu_hat.len() {
        return Err(Error::mismatch(format!(
            "model expects {} predictors, manifest provides {}",
            model.mu_hat.len(),
            rows[0].len()
        )));
    }
    let predictions: Vec<_> = rows
        .iter()
        .map(|row| predict(&model, row))
        .collect::<Result<_>>()?;

    ensure_dir(&cmd.output_dir)?;
    let predictions_path = cmd.output_dir.join("predictions.csv");
    let id_column = manifest.id_column.as_deref().unwrap_or("obs");
    emit_points(
        &predictions,
        Some(&ids),
        native_format(&model.space),
        id_column,
        &predictions_path,
    )?;
    let plot_path = cmd.output_dir.join("plot_data.csv");
    emit_plot_data(&predictions, &ids, &plot_path)?;

    println!("predictions: {}", predictions.len());
    println!("output: {}", predictions_path.display());
    println!("plot data: {}", plot_path.display());
    Ok(())
}

fn csv_quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn write_loo_csv(report: &LooReport, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    writeln!(out, "index,error,failure")?;
    for fold in &report.per_fold {
        let error = fold.error.map(|e| format!("{e}")).unwrap_or_default();
        let failure = fold.failure.as_deref().map(csv_quote).unwrap_or_default();
        writeln!(out, "{},{},{}", fold.index, error, failure)?;
    }
    out.flush()?;
    Ok(())
}

fn run_loo(cmd: LooCmd) -> Result<()> {
    let manifest = DatasetManifest::from_file(&cmd.manifest)?;
    let dataset = load_dataset(&manifest, &manifest_base(&cmd.manifest))?;
    let config = cmd.optim.fit_config()?;
    ensure_dir(&cmd.output_dir)?;

    let methods: Vec<LooMethod> = match cmd.method {
        MethodFlag::Got => vec![LooMethod::Got(config)],
        MethodFlag::Nw => vec![LooMethod::Nw(NwConfig::default())],
        MethodFlag::Both => vec![
            LooMethod::Got(config),
            LooMethod::Nw(NwConfig::default()),
        ],
    };
    for method in methods {
        let report = loo_evaluate(&dataset.x, &dataset.y, &method)?;
        let json_path = cmd.output_dir.join(format!("loo_{}.json", report.method_name));
        let csv_path = cmd.output_dir.join(format!("loo_{}.csv", report.method_name));
        write_json(&report, &json_path)?;
        write_loo_csv(&report, &csv_path)?;
        print!(
            "{} mean leave-one-out distance: {}",
            report.method_name,
            sig12(report.mean_error)
        );
        if report.failed_folds > 0 {
            print!(" ({} folds failed)", report.failed_folds);
        }
        println!();
        for warning in &report.warnings {
            println!("warning: {warning}");
        }
    }
    Ok(())
}

fn run_simulate(cmd: SimulateCmd) -> Result<()> {
    let space: std::sync::Arc<SpaceDescriptor> = match cmd.space {
        SpaceFlag::Euclidean => SpaceDescriptor::euclidean(cmd.dim)?,
        SpaceFlag::Wasserstein => SpaceDescriptor::wasserstein(cmd.grid_size, (-8.0, 8.0))?,
        SpaceFlag::Sphere => SpaceDescriptor::sphere(cmd.dim.max(3))?,
        SpaceFlag::Spd => SpaceDescriptor::spd(cmd.matrix_size)?,
    };
    if cmd.alpha.len() != cmd.p {
        return Err(Error::config(format!(
            "--alpha needs {} values, got {}",
            cmd.p,
            cmd.alpha.len()
        )));
    }
    if cmd.replications == 0 {
        return Err(Error::config("--replications must be positive"));
    }
    let fit = FitConfig {
        alpha_bound: cmd.alpha_bound,
        coarse_grid: coarse_grid(cmd.alpha_bound, cmd.coarse_grid),
        simplex_tolerance: cmd.simplex_tolerance,
        seed: cmd.seed,
        ..Default::default()
    };
    fit.validate()?;
    let config = ExperimentConfig {
        space,
        n: cmd.n,
        p: cmd.p,
        alpha_star: cmd.alpha.clone(),
        ordering_star: (0..cmd.p).collect(),
        sigma: cmd.sigma,
        replications: cmd.replications,
        seed: cmd.seed,
        fit,
    };

    let report: ExperimentReport = match cmd.scenario {
        Scenario::OrderRecovery => {
            let report = order_recovery_experiment(&config)?;
            println!(
                "order recovery rate: {} ({}/{} replications)",
                sig12(report.recovery_rate.unwrap()),
                report.order_recovered.unwrap(),
                report.replications
            );
            report
        }
        Scenario::Delta => {
            let report = delta_experiment(&config, cmd.test_size)?;
            let deltas = report.delta_hat.as_ref().unwrap();
            let min = deltas.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = deltas.iter().cloned().fold(0.0_f64, f64::max);
            println!(
                "excess held-out loss: median {} (min {}, max {})",
                sig12(report.median_delta.unwrap()),
                sig12(min),
                sig12(max)
            );
            report
        }
        Scenario::Dominance => {
            let report = dominance_experiment(&config)?;
            println!(
                "transport model beat the kernel baseline in {}/{} replications",
                report.dominance_count.unwrap(),
                report.replications
            );
            report
        }
        Scenario::AlphaRecovery => {
            let report = alpha_recovery_experiment(&config)?;
            println!(
                "median worst-coordinate coefficient error: {}",
                sig12(report.median_alpha_error.unwrap())
            );
            report
        }
    };

    ensure_dir(&cmd.output_dir)?;
    let report_path = cmd.output_dir.join("experiment.json");
    write_json(&report, &report_path)?;
    println!("report: {}", report_path.display());
    Ok(())
}

fn run_convert(cmd: ConvertCmd) -> Result<()> {
    match cmd.dataset {
        ConvertKind::Hmd => {
            let years = convert_hmd_lifetable(&cmd.input, cmd.grid_size, &cmd.output)?;
            println!(
                "wrote {years} quantile rows ({} values each) to {}",
                cmd.grid_size,
                cmd.output.display()
            );
        }
        ConvertKind::Noaa => {
            let (groups, rows) = convert_noaa_daily(&cmd.input, cmd.per_year, &cmd.output)?;
            println!(
                "wrote {rows} summer sample pairs across {groups} observations to {}",
                cmd.output.display()
            );
        }
    }
    Ok(())
}
