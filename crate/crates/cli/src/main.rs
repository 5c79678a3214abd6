mod output;
mod svg;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use suproj::bench::{
    fit_method, repeat_seed, resolve_sigma_x, run_benchmark, BenchConfig, BenchReport, EmbedParams, PsiBackend, SigmaSetting,
    DEFAULT_CV_FOLDS, DEFAULT_KX, DEFAULT_SIGMA_Y,
};
use suproj::check::{run_checks, CheckLevel};
use suproj::datasets::{gen_spirals, gen_xor, load_csv, normalize01, split, LabelColumn, LabeledDataset};
use suproj::eval::one_nn_accuracy;
use suproj::{ErrorKind, Matrix, Method};

use output::Outputs;

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_CHECK: u8 = 4;

#[derive(Parser)]
#[command(name = "suproj", version, about = "Supervised PCA and supervised random projection experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset as CSV (one sample per row, label last).
    Gen(GenArgs),
    /// Fit one method on a train split and write train/test embeddings.
    Embed(EmbedArgs),
    /// Repeated split/fit/score runs over methods and embedding dimensions.
    Bench(BenchArgs),
    /// Run the numerical verification suite.
    Check(CheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    Xor,
    Spirals,
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::Xor => "xor",
            Generator::Spirals => "spirals",
        })
    }
}

#[derive(Args)]
struct GeneratorArgs {
    /// Number of samples.
    #[arg(long, default_value_t = 500)]
    n: usize,
    /// Uniform noise features appended to the two signal dimensions.
    #[arg(long, default_value_t = 8)]
    noise_dims: usize,
}

#[derive(Args)]
struct SourceArgs {
    /// Synthetic dataset.
    #[arg(long = "gen", value_enum, required_unless_present = "csv", conflicts_with = "csv")]
    generator: Option<Generator>,
    /// CSV file with one sample per row.
    #[arg(long, requires = "label_col")]
    csv: Option<PathBuf>,
    /// Label column of the CSV: zero-based index or header name.
    #[arg(long)]
    label_col: Option<String>,
    #[command(flatten)]
    gen: GeneratorArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum PsiBackendArg {
    Rff,
    Exact,
}

#[derive(Args)]
struct ModelArgs {
    /// Random features for the data kernel (KSRP).
    #[arg(long, default_value_t = DEFAULT_KX)]
    kx: usize,
    /// Data-kernel RBF bandwidth: `cv` or a positive number.
    #[arg(long, default_value = "cv", value_parser = parse_sigma)]
    sigma_x: SigmaSetting,
    /// RBF bandwidth standing in for the delta label kernel.
    #[arg(long, default_value_t = DEFAULT_SIGMA_Y)]
    sigma_y: f64,
    /// Label-kernel factor for the randomized methods.
    #[arg(long, value_enum, default_value = "rff")]
    psi_backend: PsiBackendArg,
    /// Cross-validation folds for `--sigma-x cv`.
    #[arg(long, default_value_t = DEFAULT_CV_FOLDS)]
    cv_folds: usize,
    /// Training fraction of the stratified split.
    #[arg(long, default_value_t = 0.7)]
    split: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

impl ModelArgs {
    fn params(&self) -> Result<EmbedParams, CliError> {
        if self.kx == 0 {
            return Err(CliError::Usage("--kx must be at least 1".into()));
        }
        if !(self.sigma_y > 0.0 && self.sigma_y.is_finite()) {
            return Err(CliError::Usage("--sigma-y must be positive".into()));
        }
        Ok(EmbedParams {
            sigma_x: self.sigma_x,
            sigma_y: self.sigma_y,
            kx: self.kx,
            psi_backend: match self.psi_backend {
                PsiBackendArg::Rff => PsiBackend::Rff,
                PsiBackendArg::Exact => PsiBackend::Exact,
            },
            cv_folds: self.cv_folds,
        })
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long = "gen", value_enum)]
    generator: Generator,
    #[command(flatten)]
    gen: GeneratorArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct EmbedArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// pca, spca, kspca, srp, ksrp or ksrp-exact.
    #[arg(long, value_parser = parse_method)]
    method: Method,
    /// Embedding dimension.
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Comma-separated methods.
    #[arg(long, value_delimiter = ',', value_parser = parse_method, default_value = "spca,srp,kspca,ksrp")]
    methods: Vec<Method>,
    /// Comma-separated embedding dimensions.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
    ks: Vec<usize>,
    #[arg(long, default_value_t = 30)]
    repeats: usize,
    /// Run repeats concurrently; timings are flagged as contended.
    #[arg(long)]
    parallel: bool,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    Fast,
    Full,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(value_enum, default_value = "fast")]
    level: Level,
}

fn parse_sigma(s: &str) -> Result<SigmaSetting, String> {
    if s.eq_ignore_ascii_case("cv") {
        return Ok(SigmaSetting::Cv);
    }
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(SigmaSetting::Fixed(v)),
        _ => Err(format!("expected `cv` or a positive number, got {s:?}")),
    }
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse::<Method>().map_err(|e| e.to_string())
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(suproj::Error),
    Output(PathBuf, std::io::Error),
    CheckFailed(usize),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Output(p, e) => write!(f, "cannot write to {}: {e}", p.display()),
            CliError::CheckFailed(n) => write!(f, "{n} check(s) failed"),
        }
    }
}

impl From<suproj::Error> for CliError {
    fn from(e: suproj::Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Lib(e) => match e.kind() {
                ErrorKind::Usage => EXIT_USAGE,
                ErrorKind::Data => EXIT_DATA,
                ErrorKind::Numerical => EXIT_NUMERICAL,
            },
            CliError::Output(..) => EXIT_DATA,
            CliError::CheckFailed(_) => EXIT_CHECK,
        }
    }
}

fn load(source: &SourceArgs, seed: u64) -> Result<LabeledDataset, CliError> {
    match (&source.generator, &source.csv) {
        (Some(g), None) => generate(*g, &source.gen, seed),
        (None, Some(path)) => {
            let col: LabelColumn = source
                .label_col
                .as_deref()
                .ok_or_else(|| CliError::Usage("--csv needs --label-col".into()))?
                .parse()
                .unwrap_or_else(|never| match never {});
            Ok(load_csv(path, &col)?)
        }
        _ => Err(CliError::Usage("give exactly one of --gen or --csv".into())),
    }
}

fn generate(g: Generator, args: &GeneratorArgs, seed: u64) -> Result<LabeledDataset, CliError> {
    Ok(match g {
        Generator::Xor => gen_xor(args.n, args.noise_dims, seed)?,
        Generator::Spirals => gen_spirals(args.n, args.noise_dims, seed)?,
    })
}

fn commit(outputs: Outputs, dir: &std::path::Path) -> Result<(), CliError> {
    for path in outputs.commit(dir).map_err(|e| CliError::Output(dir.to_path_buf(), e))? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_gen(args: &GenArgs) -> Result<(), CliError> {
    let ds = generate(args.generator, &args.gen, args.seed)?;
    let mut buf = Vec::new();
    ds.write_csv(&mut buf)?;
    let mut out = Outputs::default();
    out.add(format!("{}-n{}-d{}-seed{}.csv", args.generator, ds.len(), ds.dim(), args.seed), buf);
    commit(out, &args.out)
}

/// `k` feature rows `z0..` followed by a `label` row; one column per sample.
fn embedding_csv(z: &Matrix, labels: &[usize], class_names: &[String]) -> Result<Vec<u8>, CliError> {
    let ser = |e: csv::Error| CliError::Lib(suproj::DataError::Serialize(e.to_string()).into());
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    for r in 0..z.rows() {
        let mut rec = vec![format!("z{r}")];
        rec.extend((0..z.cols()).map(|j| z.get(r, j).to_string()));
        w.write_record(&rec).map_err(ser)?;
    }
    let mut rec = vec!["label".to_string()];
    rec.extend(labels.iter().map(|&y| class_names[y].clone()));
    w.write_record(&rec).map_err(ser)?;
    w.into_inner().map_err(|e| CliError::Lib(suproj::DataError::Serialize(e.to_string()).into()))
}

fn cmd_embed(args: &EmbedArgs) -> Result<(), CliError> {
    let params = args.model.params()?;
    let ds = load(&args.source, args.model.seed)?;
    let seed = repeat_seed(args.model.seed, 0);
    let parts = split(&ds, args.model.split, seed)?;
    for w in &parts.warnings {
        eprintln!("warning: {w}");
    }
    let (train, test, _) = normalize01(&parts.train, &parts.test)?;
    let sigma_x = if args.method.uses_data_kernel() {
        resolve_sigma_x(&train, &params, args.method, seed)?
    } else {
        f64::NAN
    };
    let model = fit_method(args.method, &train, args.k, sigma_x, &params, seed)?;
    let z_train = model.training_embedding();
    let z_test = model.transform(&test.x)?;
    let accuracy = one_nn_accuracy(z_train, &train.labels, &z_test, &test.labels)?;

    println!("dataset   {} ({} × {}, {} classes)", ds.provenance, ds.dim(), ds.len(), ds.num_classes());
    println!("method    {} (k = {})", args.method, args.k);
    if sigma_x.is_finite() {
        println!("sigma_x   {sigma_x:.6}");
    }
    println!("split     {} train / {} test", train.len(), test.len());
    println!("1-NN      {accuracy:.4}");

    let stem = format!("{}-k{}", args.method, args.k);
    let mut out = Outputs::default();
    out.add(format!("{stem}-train.csv"), embedding_csv(z_train, &train.labels, &ds.class_names)?);
    out.add(format!("{stem}-test.csv"), embedding_csv(&z_test, &test.labels, &ds.class_names)?);
    if args.k == 2 {
        let title = format!("{} embedding, 1-NN test accuracy {accuracy:.3}", args.method);
        let plot = svg::scatter(
            &title,
            &ds.class_names,
            &[
                svg::PointSet { points: z_train, labels: &train.labels, filled: true, name: "train" },
                svg::PointSet { points: &z_test, labels: &test.labels, filled: false, name: "test" },
            ],
        );
        out.add(format!("{stem}-scatter.svg"), plot);
    }
    commit(out, &args.model.out)
}

fn curve_plots(report: &BenchReport) -> (String, String) {
    let series = |value: fn(&suproj::bench::Aggregate) -> f64| -> Vec<svg::Series> {
        report
            .config
            .methods
            .iter()
            .map(|&m| svg::Series {
                name: m.to_string(),
                points: report.aggregates.iter().filter(|a| a.method == m).map(|a| (a.k as f64, value(a))).collect(),
            })
            .collect()
    };
    let accuracy = svg::curves("1-NN test accuracy", "k", "accuracy", &series(|a| a.accuracy_mean), false);
    let time = svg::curves("Mean fit time", "k", "fit time (ms)", &series(|a| a.fit_ms_mean), true);
    (accuracy, time)
}

fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    let params = args.model.params()?;
    let ds = load(&args.source, args.model.seed)?;
    let cfg = BenchConfig {
        methods: args.methods.clone(),
        ks: args.ks.clone(),
        repeats: args.repeats,
        seed: args.model.seed,
        train_fraction: args.model.split,
        params,
        parallel: args.parallel,
    };
    let report = run_benchmark(&ds, &cfg)?;

    println!("dataset {} ({} × {}), {} repeats", report.dataset, report.d, report.n, cfg.repeats);
    println!("{:<11} {:>3} {:>5} {:>15} {:>12} {:>12}", "method", "k", "runs", "accuracy", "fit ms", "transform ms");
    for a in &report.aggregates {
        println!(
            "{:<11} {:>3} {:>5} {:>7.4} ± {:<6.4} {:>12.3} {:>12.3}",
            a.method.to_string(),
            a.k,
            a.runs,
            a.accuracy_mean,
            a.accuracy_std,
            a.fit_ms_mean,
            a.transform_ms_mean
        );
    }
    for s in &report.skipped {
        println!("skipped {} k = {}: {}", s.method, s.k, s.reason);
    }

    let mut csv_buf = Vec::new();
    report.write_csv(&mut csv_buf)?;
    let mut json_buf = Vec::new();
    report.write_json(&mut json_buf)?;
    let (accuracy, time) = curve_plots(&report);
    let mut out = Outputs::default();
    out.add("bench.csv", csv_buf);
    out.add("bench.json", json_buf);
    out.add("accuracy-vs-k.svg", accuracy);
    out.add("time-vs-k.svg", time);
    commit(out, &args.model.out)
}

fn cmd_check(args: &CheckArgs) -> Result<(), CliError> {
    let level = match args.level {
        Level::Fast => CheckLevel::Fast,
        Level::Full => CheckLevel::Full,
    };
    let results = run_checks(level)?;
    println!("{:<26} {:>12} {:>12}  {:<6} detail", "check", "value", "threshold", "result");
    for r in &results {
        println!(
            "{:<26} {:>12.3e} {:>12.3e}  {:<6} {}",
            r.name,
            r.value,
            r.threshold,
            if r.passed { "PASS" } else { "FAIL" },
            r.detail
        );
    }
    match results.iter().filter(|r| !r.passed).count() {
        0 => Ok(()),
        n => Err(CliError::CheckFailed(n)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Embed(a) => cmd_embed(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Check(a) => cmd_check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
