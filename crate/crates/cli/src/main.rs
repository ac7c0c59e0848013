use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use torsionscope::complex::{build_cech, build_filtration, build_rips, Filtration, Flavor, SimplicialComplex};
use torsionscope::datasets;
use torsionscope::field::FieldSpec;
use torsionscope::homology::{field_homology, integer_homology};
use torsionscope::metric::{check_norm_axioms, MetricSpec, PointCloud, FORMAT_VERSION};
use torsionscope::obstruction::{capture_obstruction, rips_representability, verify_vanishing};
use torsionscope::persistence::{compare_barcodes, persistent_homology_verbose, Barcode};
use torsionscope::prime_guard::{bad_primes_for_filtration, certify_good_prime};
use torsionscope::snf::{smith_normal_form, IntegerMatrix};
use torsionscope::Error;

const THREADS_VAR: &str = "TORSIONSCOPE_THREADS";

#[derive(Parser)]
#[command(name = "torsionscope", version, about = "Exact homology, bad primes and persistence for Rips and Čech filtrations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a Rips or Čech complex (--eps) or filtration (--scales) from a point cloud.
    Build(BuildArgs),
    /// Integer homology of a complex, or its dimension over a field.
    Homology(HomologyArgs),
    /// Smith normal form of an integer matrix.
    Snf(SnfArgs),
    /// Bad primes of a filtration, or a certificate for one prime.
    Primes(PrimesArgs),
    /// Persistence barcode of a filtration over Q or Z/p.
    Persist(PersistArgs),
    /// Compare two barcodes; exits 3 when they differ.
    Compare(CompareArgs),
    /// Empty-simplex obstructions and vanishing checks.
    Obstruct(ObstructArgs),
    /// Write a reference complex, filtration or point cloud.
    Generate(GenerateArgs),
    /// Sampled check of the norm axioms for a metric.
    Axioms(AxiomsArgs),
}

#[derive(Args)]
struct Io {
    /// Input JSON file.
    #[arg(long = "in")]
    input: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    io: Io,
    #[arg(long, default_value = "rips")]
    flavor: String,
    #[arg(long, conflicts_with = "scales")]
    eps: Option<f64>,
    /// Comma-separated ascending scales.
    #[arg(long, value_delimiter = ',')]
    scales: Vec<f64>,
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
    /// Homology degree of interest; builds to dimension k + 1 and overrides --max-dim.
    #[arg(long)]
    skeleton: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldArg {
    Q,
    Zp,
}

#[derive(Args)]
struct FieldOpts {
    #[arg(long, value_enum)]
    field: Option<FieldArg>,
    #[arg(long)]
    prime: Option<u64>,
}

impl FieldOpts {
    fn spec(&self, default: Option<FieldArg>) -> Result<Option<FieldSpec>, CliError> {
        match (self.field.or(default), self.prime) {
            (None, None) => Ok(None),
            (Some(FieldArg::Q), None) => Ok(Some(FieldSpec::Rationals)),
            (Some(FieldArg::Q), Some(_)) => Err(CliError::Usage("--prime only applies to --field zp".into())),
            (Some(FieldArg::Zp) | None, Some(p)) => Ok(Some(FieldSpec::prime(p)?)),
            (Some(FieldArg::Zp), None) => Err(CliError::Usage("--field zp requires --prime".into())),
        }
    }
}

#[derive(Args)]
struct HomologyArgs {
    #[command(flatten)]
    io: Io,
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    field: FieldOpts,
}

#[derive(Args)]
struct SnfArgs {
    #[command(flatten)]
    io: Io,
    /// Also emit unimodular U and V with U A V = D.
    #[arg(long)]
    transforms: bool,
}

#[derive(Args)]
struct PrimesArgs {
    #[command(flatten)]
    io: Io,
    /// Highest homology degree considered.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Certify this prime instead of listing bad primes.
    #[arg(long)]
    certify: Option<u64>,
}

#[derive(Args)]
struct PersistArgs {
    #[command(flatten)]
    io: Io,
    #[command(flatten)]
    field: FieldOpts,
    /// Highest homology degree reported.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Plain text, one interval per line.
    #[arg(long)]
    text: bool,
    /// Keep zero-length intervals in a separate list.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct CompareArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ObstructArgs {
    #[command(flatten)]
    io: Io,
    /// Ambient dimension: report empty simplices in dimensions >= n + 1.
    #[arg(long)]
    n: Option<usize>,
    /// Check vanishing of H_k for n < k <= --k on every stage of a filtration.
    #[arg(long, requires_all = ["n", "k"])]
    vanishing: bool,
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct GenerateArgs {
    /// rp2-triangulation, klein-triangulation, torus-triangulation,
    /// rp2-filtration, klein-filtration, circle, rp2-sample, klein-sample or random-cloud.
    #[arg(long)]
    dataset: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    points: usize,
    #[arg(long, default_value_t = 1.0)]
    circumference: f64,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    #[arg(long, default_value_t = 4)]
    grid: usize,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct AxiomsArgs {
    /// Metric JSON, or a point cloud whose metric is checked.
    #[command(flatten)]
    io: Io,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum CliError {
    Usage(String),
    Io(String),
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(e) if !e.is_parse_error() => 1,
            _ => 2,
        }
    }

    fn to_json(&self) -> Value {
        let (kind, message) = match self {
            CliError::Usage(m) => ("usage", m.clone()),
            CliError::Io(m) => ("io", m.clone()),
            CliError::Domain(e) => (e.kind(), e.to_string()),
        };
        json!({ "error": kind, "message": message })
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Domain(Error::Json(e)))
}

/// A filtration file, or a plain complex read as a single stage at scale 0.
fn read_filtration(path: &Path) -> CliResult<Filtration> {
    let value: Value = read_json(path)?;
    if value.get("births").is_some() {
        return serde_json::from_value(value).map_err(|e| CliError::Domain(Error::Json(e)));
    }
    let complex: SimplicialComplex = serde_json::from_value(value).map_err(|e| CliError::Domain(Error::Json(e)))?;
    let births = complex.iter().map(|s| (s.clone(), 0.0)).collect();
    Ok(Filtration::new(complex, births, vec![0.0])?)
}

fn to_value<T: Serialize>(value: &T) -> CliResult<Value> {
    serde_json::to_value(value).map_err(|e| CliError::Domain(Error::Json(e)))
}

/// Serializes with a `format_version` field and a trailing newline.
fn render<T: Serialize>(value: &T) -> CliResult<String> {
    let mut value = to_value(value)?;
    if let Value::Object(map) = &mut value {
        map.entry("format_version").or_insert(json!(FORMAT_VERSION));
    }
    let mut text = serde_json::to_string_pretty(&value).map_err(|e| CliError::Domain(Error::Json(e)))?;
    text.push('\n');
    Ok(text)
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn build(args: BuildArgs) -> CliResult<String> {
    let cloud: PointCloud = read_json(&args.io.input)?;
    let flavor: Flavor = args.flavor.parse()?;
    let max_dim = args.skeleton.map_or(args.max_dim, |k| k + 1);
    match (args.eps, args.scales.is_empty()) {
        (Some(eps), true) => {
            let complex = match flavor {
                Flavor::Rips => build_rips(&cloud, eps, max_dim)?,
                Flavor::Cech => build_cech(&cloud, eps, max_dim)?,
            };
            render(&complex)
        }
        (None, false) => render(&build_filtration(&cloud, &args.scales, max_dim, flavor)?),
        _ => Err(CliError::Usage("build needs exactly one of --eps or --scales".into())),
    }
}

fn homology(args: HomologyArgs) -> CliResult<String> {
    let complex: SimplicialComplex = read_json(&args.io.input)?;
    match args.field.spec(None)? {
        None => {
            let mut value = to_value(&integer_homology(&complex, args.k)?)?;
            value["k"] = json!(args.k);
            render(&value)
        }
        Some(field) => render(&json!({ "k": args.k, "field": field, "dim": field_homology(&complex, args.k, field)? })),
    }
}

fn snf(args: SnfArgs) -> CliResult<String> {
    let matrix: IntegerMatrix = read_json(&args.io.input)?;
    render(&smith_normal_form(&matrix, args.transforms))
}

fn primes(args: PrimesArgs) -> CliResult<String> {
    let filtration = read_filtration(&args.io.input)?;
    match args.certify {
        Some(p) => render(&certify_good_prime(&filtration, p, args.k)?),
        None => render(&bad_primes_for_filtration(&filtration, args.k)?),
    }
}

fn persist(args: &PersistArgs) -> CliResult<String> {
    let filtration = read_filtration(&args.io.input)?;
    let field = args.field.spec(Some(FieldArg::Q))?.expect("defaulted");
    let out = persistent_homology_verbose(&filtration, field, args.k)?;
    if args.text {
        let mut text = out.barcode.to_text();
        if args.verbose {
            for line in Barcode::new(out.zero_length).to_text().lines() {
                text.push_str(&format!("{line} zero-length\n"));
            }
        }
        return Ok(text);
    }
    let mut value = to_value(&out.barcode)?;
    value["field"] = to_value(&field)?;
    if args.verbose {
        value["zero_length"] = to_value(&out.zero_length)?;
    }
    render(&value)
}

fn compare(args: &CompareArgs) -> CliResult<(String, bool)> {
    let a: Barcode = read_json(&args.a)?;
    let b: Barcode = read_json(&args.b)?;
    let diff = compare_barcodes(&a, &b);
    Ok((render(&diff)?, diff.equal))
}

fn obstruct(args: ObstructArgs) -> CliResult<String> {
    if args.vanishing {
        let filtration = read_filtration(&args.io.input)?;
        let (n, k) = (args.n.expect("required by clap"), args.k.expect("required by clap"));
        return render(&verify_vanishing(&filtration, n, k)?);
    }
    let complex: SimplicialComplex = read_json(&args.io.input)?;
    match args.n {
        Some(n) => render(&capture_obstruction(&complex, n)?),
        None => render(&rips_representability(&complex)?),
    }
}

fn generate(args: GenerateArgs) -> CliResult<String> {
    match args.dataset.as_str() {
        "rp2-triangulation" => render(&datasets::rp2_triangulation().complex),
        "klein-triangulation" => render(&datasets::klein_triangulation().complex),
        "torus-triangulation" => render(&datasets::torus_triangulation().complex),
        "rp2-filtration" => render(&Filtration::simplexwise(datasets::rp2_triangulation().complex)),
        "klein-filtration" => render(&Filtration::simplexwise(datasets::klein_triangulation().complex)),
        "circle" => render(&datasets::circle_sample(args.points, args.circumference)?),
        "rp2-sample" => render(&datasets::rp2_dense_sample(args.delta)?),
        "klein-sample" => render(&datasets::klein_sample(args.grid)?),
        "random-cloud" => render(&datasets::random_cloud(args.points, args.dim, args.seed, MetricSpec::euclidean())?),
        other => Err(CliError::Usage(format!("unknown dataset `{other}`"))),
    }
}

fn axioms(args: AxiomsArgs) -> CliResult<String> {
    let value: Value = read_json(&args.io.input)?;
    let (metric, cloud_dim) = if value.get("points").is_some() {
        let cloud: PointCloud = serde_json::from_value(value).map_err(|e| CliError::Domain(Error::Json(e)))?;
        (cloud.metric().clone(), Some(cloud.ambient_dim()))
    } else {
        (serde_json::from_value::<MetricSpec>(value).map_err(|e| CliError::Domain(Error::Json(e)))?, None)
    };
    let dim = args.dim.or(cloud_dim).unwrap_or(2);
    let report = check_norm_axioms(&metric, dim, args.samples, args.seed)?;
    let mut value = to_value(&report)?;
    value["passed"] = json!(report.passed());
    render(&value)
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size thread pool: {e}")))
}

fn run(cli: Cli) -> CliResult<u8> {
    configure_threads()?;
    let (text, out, code) = match cli.command {
        Command::Build(a) => {
            let out = a.io.out.clone();
            (build(a)?, out, 0)
        }
        Command::Homology(a) => {
            let out = a.io.out.clone();
            (homology(a)?, out, 0)
        }
        Command::Snf(a) => {
            let out = a.io.out.clone();
            (snf(a)?, out, 0)
        }
        Command::Primes(a) => {
            let out = a.io.out.clone();
            (primes(a)?, out, 0)
        }
        Command::Persist(a) => (persist(&a)?, a.io.out, 0),
        Command::Compare(a) => {
            let (text, equal) = compare(&a)?;
            (text, a.out, if equal { 0 } else { 3 })
        }
        Command::Obstruct(a) => {
            let out = a.io.out.clone();
            (obstruct(a)?, out, 0)
        }
        Command::Generate(a) => {
            let out = a.out.clone();
            (generate(a)?, out, 0)
        }
        Command::Axioms(a) => {
            let out = a.io.out.clone();
            (axioms(a)?, out, 0)
        }
    };
    emit(out.as_deref(), &text)?;
    Ok(code)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
