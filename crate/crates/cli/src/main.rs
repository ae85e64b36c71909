//! `antilinear`: spectral data, functional models and complex Jacobi
//! parameters of symmetric anti-linear operators, plus the point-interaction
//! example.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numeric failure, 4 I/O error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use antilinear::delta::{self, QuadratureMode};
use antilinear::io::{self as files, CoefficientRow, JacobiFile, OperatorFile};
use antilinear::operator::ExtractOptions;
use antilinear::par::Execution;
use antilinear::sweep::{self, ExampleConfig, ExampleReport};
use antilinear::{
    build_model, gram_schmidt, recurrence_generate, tol, verify_model, AntiLinearOperator, ComplexPolynomial,
    JacobiParameters, SpectralData, C64,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

const MAX_SIZE: usize = 5000;
const MAX_QUADRATURE: usize = 100_000;
/// Agreement required between Lanczos and Gram-Schmidt.
const CROSS_CHECK_TOL: f64 = 1e-8;
/// Residual allowed in the model verification report.
const MODEL_TOL: f64 = 1e-10;

#[derive(Parser)]
#[command(name = "antilinear", version, about = "Spectral toolkit for symmetric anti-linear operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral data (nodes, weights, phases) of an operator file
    Extract(ExtractArgs),
    /// Jacobi parameters: Gram-Schmidt on spectral data, or Lanczos on an operator
    Tridiag(TridiagArgs),
    /// Functional model operator of spectral data, with a verification report
    Model(ModelArgs),
    /// Operator to spectral data to Jacobi parameters, compared against Lanczos
    Roundtrip(RoundtripArgs),
    /// Point-interaction example: closed forms against the numerical pipeline
    Example(ExampleArgs),
    /// Anti-orthogonal polynomials from spectral data, an operator or Jacobi parameters
    Polys(PolysArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Files {
    /// Input JSON file
    #[arg(long)]
    input: PathBuf,
    /// Output file; standard output when omitted
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct ExtractArgs {
    #[command(flatten)]
    files: Files,
    /// Relative gap separating eigenvalue clusters of |B|
    #[arg(long, default_value_t = tol::CLUSTER)]
    tol_cluster: f64,
}

#[derive(Args)]
struct TridiagArgs {
    #[command(flatten)]
    files: Files,
    /// Maximum number of diagonal coefficients; run to degeneracy by default
    #[arg(long)]
    coeffs: Option<usize>,
    /// Relative gap separating eigenvalue clusters of |B|
    #[arg(long, default_value_t = tol::CLUSTER)]
    tol_cluster: f64,
    /// Gram-Schmidt stop threshold, relative to the squared largest node
    #[arg(long, default_value_t = tol::DEGENERACY)]
    tol_degeneracy: f64,
}

#[derive(Args)]
struct ModelArgs {
    #[command(flatten)]
    files: Files,
}

#[derive(Args)]
struct RoundtripArgs {
    #[command(flatten)]
    files: Files,
    /// Relative gap separating eigenvalue clusters of |B|
    #[arg(long, default_value_t = tol::CLUSTER)]
    tol_cluster: f64,
    /// Gram-Schmidt stop threshold, relative to the squared largest node
    #[arg(long, default_value_t = tol::DEGENERACY)]
    tol_degeneracy: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Rule {
    /// Gauss-Legendre in the angle of s = 2 cos(phi)
    Angle,
    /// Gauss-Legendre directly on [0, 2]
    GaussLegendre,
}

#[derive(Args)]
struct ExampleArgs {
    /// Coupling as "re,im" or "re"
    #[arg(long, value_parser = parse_complex, default_value = "2", allow_hyphen_values = true)]
    omega: C64,
    /// Quadrature nodes M for the continuous part (at most 100000)
    #[arg(long, default_value_t = 4000)]
    quadrature: usize,
    /// Number of Jacobi coefficients to recover
    #[arg(long, default_value_t = 20)]
    coeffs: usize,
    /// Truncation size N for the resolvent check (at most 5000)
    #[arg(long, default_value_t = 2000)]
    size: usize,
    #[arg(long, value_enum, default_value_t = Rule::Angle)]
    rule: Rule,
    /// Gram-Schmidt stop threshold, relative to the squared largest node
    #[arg(long, default_value_t = tol::DEGENERACY)]
    tol_degeneracy: f64,
    /// Sample points of the density and phase curves
    #[arg(long, default_value_t = 401)]
    points: usize,
    /// Semicolon-separated couplings run in parallel, e.g. "0;1;2;1,1;0,3"
    #[arg(long, allow_hyphen_values = true)]
    sweep: Option<String>,
    /// Output directory
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct PolysArgs {
    #[command(flatten)]
    files: Files,
    /// Number of polynomials q_0, q_1, ...
    #[arg(long)]
    coeffs: Option<usize>,
    /// Relative gap separating eigenvalue clusters of |B|
    #[arg(long, default_value_t = tol::CLUSTER)]
    tol_cluster: f64,
    /// Gram-Schmidt stop threshold, relative to the squared largest node
    #[arg(long, default_value_t = tol::DEGENERACY)]
    tol_degeneracy: f64,
}

#[derive(Debug)]
enum Failure {
    Validation(String),
    Numeric(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Numeric(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Numeric(m) | Failure::Io(m) => m,
        }
    }
}

impl From<antilinear::Error> for Failure {
    fn from(e: antilinear::Error) -> Self {
        match e {
            antilinear::Error::Io(_) | antilinear::Error::Csv(_) => Failure::Io(e.to_string()),
            e if e.is_validation() => Failure::Validation(e.to_string()),
            e => Failure::Numeric(e.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

type Outcome<T> = std::result::Result<T, Failure>;

fn parse_complex(text: &str) -> std::result::Result<C64, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let number = |s: &str| s.parse::<f64>().ok().filter(|x| x.is_finite());
    let value = match parts.as_slice() {
        [re] => number(re).map(|re| C64::new(re, 0.0)),
        [re, im] => number(re).zip(number(im)).map(|(re, im)| C64::new(re, im)),
        _ => None,
    };
    value.ok_or_else(|| format!("expected \"re,im\" or \"re\", got {text:?}"))
}

fn check_range(name: &str, value: usize, lo: usize, hi: usize) -> Outcome<()> {
    if (lo..=hi).contains(&value) {
        Ok(())
    } else {
        Err(Failure::Validation(format!("{name} = {value} outside [{lo}, {hi}]")))
    }
}

fn check_tolerance(name: &str, value: f64) -> Outcome<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Failure::Validation(format!("{name} must be positive and finite, got {value}")))
    }
}

fn resolve(path: &Path) -> Option<PathBuf> {
    fs::canonicalize(path).ok().or_else(|| {
        let parent = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        Some(fs::canonicalize(parent).ok()?.join(path.file_name()?))
    })
}

fn check_distinct(input: &Path, outputs: &[&Path]) -> Outcome<()> {
    let input = resolve(input);
    for output in outputs {
        if input.is_some() && resolve(output) == input {
            return Err(Failure::Validation(format!("output {} would overwrite the input", output.display())));
        }
    }
    Ok(())
}

enum Input {
    Operator(AntiLinearOperator),
    Data(SpectralData),
    Jacobi(JacobiParameters),
}

fn read_input(path: &Path) -> Outcome<Input> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    let invalid = |e: serde_json::Error| Failure::Validation(format!("{}: {e}", path.display()));
    let object = value
        .as_object()
        .ok_or_else(|| Failure::Validation(format!("{}: expected a JSON object", path.display())))?;
    if object.contains_key("matrix") {
        let file: OperatorFile = serde_json::from_value(value).map_err(invalid)?;
        Ok(Input::Operator(file.to_operator()?))
    } else if object.contains_key("nodes") {
        let data: SpectralData = serde_json::from_value(value).map_err(invalid)?;
        data.ensure_valid()?;
        Ok(Input::Data(data))
    } else if object.contains_key("a") && object.contains_key("b") {
        let file: JacobiFile = serde_json::from_value(value).map_err(invalid)?;
        Ok(Input::Jacobi(file.params()?))
    } else {
        Err(Failure::Validation(format!(
            "{}: expected an operator (\"matrix\"), spectral data (\"nodes\") or Jacobi parameters (\"a\", \"b\")",
            path.display()
        )))
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Outcome<()> {
    fs::write(path, bytes).map_err(|e| io_failure(path, e))
}

/// Write to `path`, or to standard output when there is none.
fn emit(path: Option<&Path>, bytes: &[u8]) -> Outcome<()> {
    match path {
        Some(path) => write_file(path, bytes),
        None => std::io::stdout().write_all(bytes).map_err(|e| Failure::Io(e.to_string())),
    }
}

fn json<T: Serialize>(value: &T) -> Outcome<Vec<u8>> {
    Ok(files::to_json_string(value)?.into_bytes())
}

fn csv(write: impl FnOnce(&mut Vec<u8>) -> antilinear::Result<()>) -> Outcome<Vec<u8>> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(buf)
}

/// `data.json` → `data.<suffix>`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn extraction_options(tol_cluster: f64) -> ExtractOptions {
    ExtractOptions { tol_cluster, ..ExtractOptions::default() }
}

fn coefficient_rows(params: &JacobiParameters, reference: Option<&JacobiParameters>) -> Vec<CoefficientRow> {
    (0..params.len())
        .map(|n| {
            let a = params.a.get(n).copied();
            let error = reference.map_or(0.0, |r| {
                let da = a.zip(r.a.get(n)).map_or(0.0, |(x, y)| (x - y).abs());
                let db = r.b.get(n).map_or(f64::INFINITY, |y| (params.b[n] - y).norm());
                da.max(db)
            });
            CoefficientRow { n, a, b: params.b[n], error }
        })
        .collect()
}

fn cmd_extract(args: &ExtractArgs) -> Outcome<()> {
    let files = &args.files;
    check_tolerance("tol-cluster", args.tol_cluster)?;
    let Input::Operator(op) = read_input(&files.input)? else {
        return Err(Failure::Validation("extract expects an operator file".into()));
    };
    let data = op.extract_with(extraction_options(args.tol_cluster))?;
    let table = csv(|buf| files::write_spectral_csv(buf, &data, tol::PHASE))?;
    match files.format {
        Format::Csv => {
            check_distinct(&files.input, &files.output.iter().map(PathBuf::as_path).collect::<Vec<_>>())?;
            emit(files.output.as_deref(), &table)
        }
        Format::Json => {
            let Some(output) = &files.output else {
                return emit(None, &json(&data)?);
            };
            let table_path = sibling(output, "csv");
            check_distinct(&files.input, &[output, &table_path])?;
            write_file(output, &json(&data)?)?;
            write_file(&table_path, &table)
        }
    }
}

fn cmd_tridiag(args: &TridiagArgs) -> Outcome<()> {
    let files = &args.files;
    check_tolerance("tol-cluster", args.tol_cluster)?;
    check_tolerance("tol-degeneracy", args.tol_degeneracy)?;
    if let Some(k) = args.coeffs {
        check_range("coeffs", k, 1, MAX_SIZE)?;
    }
    check_distinct(&files.input, &files.output.iter().map(PathBuf::as_path).collect::<Vec<_>>())?;
    let (file, reference) = match read_input(&files.input)? {
        Input::Data(data) => {
            let n = args.coeffs.unwrap_or_else(|| data.model_dimension(tol::PHASE) + 1);
            let basis = gram_schmidt(&data, n, args.tol_degeneracy)?;
            (JacobiFile::new(&basis.params, Some(basis.termination)), None)
        }
        Input::Operator(op) => {
            let run = op.lanczos(args.coeffs.unwrap_or(op.dim()), tol::BREAKDOWN);
            let data = op.extract_with(extraction_options(args.tol_cluster))?;
            let basis = gram_schmidt(&data, run.params.len(), args.tol_degeneracy)?;
            let deviation = run.params.max_deviation(&basis.params);
            if !(deviation <= CROSS_CHECK_TOL) {
                return Err(Failure::Numeric(format!(
                    "Lanczos and Gram-Schmidt disagree: deviation {deviation:e} > {CROSS_CHECK_TOL:e}"
                )));
            }
            let mut file = JacobiFile::new(&run.params, Some(run.termination));
            file.cross_check = Some(deviation);
            (file, Some(basis.params))
        }
        Input::Jacobi(_) => return Err(Failure::Validation("tridiag expects spectral data or an operator".into())),
    };
    let bytes = match files.format {
        Format::Json => json(&file)?,
        Format::Csv => {
            let params = file.params()?;
            csv(|buf| files::write_coefficient_csv(buf, &coefficient_rows(&params, reference.as_ref())))?
        }
    };
    emit(files.output.as_deref(), &bytes)
}

fn cmd_model(args: &ModelArgs) -> Outcome<()> {
    let files = &args.files;
    if files.format == Format::Csv {
        return Err(Failure::Validation("model writes JSON only".into()));
    }
    let Input::Data(data) = read_input(&files.input)? else {
        return Err(Failure::Validation("model expects spectral data".into()));
    };
    let (op, space) = build_model(&data, tol::PHASE)?;
    let report = verify_model(&data)?;
    let operator = json(&OperatorFile::from_model(&op, &space))?;
    match &files.output {
        Some(output) => {
            let report_path = sibling(output, "report.json");
            check_distinct(&files.input, &[output, &report_path])?;
            write_file(output, &operator)?;
            write_file(&report_path, &json(&report)?)?;
        }
        None => {
            emit(None, &operator)?;
            eprint!("{}", files::to_json_string(&report)?);
        }
    }
    if report.passes(MODEL_TOL) {
        Ok(())
    } else {
        Err(Failure::Numeric(format!("model verification failed: {report:?}")))
    }
}

#[derive(Serialize)]
struct RoundtripReport {
    dimension: usize,
    nodes: usize,
    lanczos: JacobiFile,
    gram_schmidt: JacobiFile,
    max_deviation: f64,
    tolerance: f64,
    pass: bool,
}

fn cmd_roundtrip(args: &RoundtripArgs) -> Outcome<()> {
    let files = &args.files;
    check_tolerance("tol-cluster", args.tol_cluster)?;
    check_tolerance("tol-degeneracy", args.tol_degeneracy)?;
    if files.format == Format::Csv {
        return Err(Failure::Validation("roundtrip writes JSON only".into()));
    }
    check_distinct(&files.input, &files.output.iter().map(PathBuf::as_path).collect::<Vec<_>>())?;
    let op = match read_input(&files.input)? {
        Input::Operator(op) => op,
        Input::Jacobi(params) => AntiLinearOperator::from_jacobi(&params, params.len())?,
        Input::Data(_) => return Err(Failure::Validation("roundtrip expects an operator".into())),
    };
    let run = op.lanczos(op.dim(), tol::BREAKDOWN);
    let data = op.extract_with(extraction_options(args.tol_cluster))?;
    let basis = gram_schmidt(&data, op.dim() + 1, args.tol_degeneracy)?;
    let max_deviation = basis.params.max_deviation(&run.params);
    let pass = max_deviation <= CROSS_CHECK_TOL;
    let report = RoundtripReport {
        dimension: op.dim(),
        nodes: data.len(),
        lanczos: JacobiFile::new(&run.params, Some(run.termination)),
        gram_schmidt: JacobiFile::new(&basis.params, Some(basis.termination)),
        max_deviation,
        tolerance: CROSS_CHECK_TOL,
        pass,
    };
    emit(files.output.as_deref(), &json(&report)?)?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Numeric(format!("round trip deviation {max_deviation:e} > {CROSS_CHECK_TOL:e}")))
    }
}

fn write_example(dir: &Path, report: &ExampleReport, points: usize) -> Outcome<()> {
    fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    let omega = report.config.omega;
    write_file(&dir.join("report.json"), &json(report)?)?;
    let density = delta::density_curve(omega, points);
    write_file(&dir.join("density.csv"), &csv(|buf| files::write_density_csv(buf, &density))?)?;
    let phase = delta::phase_curve(omega, points);
    write_file(&dir.join("phase.csv"), &csv(|buf| files::write_phase_csv(buf, &phase))?)?;
    write_file(&dir.join("coefficients.csv"), &csv(|buf| files::write_coefficient_csv(buf, &report.coefficients))?)
}

#[derive(Serialize)]
struct SweepEntry {
    omega: C64,
    directory: String,
    coefficient_error: f64,
    moment_error: f64,
}

fn cmd_example(args: &ExampleArgs) -> Outcome<()> {
    check_range("quadrature", args.quadrature, 2, MAX_QUADRATURE)?;
    check_range("size", args.size, 2, MAX_SIZE)?;
    check_range("coeffs", args.coeffs, 1, MAX_SIZE)?;
    check_range("points", args.points, 2, MAX_QUADRATURE)?;
    check_tolerance("tol-degeneracy", args.tol_degeneracy)?;
    let config = |omega| ExampleConfig {
        omega,
        quadrature: args.quadrature,
        coeffs: args.coeffs,
        size: args.size,
        mode: match args.rule {
            Rule::Angle => QuadratureMode::ChebyshevAngle,
            Rule::GaussLegendre => QuadratureMode::GaussLegendre,
        },
        tol_degeneracy: args.tol_degeneracy,
    };

    let Some(list) = &args.sweep else {
        let report = sweep::run_example(&config(args.omega), Execution::Sequential)?;
        write_example(&args.output, &report, args.points)?;
        println!(
            "omega = {} {}: coefficient error {:.3e}, moment error {:.3e}",
            report.config.omega.re, report.config.omega.im, report.coefficient_error, report.moment_error
        );
        return Ok(());
    };

    let omegas = list
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(parse_complex)
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(Failure::Validation)?;
    if omegas.is_empty() {
        return Err(Failure::Validation("--sweep needs at least one coupling".into()));
    }
    let configs: Vec<ExampleConfig> = omegas.iter().map(|&w| config(w)).collect();
    let reports = sweep::example_sweep(&configs, Execution::Parallel);
    let mut summary = Vec::new();
    for (k, report) in reports.into_iter().enumerate() {
        let report = report?;
        let name = format!("omega-{k:03}");
        write_example(&args.output.join(&name), &report, args.points)?;
        summary.push(SweepEntry {
            omega: report.config.omega,
            directory: name,
            coefficient_error: report.coefficient_error,
            moment_error: report.moment_error,
        });
    }
    write_file(&args.output.join("summary.json"), &json(&summary)?)?;
    println!("{} couplings written to {}", summary.len(), args.output.display());
    Ok(())
}

fn cmd_polys(args: &PolysArgs) -> Outcome<()> {
    let files = &args.files;
    check_tolerance("tol-cluster", args.tol_cluster)?;
    check_tolerance("tol-degeneracy", args.tol_degeneracy)?;
    if let Some(k) = args.coeffs {
        check_range("coeffs", k, 1, MAX_SIZE)?;
    }
    check_distinct(&files.input, &files.output.iter().map(PathBuf::as_path).collect::<Vec<_>>())?;
    let from_data = |data: &SpectralData| -> Outcome<Vec<ComplexPolynomial>> {
        let n = args.coeffs.unwrap_or_else(|| data.model_dimension(tol::PHASE) + 1);
        Ok(gram_schmidt(data, n, args.tol_degeneracy)?.polynomials)
    };
    let polys = match read_input(&files.input)? {
        Input::Data(data) => from_data(&data)?,
        Input::Operator(op) => from_data(&op.extract_with(extraction_options(args.tol_cluster))?)?,
        Input::Jacobi(params) => {
            let available = params.a.len().min(params.b.len());
            let n = args.coeffs.map_or(available, |k| k - 1);
            recurrence_generate(&params, n)?
        }
    };
    let bytes = match files.format {
        Format::Json => json(&polys)?,
        Format::Csv => {
            let mut text = String::from("n,k,re,im\n");
            for (n, q) in polys.iter().enumerate() {
                for (k, c) in q.coeffs().iter().enumerate() {
                    let (re, im) = (files::format_float(c.re), files::format_float(c.im));
                    text.push_str(&format!("{n},{k},{re},{im}\n"));
                }
            }
            text.into_bytes()
        }
    };
    emit(files.output.as_deref(), &bytes)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Extract(args) => cmd_extract(args),
        Command::Tridiag(args) => cmd_tridiag(args),
        Command::Model(args) => cmd_model(args),
        Command::Roundtrip(args) => cmd_roundtrip(args),
        Command::Example(args) => cmd_example(args),
        Command::Polys(args) => cmd_polys(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
