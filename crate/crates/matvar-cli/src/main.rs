//! `matvar` command-line front end.
//!
//! Exit codes: 0 success, 1 failed check or numerical failure, 2 usage or configuration error.

mod io;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use matvar::densities::{DistributionSpec, Support};
use matvar::hypergeom::{evaluate, hyperg_eigen, HypergeomSpec, TruncationPolicy};
use matvar::partitions::Partition;
use matvar::samplers::Sampler;
use matvar::verify::{check_mellin_1f1, check_mellin_2f1, run_suite, CheckOptions, CheckReport, Suite};
use matvar::zonal::{zonal_table, ZonalTable};
use serde::Serialize;

use crate::io::{num, Header};

#[derive(Debug)]
pub enum Failure {
    /// Bad arguments, unreadable input or parameters outside their domain.
    Usage(String),
    /// A check failed or a numerical routine could not deliver a value.
    Check(String),
}

impl From<matvar::Error> for Failure {
    fn from(e: matvar::Error) -> Self {
        use matvar::Error as E;
        match e {
            E::Domain { .. }
            | E::Dimension { .. }
            | E::NotSpd { .. }
            | E::Unsupported { .. }
            | E::Parse { .. }
            | E::Io { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "matvar",
    version,
    about = "Matrix-variate hypergeometric densities, zonal polynomials and identity checks"
)]
struct Cli {
    /// Directory of zonal tables written by `dump-tables`; they are loaded before any evaluation.
    #[arg(long, global = true, env = "MATVAR_TABLE_DIR")]
    table_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Log-density of a distribution at a list of points, as CSV.
    EvalDensity(EvalDensity),
    /// Hypergeometric function of a matrix argument.
    EvalHyperg(EvalHyperg),
    /// Zonal polynomials at a matrix argument.
    Zonal(ZonalArgs),
    /// Seeded draws from a distribution with an exact sampler, as CSV.
    Sample(SampleArgs),
    /// Runs a verification suite and writes a JSON report.
    Verify(VerifyArgs),
    /// Checks one Mellin-transform identity by quadrature (m = 1) or cone Monte Carlo (m = 2).
    MellinCheck(MellinArgs),
    /// Writes exact zonal coefficient tables as text.
    DumpTables(DumpArgs),
}

/// Overrides applied on top of the truncation policy found in the input.
#[derive(Args, Serialize, Clone, Default)]
struct Overrides {
    /// Largest zonal degree K.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    max_degree: Option<u32>,
    /// Relative size below which a degree counts as negligible.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    series_tol: Option<f64>,
    /// Disable Wynn acceleration of unconverged series.
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    no_accelerate: bool,
}

impl Overrides {
    fn apply(&self, p: &mut TruncationPolicy) {
        if let Some(k) = self.max_degree {
            p.max_degree = k;
        }
        if let Some(t) = self.series_tol {
            p.tolerance = t;
        }
        if self.no_accelerate {
            p.accelerate = false;
        }
    }
}

#[derive(Args, Serialize)]
struct EvalDensity {
    /// Distribution JSON, tagged by "family".
    #[arg(long)]
    spec: PathBuf,
    /// Points: JSON array of matrices, or text blocks separated by blank lines.
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
    /// Also write the density itself.
    #[arg(long)]
    exp: bool,
    #[command(flatten)]
    #[serde(flatten)]
    overrides: Overrides,
}

#[derive(Args, Serialize)]
struct EvalHyperg {
    /// JSON with "upper", "lower" and optional "truncation"; alternative to --upper/--lower.
    #[arg(long, conflicts_with_all = ["upper", "lower"])]
    spec: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    upper: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lower: Vec<f64>,
    /// Eigenvalues of the argument.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "matrix")]
    eigenvalues: Vec<f64>,
    /// Symmetric argument as text rows or a JSON array of rows.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Sum the zonal series directly, without transformations.
    #[arg(long)]
    raw: bool,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    overrides: Overrides,
}

#[derive(Args, Serialize)]
struct ZonalArgs {
    /// Partitions such as "(3,1)"; repeat or separate with ';'.
    #[arg(long, value_delimiter = ';', required_unless_present = "degree")]
    kappa: Vec<String>,
    /// Every partition of this degree with at most m parts.
    #[arg(long, conflicts_with = "kappa")]
    degree: Option<u32>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "matrix")]
    eigenvalues: Vec<f64>,
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct SampleArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    #[arg(long, default_value = "all", value_parser = parse_suite)]
    suite: Suite,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: matvar::Error| e.to_string())
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum MellinForm {
    Gauss,
    Confluent,
}

#[derive(Args, Serialize)]
struct MellinArgs {
    #[arg(long, value_enum)]
    form: MellinForm,
    #[arg(long)]
    alpha: f64,
    /// First upper parameter of the gauss form.
    #[arg(long, required_if_eq("form", "gauss"))]
    a: Option<f64>,
    #[arg(long)]
    b: f64,
    #[arg(long)]
    c: f64,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Monte-Carlo draws at m = 2.
    #[arg(long, default_value_t = 200_000)]
    draws: usize,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct DumpArgs {
    #[arg(long, default_value_t = 20)]
    max_degree: u32,
    /// Number of eigenvalues m; repeat or separate with ',' for several tables.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    max_parts: Vec<usize>,
    /// Defaults to the table directory.
    #[arg(long)]
    #[serde(skip)]
    out_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("matvar: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("matvar: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let (Some(dir), false) = (&cli.table_dir, matches!(cli.command, Command::DumpTables(_))) {
        io::preload_tables(dir)?;
    }
    match &cli.command {
        Command::EvalDensity(a) => eval_density(a, &cli.command),
        Command::EvalHyperg(a) => eval_hyperg(a, &cli.command),
        Command::Zonal(a) => zonal(a, &cli.command),
        Command::Sample(a) => sample(a, &cli.command),
        Command::Verify(a) => verify(a, &cli.command),
        Command::MellinCheck(a) => mellin(a, &cli.command),
        Command::DumpTables(a) => dump_tables(a, cli.table_dir.as_deref()),
    }
}

fn load_spec(path: &Path, overrides: Option<&Overrides>) -> Result<DistributionSpec, Failure> {
    let mut spec = DistributionSpec::from_json(&io::read(path)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    if let (Some(o), Some(p)) = (overrides, spec.truncation_mut()) {
        o.apply(p);
    }
    Ok(spec)
}

fn csv_writer(out: Option<&Path>, header: String) -> Result<csv::Writer<Box<dyn Write>>, Failure> {
    let mut sink = io::sink(out)?;
    sink.write_all(header.as_bytes())?;
    Ok(csv::Writer::from_writer(sink))
}

#[derive(Serialize)]
struct DensityConfig<'a> {
    #[serde(flatten)]
    command: &'a Command,
    distribution: &'a DistributionSpec,
}

fn eval_density(a: &EvalDensity, command: &Command) -> Result<(), Failure> {
    let spec = load_spec(&a.spec, Some(&a.overrides))?;
    let density = spec.build()?;
    let (rows, cols) = match density.support() {
        Support::Matrix { rows, cols } => (rows, cols),
        Support::Spd { dim } => (dim, dim),
    };
    let points = io::parse_points(&io::read(&a.points)?, rows, cols)?;
    let config = DensityConfig { command, distribution: &spec };
    let mut w = csv_writer(a.out.as_deref(), Header::new(None, &config).comment_line())?;
    let mut head = vec!["point", "ln_pdf"];
    if a.exp {
        head.push("pdf");
    }
    head.push("error");
    w.write_record(&head)?;
    let mut failures = 0;
    for (i, x) in points.iter().enumerate() {
        let mut rec = vec![i.to_string()];
        match density.ln_pdf(x) {
            Ok(v) => {
                rec.push(num(v));
                if a.exp {
                    rec.push(num(v.exp()));
                }
                rec.push(String::new());
            }
            Err(e) => {
                failures += 1;
                rec.push(String::new());
                if a.exp {
                    rec.push(String::new());
                }
                rec.push(e.to_string());
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    if failures > 0 {
        return Err(Failure::Check(format!("{failures} of {} points could not be evaluated", points.len())));
    }
    Ok(())
}

fn label<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

#[derive(Serialize)]
struct HypergConfig<'a> {
    #[serde(flatten)]
    command: &'a Command,
    hypergeom: &'a HypergeomSpec,
}

fn eval_hyperg(a: &EvalHyperg, command: &Command) -> Result<(), Failure> {
    let mut spec = match &a.spec {
        Some(p) => serde_json::from_str::<HypergeomSpec>(&io::read(p)?)
            .map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?,
        None => HypergeomSpec::new(a.upper.clone(), a.lower.clone()),
    };
    a.overrides.apply(&mut spec.truncation);
    spec.validate()?;
    let eig = io::parse_argument(&a.eigenvalues, a.matrix.as_deref())?;
    let (value, ln_abs, sign, report) = if a.raw {
        let v = hyperg_eigen(&spec, &eig)?;
        (v.value, v.value.abs().ln(), v.value.signum(), v.report)
    } else {
        let v = evaluate(&spec, &eig)?;
        (v.value.to_f64(), v.value.ln_abs, f64::from(v.value.sign), v.report)
    };
    let config = HypergConfig { command, hypergeom: &spec };
    let mut w = csv_writer(a.out.as_deref(), Header::new(None, &config).comment_line())?;
    w.write_record([
        "value",
        "ln_abs",
        "sign",
        "degrees_used",
        "terms",
        "estimated_error",
        "termination",
        "transform",
        "converged",
    ])?;
    w.write_record([
        num(value),
        num(ln_abs),
        num(sign),
        report.degrees_used.to_string(),
        report.terms.to_string(),
        num(report.estimated_error),
        label(&report.termination),
        label(&report.transform),
        report.converged.to_string(),
    ])?;
    w.flush()?;
    if !report.converged {
        return Err(Failure::Check("series did not converge".into()));
    }
    Ok(())
}

fn zonal(a: &ZonalArgs, command: &Command) -> Result<(), Failure> {
    let eig = io::parse_argument(&a.eigenvalues, a.matrix.as_deref())?;
    let m = eig.len();
    let kappas: Vec<Partition> = match a.degree {
        Some(k) => zonal_table(k, m)?.partitions(k)?.to_vec(),
        None => a.kappa.iter().map(|s| s.trim().parse::<Partition>()).collect::<Result<_, _>>()?,
    };
    let mut w = csv_writer(a.out.as_deref(), Header::new(None, command).comment_line())?;
    w.write_record(["kappa", "value"])?;
    for kappa in &kappas {
        w.write_record([kappa.to_string(), num(matvar::zonal::zonal_eval(kappa, &eig)?)])?;
    }
    w.flush()?;
    Ok(())
}

fn sample(a: &SampleArgs, command: &Command) -> Result<(), Failure> {
    let spec = load_spec(&a.spec, None)?;
    let draws = Sampler::from_spec(&spec)?.draw_many(a.n, a.seed)?;
    let config = DensityConfig { command, distribution: &spec };
    let mut w = csv_writer(a.out.as_deref(), Header::new(Some(a.seed), &config).comment_line())?;
    let (rows, cols) = draws.first().map_or((0, 0), |d| d.shape());
    let mut head = vec!["draw".to_string()];
    for r in 1..=rows {
        for c in 1..=cols {
            head.push(format!("x_{r}_{c}"));
        }
    }
    w.write_record(&head)?;
    for (i, d) in draws.iter().enumerate() {
        let mut rec = vec![i.to_string()];
        for r in 0..rows {
            for c in 0..cols {
                rec.push(num(d[(r, c)]));
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonReport<'a, C: Serialize, R: Serialize> {
    header: Header<'a, C>,
    #[serde(flatten)]
    report: R,
}

fn write_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), Failure> {
    let mut sink = io::sink(out)?;
    serde_json::to_writer_pretty(&mut sink, value).map_err(|e| Failure::Usage(e.to_string()))?;
    sink.write_all(b"\n")?;
    sink.flush()?;
    Ok(())
}

fn summarize(checks: &[CheckReport]) -> Result<(), Failure> {
    let failed: Vec<&CheckReport> = checks.iter().filter(|c| !c.pass).collect();
    eprintln!("{} checks, {} passed, {} failed", checks.len(), checks.len() - failed.len(), failed.len());
    for c in &failed {
        eprintln!(
            "FAIL {}: relative error {:e} > {:e}{}",
            c.name,
            c.relative_error,
            c.tolerance,
            c.note.as_deref().map(|n| format!(" ({n})")).unwrap_or_default()
        );
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("{} checks failed", failed.len())))
    }
}

fn verify(a: &VerifyArgs, command: &Command) -> Result<(), Failure> {
    let report = run_suite(a.suite, a.seed);
    write_json(a.out.as_deref(), &JsonReport { header: Header::new(Some(a.seed), command), report: &report })?;
    summarize(&report.checks)
}

fn mellin(a: &MellinArgs, command: &Command) -> Result<(), Failure> {
    let opts = CheckOptions { draws: a.draws, ..CheckOptions::default().with_seed(a.seed) };
    let report = match a.form {
        MellinForm::Gauss => check_mellin_2f1(a.alpha, a.a.unwrap_or_default(), a.b, a.c, a.m, &opts),
        MellinForm::Confluent => check_mellin_1f1(a.alpha, a.b, a.c, a.m, &opts),
    }?;
    #[derive(Serialize)]
    struct Checks<'a> {
        checks: [&'a CheckReport; 1],
    }
    write_json(
        a.out.as_deref(),
        &JsonReport { header: Header::new(Some(a.seed), command), report: Checks { checks: [&report] } },
    )?;
    summarize(std::slice::from_ref(&report))
}

fn dump_tables(a: &DumpArgs, table_dir: Option<&Path>) -> Result<(), Failure> {
    let dir = a
        .out_dir
        .as_deref()
        .or(table_dir)
        .ok_or_else(|| Failure::Usage("give --out-dir or set MATVAR_TABLE_DIR".into()))?;
    std::fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
    for &m in &a.max_parts {
        let table = ZonalTable::build(a.max_degree, m)?;
        let path = io::table_path(dir, m);
        std::fs::write(&path, table.dump()).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}
