//! Command-line front end: argument parsing, report rendering and exit codes.
//!
//! [`run`] does all the work and returns what should be printed, so the
//! binary is a thin wrapper and every command can be exercised in-process.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use schur_ginibre::ginibre::{
    charpoly_product_terms, schur_average_closed, schur_average_pfaffian_embedded,
    trace_moment_of_power, GinibreContext, PfaffianRoute,
};
use schur_ginibre::montecarlo::{density_histogram_check, DensityGrid, DensityReport, MIN_SAMPLES};
use schur_ginibre::partitions::{enumerate, hooks_of, Partition};
use schur_ginibre::pfaffian::{
    build_epsilon_inverse, consecutive_pair_pfaffian_sign, dn_polynomial, sub_pfaffian,
};
use schur_ginibre::report::{run_verification, VerificationPlan, VerificationReport};
use schur_ginibre::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ROUTE_DISAGREEMENT: i32 = 2;
pub const EXIT_STATISTICAL_FAILURE: i32 = 3;

/// Environment variable capping the number of sampling threads.
pub const THREADS_ENV: &str = "SCHUR_GINIBRE_THREADS";

pub const MAX_TABLE_WEIGHT: usize = 40;
pub const MAX_EXPAND_ORDER: usize = 40;

#[derive(Debug, Parser)]
#[command(
    name = "schur-ginibre",
    version,
    about = "Schur-function averages over the real Ginibre ensemble"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format; mc-verify and density default to json, the rest to text.
    #[arg(long, global = true, value_enum)]
    pub output: Option<Format>,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Closed,
    Pfaffian,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact average of one Schur function.
    Avg(AvgArgs),
    /// Exact averages over all partitions up to a weight.
    Table(TableArgs),
    /// Monte Carlo check of the closed forms.
    McVerify(McVerifyArgs),
    /// Sub-Pfaffians of the staircase matrix, or the Pfaffian route for one partition.
    Pfaffian(PfaffianArgs),
    /// Hook expansion of a power-sum average, or the averaged characteristic-polynomial product.
    Expand(ExpandArgs),
    /// Histogram of sampled eigenvalues against the exact density.
    Density(DensityArgs),
}

#[derive(Debug, Args)]
pub struct AvgArgs {
    #[arg(long, value_parser = parse_partition)]
    pub partition: Partition,
    #[arg(long)]
    pub dim: usize,
    #[arg(long, value_enum, default_value_t = Method::Closed)]
    pub method: Method,
    /// Even embedding size for the Pfaffian route.
    #[arg(long)]
    pub embed_dim: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub max_weight: usize,
    #[arg(long)]
    pub dim: usize,
}

#[derive(Debug, Args)]
pub struct McVerifyArgs {
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Comma-separated dimensions replacing the default set.
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    /// Shifts every target; for checking that failures are reported.
    #[arg(long, hide = true, default_value_t = 0.0)]
    pub inject_offset: f64,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["partition", "rows"])))]
pub struct PfaffianArgs {
    #[arg(long, value_parser = parse_partition)]
    pub partition: Option<Partition>,
    /// 1-based increasing row indices into the staircase matrix of size --dim.
    #[arg(long, value_delimiter = ',')]
    pub rows: Option<Vec<usize>>,
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub embed_dim: Option<usize>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("series").required(true).args(["power_sum", "charpoly"])))]
pub struct ExpandArgs {
    /// Expand the average of Tr H^n over hooks.
    #[arg(long, value_name = "N")]
    pub power_sum: Option<usize>,
    /// Expand the average of a product of n characteristic polynomials.
    #[arg(long, value_name = "N")]
    pub charpoly: Option<usize>,
    #[arg(long)]
    pub dim: usize,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

fn parse_partition(s: &str) -> Result<Partition, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// What a finished invocation prints and returns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Response {
    fn usage(msg: impl Into<String>) -> Self {
        let mut stderr = msg.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Self {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr,
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Response
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                Response {
                    code: EXIT_OK,
                    stdout: e.to_string(),
                    stderr: String::new(),
                }
            }
            _ => Response::usage(e.render().to_string()),
        },
    }
}

/// Sizes the global thread pool from [`THREADS_ENV`] when it is set.
pub fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))?;
    // a pool built earlier in the process stays in place
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

/// A rendered report plus the exit code it implies.
struct Rendered {
    code: i32,
    body: String,
}

pub fn execute(cli: &Cli) -> Response {
    let result = match &cli.command {
        Command::Avg(a) => cmd_avg(a, cli.output.unwrap_or(Format::Text)),
        Command::Table(a) => cmd_table(a, cli.output.unwrap_or(Format::Text)),
        Command::McVerify(a) => cmd_mc_verify(a, cli.output.unwrap_or(Format::Json)),
        Command::Pfaffian(a) => cmd_pfaffian(a, cli.output.unwrap_or(Format::Text)),
        Command::Expand(a) => cmd_expand(a, cli.output.unwrap_or(Format::Text)),
        Command::Density(a) => cmd_density(a, cli.output.unwrap_or(Format::Json)),
    };
    let rendered = match result {
        Ok(r) => r,
        Err(msg) => return Response::usage(format!("error: {msg}")),
    };
    match &cli.out {
        Some(path) => match std::fs::write(path, &rendered.body) {
            Ok(()) => Response {
                code: rendered.code,
                stdout: String::new(),
                stderr: String::new(),
            },
            Err(e) => Response::usage(format!("error: cannot write {}: {e}", path.display())),
        },
        None => Response {
            code: rendered.code,
            stdout: rendered.body,
            stderr: String::new(),
        },
    }
}

fn json<T: Serialize>(value: &T) -> Result<String, String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    s.push('\n');
    Ok(s)
}

fn csv_rows<T: Serialize>(rows: &[T]) -> Result<String, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| e.to_string())?;
    }
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    String::from_utf8(bytes).map_err(|e| e.to_string())
}

fn check_dim(dim: usize) -> Result<(), String> {
    if dim == 0 {
        Err("--dim must be at least 1".into())
    } else {
        Ok(())
    }
}

fn check_samples(samples: u64) -> Result<(), String> {
    if samples < MIN_SAMPLES {
        Err(format!(
            "--samples must be at least {MIN_SAMPLES}, got {samples}"
        ))
    } else {
        Ok(())
    }
}

// ---- avg -------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvgReport {
    pub partition: Partition,
    pub dim: usize,
    pub method: Method,
    /// Decimal string.
    pub value: String,
    pub closed: Option<String>,
    pub pfaffian: Option<String>,
    pub embed_dim: Option<usize>,
    pub routes_agree: Option<bool>,
    pub note: Option<String>,
}

impl AvgReport {
    fn text(&self) -> String {
        let mut s = format!("<s_({})>_{} = {}\n", self.partition, self.dim, self.value);
        if let Some(c) = &self.closed {
            let _ = writeln!(s, "closed:   {c}");
        }
        if let Some(p) = &self.pfaffian {
            match self.embed_dim {
                Some(m) => {
                    let _ = writeln!(s, "pfaffian: {p} (M = {m})");
                }
                None => {
                    let _ = writeln!(s, "pfaffian: {p}");
                }
            }
        }
        if let Some(agree) = self.routes_agree {
            let _ = writeln!(s, "routes {}", if agree { "agree" } else { "DISAGREE" });
        }
        if let Some(n) = &self.note {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}

#[derive(Serialize)]
struct AvgRow<'a> {
    partition: String,
    dim: usize,
    method: Method,
    value: &'a str,
    closed: Option<&'a str>,
    pfaffian: Option<&'a str>,
}

pub fn avg_report(args: &AvgArgs) -> Result<AvgReport, String> {
    check_dim(args.dim)?;
    let lambda = &args.partition;
    let too_long = lambda.len() > args.dim;
    let closed = matches!(args.method, Method::Closed | Method::Both)
        .then(|| schur_average_closed(lambda, args.dim).value);
    let mut embed_dim = None;
    let pfaffian = if matches!(args.method, Method::Pfaffian | Method::Both) {
        if too_long {
            Some(BigInt::zero())
        } else {
            let context = match args.embed_dim {
                Some(m) => GinibreContext::with_embedding(lambda, args.dim, m),
                None => Ok(GinibreContext::for_partition(lambda, args.dim)),
            }
            .map_err(|e| e.to_string())?;
            embed_dim = Some(context.embed_dim);
            Some(
                schur_average_pfaffian_embedded(lambda, args.dim, Some(context.embed_dim))
                    .map_err(|e| e.to_string())?
                    .value,
            )
        }
    } else {
        None
    };
    let routes_agree = match (&closed, &pfaffian) {
        (Some(c), Some(p)) => Some(c == p),
        _ => None,
    };
    let value = closed
        .clone()
        .or_else(|| pfaffian.clone())
        .expect("one route ran");
    Ok(AvgReport {
        partition: lambda.clone(),
        dim: args.dim,
        method: args.method,
        value: value.to_string(),
        closed: closed.map(|v| v.to_string()),
        pfaffian: pfaffian.map(|v| v.to_string()),
        embed_dim,
        routes_agree,
        note: too_long.then(|| format!("partition has more than {} parts", args.dim)),
    })
}

fn cmd_avg(args: &AvgArgs, format: Format) -> Result<Rendered, String> {
    let report = avg_report(args)?;
    let code = if report.routes_agree == Some(false) {
        EXIT_ROUTE_DISAGREEMENT
    } else {
        EXIT_OK
    };
    let body = match format {
        Format::Json => json(&report)?,
        Format::Text => report.text(),
        Format::Csv => csv_rows(&[AvgRow {
            partition: report.partition.to_string(),
            dim: report.dim,
            method: report.method,
            value: &report.value,
            closed: report.closed.as_deref(),
            pfaffian: report.pfaffian.as_deref(),
        }])?,
    };
    Ok(Rendered { code, body })
}

// ---- table -----------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub partition: Partition,
    pub weight: usize,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableReport {
    pub dim: usize,
    pub max_weight: usize,
    pub rows: Vec<TableRow>,
}

/// Rows ordered by weight, then decreasing lexicographically.
pub fn table_report(args: &TableArgs) -> Result<TableReport, String> {
    check_dim(args.dim)?;
    if args.max_weight > MAX_TABLE_WEIGHT {
        return Err(format!(
            "--max-weight must be at most {MAX_TABLE_WEIGHT}, got {}",
            args.max_weight
        ));
    }
    let mut partitions: Vec<Partition> =
        enumerate(args.max_weight, args.dim, args.max_weight).collect();
    partitions.sort_by_key(Partition::weight);
    let rows = partitions
        .into_iter()
        .map(|p| TableRow {
            value: schur_average_closed(&p, args.dim).value.to_string(),
            weight: p.weight(),
            partition: p,
        })
        .collect();
    Ok(TableReport {
        dim: args.dim,
        max_weight: args.max_weight,
        rows,
    })
}

fn cmd_table(args: &TableArgs, format: Format) -> Result<Rendered, String> {
    let report = table_report(args)?;
    let body = match format {
        Format::Json => json(&report)?,
        Format::Csv => csv_rows(&report.rows)?,
        Format::Text => {
            let width = report
                .rows
                .iter()
                .map(|r| r.partition.to_string().len())
                .max()
                .unwrap_or(1)
                .max("partition".len());
            let mut s = format!("{:<width$}  weight  value\n", "partition");
            for r in &report.rows {
                let _ = writeln!(
                    s,
                    "{:<width$}  {:>6}  {}",
                    r.partition.to_string(),
                    r.weight,
                    r.value
                );
            }
            s
        }
    };
    Ok(Rendered {
        code: EXIT_OK,
        body,
    })
}

// ---- mc-verify -------------------------------------------------------------

pub fn verification_report(args: &McVerifyArgs) -> Result<VerificationReport, String> {
    check_samples(args.samples)?;
    let mut plan = VerificationPlan {
        target_offset: args.inject_offset,
        ..VerificationPlan::default()
    };
    if let Some(dims) = &args.dims {
        if dims.is_empty() || dims.contains(&0) {
            return Err("--dims entries must be at least 1".into());
        }
        plan.dims = dims.clone();
    }
    run_verification(&plan, args.samples, args.seed).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct EntryRow<'a> {
    statistic: &'a str,
    dim: usize,
    target: f64,
    estimate: f64,
    std_error: f64,
    z_score: f64,
    n_samples: u64,
    seed: u64,
    passed: bool,
}

fn cmd_mc_verify(args: &McVerifyArgs, format: Format) -> Result<Rendered, String> {
    let report = verification_report(args)?;
    let code = if report.all_passed {
        EXIT_OK
    } else {
        EXIT_STATISTICAL_FAILURE
    };
    let body = match format {
        Format::Json => json(&report)?,
        Format::Csv => csv_rows(
            &report
                .entries
                .iter()
                .map(|e| EntryRow {
                    statistic: &e.statistic,
                    dim: e.dim,
                    target: e.target,
                    estimate: e.estimate,
                    std_error: e.std_error,
                    z_score: e.z_score,
                    n_samples: e.n_samples,
                    seed: e.seed,
                    passed: e.passed,
                })
                .collect::<Vec<_>>(),
        )?,
        Format::Text => {
            let mut s = String::new();
            for e in &report.entries {
                let _ = writeln!(
                    s,
                    "{} {:<22} N={:<2} target {:>12.6} estimate {:>12.6} ± {:<10.6} z {:+.2}",
                    if e.passed { "PASS" } else { "FAIL" },
                    e.statistic,
                    e.dim,
                    e.target,
                    e.estimate,
                    e.std_error,
                    e.z_score
                );
            }
            let _ = writeln!(
                s,
                "{} of {} statistics within {} standard errors (seed {}, {} samples)",
                report.entries.iter().filter(|e| e.passed).count(),
                report.entries.len(),
                report.threshold,
                report.seed,
                report.n_samples
            );
            s
        }
    };
    Ok(Rendered { code, body })
}

// ---- pfaffian --------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubPfaffianReport {
    pub embed_dim: usize,
    pub rows: Vec<usize>,
    pub pfaffian: i64,
    pub predicted: i64,
    /// Coefficient of the complementary monomial in `det(diag(x) + ε⁻¹)`.
    pub dn_coefficient: i64,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteReport {
    pub partition: Partition,
    pub dim: usize,
    pub embed_dim: usize,
    pub rows: Vec<usize>,
    pub sub_pfaffian: String,
    pub prefactor: String,
    pub normalization: String,
    pub value: String,
    pub closed: String,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PfaffianReport {
    Sub(SubPfaffianReport),
    Route(RouteReport),
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

pub fn pfaffian_report(args: &PfaffianArgs) -> Result<PfaffianReport, String> {
    if let Some(rows) = &args.rows {
        let m = args.dim;
        let inv =
            build_epsilon_inverse::<schur_ginibre::ExactScalar>(m).map_err(|e| e.to_string())?;
        let pf = sub_pfaffian(&inv, rows).map_err(|e| e.to_string())?;
        let pf = pf
            .to_integer()
            .to_i64()
            .filter(|_| pf.is_integer())
            .ok_or_else(|| format!("non-integer sub-Pfaffian {pf}"))?;
        let predicted = i64::from(consecutive_pair_pfaffian_sign(rows).map_err(|e| e.to_string())?);
        let complement: Vec<usize> = (1..=m).filter(|k| !rows.contains(k)).collect();
        let dn_coefficient = dn_polynomial(m)
            .map_err(|e| e.to_string())?
            .coefficient(&complement);
        return Ok(PfaffianReport::Sub(SubPfaffianReport {
            embed_dim: m,
            rows: rows.clone(),
            pfaffian: pf,
            predicted,
            dn_coefficient,
            agree: pf == predicted && pf * pf == dn_coefficient,
        }));
    }
    let lambda = args.partition.as_ref().expect("clap enforces one mode");
    check_dim(args.dim)?;
    let context = match args.embed_dim {
        Some(m) => GinibreContext::with_embedding(lambda, args.dim, m),
        None => Ok(GinibreContext::for_partition(lambda, args.dim)),
    }
    .map_err(|e| e.to_string())?;
    let route = PfaffianRoute::compute(lambda, context).map_err(|e| e.to_string())?;
    let empty = PfaffianRoute::compute(&Partition::empty(), context).map_err(|e| e.to_string())?;
    let value = schur_average_pfaffian_embedded(lambda, args.dim, Some(context.embed_dim))
        .map_err(|e| e.to_string())?
        .value;
    let closed = schur_average_closed(lambda, args.dim).value;
    Ok(PfaffianReport::Route(RouteReport {
        partition: lambda.clone(),
        dim: args.dim,
        embed_dim: context.embed_dim,
        rows: route.rows.clone(),
        sub_pfaffian: route.sub_pfaffian.to_string(),
        prefactor: route.prefactor.to_string(),
        normalization: empty.value().to_string(),
        agree: value == closed,
        value: value.to_string(),
        closed: closed.to_string(),
    }))
}

fn cmd_pfaffian(args: &PfaffianArgs, format: Format) -> Result<Rendered, String> {
    let report = pfaffian_report(args)?;
    let agree = match &report {
        PfaffianReport::Sub(r) => r.agree,
        PfaffianReport::Route(r) => r.agree,
    };
    let code = if agree {
        EXIT_OK
    } else {
        EXIT_ROUTE_DISAGREEMENT
    };
    let body = match (format, &report) {
        (Format::Json, _) => json(&report)?,
        (Format::Csv, PfaffianReport::Sub(r)) => {
            #[derive(Serialize)]
            struct Row {
                embed_dim: usize,
                rows: String,
                pfaffian: i64,
                predicted: i64,
                dn_coefficient: i64,
            }
            csv_rows(&[Row {
                embed_dim: r.embed_dim,
                rows: join(&r.rows),
                pfaffian: r.pfaffian,
                predicted: r.predicted,
                dn_coefficient: r.dn_coefficient,
            }])?
        }
        (Format::Csv, PfaffianReport::Route(r)) => {
            #[derive(Serialize)]
            struct Row<'a> {
                partition: String,
                dim: usize,
                embed_dim: usize,
                rows: String,
                sub_pfaffian: &'a str,
                value: &'a str,
                closed: &'a str,
            }
            csv_rows(&[Row {
                partition: r.partition.to_string(),
                dim: r.dim,
                embed_dim: r.embed_dim,
                rows: join(&r.rows),
                sub_pfaffian: &r.sub_pfaffian,
                value: &r.value,
                closed: &r.closed,
            }])?
        }
        (Format::Text, PfaffianReport::Sub(r)) => format!(
            "M = {}, rows {}\nPf = {}\npredicted {}\nD_M coefficient {}\n{}\n",
            r.embed_dim,
            join(&r.rows),
            r.pfaffian,
            r.predicted,
            r.dn_coefficient,
            if r.agree { "consistent" } else { "INCONSISTENT" }
        ),
        (Format::Text, PfaffianReport::Route(r)) => format!(
            "λ = ({}), N = {}, M = {}\nrows {}\nsub-Pfaffian {}\nprefactor {}\nnormalization {}\naverage {} (closed form {}{})\n",
            r.partition,
            r.dim,
            r.embed_dim,
            join(&r.rows),
            r.sub_pfaffian,
            r.prefactor,
            r.normalization,
            r.value,
            r.closed,
            if r.agree { "" } else { ", DISAGREE" }
        ),
    };
    Ok(Rendered { code, body })
}

// ---- expand ----------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HookTerm {
    pub partition: Partition,
    pub sign: i32,
    pub average: String,
    pub contribution: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerSumReport {
    pub power: usize,
    pub dim: usize,
    pub terms: Vec<HookTerm>,
    pub total: String,
    pub closed: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharpolyTermReport {
    pub lambda: Partition,
    pub coefficient: String,
    pub shape: Partition,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharpolyReport {
    pub factors: usize,
    pub dim: usize,
    pub terms: Vec<CharpolyTermReport>,
    pub polynomial: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExpandReport {
    PowerSum(PowerSumReport),
    Charpoly(CharpolyReport),
}

fn superscript(k: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    k.to_string()
        .bytes()
        .map(|b| DIGITS[usize::from(b - b'0')])
        .collect()
}

fn render_charpoly(n: usize, terms: &[CharpolyTermReport]) -> String {
    let monomial = |shape: &Partition| -> String {
        if shape.is_empty() {
            return String::new();
        }
        if n == 2 {
            let k = shape.part(0);
            return if k == 1 {
                "(x1x2)".into()
            } else {
                format!("(x1x2){}", superscript(k))
            };
        }
        format!("s_({shape})(x1..x{n})")
    };
    terms
        .iter()
        .map(|t| match (t.coefficient.as_str(), monomial(&t.shape)) {
            (c, m) if m.is_empty() => c.to_string(),
            ("1", m) => m,
            (c, m) => format!("{c}·{m}"),
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn expand_report(args: &ExpandArgs) -> Result<ExpandReport, String> {
    check_dim(args.dim)?;
    if let Some(n) = args.power_sum {
        if n == 0 || n > MAX_EXPAND_ORDER {
            return Err(format!(
                "--power-sum must be between 1 and {MAX_EXPAND_ORDER}, got {n}"
            ));
        }
        let mut total = BigInt::zero();
        let terms = hooks_of(n)
            .map(|(hook, sign)| {
                let average = schur_average_closed(&hook, args.dim).value;
                let contribution = BigInt::from(sign) * &average;
                total += &contribution;
                HookTerm {
                    partition: hook,
                    sign,
                    average: average.to_string(),
                    contribution: contribution.to_string(),
                }
            })
            .collect();
        return Ok(ExpandReport::PowerSum(PowerSumReport {
            power: n,
            dim: args.dim,
            terms,
            total: total.to_string(),
            closed: trace_moment_of_power(n, args.dim).to_string(),
        }));
    }
    let n = args.charpoly.expect("clap enforces one series");
    if n == 0 || n > MAX_EXPAND_ORDER {
        return Err(format!(
            "--charpoly must be between 1 and {MAX_EXPAND_ORDER}, got {n}"
        ));
    }
    let mut raw = charpoly_product_terms(n, args.dim);
    raw.sort_by_key(|t| t.lambda.weight());
    let terms: Vec<CharpolyTermReport> = raw
        .into_iter()
        .map(|t| CharpolyTermReport {
            lambda: t.lambda,
            coefficient: t.coefficient.to_string(),
            shape: t.shape,
        })
        .collect();
    Ok(ExpandReport::Charpoly(CharpolyReport {
        factors: n,
        dim: args.dim,
        polynomial: render_charpoly(n, &terms),
        terms,
    }))
}

fn cmd_expand(args: &ExpandArgs, format: Format) -> Result<Rendered, String> {
    let report = expand_report(args)?;
    let code = match &report {
        ExpandReport::PowerSum(r) if r.total != r.closed => EXIT_ROUTE_DISAGREEMENT,
        _ => EXIT_OK,
    };
    let body = match (format, &report) {
        (Format::Json, _) => json(&report)?,
        (Format::Csv, ExpandReport::PowerSum(r)) => csv_rows(&r.terms)?,
        (Format::Csv, ExpandReport::Charpoly(r)) => csv_rows(&r.terms)?,
        (Format::Text, ExpandReport::PowerSum(r)) => {
            let mut s = format!("<Tr H^{}>_{} over hooks of {}\n", r.power, r.dim, r.power);
            for t in &r.terms {
                let _ = writeln!(
                    s,
                    "  {}({})  average {}  contribution {}",
                    if t.sign > 0 { '+' } else { '-' },
                    t.partition,
                    t.average,
                    t.contribution
                );
            }
            let _ = writeln!(s, "total {} (closed form {})", r.total, r.closed);
            s
        }
        (Format::Text, ExpandReport::Charpoly(r)) => format!("{}\n", r.polynomial),
    };
    Ok(Rendered { code, body })
}

// ---- density ---------------------------------------------------------------

pub fn density_report(args: &DensityArgs) -> Result<DensityReport, String> {
    if args.dim < 2 {
        return Err("--dim must be at least 2 for the density check".into());
    }
    check_samples(args.samples)?;
    density_histogram_check(
        args.dim,
        args.samples,
        args.seed,
        &DensityGrid::default_for(args.dim),
    )
    .map_err(|e| e.to_string())
}

fn cmd_density(args: &DensityArgs, format: Format) -> Result<Rendered, String> {
    let report = density_report(args)?;
    let code = if report.passed {
        EXIT_OK
    } else {
        EXIT_STATISTICAL_FAILURE
    };
    let body = match format {
        Format::Json => json(&report)?,
        Format::Csv => csv_rows(&report.bins)?,
        Format::Text => {
            let mut s = format!(
                "N = {}, {} samples, seed {}: {} bins{}, max |z| = {:.3} (threshold {})\n",
                report.dim,
                report.n_samples,
                report.seed,
                report.bins.len(),
                if report.pooled.is_some() {
                    " + pooled"
                } else {
                    ""
                },
                report.max_abs_z,
                report.threshold
            );
            let _ = writeln!(
                s,
                "eigenvalues above the axis per matrix: {:.5} ± {:.5} (expected {:.5})",
                report.upper_half_count.mean,
                report.upper_half_count.std_error,
                report.upper_half_count_target
            );
            let _ = writeln!(s, "{}", if report.passed { "PASS" } else { "FAIL" });
            s
        }
    };
    Ok(Rendered { code, body })
}
