//! Command-line front end. Output is JSON (default) or CSV, written to
//! `--output`, to `$DSTABLE_OUT_DIR/<command>.<ext>` when that variable is
//! set, or to standard output.
//!
//! Exit codes: 0 success, 1 invalid parameters or failed computation,
//! 2 a verification report did not pass.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::distributions::{DiscreteStableDist, DistSpec, Family, Sds};
use crate::moments::{moment_exists, MomentOrder, MomentQuery};
use crate::pmf::{pmf, sds_tail_probability};
use crate::sampler::{sample_batch, RandomStream};
use crate::series::SupportKind;
use crate::thinning::ThinningOp;
use crate::verify::{self, *};
use crate::{Error, Result};

pub const OUT_DIR_VAR: &str = "DSTABLE_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "dstable", version, about = "Discrete stable distributions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probabilities on a range of k.
    Pmf(PmfArgs),
    /// Reproducible draws; the seed is required.
    Sample(SampleArgs),
    /// Factorial or fractional absolute moments.
    Moments(MomentArgs),
    /// Tail probabilities of SDS against the tail constant.
    Tail(TailArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Residual table of a limit theorem along the scale schedule.
    Limits(LimitArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Distribution parameters. Defaults: m = 1, kappa = 0, q = 1, b = 0, M = 1.
#[derive(Debug, Args, Default)]
pub struct DistArgs {
    /// PDS, DS, SDS, TPDS, GeomPortlyStable or FirstPassage.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub q: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long = "M")]
    pub big_m: Option<u32>,
    /// The whole distribution as JSON, e.g. '{"family":"PDS","gamma":0.5,"lambda":1}'.
    #[arg(long, conflicts_with_all = ["family", "gamma", "lambda", "kappa", "beta", "q", "b", "m", "big_m"])]
    pub dist: Option<String>,
}

impl DistArgs {
    fn is_empty(&self) -> bool {
        self.family.is_none() && self.dist.is_none()
    }

    pub fn resolve(&self) -> Result<DiscreteStableDist> {
        if let Some(text) = &self.dist {
            return serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()));
        }
        let family: Family = self
            .family
            .as_deref()
            .ok_or_else(|| Error::InvalidSpec("--family or --dist is required".into()))?
            .parse()?;
        let spec = DistSpec {
            family,
            gamma: self.gamma,
            lambda: self.lambda,
            kappa: self.kappa,
            beta: self.beta,
            q: self.q,
            b: self.b,
            m: self.m,
            big_m: self.big_m,
        };
        DiscreteStableDist::try_from(spec)
    }
}

#[derive(Debug, Args)]
pub struct PmfArgs {
    #[command(flatten)]
    pub dist: DistArgs,
    /// Inclusive range; defaults to 0..30 for nonnegative laws, -30..30 otherwise.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub k_range: Option<Vec<i64>>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub dist: DistArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    /// First stream id; chunk i uses stream + i.
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("order").required(true))]
pub struct MomentArgs {
    #[command(flatten)]
    pub dist: DistArgs,
    /// Order n of E[X(X-1)...(X-n+1)].
    #[arg(long, group = "order")]
    pub factorial: Option<u32>,
    /// Order r of E|X|^r.
    #[arg(long, group = "order", allow_negative_numbers = true)]
    pub fractional: Option<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TailArgs {
    #[command(flatten)]
    pub dist: DistArgs,
    #[arg(long, value_delimiter = ',', default_values_t = [50i64, 100, 200])]
    pub x: Vec<i64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    FirstSense,
    SecondSense,
    ThirdSense,
    Commutativity,
    Divisibility,
    Attraction,
    Tail,
    Mixture,
    RandomSum,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[command(flatten)]
    pub dist: DistArgs,
    /// Seed for the commutativity parameter pairs and the Monte Carlo route.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo draws of the mixing variable.
    #[arg(long, default_value_t = 100_000)]
    pub draws: usize,
    /// Index of the outer positive stable law in the mixture suite.
    #[arg(long)]
    pub outer_gamma: Option<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rule {
    PdsKappa,
    PdsLambda,
    DsSkew,
    SdsKappa,
    SdsLambda,
    TpdsLambda,
}

#[derive(Debug, Args)]
pub struct LimitArgs {
    #[arg(long, value_enum)]
    pub rule: Rule,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// TPDS shape parameter.
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Coupling constant: c in kappa = 1 - ac, b in lambda = b/a^..., sigma for TPDS.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub coef: f64,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SCALES)]
    pub scales: Vec<f64>,
    /// The t grid is uniform on [-t_max, t_max].
    #[arg(long, default_value_t = 5.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 101)]
    pub t_count: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// What a command produced: a JSON document, CSV rows, and whether every
/// verification it ran passed.
struct Rendered {
    json: Value,
    csv_header: Vec<&'static str>,
    csv_rows: Vec<Vec<String>>,
    passed: bool,
}

impl Rendered {
    fn plain(json: Value, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        Rendered {
            json,
            csv_header: header,
            csv_rows: rows,
            passed: true,
        }
    }
}

fn num(x: f64) -> String {
    x.to_string()
}

/// JSON has no infinity; moments that diverge are reported as null.
fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn run_pmf(a: &PmfArgs) -> Result<Rendered> {
    let dist = a.dist.resolve()?;
    let (lo, hi) = match a.k_range.as_deref() {
        Some([lo, hi]) => (*lo, *hi),
        _ if dist.support().kind == SupportKind::NonNegative => (0, 30),
        _ if dist.family() == Family::GeomPortlyStable => (-30, 0),
        _ => (-30, 30),
    };
    let res = pmf(&dist, lo, hi)?;
    let rows: Vec<(i64, f64)> = (lo..=hi).map(|k| (k, res.values.get(k))).collect();
    let json = json!({
        "dist": dist,
        "k_lo": lo,
        "k_hi": hi,
        "method": res.method,
        "grid": res.grid,
        "error_estimate": res.error_estimate,
        "pmf": rows.iter().map(|&(k, p)| json!({"k": k, "p": p})).collect::<Vec<_>>(),
    });
    let csv = rows.iter().map(|&(k, p)| vec![k.to_string(), num(p)]).collect();
    Ok(Rendered::plain(json, vec!["k", "p"], csv))
}

fn run_sample(a: &SampleArgs) -> Result<Rendered> {
    let dist = a.dist.resolve()?;
    let batch = sample_batch(&dist, a.n, a.seed, a.stream)?;
    let csv = batch.values.iter().map(|x| vec![x.to_string()]).collect();
    let json = json!({
        "dist": batch.dist,
        "n": batch.values.len(),
        "seed": batch.seed,
        "stream_base": batch.stream_base,
        "chunk_size": batch.chunk_size,
        "representation": batch.representation,
        "values": batch.values,
    });
    Ok(Rendered::plain(json, vec!["x"], csv))
}

fn run_moments(a: &MomentArgs) -> Result<Rendered> {
    let dist = a.dist.resolve()?;
    let (order, r) = match (a.factorial, a.fractional) {
        (Some(n), _) => (MomentOrder::Factorial(n), n as f64),
        (_, Some(r)) => (MomentOrder::Fractional(r), r),
        _ => return Err(Error::InvalidSpec("--factorial or --fractional is required".into())),
    };
    let q = MomentQuery::new(dist, order)?;
    let value = q.evaluate()?;
    let exists = moment_exists(&dist, r);
    let json = json!({
        "dist": dist,
        "order": order,
        "value": finite_or_null(value),
        "finite": value.is_finite(),
        "existence": exists,
    });
    let csv = vec![vec![num(r), num(value)]];
    Ok(Rendered::plain(json, vec!["order", "value"], csv))
}

fn sds_of(dist: &DiscreteStableDist) -> Result<Sds> {
    match dist {
        DiscreteStableDist::Sds(s) if s.m() == 1 => Ok(*s),
        d => Err(Error::FamilyMismatch(format!(
            "tail constants are defined for SDS on the unit lattice, not {d}"
        ))),
    }
}

fn run_tail(a: &TailArgs) -> Result<Rendered> {
    let dist = a.dist.resolve()?;
    let s = sds_of(&dist)?;
    let (g, l, k) = (s.gamma(), s.lambda(), s.kappa());
    let c = tail_constant(g, l, k)?;
    let report = verify_tail_constant(g, l, k, &a.x)?;
    let mut rows = Vec::new();
    let mut csv = Vec::new();
    for &x in &a.x {
        let p = sds_tail_probability(&s, x)?;
        let scaled = (x as f64).powf(2.0 * g) * p;
        rows.push(json!({"x": x, "tail": p, "scaled": scaled}));
        csv.push(vec![x.to_string(), num(p), num(scaled), num(c)]);
    }
    let passed = report.passed;
    Ok(Rendered {
        json: json!({"dist": dist, "constant": c, "rows": rows, "reports": [report]}),
        csv_header: vec!["x", "tail", "scaled", "constant"],
        csv_rows: csv,
        passed,
    })
}

/// Five parameter pairs per thinning family drawn from `seed`.
fn commutativity_pairs(seed: u64) -> Result<Vec<Vec<(ThinningOp, ThinningOp)>>> {
    use rand::Rng;
    let mut rng = RandomStream::new(seed, 0);
    let mut u = |lo: f64, hi: f64| lo + (hi - lo) * rng.random::<f64>();
    let mut bern = Vec::new();
    let mut geo = Vec::new();
    let mut cheb = Vec::new();
    let mut portly = Vec::new();
    for i in 0..5u32 {
        bern.push((ThinningOp::bernoulli(u(0.05, 0.95))?, ThinningOp::bernoulli(u(0.05, 0.95))?));
        let kappa = u(0.0, 0.9);
        geo.push((
            ThinningOp::mod_geometric(u(0.05, 0.95), kappa, 1)?,
            ThinningOp::mod_geometric(u(0.05, 0.95), kappa, 1)?,
        ));
        let b = u(0.0, 0.9);
        cheb.push((
            ThinningOp::chebyshev_thin(u(0.05, 0.95), b, 1)?,
            ThinningOp::chebyshev_thin(u(0.05, 0.95), b, 1)?,
        ));
        portly.push((
            ThinningOp::chebyshev_portly(2 + i % 3, 1)?,
            ThinningOp::chebyshev_portly(2 + (i + 1) % 4, 1)?,
        ));
    }
    Ok(vec![bern, geo, cheb, portly])
}

fn suite_reports(a: &VerifyArgs) -> Result<Vec<VerificationReport>> {
    let need = || a.dist.resolve();
    let n_set: Vec<u32> = (2..=10).collect();
    Ok(match a.suite {
        Suite::FirstSense => {
            let d = need()?;
            vec![verify_first_sense(&d, &n_set, &ZGrid::default_for(&d))?]
        }
        Suite::SecondSense => {
            let (target, grid) = if a.dist.is_empty() {
                (SecondSenseTarget::Degenerate, ZGrid::one_sided())
            } else {
                let d = need()?;
                (SecondSenseTarget::Dist(d), ZGrid::default_for(&d))
            };
            vec![verify_second_sense(&target, &[2, 3, 4], &grid)?]
        }
        Suite::ThirdSense => {
            let d = need()?;
            let split = match d.family() {
                Family::FirstPassage | Family::GeomPortlyStable => Split::Portly { n1: 1, n2: 1 },
                _ => {
                    let p = 2f64.powf(-1.0 / d.gamma());
                    Split::Thinning { p1: p, p2: p }
                }
            };
            vec![verify_third_sense(&d, split, &ZGrid::default_for(&d))?]
        }
        Suite::Commutativity => commutativity_pairs(a.seed)?
            .iter()
            .map(|pairs| verify_commutativity(pairs, &ZGrid::one_sided()))
            .collect::<Result<_>>()?,
        Suite::Divisibility => {
            let d = need()?;
            vec![verify_infinite_divisibility(&d, &[2, 3, 5], &ZGrid::default_for(&d))?]
        }
        Suite::Attraction => {
            let d = need()?;
            let ns: Vec<u64> = (1..=14).map(|k| 1u64 << k).collect();
            vec![verify_attraction(&d, &ns, &TGrid::default())?]
        }
        Suite::Tail => {
            let s = sds_of(&need()?)?;
            vec![verify_tail_constant(s.gamma(), s.lambda(), s.kappa(), &[50, 100, 200])?]
        }
        Suite::Mixture => {
            let DiscreteStableDist::Pds(p) = need()? else {
                return Err(Error::FamilyMismatch("the mixture suite takes a PDS target".into()));
            };
            let outer = a.outer_gamma.unwrap_or((1.0 + p.gamma()) / 2.0);
            let mut rng = RandomStream::new(a.seed, 0);
            let (exact, mc) = verify_mixture_characterization(
                p.gamma(),
                outer,
                p.lambda(),
                p.kappa(),
                &ZGrid::one_sided(),
                a.draws,
                &mut rng,
            )?;
            vec![exact, mc]
        }
        Suite::RandomSum => {
            let DiscreteStableDist::Pds(p) = need()? else {
                return Err(Error::FamilyMismatch("the random-sum suite takes PDS".into()));
            };
            let y = [0.25; 4];
            vec![verify::verify_random_sum_characterization(
                p.gamma(),
                p.lambda(),
                &y,
                &ZGrid::one_sided(),
            )?]
        }
    })
}

fn run_verify(a: &VerifyArgs) -> Result<Rendered> {
    let reports = suite_reports(a)?;
    let passed = reports.iter().all(|r| r.passed);
    let csv = reports
        .iter()
        .map(|r| {
            vec![
                r.identity.clone(),
                num(r.max_abs_residual),
                num(r.tolerance),
                r.passed.to_string(),
            ]
        })
        .collect();
    let suite = a.suite.to_possible_value().map(|v| v.get_name().to_string());
    Ok(Rendered {
        json: json!({"suite": suite, "passed": passed, "reports": reports}),
        csv_header: vec!["identity", "max_abs_residual", "tolerance", "passed"],
        csv_rows: csv,
        passed,
    })
}

fn limit_rule(a: &LimitArgs) -> Result<LimitRule> {
    let want = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| Error::InvalidSpec(format!("--{name} is required for this rule")))
    };
    let g = a.gamma;
    Ok(match a.rule {
        Rule::PdsKappa => LimitRule::PdsKappa {
            gamma: g,
            lambda: want(a.lambda, "lambda")?,
            c: a.coef,
        },
        Rule::PdsLambda => LimitRule::PdsLambda {
            gamma: g,
            kappa: a.kappa.unwrap_or(0.0),
            b: a.coef,
        },
        Rule::DsSkew => LimitRule::DsSkew {
            gamma: g,
            beta: want(a.beta, "beta")?,
            lambda: want(a.lambda, "lambda")?,
            kappa: a.kappa.unwrap_or(0.0),
        },
        Rule::SdsKappa => LimitRule::SdsKappa {
            gamma: g,
            lambda: want(a.lambda, "lambda")?,
            c: a.coef,
        },
        Rule::SdsLambda => LimitRule::SdsLambda {
            gamma: g,
            kappa: a.kappa.unwrap_or(0.0),
            b: a.coef,
        },
        Rule::TpdsLambda => LimitRule::TpdsLambda {
            gamma: g,
            b: a.b.unwrap_or(0.0),
            sigma: a.coef,
        },
    })
}

fn run_limits(a: &LimitArgs) -> Result<Rendered> {
    if !(a.t_max > 0.0) || a.t_count < 2 {
        return Err(Error::domain("t_max", "(0,inf) with t_count >= 2", "limits"));
    }
    let spec = LimitSpec::new(limit_rule(a)?, a.scales.clone())?;
    let report = verify_limit(&spec, &TGrid::uniform(-a.t_max, a.t_max, a.t_count))?;
    let table: Vec<Value> = report
        .schedule
        .iter()
        .map(|&(s, r)| json!({"a": s, "residual": r}))
        .collect();
    let csv = report.schedule.iter().map(|&(s, r)| vec![num(s), num(r)]).collect();
    let passed = report.passed;
    Ok(Rendered {
        json: json!({"spec": spec, "table": table, "reports": [report]}),
        csv_header: vec!["a", "residual"],
        csv_rows: csv,
        passed,
    })
}

fn render(r: &Rendered, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_vec_pretty(&r.json)
                .map_err(|e| Error::InvalidSpec(format!("serialization failed: {e}")))?;
            s.push(b'\n');
            Ok(s)
        }
        Format::Csv => {
            let io = |e: csv::Error| Error::InvalidSpec(format!("csv output failed: {e}"));
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            w.write_record(&r.csv_header).map_err(io)?;
            for row in &r.csv_rows {
                w.write_record(row).map_err(io)?;
            }
            w.into_inner()
                .map_err(|e| Error::InvalidSpec(format!("csv output failed: {e}")))
        }
    }
}

fn destination(name: &str, out: &OutputArgs) -> Option<PathBuf> {
    if let Some(p) = &out.output {
        return Some(p.clone());
    }
    let dir = std::env::var_os(OUT_DIR_VAR)?;
    let ext = match out.format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    Some(PathBuf::from(dir).join(format!("{name}.{ext}")))
}

struct Outcome {
    bytes: Vec<u8>,
    passed: bool,
}

fn execute(cmd: &Command) -> Result<(Outcome, Option<PathBuf>)> {
    let (name, rendered, out) = match cmd {
        Command::Pmf(a) => ("pmf", run_pmf(a)?, &a.out),
        Command::Sample(a) => ("sample", run_sample(a)?, &a.out),
        Command::Moments(a) => ("moments", run_moments(a)?, &a.out),
        Command::Tail(a) => ("tail", run_tail(a)?, &a.out),
        Command::Verify(a) => ("verify", run_verify(a)?, &a.out),
        Command::Limits(a) => ("limits", run_limits(a)?, &a.out),
    };
    let bytes = render(&rendered, out.format)?;
    Ok((
        Outcome {
            bytes,
            passed: rendered.passed,
        },
        destination(name, out),
    ))
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let (outcome, path) = match execute(&cli.command) {
        Ok(x) => x,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 1;
        }
    };
    let written = match &path {
        Some(p) => std::fs::write(p, &outcome.bytes)
            .map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => stdout
            .write_all(&outcome.bytes)
            .and_then(|_| stdout.flush())
            .map_err(|e| format!("cannot write output: {e}")),
    };
    if let Err(msg) = written {
        let _ = writeln!(stderr, "error: {msg}");
        return 1;
    }
    if outcome.passed {
        0
    } else {
        let _ = writeln!(stderr, "verification failed");
        2
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_fn::bessel_i_scaled;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("dstable").chain(args.iter().copied());
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn bessel_csv() {
        let (code, out, _) = call(&[
            "pmf", "--family", "SDS", "--gamma", "1", "--lambda", "1", "--k-range", "-10", "10",
            "--format", "csv",
        ]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "k,p");
        assert_eq!(lines.len(), 22);
        assert!(out.ends_with('\n') && !out.contains('\r'));
        for line in &lines[1..] {
            let (k, p) = line.split_once(',').unwrap();
            let k: i64 = k.parse().unwrap();
            let p: f64 = p.parse().unwrap();
            let want = bessel_i_scaled(k, 1.0).unwrap();
            assert!((p - want).abs() < 1e-10, "k={k}");
        }
    }

    #[test]
    fn sample_is_reproducible() {
        let args = [
            "sample", "--family", "PDS", "--gamma", "0.7", "--lambda", "1", "--kappa", "0.3", "--n",
            "1000", "--seed", "42",
        ];
        let (c1, a, _) = call(&args);
        let (c2, b, _) = call(&args);
        assert_eq!((c1, c2), (0, 0));
        assert_eq!(a, b);
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["values"].as_array().unwrap().len(), 1000);
        // the seed cannot be omitted
        let (c, _, _) = call(&args[..args.len() - 2]);
        assert_eq!(c, 1);
    }

    #[test]
    fn verify_first_sense_passes() {
        let (code, out, _) = call(&[
            "verify", "--suite", "first-sense", "--family", "PDS", "--gamma", "0.5", "--lambda", "1",
            "--kappa", "0.2",
        ]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["reports"][0]["passed"], json!(true));
        assert_eq!(v["passed"], json!(true));
    }

    #[test]
    fn domain_errors_name_the_range() {
        let (code, out, err) = call(&["pmf", "--family", "PDS", "--gamma", "1.5", "--lambda", "1"]);
        assert_eq!(code, 1);
        assert!(out.is_empty());
        assert!(err.contains("gamma must lie in (0,1] for family PDS"), "{err}");
        let (code, _, _) = call(&["pmf", "--family", "XYZ", "--gamma", "0.5", "--lambda", "1"]);
        assert_eq!(code, 1);
        let (code, _, _) = call(&["pmf", "--dist", r#"{"family":"PDS","gamma":0.5,"lambda":1,"zeta":2}"#]);
        assert_eq!(code, 1);
        let (code, _, _) = call(&["bogus"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn failed_verification_exits_two() {
        // the skewed DS coupling does not converge
        let (code, out, _) = call(&[
            "limits", "--rule", "ds-skew", "--gamma", "0.7", "--beta", "0.5", "--lambda", "1",
            "--format", "csv",
        ]);
        assert_eq!(code, 2);
        assert!(out.starts_with("a,residual\n"));
        let (code, _, _) = call(&[
            "limits", "--rule", "sds-lambda", "--gamma", "0.6", "--kappa", "0.2",
        ]);
        assert_eq!(code, 0);
    }

    #[test]
    fn dist_json_matches_flags() {
        let (_, a, _) = call(&["pmf", "--family", "PDS", "--gamma", "0.5", "--lambda", "1", "--k-range", "0", "5"]);
        let (_, b, _) = call(&["pmf", "--dist", r#"{"family":"PDS","gamma":0.5,"lambda":1}"#, "--k-range", "0", "5"]);
        assert_eq!(a, b);
    }

    #[test]
    fn moments_and_tail() {
        let (code, out, _) = call(&["moments", "--family", "PDS", "--gamma", "1", "--lambda", "2", "--factorial", "3"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!((v["value"].as_f64().unwrap() - 8.0).abs() < 1e-12);
        let (code, out, _) = call(&["moments", "--family", "SDS", "--gamma", "0.5", "--lambda", "1", "--fractional", "1.5"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["value"], Value::Null);
        assert_eq!(v["finite"], json!(false));
        let (code, out, _) = call(&["tail", "--family", "SDS", "--gamma", "0.5", "--lambda", "1", "--format", "csv"]);
        assert_eq!(code, 0, "{out}");
        assert_eq!(out.lines().count(), 4);
    }

    #[test]
    fn every_suite_runs() {
        let cases: [&[&str]; 9] = [
            &["--suite", "first-sense", "--family", "TPDS", "--gamma", "1.5", "--lambda", "1"],
            &["--suite", "second-sense", "--family", "FirstPassage"],
            &["--suite", "second-sense"],
            &["--suite", "third-sense", "--family", "PDS", "--gamma", "0.7", "--lambda", "1"],
            &["--suite", "commutativity"],
            &["--suite", "divisibility", "--family", "DS", "--gamma", "0.7", "--beta", "0.3", "--lambda", "1", "--q", "0.6"],
            &["--suite", "attraction", "--family", "SDS", "--gamma", "0.5", "--lambda", "1"],
            &["--suite", "mixture", "--family", "PDS", "--gamma", "0.5", "--lambda", "1", "--draws", "20000"],
            &["--suite", "random-sum", "--family", "PDS", "--gamma", "0.5", "--lambda", "1"],
        ];
        for c in cases {
            let mut args = vec!["verify"];
            args.extend_from_slice(c);
            let (code, out, err) = call(&args);
            assert_eq!(code, 0, "{c:?}: {err} {out}");
        }
    }

    #[test]
    fn output_file_and_env_dir() {
        let dir = std::env::temp_dir().join(format!("dstable-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("p.csv");
        let (code, out, _) = call(&[
            "pmf", "--family", "PDS", "--gamma", "1", "--lambda", "1", "--format", "csv", "--output",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        assert!(out.is_empty());
        assert!(std::fs::read_to_string(&path).unwrap().starts_with("k,p\n"));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
