//! Command-line front end.
//!
//! Exit codes: 0 success, 1 internal error, 2 rejected input, 3 budget exceeded.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quasihom::exhaustive::{char_sum, count_congruence, decompose, value_histogram, Limits, DEFAULT_BUDGET};
use quasihom::funcfield::{ff_count, ff_histogram, ff_sum_from_histogram, FFCharacter, FFModulus};
use quasihom::numeric::fmt_rational;
use quasihom::padic::{local_exponents, PrimeContext};
use quasihom::quasi::{lemma_im2_audit, Classification};
use quasihom::sublevel::{sublevel_set, verify_cluster_decomposition, FactoredPoly1D};
use quasihom::verify::{
    build_grid, evaluate_grid, lower_from_evaluations, run_regressions, scan_from_evaluations, Analysis, Corpus,
    ScanConfig, Target,
};
use quasihom::{BivariatePoly, Error};
use serde_json::{json, Map, Value};

#[derive(Parser, Debug)]
#[command(name = "quasihom", version, about = "Exponential sums and congruence counts of quasi-homogeneous polynomials")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Args, Debug)]
struct RunConfig {
    /// Maximal number of enumerated points.
    #[arg(long, global = true, env = "QH_BUDGET", default_value_t = DEFAULT_BUDGET as u64,
          value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Largest accepted normalized value in upper-bound scans.
    #[arg(long, global = true, default_value_t = 10.0)]
    c_ceiling: f64,
    /// Smallest accepted normalized value in lower-bound checks.
    #[arg(long, global = true, default_value_t = 0.25)]
    c_floor: f64,
}

impl RunConfig {
    fn limits(&self) -> Limits {
        let base = Limits::with_budget(self.budget as u128);
        match self.workers {
            Some(w) => base.with_workers(w as usize),
            None => base,
        }
    }

    fn scan(&self) -> ScanConfig {
        ScanConfig { ceiling: self.c_ceiling, floor: self.c_floor, limits: self.limits(), ..ScanConfig::default() }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Weights, canonical form, exponents and excluded primes.
    Analyze {
        poly: String,
        /// Also report the local exponents of an exceptional class at this prime.
        #[arg(long)]
        p: Option<u64>,
    },
    /// Normalized exponential sum modulo p^s.
    Sum {
        poly: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        s: u32,
    },
    /// Normalized number of solutions of f ≡ 0 modulo p^s.
    Count {
        poly: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        s: u32,
    },
    /// Upper-bound scan and lower-bound checks over a grid of primes.
    Verify {
        poly: String,
        #[arg(long, value_parser = parse_target)]
        target: Target,
        #[arg(long, default_value_t = 5)]
        pmin: u64,
        #[arg(long, default_value_t = 31)]
        pmax: u64,
        #[arg(long)]
        smax: Option<u32>,
    },
    /// Split the enumeration into the three regions of valuation classes.
    Decompose {
        poly: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        s: u32,
    },
    /// Run the closed-form regression corpus.
    Regress {
        /// Corpus file; the built-in corpus by default.
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
    /// Sublevel set of a one-variable polynomial against its cluster balls.
    Sublevel {
        /// Factored or expanded polynomial in x, e.g. "x^2*(x-1)".
        poly: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        ell: u32,
    },
    /// Counts and sums over F_p[T]/(π^s).
    Ff {
        #[command(subcommand)]
        op: FfOp,
    },
}

#[derive(Args, Debug)]
struct FfArgs {
    poly: String,
    #[arg(long)]
    p: u64,
    /// π as a polynomial in T ("T^2+1") or coefficients lowest first ("1,0,1").
    #[arg(long)]
    pi: String,
    #[arg(long)]
    s: u32,
}

#[derive(Subcommand, Debug)]
enum FfOp {
    Count(FfArgs),
    Sum {
        #[command(flatten)]
        args: FfArgs,
        /// Coefficient index of the character; the top coefficient by default.
        #[arg(long)]
        character: Option<u32>,
    },
}

fn parse_target(s: &str) -> Result<Target, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A report plus an optional CSV body that replaces the generic flattening.
struct Report {
    value: Value,
    csv: Option<String>,
}

impl From<Value> for Report {
    fn from(value: Value) -> Self {
        Self { value, csv: None }
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

fn poly(text: &str) -> Result<BivariatePoly, Error> {
    Ok(BivariatePoly::parse(text)?)
}

fn analyze(text: &str, p: Option<u64>) -> Result<Report, Error> {
    let a = Analysis::parse(text)?;
    let mut out = Map::new();
    out.insert("poly".into(), json!(a.poly.render()));
    if let Value::Object(rep) = to_value(&a.report) {
        out.extend(rep);
    }
    out.insert("weights".into(), to_value(&a.structure.weights));
    out.insert("structure".into(), to_value(&a.structure));
    out.insert("exceptional_primes".into(), to_value(&a.excluded));
    if !a.structure.is_monomial() {
        out.insert("audit".into(), to_value(&lemma_im2_audit(&a.structure)?));
    }
    if let Some(p) = p {
        let ctx = PrimeContext::new(p)?;
        if let Classification::Exceptional(_) = a.report.classification {
            let (i, nu) = local_exponents(&a.report, &a.structure, ctx)?;
            out.insert("local".into(), json!({ "p": p, "i": i, "nu": nu }));
        }
    }
    Ok(Value::Object(out).into())
}

fn run(cli: &Cli) -> Result<Report, Error> {
    let cfg = &cli.config;
    let limits = cfg.limits();
    match &cli.command {
        Command::Analyze { poly, p } => analyze(poly, *p),
        Command::Sum { poly: text, p, s } => {
            let hist = value_histogram(&poly(text)?, PrimeContext::new(*p)?, *s, &limits)?;
            let est = char_sum(&hist);
            let mut v = to_value(&est);
            v["p"] = json!(p);
            v["s"] = json!(s);
            Ok(Report { value: v, csv: Some(hist.to_csv()) })
        }
        Command::Count { poly: text, p, s } => {
            let hist = value_histogram(&poly(text)?, PrimeContext::new(*p)?, *s, &limits)?;
            let v = json!({
                "p": p,
                "s": s,
                "count": fmt_rational(&count_congruence(&hist)),
                "zeros": hist.count(0),
            });
            Ok(Report { value: v, csv: Some(hist.to_csv()) })
        }
        Command::Verify { poly, target, pmin, pmax, smax } => {
            let a = Analysis::parse(poly)?;
            let scfg = cfg.scan();
            let grid = build_grid(&a, *pmin, *pmax, *smax, cfg.budget as u128);
            let evals = evaluate_grid(&a, &grid, &limits)?;
            let scan = scan_from_evaluations(&a, *target, &evals, &scfg)?;
            let mut primes: Vec<u64> = grid.iter().map(|g| g.0).collect();
            primes.dedup();
            let lower = if *target == Target::Sum && a.report.classification == Classification::Linear {
                Vec::new()
            } else {
                primes
                    .iter()
                    .map(|&p| lower_from_evaluations(&a, *target, PrimeContext::new(p)?, &evals, &scfg))
                    .collect::<Result<Vec<_>, _>>()?
            };
            let pass = scan.pass && lower.iter().all(|l| l.pass);
            Ok(json!({
                "poly": a.poly.render(),
                "target": target,
                "verdict": if pass { "PASS" } else { "FAIL" },
                "upper": scan,
                "lower": lower,
            })
            .into())
        }
        Command::Decompose { poly: text, p, s } => {
            let f = poly(text)?;
            let qs = quasihom::quasi::canonical_form(&f)?;
            Ok(to_value(&decompose(&f, PrimeContext::new(*p)?, *s, &qs, &limits)?).into())
        }
        Command::Regress { corpus } => {
            let corpus = match corpus {
                Some(path) => Corpus::from_json(
                    &fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?,
                )?,
                None => Corpus::builtin(),
            };
            let results = run_regressions(&corpus, &limits);
            let passed = results.iter().filter(|r| r.pass).count();
            Ok(json!({
                "passed": passed,
                "total": results.len(),
                "vectors": results,
            })
            .into())
        }
        Command::Sublevel { poly, p, s, ell } => {
            let f = FactoredPoly1D::parse(poly)?;
            let ctx = PrimeContext::new(*p)?;
            let report = verify_cluster_decomposition(&f, ctx, *s, *ell, cfg.budget as u128)?;
            let mut v = to_value(&report);
            v["residues"] = to_value(&sublevel_set(&f, ctx, *s, *ell, cfg.budget as u128)?);
            Ok(v.into())
        }
        Command::Ff { op } => {
            let args = match op {
                FfOp::Count(a) | FfOp::Sum { args: a, .. } => a,
            };
            let f = poly(&args.poly)?;
            let m = FFModulus::new(args.p, &FFModulus::parse_pi(&args.pi, args.p)?, args.s)?;
            match op {
                FfOp::Count(_) => Ok(json!({
                    "modulus": m,
                    "count": fmt_rational(&ff_count(&f, &m, &limits)?),
                })
                .into()),
                FfOp::Sum { character, .. } => {
                    let chi = match character {
                        Some(c) => FFCharacter::new(*c, &m)?,
                        None => FFCharacter::new(m.width() as u32 - 1, &m)?,
                    };
                    let hist = ff_histogram(&f, &m, &limits)?;
                    let magnitudes: Vec<Value> = FFCharacter::all_primitive(&m)
                        .iter()
                        .map(|c| json!({ "character": c.functional_index, "magnitude": ff_sum_from_histogram(&hist, c).magnitude }))
                        .collect();
                    let mut v = to_value(&ff_sum_from_histogram(&hist, &chi));
                    v["modulus"] = to_value(&m);
                    v["character"] = json!(chi.functional_index);
                    v["all_primitive"] = Value::Array(magnitudes);
                    Ok(v.into())
                }
            }
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Flattens nested objects to `a.b.c` keys; arrays of scalars are joined.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        _ => out.push((prefix.to_string(), v.clone())),
    }
}

fn render_value(v: &Value) -> String {
    match v {
        Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(" "),
        other => scalar(other),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(&report.value).expect("json") + "\n",
        Format::Csv => {
            if let Some(csv) = &report.csv {
                return csv.clone();
            }
            let mut rows = Vec::new();
            flatten("", &report.value, &mut rows);
            let mut out = String::from("key,value\n");
            for (k, v) in rows {
                out.push_str(&format!("{},{}\n", csv_field(&k), csv_field(&render_value(&v))));
            }
            out
        }
        Format::Table => {
            let mut rows = Vec::new();
            flatten("", &report.value, &mut rows);
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            rows.iter().map(|(k, v)| format!("{k:<width$}  {}\n", render_value(v))).collect()
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } => 3,
        Error::Internal(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let text = render(&report, cli.config.format);
            match &cli.config.output {
                Some(path) => {
                    if let Err(e) = fs::write(path, text) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
