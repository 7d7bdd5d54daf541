use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use hypertrace::identities::{analytic_checks, f21_series, AggregateReport, Catalog, IdentitySpec, Status};
use hypertrace::monodromy::{middle_convolution, rigidity_index, MatrixTuple, MonodromyTuple, Point};
use hypertrace::pointcount::{hyp_point_sum, purity_check, CurveFamily, FrobeniusData};
use hypertrace::primes::prime_stream;
use hypertrace::{make_field, CycloNum, Execution, RootOfUnity};

#[derive(Parser)]
#[command(name = "hypertrace", version, about = "Finite-field hypergeometric sums, Frobenius data and identity checks")]
struct Cli {
    /// Worker threads; 1 runs everything sequentially.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify a catalog or user identity over a set of primes.
    Verify(VerifyArgs),
    /// Eigenspace power sums and Frobenius data of `y^N = Π (x - λ_j)^{i_j}`.
    Count(CountArgs),
    /// Characteristic polynomial of Frobenius on one eigenspace.
    Lfactor(CountArgs),
    /// Rigidity index of a monodromy tuple.
    Rigidity(RigidityArgs),
    /// Iterated middle convolution of a rank-one Kummer tuple.
    Convolve(ConvolveArgs),
    /// Truncated 2F1 series, or the built-in analytic checks.
    Series(SeriesArgs),
    /// List the identity catalog.
    Catalog,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Args)]
struct VerifyArgs {
    /// Catalog name or alias.
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    identity: Option<String>,
    /// Identity file (single spec or catalog with one identity).
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Prime selection: "97,193", "7..100" or "1 mod 12 in 13..200"; defaults to the identity's own.
    #[arg(long, conflicts_with = "p")]
    primes: Option<String>,
    #[arg(long)]
    p: Option<u64>,
    /// Also write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
    /// Treat normalization divergences as failures.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long = "N")]
    n: u64,
    /// Exponents i_j, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    exps: Vec<i64>,
    /// Branch points λ_j in F_p, comma separated.
    #[arg(long, value_delimiter = ',')]
    lambda: Vec<u64>,
    #[arg(long)]
    p: u64,
    #[arg(long = "char-exp", default_value_t = 1, allow_hyphen_values = true)]
    char_exp: i64,
    /// Extension degrees "1..m" (or just "m").
    #[arg(long, default_value = "1..1")]
    degrees: String,
    #[arg(long = "out", value_enum, default_value = "json")]
    out: Format,
}

#[derive(Args)]
struct RigidityArgs {
    /// Monodromy tuple JSON.
    #[arg(long)]
    tuple: PathBuf,
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
}

#[derive(Args)]
struct ConvolveArgs {
    /// Common level L of the roots of unity.
    #[arg(long)]
    level: u32,
    /// Kummer exponents k_i at 0, 1, 2, …: local monodromy ζ_L^{k_i}.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    kummer: Vec<i64>,
    /// Convolution parameters as exponents of ζ_L, applied in order.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambda: Vec<i64>,
}

#[derive(Args)]
struct SeriesArgs {
    /// Run the classical identity checks instead of a single series.
    #[arg(long)]
    checks: bool,
    #[arg(long, required_unless_present = "checks")]
    a: Option<String>,
    #[arg(long, required_unless_present = "checks")]
    b: Option<String>,
    #[arg(long, required_unless_present = "checks")]
    c: Option<String>,
    #[arg(long, allow_hyphen_values = true, required_unless_present = "checks")]
    x: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    im: f64,
    #[arg(long, default_value_t = 4000)]
    terms: usize,
}

/// Usage and configuration errors exit with 2; everything else with 1.
enum Failure {
    Usage(anyhow::Error),
    Run(anyhow::Error),
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn fail(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Run(e.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.jobs {
        Some(0) => Err(usage(anyhow!("--jobs must be at least 1"))),
        Some(1) => dispatch(cli.command, Execution::Sequential),
        Some(n) => with_pool(n, move || dispatch(cli.command, Execution::Parallel)),
        None => dispatch(cli.command, Execution::Parallel),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(feature = "parallel")]
fn with_pool(n: usize, f: impl FnOnce() -> Result<bool, Failure> + Send) -> Result<bool, Failure> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(usage)?;
    pool.install(f)
}

#[cfg(not(feature = "parallel"))]
fn with_pool(_n: usize, f: impl FnOnce() -> Result<bool, Failure> + Send) -> Result<bool, Failure> {
    f()
}

fn dispatch(cmd: Command, exec: Execution) -> Result<bool, Failure> {
    match cmd {
        Command::Verify(a) => verify(a, exec),
        Command::Count(a) => count(a, exec, false),
        Command::Lfactor(a) => count(a, exec, true),
        Command::Rigidity(a) => rigidity(a),
        Command::Convolve(a) => convolve(a),
        Command::Series(a) => series(a),
        Command::Catalog => {
            for s in Catalog::builtin().identities {
                println!("{:<20} M={:<3} primes {:<22} {}", s.name, s.modulus, s.primes.as_deref().unwrap_or("-"), s.description);
            }
            Ok(true)
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report types serialize")
}

fn load_spec(a: &VerifyArgs) -> Result<IdentitySpec, Failure> {
    if let Some(name) = &a.identity {
        return Catalog::builtin().get(name).cloned().ok_or_else(|| usage(anyhow!("unknown identity {name:?}")));
    }
    let path = a.spec.as_ref().expect("clap enforces --identity or --spec");
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(usage)?;
    let cat = Catalog::from_json(&text).map_err(usage)?;
    match cat.identities.len() {
        1 => Ok(cat.identities.into_iter().next().unwrap()),
        n => Err(usage(anyhow!("{} holds {n} identities; pass one, or use --identity", path.display()))),
    }
}

fn verify(a: VerifyArgs, exec: Execution) -> Result<bool, Failure> {
    let spec = load_spec(&a)?;
    let primes = match (&a.primes, a.p, &spec.primes) {
        (Some(s), _, _) => prime_stream(s).map_err(usage)?,
        (None, Some(p), _) => vec![p],
        (None, None, Some(s)) => prime_stream(s).map_err(usage)?,
        (None, None, None) => return Err(usage(anyhow!("{} has no default primes; pass --primes", spec.name))),
    };
    if primes.is_empty() {
        return Err(usage(anyhow!("prime selection is empty")));
    }
    let agg = hypertrace::identities::verify_over_primes(&spec, &primes, exec);
    if let Some(path) = &a.report {
        std::fs::write(path, to_json(&agg) + "\n").with_context(|| format!("writing {}", path.display())).map_err(fail)?;
    }
    match a.format {
        Format::Json => println!("{}", to_json(&agg)),
        Format::Csv => print!("{}", render_csv(&agg)),
        Format::Human => print!("{}", render_human(&agg, a.strict)),
    }
    if agg.reports.iter().all(|r| r.status == Status::Skipped) {
        return Err(usage(anyhow!("no selected prime is 1 mod {}", spec.modulus)));
    }
    Ok(agg.passed_with(a.strict))
}

fn status_name(s: Status) -> String {
    serde_json::to_value(s).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

fn render_csv(agg: &AggregateReport) -> String {
    let mut out = String::from("identity,prime,status,eta_exponent,omega,bindings,points_tested,points_excluded,points_both_zero,tier1,tier2,failures\n");
    for r in &agg.reports {
        if r.instances.is_empty() {
            let _ = writeln!(out, "{},{},{},,,,0,0,0,,,0", agg.identity, r.prime, status_name(r.status));
        }
        for i in &r.instances {
            let bindings: Vec<String> = i.key.bindings.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let tier2 = serde_json::to_value(i.tier2).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                agg.identity,
                r.prime,
                status_name(r.status),
                i.key.eta_exponent,
                i.key.omega.map(|w| w.to_string()).unwrap_or_default(),
                bindings.join(" "),
                i.points_tested,
                i.points_excluded,
                i.points_both_zero,
                if i.tier1_pass { "PASS" } else { "FAIL" },
                tier2,
                i.failure_count
            );
        }
    }
    out
}

fn render_human(agg: &AggregateReport, strict: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} over {:?}", agg.identity, agg.primes_requested);
    for r in &agg.reports {
        let _ = writeln!(
            out,
            "  p = {:<5} {:<24} instances {} (skipped {}), points {} tested / {} excluded",
            r.prime,
            status_name(r.status),
            r.instances_total,
            r.instances_skipped,
            r.points_tested,
            r.points_excluded
        );
        if let Some(n) = &r.notice {
            let _ = writeln!(out, "      {n}");
        }
        for i in r.instances.iter().filter(|i| !i.tier1_pass || i.tier2 != hypertrace::identities::Tier2::Pass) {
            let mut key = format!("η^{}", i.key.eta_exponent);
            if let Some(w) = i.key.omega {
                let _ = write!(key, " ω={w}");
            }
            for (k, v) in &i.key.bindings {
                let _ = write!(key, " {k}={v}");
            }
            let _ = writeln!(out, "      [{key}] tier1 {} tier2 {:?}", if i.tier1_pass { "pass" } else { "FAIL" }, i.tier2);
            if let Some(c) = &i.constant {
                let _ = writeln!(out, "        constant {c}");
            }
            if let Some(c) = &i.expected {
                let _ = writeln!(out, "        expected {c}");
            }
            for w in &i.failures {
                let _ = writeln!(out, "        {:?} at {:?}: lhs {} rhs {}", w.kind, w.point, w.lhs, w.rhs);
            }
            if let Some(s) = &i.skipped {
                let _ = writeln!(out, "        skipped: {s}");
            }
        }
    }
    let _ = writeln!(out, "{}", if agg.passed_with(strict) { "PASS" } else { "FAIL" });
    out
}

fn parse_degrees(s: &str) -> anyhow::Result<u32> {
    let s = s.trim();
    let hi = match s.split_once("..") {
        Some((lo, hi)) => {
            if lo.trim() != "1" {
                bail!("degrees must start at 1");
            }
            hi.trim_start_matches('=')
        }
        None => s,
    };
    let m: u32 = hi.trim().parse().with_context(|| format!("bad degree range {s:?}"))?;
    if m == 0 {
        bail!("need at least one degree");
    }
    Ok(m)
}

#[derive(Serialize)]
struct CountReport {
    schema: &'static str,
    p: u64,
    #[serde(rename = "N")]
    n: u64,
    exponents: Vec<i64>,
    lambda: Vec<u64>,
    char_exponent: i64,
    /// `S_d` for `d = 1..m`.
    power_sums: Vec<CycloNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    charpoly: Option<Vec<CycloNum>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    charpoly_text: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    purity_max_relative_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

/// `T^2 + 2T + 5` when every coefficient is a rational number.
fn poly_text(cs: &[CycloNum]) -> Option<String> {
    let rs: Vec<_> = cs.iter().map(|c| c.as_rational()).collect::<Option<_>>()?;
    let mut out = String::new();
    for (d, r) in rs.iter().enumerate().rev() {
        if num_traits::Zero::is_zero(r) {
            continue;
        }
        let neg = *r < num_rational::BigRational::from_integer(0.into());
        let abs = if neg { -r.clone() } else { r.clone() };
        let one = num_traits::One::is_one(&abs);
        let mono = match d {
            0 => String::new(),
            1 => "T".into(),
            _ => format!("T^{d}"),
        };
        let body = if one && d > 0 { mono } else { format!("{abs}{mono}") };
        if out.is_empty() {
            out = if neg { format!("-{body}") } else { body };
        } else {
            let _ = write!(out, " {} {body}", if neg { '-' } else { '+' });
        }
    }
    Some(out)
}

fn count(a: CountArgs, exec: Execution, lfactor: bool) -> Result<bool, Failure> {
    let fam = CurveFamily::new(a.n, a.exps.clone()).map_err(usage)?;
    let rank = fam.eigenspace_dimension().map_err(usage)?;
    let m = parse_degrees(&a.degrees).map_err(usage)?;
    if lfactor && (m as usize) < rank {
        return Err(usage(anyhow!("the eigenspace has dimension {rank}; pass --degrees 1..{rank}")));
    }
    if a.lambda.len() != a.exps.len() {
        return Err(usage(anyhow!("{} exponents but {} branch points", a.exps.len(), a.lambda.len())));
    }
    let lam: Vec<u32> = a.lambda.iter().map(|&l| (l % a.p) as u32).collect();
    let mut sums = Vec::new();
    for d in 1..=m {
        let f = make_field(a.p, d, None).map_err(usage)?;
        sums.push(-hyp_point_sum(&fam, &lam, a.char_exp, &f, exec).map_err(usage)?);
    }
    let mut report = CountReport {
        schema: hypertrace::identities::SCHEMA,
        p: a.p,
        n: a.n,
        exponents: a.exps,
        lambda: a.lambda.clone(),
        char_exponent: a.char_exp,
        power_sums: sums.clone(),
        charpoly: None,
        charpoly_text: None,
        purity_max_relative_deviation: None,
        note: None,
    };
    let mut ok = true;
    if m as usize >= rank {
        match FrobeniusData::from_power_sums(a.p, a.n, a.char_exp, a.lambda, sums, rank) {
            Ok(data) => {
                report.charpoly_text = poly_text(&data.charpoly);
                match purity_check(&data) {
                    Ok(r) => report.purity_max_relative_deviation = Some(r.max_relative_deviation),
                    Err(e) => {
                        ok = false;
                        report.note = Some(e.to_string());
                    }
                }
                report.charpoly = Some(data.charpoly);
            }
            Err(e) => {
                ok = false;
                report.note = Some(e.to_string());
            }
        }
    } else {
        report.note = Some(format!("charpoly needs degrees 1..{rank}"));
    }
    match a.out {
        Format::Json => println!("{}", to_json(&report)),
        Format::Csv => {
            println!("degree,power_sum");
            for (d, s) in report.power_sums.iter().enumerate() {
                println!("{},{}", d + 1, serde_json::to_string(s).unwrap().replace(',', ";"));
            }
        }
        Format::Human => {
            for (d, s) in report.power_sums.iter().enumerate() {
                println!("S_{} = {s}", d + 1);
            }
            if let Some(cp) = &report.charpoly {
                for (i, c) in cp.iter().enumerate() {
                    println!("[T^{i}] {c}");
                }
            }
            if let Some(t) = &report.charpoly_text {
                println!("charpoly {t}");
            }
            if let Some(dev) = report.purity_max_relative_deviation {
                println!("purity: max relative deviation {dev:.3e}");
            }
            if let Some(n) = &report.note {
                println!("note: {n}");
            }
        }
    }
    Ok(ok)
}

fn rigidity(a: RigidityArgs) -> Result<bool, Failure> {
    let text = std::fs::read_to_string(&a.tuple).with_context(|| format!("reading {}", a.tuple.display())).map_err(usage)?;
    let t: MonodromyTuple = serde_json::from_str(&text).context("parsing monodromy tuple").map_err(usage)?;
    let rig = rigidity_index(&t).map_err(fail)?;
    match a.format {
        Format::Human | Format::Csv => println!("{rig}"),
        Format::Json => println!("{}", serde_json::json!({ "schema": hypertrace::identities::SCHEMA, "rank": t.rank(), "rigidity": rig })),
    }
    Ok(true)
}

#[derive(Serialize)]
struct ConvolveStep {
    lambda: String,
    rank: usize,
    irreducible: bool,
    rigidity: i64,
    tuple: MonodromyTuple,
}

fn convolve(a: ConvolveArgs) -> Result<bool, Failure> {
    if a.kummer.is_empty() {
        return Err(usage(anyhow!("--kummer needs at least one exponent")));
    }
    let points = |n: usize| -> Vec<Point> {
        let mut v: Vec<Point> = (0..n as i64 - 1).map(Point::int).collect();
        v.push(Point::Infinity);
        v
    };
    let mut cur = MatrixTuple::kummer(a.level, &a.kummer).map_err(usage)?;
    let mut steps = Vec::new();
    let record = |label: String, mt: &MatrixTuple| -> Result<ConvolveStep, Failure> {
        let tuple = mt.to_monodromy_tuple(points(mt.mats().len())).map_err(fail)?;
        Ok(ConvolveStep { lambda: label, rank: mt.rank(), irreducible: mt.is_irreducible(), rigidity: rigidity_index(&tuple).map_err(fail)?, tuple })
    };
    steps.push(record("input".into(), &cur)?);
    for &k in &a.lambda {
        cur = middle_convolution(&cur, RootOfUnity::new(a.level, k)).map_err(fail)?;
        steps.push(record(format!("zeta_{}^{}", a.level, k), &cur)?);
    }
    println!("{}", to_json(&serde_json::json!({ "schema": hypertrace::identities::SCHEMA, "level": a.level, "steps": steps })));
    Ok(true)
}

fn series(a: SeriesArgs) -> Result<bool, Failure> {
    if a.checks {
        let checks = analytic_checks().map_err(fail)?;
        let ok = checks.iter().all(|c| c.passes(1e-8));
        println!("{}", to_json(&serde_json::json!({ "schema": hypertrace::identities::SCHEMA, "tolerance": 1e-8, "checks": checks })));
        return Ok(ok);
    }
    let q = |s: &Option<String>| hypertrace::cyclotomic::parse_rational(s.as_deref().unwrap_or_default()).map_err(usage);
    let (pa, pb, pc) = (q(&a.a)?, q(&a.b)?, q(&a.c)?);
    let x = Complex64::new(a.x.unwrap_or_default(), a.im);
    let v = f21_series(&pa, &pb, &pc, x, a.terms).map_err(usage)?;
    println!(
        "{}",
        to_json(&serde_json::json!({ "a": pa.to_string(), "b": pb.to_string(), "c": pc.to_string(), "x": [x.re, x.im], "terms": a.terms, "value": [v.re, v.im] }))
    );
    Ok(true)
}
