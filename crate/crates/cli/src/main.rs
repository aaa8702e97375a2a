//! `morreylab`: evaluate maximal operators and Morrey-type norms on step
//! functions, run verification suites and print the divergence table.
//!
//! Exit status: 0 on success, 1 when a verified inequality fails, 2 on usage
//! or input errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use morreylab::experiments::{counterexample_table, run_suite, Suite, SuiteConfig};
use morreylab::io::read_step_function;
use morreylab::maxops::iterated_maximal_on;
use morreylab::norms::{
    bmo_p_seminorm, bmo_seminorm, characterization_functional, morrey_norm, weak_zygmund_morrey_norm, zygmund_morrey_norm,
    NormEstimate,
};
use morreylab::radial::{hardy_reduction_check, HardyReduction, zm_radial_functional, zm_radial_functional_m, RadialEstimate};
use morreylab::{
    commutator, fractional_maximal, maximal, maximal_commutator, FamilyMode, FamilySpec, Interval, RadialProfile,
    RefinePolicy, StepFunction,
};

#[derive(Parser)]
#[command(name = "morreylab", version, about = "Maximal operators and Morrey-type norms on step functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate M, M_alpha, C_b, [M,b] or the M² bracket at points.
    Maxfn(MaxfnArgs),
    /// Morrey, Zygmund-Morrey, BMO and radial norms as JSON estimates.
    Norm(NormArgs),
    /// Run a verification suite; exits 1 if any check fails.
    Verify(VerifyArgs),
    /// Bracket of ||f_K|| against the lower bound for ||M f_K||.
    Counterexample(CounterexampleArgs),
    /// Radial functionals of a profile and the Hardy reduction check.
    Radial(RadialArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyKind {
    Breakpoints,
    Dyadic,
    Dense,
}

#[derive(Args)]
struct FamilyArgs {
    /// Interval family standing in for "all intervals".
    #[arg(long, value_enum, default_value = "dyadic")]
    family: FamilyKind,
    /// Dyadic depth, or dense resolution.
    #[arg(long)]
    depth: Option<u32>,
    /// Maximum interval count.
    #[arg(long)]
    cap: Option<usize>,
}

impl FamilyArgs {
    fn spec(&self) -> FamilySpec {
        let mut s = match self.family {
            FamilyKind::Breakpoints => FamilySpec::breakpoint_pairs(),
            FamilyKind::Dyadic => FamilySpec::dyadic(self.depth.unwrap_or(12)),
            FamilyKind::Dense => FamilySpec::dense(self.depth.unwrap_or(256)),
        };
        if let Some(c) = self.cap {
            s.cap = c;
        }
        s
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "verbatim")]
enum Op {
    #[value(name = "M", alias = "m")]
    M,
    #[value(name = "Malpha", alias = "malpha")]
    Malpha,
    #[value(name = "Cb", alias = "cb")]
    Cb,
    #[value(name = "Mb", alias = "mb")]
    Mb,
    #[value(name = "M2", alias = "m2")]
    M2,
}

#[derive(Args)]
struct MaxfnArgs {
    #[arg(long)]
    input: PathBuf,
    /// Symbol b for Cb and Mb.
    #[arg(long)]
    symbol: Option<PathBuf>,
    #[arg(long, value_enum, ignore_case = true)]
    op: Op,
    #[arg(long)]
    alpha: Option<f64>,
    /// Comma-separated evaluation points.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    at: Vec<f64>,
    /// Uniform grid `start:end:count`, added to `--at`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Relative bracket width target for M².
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NormKind {
    Morrey,
    Zm,
    #[value(alias = "wzm")]
    WeakZm,
    #[value(alias = "char")]
    Characterization,
    Bmo,
    BmoP,
    ZmRadial,
    ZmRadialM,
}

#[derive(Args)]
struct NormArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    kind: NormKind,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    /// Dimension for radial kinds.
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[command(flatten)]
    family: FamilyArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Corpus size of the randomized suites.
    #[arg(long, default_value_t = 12)]
    size: usize,
    #[arg(long = "K", alias = "k", value_delimiter = ',', default_value = "8,16,32,64")]
    k: Vec<usize>,
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Input f for the pointwise suite.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Symbol b for the pointwise suite.
    #[arg(long)]
    symbol: Option<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CounterexampleArgs {
    #[arg(long = "K", alias = "k", value_delimiter = ',', default_value = "8,16,32,64")]
    k: Vec<usize>,
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 10)]
    depth: u32,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct RadialArgs {
    /// Profile on [0, ∞).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[command(flatten)]
    output: OutputArgs,
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<morreylab::Error> for Failure {
    fn from(e: morreylab::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn emit(output: &OutputArgs, text: &str) -> Outcome {
    match &output.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize") + "\n"
}

fn read(path: &Path) -> Result<StepFunction, Failure> {
    read_step_function(path).map_err(|e| {
        let m = e.to_string();
        let shown = path.display().to_string();
        Failure::Usage(if m.contains(&shown) { m } else { format!("{shown}: {m}") })
    })
}

fn points(args: &MaxfnArgs) -> Result<Vec<f64>, Failure> {
    let mut xs = args.at.clone();
    if let Some(g) = &args.grid {
        let parts: Vec<&str> = g.split(':').collect();
        let bad = || Failure::Usage(format!("--grid expects start:end:count, got {g:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let a: f64 = parts[0].parse().map_err(|_| bad())?;
        let b: f64 = parts[1].parse().map_err(|_| bad())?;
        let n: usize = parts[2].parse().map_err(|_| bad())?;
        if n == 0 || !(a.is_finite() && b.is_finite()) {
            return Err(bad());
        }
        xs.extend((0..n).map(|i| if n == 1 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 }));
    }
    if xs.is_empty() {
        return Err(Failure::Usage("no evaluation points: pass --at or --grid".into()));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Failure::Usage("evaluation points must be finite".into()));
    }
    Ok(xs)
}

#[derive(Serialize)]
struct PointValue {
    x: f64,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hi: Option<f64>,
}

fn cmd_maxfn(args: &MaxfnArgs) -> Outcome {
    let f = read(&args.input)?;
    let xs = points(args)?;
    let b = match (&args.symbol, args.op) {
        (Some(p), _) => Some(read(p)?),
        (None, Op::Cb | Op::Mb) => return Err(Failure::Usage("--op Cb and Mb need --symbol".into())),
        (None, _) => None,
    };
    let rows: Vec<PointValue> = match args.op {
        Op::M => xs.iter().map(|&x| PointValue { x, value: maximal(&f, x), lo: None, hi: None }).collect(),
        Op::Malpha => {
            let alpha = args.alpha.ok_or_else(|| Failure::Usage("--op Malpha needs --alpha".into()))?;
            xs.iter()
                .map(|&x| Ok(PointValue { x, value: fractional_maximal(&f, alpha, x)?, lo: None, hi: None }))
                .collect::<Result<_, Failure>>()?
        }
        Op::Cb => {
            let b = b.as_ref().unwrap();
            xs.iter().map(|&x| PointValue { x, value: maximal_commutator(b, &f, x), lo: None, hi: None }).collect()
        }
        Op::Mb => {
            let b = b.as_ref().unwrap();
            xs.iter().map(|&x| PointValue { x, value: commutator(b, &f, x), lo: None, hi: None }).collect()
        }
        Op::M2 => {
            if !(args.tol > 0.0 && args.tol < 1.0) {
                return Err(Failure::Usage(format!("--tol must lie in (0, 1), got {}", args.tol)));
            }
            match f.support() {
                None => xs.iter().map(|&x| PointValue { x, value: 0.0, lo: Some(0.0), hi: Some(0.0) }).collect(),
                Some(s) => {
                    let hull = xs.iter().fold(s, |h: Interval, &x| h.including(x));
                    let pol = RefinePolicy::with_tol(args.tol);
                    let br = iterated_maximal_on(&f, &pol.domain_for(&hull), &pol);
                    xs.iter()
                        .map(|&x| {
                            let (lo, hi) = (br.lower_at(x), br.upper_at(x));
                            PointValue { x, value: hi, lo: Some(lo), hi: Some(hi) }
                        })
                        .collect()
                }
            }
        }
    };
    let text = match args.output.format.unwrap_or(Format::Csv) {
        Format::Json => json(&rows),
        Format::Csv => {
            let bracket = args.op == Op::M2;
            let mut s = String::from(if bracket { "x,value,lo,hi\n" } else { "x,value\n" });
            for r in &rows {
                write!(s, "{},{}", num(r.x), num(r.value)).unwrap();
                if bracket {
                    write!(s, ",{},{}", num(r.lo.unwrap()), num(r.hi.unwrap())).unwrap();
                }
                s.push('\n');
            }
            s
        }
    };
    emit(&args.output, &text)
}

fn estimate_csv(e: &NormEstimate) -> String {
    let (l, r) = e.argmax.map_or((f64::NAN, f64::NAN), |q| (q.left(), q.right()));
    format!("value,upper_bound,argmax_left,argmax_right\n{},{},{},{}\n", num(e.value), num(e.upper_bound), num(l), num(r))
}

fn radial_csv(e: &RadialEstimate) -> String {
    format!("value,upper_bound,argmax\n{},{},{}\n", num(e.value), num(e.upper_bound), num(e.argmax))
}

fn cmd_norm(args: &NormArgs) -> Outcome {
    let f = read(&args.input)?;
    let fam = args.family.spec();
    let format = args.output.format.unwrap_or(Format::Json);
    let text = match args.kind {
        NormKind::ZmRadial | NormKind::ZmRadialM => {
            let p = RadialProfile::new(f, args.n)?;
            let e = if args.kind == NormKind::ZmRadial {
                zm_radial_functional(&p, args.lambda)?
            } else {
                zm_radial_functional_m(&p, args.lambda)?
            };
            match format {
                Format::Json => json(&e),
                Format::Csv => radial_csv(&e),
            }
        }
        kind => {
            let e = match kind {
                NormKind::Morrey => morrey_norm(&f, args.p, args.lambda, &fam)?,
                NormKind::Zm => zygmund_morrey_norm(&f, args.lambda, &fam, args.tol)?,
                NormKind::WeakZm => weak_zygmund_morrey_norm(&f, args.lambda, &fam, args.tol)?,
                NormKind::Characterization => characterization_functional(&f, args.lambda, &fam)?,
                NormKind::Bmo => bmo_seminorm(&f, &fam)?,
                NormKind::BmoP => bmo_p_seminorm(&f, args.p, &fam)?,
                NormKind::ZmRadial | NormKind::ZmRadialM => unreachable!("handled above"),
            };
            match format {
                Format::Json => json(&e),
                Format::Csv => estimate_csv(&e),
            }
        }
    };
    emit(&args.output, &text)
}

fn cmd_verify(args: &VerifyArgs) -> Outcome {
    let suite: Suite = args.suite.parse()?;
    let fam = args.family.spec();
    let cfg = SuiteConfig {
        seed: args.seed,
        size: args.size,
        ks: args.k.clone(),
        lambda: args.lambda,
        tol: args.tol,
        family: if matches!(fam.mode, FamilyMode::Dyadic { depth: 12 }) && args.family.depth.is_none() {
            SuiteConfig::default().family
        } else {
            fam
        },
        b: args.symbol.as_deref().map(read).transpose()?,
        f: args.input.as_deref().map(read).transpose()?,
        ..SuiteConfig::default()
    };
    let reports = run_suite(suite, &cfg)?;
    let text = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => json(&reports),
        Format::Csv => {
            let mut s = String::from("suite,check,value,bound,margin,passed\n");
            for r in &reports {
                for c in &r.checks {
                    writeln!(s, "{},\"{}\",{},{},{},{}", r.suite, c.name.replace('"', "'"), num(c.value), num(c.bound), num(c.margin), c.passed)
                        .unwrap();
                }
            }
            s
        }
    };
    emit(&args.output, &text)?;
    let failed: Vec<String> = reports.iter().flat_map(|r| r.failures().map(move |c| format!("{}: {}", r.suite, c.name))).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("{} check(s) failed: {}", failed.len(), failed.join("; "))))
    }
}

fn cmd_counterexample(args: &CounterexampleArgs) -> Outcome {
    let t = counterexample_table(&args.k, args.lambda, &FamilySpec::dyadic(args.depth), args.tol)?;
    let text = match args.output.format.unwrap_or(Format::Csv) {
        Format::Json => json(&t),
        Format::Csv => {
            let mut s = String::from("K,f_norm_lo,f_norm_hi,Mf_lower_bound,ratio\n");
            for r in &t.rows {
                writeln!(s, "{},{},{},{},{}", r.k, num(r.f_norm_lo), num(r.f_norm_hi), num(r.mf_lower_bound), num(r.ratio)).unwrap();
            }
            s
        }
    };
    emit(&args.output, &text)
}

#[derive(Serialize)]
struct RadialReport {
    dimension: u32,
    lambda: f64,
    nonincreasing: bool,
    functional: RadialEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    functional_m: Option<RadialEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hardy: Option<HardyReduction>,
}

fn cmd_radial(args: &RadialArgs) -> Outcome {
    let p = RadialProfile::new(read(&args.input)?, args.n)?;
    let functional = zm_radial_functional(&p, args.lambda)?;
    let (functional_m, hardy) = if p.is_nonincreasing() {
        (Some(zm_radial_functional_m(&p, args.lambda)?), Some(hardy_reduction_check(&p, args.lambda)?))
    } else {
        (None, None)
    };
    let rep = RadialReport { dimension: args.n, lambda: args.lambda, nonincreasing: p.is_nonincreasing(), functional, functional_m, hardy };
    let text = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => json(&rep),
        Format::Csv => {
            let opt = |v: Option<f64>| v.map_or(String::new(), num);
            format!(
                "value,upper_bound,argmax,value_m,hardy_bound\n{},{},{},{},{}\n",
                num(rep.functional.value),
                num(rep.functional.upper_bound),
                num(rep.functional.argmax),
                opt(rep.functional_m.map(|e| e.value)),
                opt(rep.hardy.map(|h| h.bound))
            )
        }
    };
    emit(&args.output, &text)
}

fn configure_threads() -> Outcome {
    if let Ok(v) = std::env::var("MORREYLAB_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| Failure::Usage(format!("MORREYLAB_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(Failure::Usage("MORREYLAB_THREADS must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| match &cli.command {
        Command::Maxfn(a) => cmd_maxfn(a),
        Command::Norm(a) => cmd_norm(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Counterexample(a) => cmd_counterexample(a),
        Command::Radial(a) => cmd_radial(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(m)) => {
            eprintln!("morreylab: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("morreylab: {m}");
            ExitCode::from(2)
        }
    }
}
