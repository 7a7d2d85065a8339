mod cache;
mod config;
mod verify;

use std::fmt::Display;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex;
use serde::Serialize;

use seifert_rt::arith::{cf_expand_with, dedekind_sum, rademacher_phi, CfStrategy, SL2Z};
use seifert_rt::asymptotics::{lens_expansion, residual_sweep, ResidualReport};
use seifert_rt::invariants::{
    tau_closed_form, tau_lens, tau_matrix_form, InvariantResult, LensMethod, Method, SelfDualSignTable,
};
use seifert_rt::rep::{rep_bruteforce, rep_closed, IndexedMatrix};
use seifert_rt::scalar::to_c64;
use seifert_rt::{DoubleDouble, ModularData, RootSystem, SeifertPresentation};

use cache::{Cache, Persist};
use config::{Format, Precision, RawConfig, RunConfig};

#[derive(Parser)]
#[command(name = "seifert-rt", version, about = "Quantum invariants of Seifert fibered spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the root-system data of an algebra.
    Describe {
        #[arg(long)]
        algebra: String,
    },
    /// Rademacher Φ of an SL(2,Z) matrix.
    #[command(allow_negative_numbers = true)]
    Phi { a: i64, b: i64, c: i64, d: i64 },
    /// Dedekind sum s(s, q).
    #[command(allow_negative_numbers = true)]
    Dedekind { s: i64, q: i64 },
    /// Continued fraction of α/β, terms listed innermost first.
    #[command(allow_negative_numbers = true)]
    Cf {
        alpha: i64,
        beta: i64,
        #[arg(long, value_enum, default_value_t = Strategy::Ceiling)]
        strategy: Strategy,
    },
    /// Modular data (S, T, quantum dimensions) at one level.
    ModularData {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        level: i64,
        /// Include the S and T matrices.
        #[arg(long)]
        matrices: bool,
    },
    /// The projective representation R(U) of an SL(2,Z) matrix.
    ///
    /// The closed form returns R(εU) with the sign ε of the canonical
    /// decomposition; `both` compares it with the generator product for εU.
    #[command(allow_negative_numbers = true)]
    Rep {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        level: i64,
        /// Entries a,b,c,d.
        #[arg(long, value_delimiter = ',', num_args = 1..=4, required = true)]
        matrix: Vec<i64>,
        #[arg(long, value_enum, default_value_t = RepMethod::Closed)]
        method: RepMethod,
    },
    /// Evaluate τ_r for a Seifert manifold or lens space.
    #[command(allow_negative_numbers = true)]
    Invariant(InvariantArgs),
    /// Large-r expansion of τ_r(L(p,q)) with residual fits.
    #[command(allow_negative_numbers = true)]
    Asymptotics(AsymptoticsArgs),
    /// Run a property suite and report pass or fail.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Ceiling,
    Nearest,
}

impl From<Strategy> for CfStrategy {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::Ceiling => CfStrategy::Ceiling,
            Strategy::Nearest => CfStrategy::Nearest,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RepMethod {
    Brute,
    Closed,
    /// Compare the two and report the largest entry difference.
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Matrix,
    Closed,
    LensCf,
    LensRep,
    LensLatticeSum,
    All,
}

#[derive(Args)]
struct InvariantArgs {
    #[arg(long, default_value = "A1")]
    algebra: String,
    #[arg(long)]
    level: Option<i64>,
    /// Levels as a:b or a:b:step.
    #[arg(long)]
    r_range: Option<String>,
    /// Lens space L(p, q).
    #[arg(long, num_args = 2, value_names = ["P", "Q"], conflicts_with = "seifert", required_unless_present = "seifert")]
    lens: Option<Vec<i64>>,
    /// Presentation such as "o;0|-1;(2,1),(3,1),(5,1)".
    #[arg(long)]
    seifert: Option<String>,
    /// Defaults to matrix for Seifert input and lens-cf for lens input.
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long, value_enum)]
    precision: Option<Precision>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Maximum number of phase evaluations for the closed form.
    #[arg(long)]
    budget: Option<u128>,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long)]
    no_cache: bool,
    /// Uniform sign ε_λ on self-dual weights, needed when a_ε·g is odd.
    #[arg(long)]
    self_dual_sign: Option<i8>,
    /// Allowed |a − b| / max(|a|, |b|, 1) between methods.
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
}

#[derive(Args)]
struct AsymptoticsArgs {
    #[arg(long, num_args = 2, value_names = ["P", "Q"], required = true)]
    lens: Vec<i64>,
    #[arg(long, default_value = "A1")]
    algebra: String,
    #[arg(long, default_value_t = 2)]
    order: usize,
    #[arg(long, default_value = "20:200")]
    r_range: String,
    #[arg(long, value_enum)]
    precision: Option<Precision>,
    /// Write the residual table here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum, default_value_t = verify::Suite::All)]
    suite: verify::Suite,
    /// Restrict the algebra; otherwise A1 and A2 at small levels.
    #[arg(long)]
    algebra: Option<String>,
    #[arg(long)]
    level: Option<i64>,
    #[arg(long)]
    r_range: Option<String>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
}

/// Exit status 2 for bad input, 1 for failed computations or checks.
enum Fail {
    Input(anyhow::Error),
    Compute(anyhow::Error),
}

type Outcome = Result<bool, Fail>;

fn input<E: Display>(e: E) -> Fail {
    Fail::Input(anyhow!("{e}"))
}

fn compute<E: Into<anyhow::Error>>(e: E) -> Fail {
    Fail::Compute(e.into())
}

fn print_json<S: Serialize>(v: &S) -> Result<(), Fail> {
    let s = serde_json::to_string_pretty(v).map_err(compute)?;
    match writeln!(std::io::stdout().lock(), "{s}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(compute(e)),
        _ => Ok(()),
    }
}

fn pair<T: seifert_rt::Real>(z: Complex<T>) -> [f64; 2] {
    let z = to_c64(z);
    [z.re, z.im]
}

fn matrix_json(m: &IndexedMatrix<f64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.dim())
        .map(|i| (0..m.dim()).map(|j| pair(m.get(i, j))).collect())
        .collect()
}

fn algebra(name: &str) -> Result<Arc<RootSystem>, Fail> {
    RootSystem::from_name(name)
        .map(Arc::new)
        .map_err(|e| input(format!("--algebra {name}: {e}")))
}

fn modular64(name: &str, r: i64) -> Result<ModularData<f64>, Fail> {
    ModularData::new(algebra(name)?, r).map_err(|e| input(format!("--level {r}: {e}")))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Describe { algebra: a } => print_json(&algebra(&a)?.summary())?,
        Command::Phi { a, b, c, d } => {
            let u = SL2Z::new(a, b, c, d).map_err(input)?;
            print_json(&serde_json::json!({ "matrix": u, "phi": rademacher_phi(&u).to_string() }))?;
        }
        Command::Dedekind { s, q } => {
            let v = dedekind_sum(s, q).map_err(input)?;
            print_json(&serde_json::json!({ "s": s, "q": q, "value": v.to_string() }))?;
        }
        Command::Cf { alpha, beta, strategy } => {
            let cf = cf_expand_with(alpha, beta, strategy.into()).map_err(input)?;
            let value = cf.evaluate().map(|x| x.to_string());
            print_json(&serde_json::json!({ "alpha": alpha, "beta": beta, "terms": cf.terms, "value": value }))?;
        }
        Command::ModularData {
            algebra,
            level,
            matrices,
        } => {
            print_json(&modular64(&algebra, level)?.summary(matrices))?;
        }
        Command::Rep {
            algebra,
            level,
            matrix,
            method,
        } => {
            let md = modular64(&algebra, level)?;
            if matrix.len() != 4 {
                return Err(input(format!("--matrix needs four entries, got {}", matrix.len())));
            }
            let u = SL2Z::new(matrix[0], matrix[1], matrix[2], matrix[3]).map_err(input)?;
            if let RepMethod::Both = method {
                let (eps, closed) = rep_closed(&md, &u).map_err(compute)?;
                let brute = rep_bruteforce(&md, &if eps == 1 { u } else { -u });
                let diff = brute.max_abs_diff(&closed);
                print_json(&serde_json::json!({
                    "algebra": md.root_system().name(),
                    "level": level,
                    "matrix": u,
                    "eps": eps,
                    "max_discrepancy": diff,
                }))?;
                return Ok(diff <= 1e-9);
            }
            let (eps, m) = match method {
                RepMethod::Closed => {
                    let (e, m) = rep_closed(&md, &u).map_err(compute)?;
                    (Some(e), m)
                }
                _ => (None, rep_bruteforce(&md, &u)),
            };
            print_json(&serde_json::json!({
                "algebra": md.root_system().name(),
                "level": level,
                "matrix": u,
                "eps": eps,
                "index_set": md.index_set(),
                "entries": matrix_json(&m),
            }))?;
        }
        Command::Invariant(args) => return invariant(args),
        Command::Asymptotics(args) => return asymptotics(args),
        Command::Verify(args) => return run_verify(args),
    }
    Ok(true)
}

enum Target {
    Lens(i64, i64),
    Seifert(SeifertPresentation),
}

impl Target {
    fn label(&self) -> String {
        match self {
            Target::Lens(p, q) => format!("L({p},{q})"),
            Target::Seifert(m) => m.to_string(),
        }
    }

    fn methods(&self, m: Option<MethodArg>) -> Result<Vec<Method>, Fail> {
        let lens = matches!(self, Target::Lens(..));
        let pick = |a: MethodArg| match a {
            MethodArg::Matrix => Method::Matrix,
            MethodArg::Closed => Method::Closed,
            MethodArg::LensCf => Method::LensCf,
            MethodArg::LensRep => Method::LensRep,
            MethodArg::LensLatticeSum => Method::LensLatticeSum,
            MethodArg::All => unreachable!(),
        };
        match m {
            None if lens => Ok(vec![Method::LensCf]),
            None => Ok(vec![Method::Matrix]),
            Some(MethodArg::All) if lens => Ok(vec![
                Method::LensCf,
                Method::LensRep,
                Method::LensLatticeSum,
                Method::Matrix,
                Method::Closed,
            ]),
            Some(MethodArg::All) => Ok(vec![Method::Matrix, Method::Closed]),
            Some(a @ (MethodArg::LensCf | MethodArg::LensRep | MethodArg::LensLatticeSum)) if !lens => {
                Err(input(format!("--method {} needs --lens", pick(a).name())))
            }
            Some(a) => Ok(vec![pick(a)]),
        }
    }
}

#[derive(Serialize)]
struct Agreement {
    level: i64,
    methods: usize,
    max_discrepancy: f64,
    agree: bool,
}

#[derive(Serialize)]
struct InvariantReport {
    results: Vec<InvariantResult>,
    agreement: Vec<Agreement>,
}

fn evaluate<T: Persist>(
    md: &ModularData<T>,
    target: &Target,
    method: Method,
    signs: Option<&SelfDualSignTable>,
    budget: u128,
) -> anyhow::Result<Complex<T>> {
    let seifert = |t: &Target| match t {
        Target::Lens(p, q) => SeifertPresentation::lens(*p, *q).map_err(anyhow::Error::from),
        Target::Seifert(m) => Ok(m.clone()),
    };
    let (p, q) = match target {
        Target::Lens(p, q) => (*p, *q),
        Target::Seifert(_) => (0, 0),
    };
    Ok(match method {
        Method::Matrix => tau_matrix_form(md, &seifert(target)?, signs, CfStrategy::Ceiling)?,
        Method::Closed => tau_closed_form(md, &seifert(target)?, signs, budget)?,
        Method::LensCf => tau_lens(md, p, q, LensMethod::ContinuedFraction)?,
        Method::LensRep => tau_lens(md, p, q, LensMethod::Representation)?,
        Method::LensLatticeSum => tau_lens(md, p, q, LensMethod::LatticeSum)?,
    })
}

fn invariant_at<T: Persist>(
    cfg: &RunConfig,
    target: &Target,
    methods: &[Method],
    sign: Option<i8>,
) -> Result<Vec<InvariantResult>, Fail> {
    let cache = cfg.cache_dir.clone().map(Cache::new);
    let mut out = Vec::new();
    for &r in &cfg.levels {
        let md = ModularData::<T>::new(cfg.algebra.clone(), r).map_err(input)?;
        let signs = sign.map(|s| SelfDualSignTable::uniform(&md, s));
        for &method in methods {
            let key = format!(
                "{}|{r}|{}|{}|{}|{}",
                md.root_system().name(),
                target.label(),
                method.name(),
                T::NAME,
                sign.map_or("none".to_string(), |s| s.to_string())
            );
            if let Some((res, _)) = cache.as_ref().and_then(|c| c.load::<T>(&key)) {
                out.push(res);
                continue;
            }
            let z = evaluate(&md, target, method, signs.as_ref(), cfg.budget)
                .with_context(|| format!("{} at level {r} by {}", target.label(), method.name()))
                .map_err(Fail::Compute)?;
            let res = InvariantResult::new(&md, target.label(), method, z);
            if let Some(c) = &cache {
                if let Err(e) = c.store(&key, &res, z) {
                    eprintln!("warning: cache write failed: {e:#}");
                }
            }
            out.push(res);
        }
    }
    Ok(out)
}

fn invariant(args: InvariantArgs) -> Outcome {
    let target = match (&args.lens, &args.seifert) {
        (Some(l), _) => Target::Lens(l[0], l[1]),
        (None, Some(s)) => Target::Seifert(s.parse().map_err(|e| input(format!("--seifert '{s}': {e}")))?),
        (None, None) => return Err(input("one of --lens or --seifert is required")),
    };
    if let Target::Lens(p, q) = target {
        SeifertPresentation::lens(p, q).map_err(|e| input(format!("--lens {p} {q}: {e}")))?;
    }
    if let Some(s) = args.self_dual_sign {
        if s != 1 && s != -1 {
            return Err(input("--self-dual-sign must be 1 or -1"));
        }
    }
    let methods = target.methods(args.method)?;
    let cfg = RawConfig {
        algebra: &args.algebra,
        level: args.level,
        r_range: args.r_range.as_deref(),
        default_range: None,
        precision: args.precision,
        budget: args.budget,
        cache_dir: args.cache_dir.clone(),
        no_cache: args.no_cache,
        format: args.format,
    }
    .validate()
    .map_err(input)?;
    let results = match cfg.precision {
        Precision::Double => invariant_at::<f64>(&cfg, &target, &methods, args.self_dual_sign)?,
        Precision::High => invariant_at::<DoubleDouble>(&cfg, &target, &methods, args.self_dual_sign)?,
    };
    let agreement: Vec<Agreement> = results
        .chunks(methods.len())
        .map(|rs| {
            let base = rs[0].value();
            let max_discrepancy = rs
                .iter()
                .map(|x| (x.value() - base).norm() / base.norm().max(x.value().norm()).max(1.0))
                .fold(0.0, f64::max);
            Agreement {
                level: rs[0].level,
                methods: rs.len(),
                max_discrepancy,
                agree: max_discrepancy <= args.tolerance,
            }
        })
        .collect();
    let ok = agreement.iter().all(|a| a.agree);
    let report = InvariantReport { results, agreement };
    match cfg.format {
        Format::Json => print_json(&report)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            w.write_record(["algebra", "level", "manifold", "method", "precision", "re", "im"])
                .map_err(compute)?;
            for x in &report.results {
                let lvl = x.level.to_string();
                let rec = [
                    &x.algebra,
                    &lvl,
                    &x.manifold,
                    x.method.name(),
                    &x.precision,
                    &x.digits[0],
                    &x.digits[1],
                ];
                w.write_record(rec).map_err(compute)?;
            }
            w.flush().map_err(compute)?;
        }
        Format::Plain => {
            let mut out = std::io::stdout().lock();
            for x in &report.results {
                writeln!(
                    out,
                    "{} r={} {} {}: ({}, {})",
                    x.algebra,
                    x.level,
                    x.manifold,
                    x.method.name(),
                    x.digits[0],
                    x.digits[1]
                )
                .map_err(compute)?;
            }
            for a in report.agreement.iter().filter(|a| a.methods > 1) {
                let verdict = if a.agree { "agree" } else { "DISAGREE" };
                writeln!(
                    out,
                    "r={}: {} methods {verdict}, max discrepancy {:.3e}",
                    a.level, a.methods, a.max_discrepancy
                )
                .map_err(compute)?;
            }
        }
    }
    Ok(ok)
}

#[derive(Serialize)]
struct AsymptoticsReport {
    expansion: seifert_rt::asymptotics::ExpansionSummary,
    phases: Vec<String>,
    period: i64,
    fits: Vec<FitSummary>,
}

#[derive(Serialize)]
struct FitSummary {
    order: usize,
    pooled: Option<seifert_rt::asymptotics::SlopeFit>,
    per_class: Vec<(i64, Option<seifert_rt::asymptotics::SlopeFit>)>,
    worst_slope: Option<f64>,
}

#[derive(Serialize)]
struct CsvRow {
    r: i64,
    order: usize,
    exact_re: f64,
    exact_im: f64,
    truncated_re: f64,
    truncated_im: f64,
    residual: f64,
    at_floor: bool,
}

fn asymptotics_at<T: seifert_rt::Real>(
    rs: &Arc<RootSystem>,
    p: i64,
    q: i64,
    order: usize,
    levels: &[i64],
) -> Result<(AsymptoticsReport, Vec<ResidualReport>), Fail> {
    let exp = lens_expansion::<T>(rs, p, q, order).map_err(input)?;
    let reports: Vec<ResidualReport> = (0..=order)
        .map(|n| residual_sweep(rs, &exp, n, levels).map_err(compute))
        .collect::<Result<_, _>>()?;
    let fits = reports
        .iter()
        .map(|r| FitSummary {
            order: r.order,
            pooled: r.pooled,
            per_class: r.per_class.clone(),
            worst_slope: r.worst_slope,
        })
        .collect();
    Ok((
        AsymptoticsReport {
            expansion: exp.summary(),
            phases: exp.phases().iter().map(|x| x.to_string()).collect(),
            period: exp.period(),
            fits,
        },
        reports,
    ))
}

fn asymptotics(args: AsymptoticsArgs) -> Outcome {
    let (p, q) = (args.lens[0], args.lens[1]);
    let cfg = RawConfig {
        algebra: &args.algebra,
        r_range: Some(&args.r_range),
        precision: args.precision,
        no_cache: true,
        ..Default::default()
    }
    .validate()
    .map_err(input)?;
    let (report, sweeps) = match cfg.precision {
        Precision::Double => asymptotics_at::<f64>(&cfg.algebra, p, q, args.order, &cfg.levels)?,
        Precision::High => asymptotics_at::<DoubleDouble>(&cfg.algebra, p, q, args.order, &cfg.levels)?,
    };
    if let Some(path) = &args.csv {
        let mut w = csv::Writer::from_path(path)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(compute)?;
        for s in &sweeps {
            for row in &s.rows {
                w.serialize(CsvRow {
                    r: row.r,
                    order: s.order,
                    exact_re: row.exact[0],
                    exact_im: row.exact[1],
                    truncated_re: row.truncated[0],
                    truncated_im: row.truncated[1],
                    residual: row.residual,
                    at_floor: row.at_floor,
                })
                .map_err(compute)?;
            }
        }
        w.flush().map_err(compute)?;
    }
    print_json(&report)?;
    Ok(true)
}

fn run_verify(args: VerifyArgs) -> Outcome {
    let targets = match &args.algebra {
        None if args.level.is_none() && args.r_range.is_none() => verify::Options::desk_scale(),
        None => return Err(input("--level and --r-range need --algebra")),
        Some(a) => {
            let h = algebra(a)?.dual_coxeter();
            let range = format!("{h}:{}", h + 4);
            let cfg = RawConfig {
                algebra: a,
                level: args.level,
                r_range: args.r_range.as_deref(),
                default_range: Some(&range),
                no_cache: true,
                ..Default::default()
            }
            .validate()
            .map_err(input)?;
            vec![(cfg.algebra, cfg.levels)]
        }
    };
    let opts = verify::Options {
        targets,
        seed: args.seed,
        trials: args.trials,
    };
    let report = verify::run(args.suite, &opts);
    print_json(&report)?;
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Fail::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Fail::Compute(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
