//! Command-line front end: argument grammar, run configuration, report
//! rendering and certificate files. `main` is a thin wrapper around [`run`].

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::abcwaring::{analyze_triple, check_baker_refinement, scan_triples, waring_check};
use crate::classfield::{class_number, gauss_list, idoneal_numbers, near_integer};
use crate::contfrac::{expand, expand_rational, solve_pell};
use crate::error::{Error, Result};
use crate::logforms::{
    bound_bw93, bound_dependence_relation, bound_lf4, bound_mordell, bound_sharp77, bound_thue_cubic, evaluate,
    BoundRequest, Formula,
};
use crate::numeric::{compare, parse_expr, parse_rational, Dyadic, Real, DEFAULT_CEILING};
use crate::pade::{approximants_to_cube_root2, pade_coefficients, verify_effective_measure};
use crate::reduction::{reduce_to_fixpoint, KPolicy, ReductionCertificate, ReductionProblem};
use crate::solvers::{
    exact_sqrt, solve_exponential_gap, solve_mordell, solve_quadruple_with, solve_thue_cubic, sqrt3_solution,
    sqube_gaps, squbes,
};

/// Environment variable holding the default precision ceiling in bits.
pub const CEILING_ENV: &str = "DIOPHANT_PRECISION_CEILING";
pub const MIN_CEILING: u32 = 128;
const CERTIFICATE_FORMAT: &str = "diophant-certificate/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub precision_ceiling: u32,
    /// Worker threads for parallel searches.
    pub parallelism: usize,
    pub format: OutputFormat,
    /// Where certificate files are written; `None` disables saving.
    pub certificate_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision_ceiling: DEFAULT_CEILING,
            parallelism: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            format: OutputFormat::Json,
            certificate_dir: None,
        }
    }
}

impl RunConfig {
    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("{}:{}: expected key = value", path.display(), i + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = || Error::invalid(format!("bad value {value:?} for {key}"));
        match key.replace('-', "_").as_str() {
            "precision_ceiling" | "precision_ceiling_bits" => {
                self.precision_ceiling = value.parse().map_err(|_| bad())?
            }
            "parallelism" => self.parallelism = value.parse().map_err(|_| bad())?,
            "format" | "output_format" => {
                self.format = OutputFormat::from_str(value, true).map_err(|_| bad())?;
            }
            "certificate_dir" => self.certificate_dir = Some(PathBuf::from(value)),
            _ => return Err(Error::invalid(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.precision_ceiling < MIN_CEILING {
            return Err(Error::invalid(format!(
                "precision ceiling must be at least {MIN_CEILING} bits"
            )));
        }
        if self.parallelism == 0 {
            return Err(Error::invalid("parallelism must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "diophant",
    version,
    about = "Certified computations for effective Diophantine problems",
    long_about = "Certified computations for effective Diophantine problems: continued fractions, \
explicit bounds from linear forms in logarithms, Baker-Davenport reduction, complete solution of \
small equations, Pade approximants, class numbers and abc triples.\n\n\
Reports are JSON on standard output. Errors are JSON on standard error, with exit code 2 for \
invalid parameters and 3 when the precision ceiling is reached."
)]
pub struct Cli {
    /// Precision ceiling in bits for certified real arithmetic.
    #[arg(long, global = true, env = CEILING_ENV)]
    pub precision_ceiling: Option<u32>,
    /// Worker threads for parallel searches.
    #[arg(long, short = 'j', global = true)]
    pub parallelism: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Save replayable certificates in this directory.
    #[arg(long, global = true)]
    pub certificate_dir: Option<PathBuf>,
    /// Configuration file with key = value lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Continued fraction expansions and Pell's equation x^2 - d y^2 = 1.
    #[command(subcommand)]
    Cf(CfCmd),
    /// Explicit upper bounds from linear forms in logarithms.
    #[command(subcommand)]
    Bound(BoundCmd),
    /// Baker-Davenport reduction of |r theta - s + phi| < A C^-r for r <= 10^L.
    Reduce(ReduceArgs),
    /// Complete or bounded solution of specific equations.
    #[command(subcommand)]
    Solve(SolveCmd),
    /// Pade approximants to (1-x)^(1/3) and the cube root of 2.
    #[command(subcommand)]
    Pade(PadeCmd),
    /// Class numbers of Q(sqrt(-d)), idoneal numbers, exp(pi sqrt d).
    #[command(subcommand)]
    Class(ClassCmd),
    /// abc triples: a + b + c = 0 against max <= C0 S (log S)^s / s!.
    #[command(subcommand)]
    Abc(AbcCmd),
    /// Checks ||(3/2)^k|| >= (3^k + 2^k)/(4^k - 2^k) and g(k) = 2^k + [(3/2)^k] - 2.
    Waring(WaringArgs),
    /// Replays every certificate in a saved file with fresh arithmetic.
    Verify { file: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum CfCmd {
    /// Partial quotients and convergents p_i/q_i of a real expression.
    Expand {
        /// Expression such as 355/113, pi, sqrt(2), 2^(1/3), log(3)/log(2).
        x: String,
        /// Number of partial quotients for irrational input.
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
    /// Fundamental solution of x^2 - d y^2 = 1 from the period of sqrt(d).
    Pell {
        d: BigInt,
        /// Permit d >= 10^8, whose solutions can be enormous.
        #[arg(long)]
        allow_long: bool,
    },
}

#[derive(Args, Debug, Clone)]
pub struct LinearFormArgs {
    /// Number of logarithms.
    #[arg(long)]
    pub n: u32,
    /// Degree bound of the algebraic numbers.
    #[arg(long)]
    pub d: u32,
    /// Degree of the field generated by all the numbers (defaults to d).
    #[arg(long = "field-degree")]
    pub field_degree: Option<u32>,
    #[arg(long, default_value = "1")]
    pub delta: String,
    /// Height bound A_i; repeat once per logarithm or give a single value.
    #[arg(short = 'A', long = "height", required = true)]
    pub heights: Vec<String>,
    /// Bound on the coefficients.
    #[arg(short = 'B', long = "b", default_value = "4")]
    pub b: BigInt,
}

impl LinearFormArgs {
    fn request(&self) -> Result<BoundRequest> {
        let heights = self.heights.iter().map(|h| parse_expr(h)).collect::<Result<Vec<_>>>()?;
        let first = heights
            .first()
            .cloned()
            .ok_or_else(|| Error::invalid("at least one height"))?;
        Ok(BoundRequest::new(self.n, self.d, parse_rational(&self.delta)?, first)
            .with_heights(heights)
            .with_b(self.b.clone())
            .with_field_degree(self.field_degree.unwrap_or(self.d)))
    }
}

#[derive(Subcommand, Debug)]
pub enum BoundCmd {
    /// H < (4^(n^2) delta^-1 d^(2n) log A)^((2n+1)^2) when 0 < |b1 log a1 + ... + bn log an| < exp(-delta H).
    Lf4(LinearFormArgs),
    /// Height bound (4^(n^2) d^(2n) log A)^((2n+1)^2) for a multiplicative relation.
    Rel(LinearFormArgs),
    /// |Lambda| > (B Omega)^(-C0 Omega log Omega') with C0 = (16 n D)^(200 n).
    Sharp77 {
        #[command(flatten)]
        args: LinearFormArgs,
        /// The variant with rational coefficients: B^(-C0 Omega log Omega').
        #[arg(long)]
        rational: bool,
    },
    /// |Lambda| > B^(-C1 Omega) with C1 = (16 n D)^(2n+4).
    Bw93(LinearFormArgs),
    /// max(|x|,|y|) <= exp((10^10 |k|)^10000) for y^2 = x^3 + k.
    Mordell {
        #[arg(short = 'k', allow_hyphen_values = true)]
        k: BigInt,
    },
    /// max(|x|,|y|) <= (300000 |m|)^23 for x^3 - 2 y^3 = m.
    ThueCubic {
        #[arg(short = 'm', allow_hyphen_values = true)]
        m: BigInt,
    },
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    /// theta as a real expression.
    #[arg(long)]
    pub theta: String,
    /// phi as a real expression; 0 gives the homogeneous problem.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub phi: String,
    /// log10 of the bound R on r.
    #[arg(long = "log10-bound")]
    pub log10_bound: String,
    /// Base C > 1 of C^-r.
    #[arg(long)]
    pub base: String,
    /// Multiplier A >= 1.
    #[arg(long)]
    pub mult: String,
    /// Starting K for the ||q phi|| >= 2/K test (escalates by factors of 10).
    #[arg(short = 'K', long = "K")]
    pub k: Option<BigInt>,
}

#[derive(Subcommand, Debug)]
pub enum SolveCmd {
    /// Integral points on y^2 = x^3 + k with |x| up to a search bound.
    Mordell {
        #[arg(short = 'k', allow_hyphen_values = true)]
        k: BigInt,
        #[arg(long, default_value = "10000")]
        bound: BigInt,
        /// Permit bounds above 10^8.
        #[arg(long)]
        allow_long: bool,
    },
    /// All integer solutions of x^3 - 2 y^3 = m.
    ThueCubic {
        #[arg(short = 'm', allow_hyphen_values = true)]
        m: BigInt,
        /// Permit |m| above 10^5.
        #[arg(long)]
        allow_long: bool,
    },
    /// All r, s >= 0 with a^r - b^s = m.
    Expgap {
        #[arg(short = 'a')]
        a: BigInt,
        #[arg(short = 'b')]
        b: BigInt,
        #[arg(short = 'm', allow_hyphen_values = true)]
        m: BigInt,
    },
    /// All N with N+1, 3N+1 and 8N+1 square.
    Quadruple,
    /// Merged list of squares and cubes, or square - cube = gap pairs.
    Squbes {
        #[arg(long)]
        limit: u64,
        #[arg(long, allow_hyphen_values = true)]
        gap: Option<i64>,
    },
}

#[derive(Subcommand, Debug)]
pub enum PadeCmd {
    /// The approximants (5/4) B_r(3/128) / A_r(3/128) to the cube root of 2.
    Approximants {
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
    /// Polynomials A_r, B_r with A_r(x) - (1-x)^(1/3) B_r(x) = O(x^(2r+1)).
    Coefficients {
        #[arg(short = 'r')]
        r: usize,
    },
    /// Checks |alpha - p/q| > c q^-kappa on convergents with q <= qmax.
    Verify {
        #[arg(long, default_value = "2^(1/3)")]
        alpha: String,
        #[arg(long, default_value = "1/4")]
        c: String,
        #[arg(long, default_value = "2.955")]
        kappa: String,
        #[arg(long, default_value = "1000000000000")]
        qmax: BigInt,
    },
}

#[derive(Subcommand, Debug)]
pub enum ClassCmd {
    /// Class number of Q(sqrt(-d)) by counting reduced forms.
    H {
        #[arg(short = 'd')]
        d: u64,
    },
    /// Squarefree d <= dmax with class number h.
    List {
        #[arg(long)]
        h: u64,
        #[arg(long, default_value_t = 10_000)]
        dmax: u64,
        /// Permit dmax above 10^6.
        #[arg(long)]
        allow_long: bool,
    },
    /// n <= max not of the form xy + yz + zx with 0 < x < y < z.
    Idoneal {
        #[arg(long, default_value_t = 2000)]
        max: u64,
        /// Permit max above 10^5.
        #[arg(long)]
        allow_long: bool,
    },
    /// Certified digits of exp(pi sqrt(d)).
    E163 {
        #[arg(long, default_value_t = 30)]
        digits: u32,
        #[arg(short = 'd', default_value_t = 163)]
        d: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum AbcCmd {
    /// Radical, prime count and quality of one triple.
    Triple {
        #[arg(short = 'a', allow_hyphen_values = true)]
        a: BigInt,
        #[arg(short = 'b', allow_hyphen_values = true)]
        b: BigInt,
        #[arg(short = 'c', allow_hyphen_values = true)]
        c: BigInt,
        #[arg(long, default_value = "6/5")]
        c0: String,
    },
    /// All triples with c <= max of quality above 1 or violating the refined inequality.
    Scan {
        #[arg(long)]
        max: u64,
        #[arg(long, default_value = "6/5")]
        c0: String,
        /// Number of best-quality triples in the JSON report.
        #[arg(long, default_value_t = 20)]
        top: usize,
        /// Permit max above 10^6.
        #[arg(long)]
        allow_long: bool,
    },
}

#[derive(Args, Debug)]
pub struct WaringArgs {
    #[arg(long)]
    pub kmax: u32,
    /// List g(k) for k up to this value.
    #[arg(long, default_value_t = 20)]
    pub g_upto: u32,
    /// Permit kmax above 10^5.
    #[arg(long)]
    pub allow_long: bool,
}

/// A command's result: the JSON report, an optional CSV rendering and the
/// certificate file name if the report is replayable.
struct Output {
    json: Value,
    csv: Option<String>,
    certificate: Option<String>,
}

impl Output {
    fn json(json: Value) -> Self {
        Output {
            json,
            csv: None,
            certificate: None,
        }
    }

    fn certified(json: Value, name: String) -> Self {
        Output {
            json,
            csv: None,
            certificate: Some(name),
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameters(_) | Error::Parse(_) => 2,
        Error::PrecisionExhausted { .. } => 3,
        _ => 1,
    }
}

pub fn error_json(e: &Error) -> Value {
    json!({ "error": e.kind(), "message": e.to_string(), "exit_code": exit_code(e) })
}

/// Runs the CLI with process arguments and standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            if e.use_stderr() {
                let _ = writeln!(
                    err,
                    "{}",
                    json!({"error": "Usage", "message": e.to_string(), "exit_code": code})
                );
            } else {
                let _ = write!(out, "{e}");
            }
            return code;
        }
    };
    match execute(cli) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(err, "{}", error_json(&e));
            exit_code(&e)
        }
    }
}

fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    if let Some(c) = cli.precision_ceiling {
        cfg.precision_ceiling = c;
    }
    if let Some(p) = cli.parallelism {
        cfg.parallelism = p;
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(d) = &cli.certificate_dir {
        cfg.certificate_dir = Some(d.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Runs a parsed command line and returns the rendered report.
pub fn execute(cli: Cli) -> Result<String> {
    let cfg = resolve_config(&cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    let mut output = pool.install(|| dispatch(&cli.command, &cfg))?;
    if let (Some(dir), Some(name)) = (&cfg.certificate_dir, &output.certificate) {
        let path = save_certificate(&output.json, name, dir)?;
        output.json["certificate_file"] = json!(path.display().to_string());
    }
    render(&output, cfg.format)
}

fn render(output: &Output, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => Ok(format!("{}\n", output.json)),
        OutputFormat::Text => {
            let mut lines = Vec::new();
            flatten("", &output.json, &mut lines);
            Ok(lines.join("\n") + "\n")
        }
        OutputFormat::Csv => output
            .csv
            .clone()
            .ok_or_else(|| Error::invalid("csv output is available for abc scan, solve squbes and class list")),
    }
}

fn flatten(prefix: &str, v: &Value, lines: &mut Vec<String>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&key(k), x, lines);
            }
        }
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let items: Vec<String> = a.iter().map(scalar).collect();
            lines.push(format!("{prefix}: [{}]", items.join(", ")));
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&key(&i.to_string()), x, lines);
            }
        }
        _ => lines.push(format!("{prefix}: {}", scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn require_long(allow: bool, what: &str) -> Result<()> {
    if allow {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} is a long run; pass --allow-long")))
    }
}

fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<Output> {
    let ceiling = cfg.precision_ceiling;
    match cmd {
        Command::Cf(CfCmd::Expand { x, count }) => {
            let real = parse_expr(x)?;
            let cf = match real.as_rational() {
                Some(q) => expand_rational(q),
                None => expand(&real, *count, ceiling)?,
            };
            let mut v = cf.to_json();
            v["terminated"] = json!(cf.is_terminated());
            Ok(Output::json(v))
        }
        Command::Cf(CfCmd::Pell { d, allow_long }) => {
            if d >= &BigInt::from(100_000_000u64) {
                require_long(*allow_long, "d >= 10^8")?;
            }
            let s = solve_pell(d)?;
            Ok(Output::json(json!({
                "equation": "x^2 - d y^2 = 1",
                "d": s.d.to_string(),
                "x": s.x.to_string(),
                "y": s.y.to_string(),
                "period": s.period,
                "fundamental": s.fundamental,
                "verified": s.verify(),
            })))
        }
        Command::Bound(b) => {
            let res = match b {
                BoundCmd::Lf4(a) => bound_lf4(&a.request()?)?,
                BoundCmd::Rel(a) => bound_dependence_relation(&a.request()?)?,
                BoundCmd::Sharp77 { args, rational } => bound_sharp77(&args.request()?, !rational)?,
                BoundCmd::Bw93(a) => bound_bw93(&a.request()?)?,
                BoundCmd::Mordell { k } => bound_mordell(k)?,
                BoundCmd::ThueCubic { m } => bound_thue_cubic(m)?,
            };
            let name = format!("bound-{}", res.formula.id());
            Ok(Output::certified(res.to_json(), name))
        }
        Command::Reduce(a) => {
            let prob = ReductionProblem::from_log10(
                parse_expr(&a.theta)?,
                parse_expr(&a.phi)?,
                parse_rational(&a.mult)?,
                parse_rational(&a.base)?,
                &parse_rational(&a.log10_bound)?,
            )?
            .with_ceiling(ceiling);
            let mut policy = KPolicy::default();
            if let Some(k) = &a.k {
                policy.k_start = k.clone();
            }
            let chain = reduce_to_fixpoint(&prob, &policy)?;
            let v = json!({
                "problem": {
                    "theta": a.theta,
                    "phi": a.phi,
                    "A": a.mult,
                    "C": a.base,
                    "log10_bound": a.log10_bound,
                },
                "reduction": chain.to_json(),
            });
            Ok(Output::certified(v, "reduce".into()))
        }
        Command::Solve(s) => solve(s, cfg),
        Command::Pade(PadeCmd::Approximants { count }) => {
            let v = approximants_to_cube_root2(*count)?;
            Ok(Output::json(json!({
                "target": "2^(1/3)",
                "approximants": v.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
            })))
        }
        Command::Pade(PadeCmd::Coefficients { r }) => Ok(Output::json(pade_coefficients(*r).to_json())),
        Command::Pade(PadeCmd::Verify { alpha, c, kappa, qmax }) => {
            let rep = verify_effective_measure(
                &parse_expr(alpha)?,
                &parse_rational(c)?,
                &parse_rational(kappa)?,
                qmax,
                ceiling,
            )?;
            let mut v = rep.to_json();
            v["alpha"] = json!(alpha);
            v["c"] = json!(c);
            v["kappa"] = json!(kappa);
            v["qmax"] = json!(qmax.to_string());
            Ok(Output::json(v))
        }
        Command::Class(c) => class(c, ceiling),
        Command::Abc(AbcCmd::Triple { a, b, c, c0 }) => {
            let c0 = parse_rational(c0)?;
            let t = analyze_triple(a, b, c)?;
            let (verdict, slack) = check_baker_refinement(&t, &c0)?;
            let mut v = t.to_json();
            v["refinement"] = json!({
                "C0": c0.to_string(),
                "holds": verdict.as_str(),
                "log_slack": format!("{slack:.6}"),
            });
            Ok(Output::json(v))
        }
        Command::Abc(AbcCmd::Scan {
            max,
            c0,
            top,
            allow_long,
        }) => {
            if *max > 1_000_000 {
                require_long(*allow_long, "max above 10^6")?;
            }
            let rep = scan_triples(*max, &parse_rational(c0)?)?;
            Ok(Output {
                json: rep.to_json(*top),
                csv: Some(rep.to_csv()),
                certificate: None,
            })
        }
        Command::Waring(w) => {
            if w.kmax > 100_000 {
                require_long(w.allow_long, "kmax above 10^5")?;
            }
            Ok(Output::json(waring_check(w.kmax)?.to_json(w.g_upto)))
        }
        Command::Verify { file } => verify_file(file, ceiling).map(Output::json),
    }
}

fn solve(cmd: &SolveCmd, cfg: &RunConfig) -> Result<Output> {
    match cmd {
        SolveCmd::Mordell { k, bound, allow_long } => {
            if bound > &BigInt::from(100_000_000u64) {
                require_long(*allow_long, "a search bound above 10^8")?;
            }
            Ok(Output::json(solve_mordell(k, bound)?.to_json()))
        }
        SolveCmd::ThueCubic { m, allow_long } => {
            if m.magnitude() > &100_000u32.into() {
                require_long(*allow_long, "|m| above 10^5")?;
            }
            let s = solve_thue_cubic(m)?;
            Ok(Output::certified(s.to_json(), format!("thue-cubic-{m}")))
        }
        SolveCmd::Expgap { a, b, m } => {
            let r = solve_exponential_gap(a, b, m)?;
            Ok(Output::certified(r.to_json(), format!("expgap-{a}-{b}-{m}")))
        }
        SolveCmd::Quadruple => {
            let r = solve_quadruple_with(&KPolicy::default(), cfg.precision_ceiling)?;
            Ok(Output::certified(r.to_json(), "quadruple".into()))
        }
        SolveCmd::Squbes { limit, gap } => match gap {
            Some(g) => {
                let pairs = sqube_gaps(*limit, *g);
                let mut csv = String::from("cube,square\n");
                for (c, s) in &pairs {
                    csv.push_str(&format!("{c},{s}\n"));
                }
                Ok(Output {
                    json: json!({
                        "limit": limit,
                        "gap": g,
                        "pairs": pairs.iter().map(|(c, s)| json!({"cube": c, "square": s})).collect::<Vec<_>>(),
                    }),
                    csv: Some(csv),
                    certificate: None,
                })
            }
            None => {
                let list = squbes(*limit)?;
                let mut csv = String::from("value,square_root,cube_root,gap\n");
                let opt = |o: Option<u64>| o.map(|x| x.to_string()).unwrap_or_default();
                for s in &list {
                    csv.push_str(&format!(
                        "{},{},{},{}\n",
                        s.value,
                        opt(s.square_root),
                        opt(s.cube_root),
                        opt(s.gap)
                    ));
                }
                Ok(Output {
                    json: json!({
                        "limit": limit,
                        "entries": list.iter().map(|s| json!({
                            "value": s.value,
                            "square_root": s.square_root,
                            "cube_root": s.cube_root,
                            "gap": s.gap,
                        })).collect::<Vec<_>>(),
                    }),
                    csv: Some(csv),
                    certificate: None,
                })
            }
        },
    }
}

fn class(cmd: &ClassCmd, ceiling: u32) -> Result<Output> {
    match cmd {
        ClassCmd::H { d } => Ok(Output::json(class_number(*d)?.to_json())),
        ClassCmd::List { h, dmax, allow_long } => {
            if *dmax > 1_000_000 {
                require_long(*allow_long, "dmax above 10^6")?;
            }
            let list = gauss_list(*h, *dmax)?;
            let csv = std::iter::once("d".to_string())
                .chain(list.iter().map(|d| d.to_string()))
                .collect::<Vec<_>>()
                .join("\n")
                + "\n";
            Ok(Output {
                json: json!({ "h": h, "dmax": dmax, "count": list.len(), "d": list }),
                csv: Some(csv),
                certificate: None,
            })
        }
        ClassCmd::Idoneal { max, allow_long } => {
            if *max > 100_000 {
                require_long(*allow_long, "max above 10^5")?;
            }
            let list = idoneal_numbers(*max);
            Ok(Output::json(
                json!({ "max": max, "count": list.len(), "idoneal": list }),
            ))
        }
        ClassCmd::E163 { digits, d } => Ok(Output::json(near_integer(*d, *digits, ceiling)?.to_json())),
    }
}

/// Writes `report` as a self-contained certificate file `<dir>/<name>.json`.
pub fn save_certificate(report: &Value, name: &str, dir: &Path) -> Result<PathBuf> {
    let mut count = Counts::default();
    collect(report, &mut count);
    if count.bounds + count.reductions == 0 {
        return Err(Error::invalid("report contains no certificate"));
    }
    std::fs::create_dir_all(dir)?;
    let safe: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect();
    let path = dir.join(format!("{safe}.json"));
    let doc = json!({ "format": CERTIFICATE_FORMAT, "command": name, "report": report });
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(&path, text + "\n")?;
    Ok(path)
}

#[derive(Default)]
struct Counts {
    bounds: usize,
    reductions: usize,
}

fn collect(v: &Value, c: &mut Counts) {
    match v {
        Value::Object(m) => {
            if m.contains_key("formula") && m.contains_key("inputs") {
                c.bounds += 1;
            }
            if let Some(Value::Array(a)) = m.get("certificates") {
                c.reductions += a.len();
            }
            m.values().for_each(|x| collect(x, c));
        }
        Value::Array(a) => a.iter().for_each(|x| collect(x, c)),
        _ => {}
    }
}

/// Replays a certificate file: every bound is re-evaluated, every reduction
/// step re-certified and every chain checked for continuity.
pub fn verify_file(path: &Path, ceiling: u32) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    if doc.get("format").and_then(|f| f.as_str()) != Some(CERTIFICATE_FORMAT) {
        return Err(Error::Parse(format!("{} is not a certificate file", path.display())));
    }
    let report = &doc["report"];
    let mut counts = Counts::default();
    verify_value(report, ceiling, &mut counts)?;
    if counts.bounds + counts.reductions == 0 {
        return Err(Error::Verification("file contains no certificate".into()));
    }
    let mut out = json!({
        "file": path.display().to_string(),
        "command": doc["command"],
        "bounds_checked": counts.bounds,
        "reduction_steps_checked": counts.reductions,
    });
    if let Some(check) = report.get("exhaustive_check") {
        verify_quadruple_search(report, check)?;
        out["exhaustive_check_replayed"] = json!(true);
    }
    out["verified"] = json!(true);
    Ok(out)
}

fn verify_value(v: &Value, ceiling: u32, counts: &mut Counts) -> Result<()> {
    match v {
        Value::Object(m) => {
            if m.contains_key("formula") && m.contains_key("inputs") {
                verify_bound(v)?;
                counts.bounds += 1;
            }
            if let Some(Value::Array(certs)) = m.get("certificates") {
                verify_chain(v, certs, ceiling)?;
                counts.reductions += certs.len();
            }
            // a chain's starting bound lives next to it
            if let (Some(initial), Some(red)) = (m.get("initial_bound"), m.get("reduction")) {
                check_chain_start(initial, red, ceiling)?;
            }
            for x in m.values() {
                verify_value(x, ceiling, counts)?;
            }
            Ok(())
        }
        Value::Array(a) => a.iter().try_for_each(|x| verify_value(x, ceiling, counts)),
        _ => Ok(()),
    }
}

fn enclosure_of(v: &Value) -> Result<(Dyadic, Dyadic)> {
    let e = v
        .get("enclosure")
        .and_then(|e| e.as_array())
        .filter(|e| e.len() == 2)
        .ok_or_else(|| Error::Parse("bound without enclosure".into()))?;
    let d = |x: &Value| -> Result<Dyadic> {
        x.as_str()
            .ok_or_else(|| Error::Parse("enclosure endpoint".into()))?
            .parse()
            .map_err(|_| Error::Parse("enclosure endpoint".into()))
    };
    Ok((d(&e[0])?, d(&e[1])?))
}

fn verify_bound(v: &Value) -> Result<()> {
    let id = v["formula"].as_str().unwrap_or("");
    let formula = Formula::ALL
        .into_iter()
        .find(|f| f.id() == id)
        .ok_or_else(|| Error::Parse(format!("unknown formula {id:?}")))?;
    let fresh = evaluate(formula, &v["inputs"])?;
    let (lo, hi) = enclosure_of(v)?;
    let iv = fresh.log10_bound.interval();
    if iv.hi < lo || hi < iv.lo {
        return Err(Error::Verification(format!(
            "{id} bound does not match a fresh evaluation"
        )));
    }
    Ok(())
}

fn verify_chain(chain: &Value, certs: &[Value], ceiling: u32) -> Result<()> {
    let mut prev: Option<ReductionCertificate> = None;
    for c in certs {
        let cert = ReductionCertificate::from_json(c)?;
        cert.verify(ceiling)?;
        if let Some(p) = &prev {
            if cert.old_bound != p.new_bound {
                return Err(Error::Verification(format!(
                    "chain break: step starts at R = {} after new bound {}",
                    cert.old_bound, p.new_bound
                )));
            }
            if cert.theta != p.theta || cert.phi != p.phi || cert.mult != p.mult || cert.base != p.base {
                return Err(Error::Verification("chain mixes different problems".into()));
            }
        }
        prev = Some(cert);
    }
    if let (Some(last), Some(fb)) = (&prev, chain.get("final_bound").and_then(|f| f.as_str())) {
        if fb.parse::<BigInt>().ok().as_ref() != Some(&last.new_bound) {
            return Err(Error::Verification("final bound differs from the last step".into()));
        }
    }
    Ok(())
}

/// The first reduction step must start from at least the proven initial bound.
fn check_chain_start(initial: &Value, reduction: &Value, ceiling: u32) -> Result<()> {
    let Some(first) = reduction
        .get("certificates")
        .and_then(|c| c.as_array())
        .and_then(|c| c.first())
    else {
        return Ok(());
    };
    let (_, hi) = enclosure_of(initial)?;
    let (n, d) = hi.to_ratio();
    let r = ReductionCertificate::from_json(first)?.old_bound;
    let log10_r = Real::int(r.clone()).ln() / Real::int(10).ln();
    if !compare(&Real::ratio(n, d), &log10_r, ceiling)?.is_false() {
        return Err(Error::Verification(format!(
            "reduction starts at R = {r}, below the proven bound"
        )));
    }
    Ok(())
}

/// Re-runs the search for `r <= final_bound` behind the quadruple verdict.
fn verify_quadruple_search(report: &Value, check: &Value) -> Result<()> {
    let bound = report
        .get("final_bound")
        .and_then(|b| b.as_u64())
        .ok_or_else(|| Error::Parse("final_bound".into()))?;
    let stored: Vec<String> = check
        .get("hits")
        .and_then(|h| h.as_array())
        .ok_or_else(|| Error::Parse("exhaustive_check.hits".into()))?
        .iter()
        .map(|h| h["N"].as_str().unwrap_or("").to_string())
        .collect();
    let mut found = Vec::new();
    for r in 0..=bound {
        let (x, _) = sqrt3_solution(r);
        let t: BigInt = BigInt::from(8) * &x * &x - 7;
        if exact_sqrt(&t).is_some() {
            let n: BigInt = &x * &x - 1;
            found.push(n.to_string());
        }
    }
    if found != stored {
        return Err(Error::Verification(format!(
            "search up to r = {bound} finds N in {found:?}, file records {stored:?}"
        )));
    }
    let only_known = found.iter().all(|n| n == "0" || n == "120");
    let claims_none = report.get("conclusion").and_then(|c| c.as_str()) == Some("no_fifth_element");
    if only_known != claims_none {
        return Err(Error::Verification("conclusion does not match the search".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("diophant").chain(args.iter().copied());
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn config_file_and_validation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(
            &path,
            "# comment\nprecision_ceiling = 4096\nparallelism=2\nformat = text\n",
        )
        .unwrap();
        let mut cfg = RunConfig::default();
        cfg.apply_file(&path).unwrap();
        assert_eq!(
            (cfg.precision_ceiling, cfg.parallelism, cfg.format),
            (4096, 2, OutputFormat::Text)
        );
        cfg.precision_ceiling = 64;
        assert!(matches!(cfg.validate(), Err(Error::InvalidParameters(_))));
        assert!(cfg.set("colour", "red").is_err());
        std::fs::write(&path, "no equals sign\n").unwrap();
        assert!(RunConfig::default().apply_file(&path).is_err());
    }

    #[test]
    fn exit_codes() {
        let (code, out, _) = run_args(&["cf", "expand", "355/113"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["quotients"], json!(["3", "7", "16"]));
        let (code, _, err) = run_args(&["class", "h", "-d", "12"]);
        assert_eq!(code, 1);
        assert_eq!(serde_json::from_str::<Value>(&err).unwrap()["error"], "NotSquarefree");
        let (code, _, err) = run_args(&["cf", "pell", "1"]);
        assert_eq!(code, 2);
        assert_eq!(
            serde_json::from_str::<Value>(&err).unwrap()["error"],
            "InvalidParameters"
        );
        let (code, _, _) = run_args(&["--precision-ceiling", "100", "cf", "expand", "pi"]);
        assert_eq!(code, 2);
        // an exact zero built from surds: its floor never settles
        let (code, _, err) = run_args(&["--precision-ceiling", "256", "cf", "expand", "sqrt(2)*sqrt(3)-sqrt(6)"]);
        assert_eq!(code, 3, "{err}");
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("verify"));
    }

    #[test]
    fn long_runs_need_a_flag() {
        let (code, _, err) = run_args(&["abc", "scan", "--max", "2000000"]);
        assert_eq!(code, 2);
        assert!(err.contains("allow-long"));
    }

    #[test]
    fn text_and_csv() {
        let (code, out, _) = run_args(&["--format", "text", "class", "h", "-d", "5"]);
        assert_eq!(code, 0);
        assert!(out.contains("h: 2"));
        let (_, out, _) = run_args(&["--format", "csv", "solve", "squbes", "--limit", "10"]);
        assert_eq!(out, "value,square_root,cube_root,gap\n1,1,1,3\n4,2,,4\n8,,2,1\n9,3,,\n");
        let (code, _, _) = run_args(&["--format", "csv", "class", "h", "-d", "5"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn flatten_nested() {
        let mut lines = Vec::new();
        flatten("", &json!({"a": {"b": [1, 2]}, "c": [{"d": "x"}]}), &mut lines);
        assert_eq!(lines, vec!["a.b: [1, 2]", "c.0.d: x"]);
    }

    #[test]
    fn certificates_need_content() {
        let dir = tempfile::tempdir().unwrap();
        assert!(save_certificate(&json!({"x": 1}), "x", dir.path()).is_err());
        let path = dir.path().join("bad.json");
        std::fs::write(&path, "{\"format\": \"other\"}").unwrap();
        assert!(matches!(verify_file(&path, 1 << 12), Err(Error::Parse(_))));
    }
}
