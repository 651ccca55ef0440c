//! Command-line front end: analyze (factorization / zeta translation /
//! boundary), toric (presentations and analytic data), count (oracles), and
//! groupzeta (pole and boundary utilities). All reports are stable JSON:
//! keys are sorted, rationals rendered as "p/q", big integers as decimal
//! strings, and no timing or host information is emitted, so identical flags
//! always produce byte-identical output.

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_traits::One;
use serde_json::{json, Value};

use eulerprod_core::counting::{self, BoxSpec, CountError};
use eulerprod_core::euler::{self, BoundaryVariant, CyclotomicVerdict};
use eulerprod_core::groupzeta::{self, ConeData};
use eulerprod_core::polyhedra::{self, PointSet};
use eulerprod_core::toric::{self, Presentation, ToricError, ToricMatrix};
use eulerprod_core::{ExponentVector, Int, Rat, SparseSeries};

#[derive(Parser)]
#[command(name = "eulerprod", version, about = "exact toolkit for multivariate Euler products")]
struct Cli {
    /// Truncation weight for series expansions.
    #[arg(long, global = true, default_value_t = 16)]
    cutoff: u32,
    /// Budget for certified enumerations inside recursions.
    #[arg(long, global = true, default_value_t = 64)]
    bound: u32,
    /// Largest prime used in numerical Euler products.
    #[arg(long, global = true, default_value_t = 10_000)]
    prime_cutoff: u64,
    /// Worker cap; accepted for interface stability, computation is
    /// sequential so the value does not influence any output byte.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Seed for randomized helpers; accepted for interface stability.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cyclotomic factorization, zeta translation, boundary descriptor and
    /// polyhedral data of an integer series.
    Analyze(AnalyzeArgs),
    /// Unitary presentation and analytic data of a toric matrix.
    Toric(ToricArgs),
    /// Brute-force counting oracles.
    Count(CountArgs),
    /// Group-zeta pole and boundary utilities.
    Groupzeta(GroupZetaArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// JSON file with the input series.
    #[arg(long)]
    series: String,
    /// Index of the variable standing for the prime itself.
    #[arg(long)]
    prime_var: Option<usize>,
    /// Use the halfspace-only boundary variant.
    #[arg(long)]
    sharp: bool,
}

#[derive(Args)]
struct ToricArgs {
    /// JSON file with the matrix {d, n, rows}.
    #[arg(long, conflicts_with = "builtin")]
    matrix: Option<String>,
    /// Right-hand side b as a comma-separated integer list; with a target
    /// the report carries the plain presentation only.
    #[arg(long)]
    b: Option<String>,
    /// Builtin family (an).
    #[arg(long)]
    builtin: Option<String>,
    /// Builtin parameter n.
    #[arg(long)]
    n: Option<usize>,
    /// Verification weight.
    #[arg(long, default_value_t = 10)]
    weight: u32,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long, conflicts_with = "builtin")]
    matrix: Option<String>,
    /// Box bounds, comma-separated.
    #[arg(long)]
    r#box: Option<String>,
    #[arg(long)]
    builtin: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Census height t.
    #[arg(long)]
    t: Option<u64>,
    /// Check the two-variable abelian subgroup identity.
    #[arg(long)]
    abelian: bool,
    /// Subgroup-order exponent a.
    #[arg(long, default_value_t = 0)]
    a: u32,
    /// Coefficient range limit for --abelian.
    #[arg(long)]
    limit: Option<u64>,
}

#[derive(Args)]
struct GroupZetaArgs {
    /// JSON file with cone pairs {"pairs": [[A, B], ...]}.
    #[arg(long)]
    cone: Option<String>,
    /// JSON file with a bivariate series 1 + H(X1, X2).
    #[arg(long)]
    uniform: Option<String>,
    /// Builtin polynomial (gsp6).
    #[arg(long)]
    builtin: Option<String>,
}

enum Failure {
    /// Malformed input, dimension mismatches, unsupported arguments.
    Invalid(String),
    /// A certified enumeration range exceeded the configured budget.
    Bound(String),
}

impl Failure {
    fn code(&self) -> &'static str {
        match self {
            Failure::Invalid(_) => "invalid-input",
            Failure::Bound(_) => "bound-exhausted",
        }
    }
    fn exit(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Bound(_) => 2,
        }
    }
    fn message(&self) -> &str {
        match self {
            Failure::Invalid(m) | Failure::Bound(m) => m,
        }
    }
}

impl From<ToricError> for Failure {
    fn from(e: ToricError) -> Self {
        match e {
            ToricError::InconclusiveBound { .. } => Failure::Bound(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

impl From<CountError> for Failure {
    fn from(e: CountError) -> Self {
        match e {
            CountError::BudgetExceeded { .. } => Failure::Bound(e.to_string()),
            CountError::Toric(t) => t.into(),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

// ---------------------------------------------------------------------------
// stable JSON rendering helpers

fn rat_str(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn rat_vec(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(|r| Value::String(rat_str(r))).collect())
}

fn exp_val(e: &ExponentVector) -> Value {
    json!(e.entries())
}

fn int_str(i: &Int) -> Value {
    Value::String(i.to_string())
}

fn series_val(s: &SparseSeries) -> Value {
    serde_json::to_value(s).expect("series serialization is total")
}

fn presentation_val(p: &Presentation) -> Value {
    json!({
        "empty": p.empty,
        "K": p.factors.iter().map(|(nu, &c)| json!([exp_val(nu), c])).collect::<Vec<_>>(),
        "W": series_val(&p.w),
    })
}

fn dual_val(d: &polyhedra::DualPolyhedron) -> Value {
    json!({
        "iota": rat_str(&d.index),
        "minimal_face": d.r_face.iter().map(|v| rat_vec(v)).collect::<Vec<_>>(),
        "vertices": d.vertices.iter().map(|v| json!({
            "alpha": rat_vec(&v.coords),
            "contact": v.contact.iter().map(exp_val).collect::<Vec<_>>(),
            "zeros": v.zeros,
            "tight": v.m,
        })).collect::<Vec<_>>(),
    })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &str) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Invalid(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Failure::Invalid(format!("{path}: {e}")))
}

fn parse_int_list(s: &str) -> Result<Vec<i64>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Invalid(format!("bad integer list '{s}': {e}")))
}

// ---------------------------------------------------------------------------
// subcommands

fn run_analyze(cli: &Cli, args: &AnalyzeArgs) -> Result<Value, Failure> {
    let h: SparseSeries = read_json(&args.series)?;
    let n = cli.cutoff;
    let fac = euler::factorize(&h, n, args.prime_var)
        .map_err(|e| Failure::Invalid(e.to_string()))?;
    let zeta = euler::zeta_translation(&fac);
    let variant = if args.sharp { BoundaryVariant::Vsharp } else { BoundaryVariant::V };
    let bd = euler::boundary(&h, variant, args.prime_var)
        .map_err(|e| Failure::Invalid(e.to_string()))?;
    let verdict = euler::cyclotomic_test(&h, euler::default_cyclotomic_bound(&h).max(n))
        .map_err(|e| Failure::Invalid(e.to_string()))?;
    let dual = {
        let pts = h.support(true);
        if pts.is_empty() {
            Value::Null
        } else {
            let ps = PointSet::new(h.nvars(), pts)
                .map_err(|e| Failure::Invalid(e.to_string()))?;
            dual_val(&polyhedra::dual(&ps).map_err(|e| Failure::Invalid(e.to_string()))?)
        }
    };
    let boundary = json!({
        "variant": match bd.variant { BoundaryVariant::V => "V", BoundaryVariant::Vsharp => "Vsharp" },
        "include_positivity": bd.include_positivity,
        "halfspaces": bd.halfspaces.iter()
            .map(|hs| json!({"nu": hs.nu, "k": hs.k}))
            .collect::<Vec<_>>(),
        "beta0": bd.beta0.as_ref().map(|b| Value::String(rat_str(b))).unwrap_or(Value::Null),
        "beta1": bd.beta1.as_ref().map(|b| Value::String(rat_str(b))).unwrap_or(Value::Null),
    });
    Ok(json!({
        "schema": "1",
        "command": "analyze",
        "cutoff": n,
        "input": series_val(&h),
        "factorization": fac.exponents.iter()
            .map(|(m, e)| json!([exp_val(m), int_str(e)]))
            .collect::<Vec<_>>(),
        "zeta_factors": zeta.iter().map(|z| json!({
            "linear": z.linear,
            "shift": z.shift,
            "gamma": int_str(&z.gamma),
        })).collect::<Vec<_>>(),
        "verdict": match &verdict {
            CyclotomicVerdict::Cyclotomic { certificate } => json!({
                "cyclotomic": true,
                "certificate": certificate.iter()
                    .map(|(m, e)| json!([exp_val(m), int_str(e)]))
                    .collect::<Vec<_>>(),
            }),
            CyclotomicVerdict::NonCyclotomicUpTo { bound, witness } => json!({
                "cyclotomic": false,
                "bound": bound,
                "witness": exp_val(witness),
            }),
        },
        "boundary": boundary,
        "dual": dual,
    }))
}

fn run_toric(cli: &Cli, args: &ToricArgs) -> Result<Value, Failure> {
    let (a, builtin, an_extra) = match (&args.matrix, &args.builtin) {
        (Some(path), None) => (read_json::<ToricMatrix>(path)?, Value::Null, None),
        (None, Some(name)) if name.eq_ignore_ascii_case("an") => {
            let n = args.n.ok_or_else(|| Failure::Invalid("--builtin An needs --n".into()))?;
            if n < 2 {
                return Err(Failure::Invalid("--n must be at least 2".into()));
            }
            (ToricMatrix::an_matrix(n), json!("An"), Some(n))
        }
        (None, Some(other)) => {
            return Err(Failure::Invalid(format!("unknown builtin '{other}'")));
        }
        _ => return Err(Failure::Invalid("need exactly one of --matrix or --builtin".into())),
    };

    let b = args.b.as_deref().map(parse_int_list).transpose()?;
    let (p, closed_data) = match (&b, an_extra) {
        (Some(b), _) => (toric::presentation_hab(&a, b, cli.bound)?, None),
        (None, Some(n)) => {
            let (p, data) = toric::presentation_an(n);
            (p, Some(data))
        }
        (None, None) => (toric::presentation(&a, cli.bound)?, None),
    };

    let mut report = json!({
        "schema": "1",
        "command": "toric",
        "matrix": serde_json::to_value(&a).expect("matrix serialization"),
        "builtin": builtin,
        "b": b.as_ref().map(|v| json!(v)).unwrap_or(Value::Null),
        "presentation": presentation_val(&p),
    });
    let obj = report.as_object_mut().expect("object");

    // analytic data only applies to the restricted zero-target case
    if args.b.is_none() && a.rows_sum_zero() && !p.empty {
        let verified = toric::verify_presentation(&p, &a, args.weight)?;
        obj.insert("verified_to_weight".into(), json!(args.weight));
        obj.insert("verified".into(), json!(verified));
        if !p.w.support(true).is_empty() || !p.factors.is_empty() {
            let d = toric::analytic_data(&p, &a)?;
            obj.insert(
                "I".into(),
                json!(d.i_set.points().map(exp_val).collect::<Vec<_>>()),
            );
            obj.insert("iota".into(), json!(rat_str(&d.iota)));
            obj.insert("CA".into(), json!(d.ca));
            obj.insert("cprime_ok".into(), json!(true));
            obj.insert(
                "cprime".into(),
                json!(d
                    .cprime
                    .iter()
                    .map(|(nu, c)| json!([exp_val(nu), int_str(c)]))
                    .collect::<Vec<_>>()),
            );
            obj.insert("dual".into(), dual_val(&d.dual));
            obj.insert(
                "vertices".into(),
                json!(d.vertices.iter().map(|v| json!({
                    "alpha": rat_vec(&v.alpha),
                    "contact": v.contact.iter().map(exp_val).collect::<Vec<_>>(),
                    "zeros": v.zeros,
                    "degree": v.degree,
                })).collect::<Vec<_>>()),
            );
        }
    }
    if let Some(data) = closed_data {
        obj.insert("d_n".into(), json!(data.d_n));
        obj.insert("t_n".into(), json!(data.t_n));
        obj.insert("alpha_star".into(), rat_vec(&data.alpha_star));
    }
    Ok(report)
}

fn run_count(cli: &Cli, args: &CountArgs) -> Result<Value, Failure> {
    if args.abelian {
        let limit = args.limit.ok_or_else(|| Failure::Invalid("--abelian needs --limit".into()))?;
        let ok = counting::abelian_euler_check(args.a, limit)?;
        return Ok(json!({
            "schema": "1",
            "command": "count",
            "mode": "abelian",
            "a": args.a,
            "limit": limit,
            "value": ok,
            "shards": 1,
        }));
    }
    if let Some(name) = &args.builtin {
        if !name.eq_ignore_ascii_case("an") {
            return Err(Failure::Invalid(format!("unknown builtin '{name}'")));
        }
        let n = args.n.ok_or_else(|| Failure::Invalid("--builtin An needs --n".into()))?;
        if n < 2 {
            return Err(Failure::Invalid("--n must be at least 2".into()));
        }
        let t = args.t.ok_or_else(|| Failure::Invalid("census needs --t".into()))?;
        let v = counting::nth_power_census(n as u32, t)?;
        return Ok(json!({
            "schema": "1",
            "command": "count",
            "mode": "census",
            "n": n,
            "t": t,
            "value": int_str(&v),
            "shards": 1,
        }));
    }
    let path = args
        .matrix
        .as_ref()
        .ok_or_else(|| Failure::Invalid("need --matrix, --builtin or --abelian".into()))?;
    let a: ToricMatrix = read_json(path)?;
    let bspec = args
        .r#box
        .as_ref()
        .ok_or_else(|| Failure::Invalid("--matrix counting needs --box".into()))?;
    let bounds: Vec<u64> = parse_int_list(bspec)?
        .into_iter()
        .map(|x| u64::try_from(x).map_err(|_| Failure::Invalid("box bounds must be positive".into())))
        .collect::<Result<_, _>>()?;
    let spec = BoxSpec::new(bounds).map_err(Failure::from)?;
    let v = counting::box_count(&a, &spec)?;
    let _ = cli;
    Ok(json!({
        "schema": "1",
        "command": "count",
        "mode": "box",
        "box": spec.bounds,
        "value": int_str(&v),
        "shards": 1,
    }))
}

fn run_groupzeta(args: &GroupZetaArgs) -> Result<Value, Failure> {
    if let Some(path) = &args.cone {
        let raw: ConeData = read_json(path)?;
        let d = ConeData::new(raw.pairs).map_err(|e| Failure::Invalid(e.to_string()))?;
        let (alpha0, m0) = groupzeta::leading_pole(&d);
        return Ok(json!({
            "schema": "1",
            "command": "groupzeta",
            "mode": "cone",
            "alpha0": alpha0.as_ref().map(|a| Value::String(rat_str(a))).unwrap_or(Value::Null),
            "multiplicity": m0,
        }));
    }
    let h: SparseSeries = match (&args.uniform, &args.builtin) {
        (Some(path), None) => read_json(path)?,
        (None, Some(name)) if name.eq_ignore_ascii_case("gsp6") => groupzeta::gsp6_polynomial(),
        (None, Some(other)) => {
            return Err(Failure::Invalid(format!("unknown builtin '{other}'")));
        }
        _ => return Err(Failure::Invalid("need one of --cone, --uniform, --builtin".into())),
    };
    let out = groupzeta::uniform_boundary(&h).map_err(|e| Failure::Invalid(e.to_string()))?;
    Ok(json!({
        "schema": "1",
        "command": "groupzeta",
        "mode": "uniform",
        "boundary": out.map(|(b0, b1, eq)| json!({
            "beta0": rat_str(&b0),
            "beta1": rat_str(&b1),
            "equal": eq,
        })).unwrap_or(Value::Null),
    }))
}

fn run(cli: &Cli) -> Result<Value, Failure> {
    match &cli.command {
        Command::Analyze(a) => run_analyze(cli, a),
        Command::Toric(t) => run_toric(cli, t),
        Command::Count(c) => run_count(cli, c),
        Command::Groupzeta(g) => run_groupzeta(g),
    }
}

fn emit(v: &Value) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(v).expect("report is valid JSON");
    // ignore a closed pipe so `eulerprod ... | head` stays quiet
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            emit(&report);
            ExitCode::SUCCESS
        }
        Err(f) => {
            emit(&json!({
                "schema": "1",
                "error": { "code": f.code(), "message": f.message() },
            }));
            ExitCode::from(f.exit())
        }
    }
}
