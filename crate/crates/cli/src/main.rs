//! `padic-zeta`: compute values, emit tables and run the verification suite.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or domain error,
//! 3 I/O error. Errors are reported on stderr as
//! `{"error": <kind>, "message": <text>}`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use padic_zeta::character::{CharacterSpec, DirichletCharacter};
use padic_zeta::euler::EulerTable;
use padic_zeta::fermionic::DEFAULT_EVALUATION_CAP;
use padic_zeta::padic::{format_rational, from_digits, parse_rational, teichmuller, ExactRational, PadicContext, PadicNumber};
use padic_zeta::verify::{self, SlackTable, Summary, VerifyConfig};
use padic_zeta::zeta_char::{ell, ell_limit_oracle, zeta_char, zeta_char_oracle};
use padic_zeta::zeta_czp::{SeriesBudget, ZetaEngine, DEFAULT_MAX_TERMS};
use padic_zeta::Error;

#[derive(Parser, Debug)]
#[command(name = "padic-zeta", version, about = "p-adic Hurwitz-type Euler zeta functions")]
struct Cli {
    /// Odd prime p.
    #[arg(long, global = true)]
    p: Option<u32>,
    /// Working precision: guaranteed p-adic digits of every result.
    #[arg(long, global = true, default_value_t = 16)]
    prec: u32,
    /// Extra digits carried internally.
    #[arg(long, global = true, default_value_t = 4)]
    guard: u32,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Truncation depth N of the alternating-sum oracles.
    #[arg(long, global = true)]
    oracle_depth: Option<u32>,
    /// Largest number of series terms before a budget error.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_TERMS)]
    max_terms: usize,
    /// Seed for random grid points.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    /// Write output to this file instead of stdout.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one function.
    Compute {
        #[command(subcommand)]
        target: Target,
    },
    /// Run the identity verification suite.
    Verify(VerifyArgs),
    /// Emit a deterministic table.
    Table {
        #[command(subcommand)]
        kind: TableKind,
    },
}

#[derive(Subcommand, Debug)]
enum Target {
    /// ζ_{p,E}(s, x) for x with v_p(x) <= -1.
    ZetaCzp {
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[command(flatten)]
        x: PointArg,
    },
    /// ζ_{p,E}(χ, s, x) for x in Z_p.
    ZetaChar {
        /// Character as v:k, meaning ω^k of modulus p^v.
        #[arg(long = "char")]
        character: CharacterSpec,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[command(flatten)]
        x: PointArg,
    },
    /// ℓ_{p,E}(χ, s).
    Ell {
        #[arg(long = "char")]
        character: CharacterSpec,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// Euler number E_m.
    EulerNumber {
        #[arg(long)]
        m: usize,
    },
    /// Euler polynomial value E_m(x), exactly.
    EulerPoly {
        #[arg(long)]
        m: usize,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Teichmüller representative ω(x) of a unit.
    Teichmuller {
        #[command(flatten)]
        x: PointArg,
    },
}

/// A p-adic operand: a rational `a/b`, or little-endian digits.
#[derive(Args, Debug)]
struct PointArg {
    #[arg(long, allow_hyphen_values = true, conflicts_with = "x_digits", required_unless_present = "x_digits")]
    x: Option<String>,
    /// Digits d0,d1,... of the unit part, little-endian.
    #[arg(long, value_delimiter = ',')]
    x_digits: Option<Vec<u32>>,
    /// Valuation applied to --x-digits.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    x_valuation: i64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Identity family to run; repeatable. Default: all.
    #[arg(long = "identity")]
    identities: Vec<String>,
    /// Also report the alternative printed closed forms as informational records.
    #[arg(long)]
    report_both_forms: bool,
    /// Measure slack constants and write them as a fixture.
    #[arg(long)]
    calibrate: bool,
    /// Slack fixture to use instead of the built-in one.
    #[arg(long)]
    slack: Option<PathBuf>,
    /// List the identity families and exit.
    #[arg(long)]
    list: bool,
}

#[derive(Subcommand, Debug)]
enum TableKind {
    /// Exact E_m(0) and E_m for m <= max.
    Euler {
        #[arg(long)]
        max: usize,
    },
    /// ζ_{p,E}(s, x) on a grid.
    ZetaValues {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        s_list: Vec<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x_list: Vec<String>,
    },
    /// ℓ_{p,E}(ω^k, s) on a grid.
    EllValues {
        /// Exponents k as a list or an inclusive range a..b.
        #[arg(long)]
        chars: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        s_list: Vec<String>,
        /// Modulus exponent v.
        #[arg(long, default_value_t = 1)]
        v: u32,
    },
}

/// Failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    kind: String,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Io(_)) { 3 } else { 2 };
        Failure { code, kind: e.kind().to_string(), message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, kind: "Usage".into(), message: message.into() }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(usage(format!("cannot start thread pool: {e}"))),
        },
        None => dispatch(&cli),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let obj = json!({"error": f.kind, "message": f.message});
            eprintln!("{obj}");
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult<u8> {
    match &cli.command {
        Command::Compute { target } => compute(cli, target).map(|_| 0),
        Command::Verify(args) => run_verify(cli, args),
        Command::Table { kind } => table(cli, kind).map(|_| 0),
    }
}

fn emit(cli: &Cli, text: &str) -> CliResult<()> {
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| io_failure(path, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| io_failure(Path::new("<stdout>"), e))
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure { code: 3, kind: "Io".into(), message: format!("{}: {e}", path.display()) }
}

fn context(cli: &Cli) -> CliResult<PadicContext> {
    let p = cli.p.ok_or_else(|| usage("--p is required"))?;
    Ok(PadicContext::new(p as u64, cli.prec, cli.guard)?)
}

fn engine(cli: &Cli, ctx: &PadicContext) -> ZetaEngine {
    ZetaEngine::with_budget(ctx, SeriesBudget { max_terms: cli.max_terms, target_prec: ctx.workprec() })
}

fn parse_point(ctx: &PadicContext, arg: &PointArg) -> CliResult<(PadicNumber, String)> {
    match (&arg.x, &arg.x_digits) {
        (Some(text), _) => {
            let q = parse_rational(text)?;
            Ok((ctx.from_rational(&q), format_rational(&q)))
        }
        (None, Some(digits)) => {
            let x = from_digits(digits, ctx)?.shift(arg.x_valuation);
            let label = x.render_text();
            Ok((x, label))
        }
        (None, None) => Err(usage("an operand --x or --x-digits is required")),
    }
}

fn parse_s(ctx: &PadicContext, text: &str) -> CliResult<(PadicNumber, ExactRational)> {
    let q = parse_rational(text)?;
    Ok((ctx.from_rational(&q), q))
}

fn text_format(cli: &Cli) -> CliResult<bool> {
    match cli.format {
        None | Some(Format::Text) => Ok(true),
        Some(Format::Json) => Ok(false),
        Some(Format::Csv) => Err(usage("csv output is only available for tables")),
    }
}

fn padic_value(x: &PadicNumber) -> Value {
    serde_json::to_value(x.to_json()).expect("serializable")
}

/// Value plus, when an oracle depth is given, the oracle and its agreement.
fn render_with_oracle(
    cli: &Cli,
    mut object: Value,
    value: &PadicNumber,
    oracle: Option<(u32, PadicNumber)>,
) -> CliResult<String> {
    // Guard digits are internal; show what the working precision guarantees.
    let cap = value.ctx().workprec() as i64;
    let value = &value.cap_absprec(cap);
    let oracle = oracle.map(|(n, o)| (n, o.cap_absprec(cap)));
    if text_format(cli)? {
        let mut out = format!("{}\n", value.render_text());
        if let Some((n, o)) = &oracle {
            out.push_str(&format!("oracle(N={n}): {}\n", o.render_text()));
            out.push_str(&format!("agreement depth: {}\n", depth_text(value, o, *n)));
        }
        return Ok(out);
    }
    object["value"] = padic_value(value);
    object["text"] = json!(value.render_text());
    if let Some((n, o)) = &oracle {
        object["oracle"] = json!({"N": n, "value": padic_value(o), "agreement_depth": depth_value(value, o, *n)});
    }
    Ok(format!("{object}\n"))
}

/// Agreement depth capped at the oracle's truncation depth.
fn depth_value(a: &PadicNumber, b: &PadicNumber, n: u32) -> i64 {
    a.agreement_depth(b).map_or(n as i64, |d| d.min(n as i64))
}

fn depth_text(a: &PadicNumber, b: &PadicNumber, n: u32) -> String {
    depth_value(a, b, n).to_string()
}

fn character(ctx: &PadicContext, spec: &CharacterSpec) -> CliResult<DirichletCharacter> {
    Ok(spec.at(ctx.p())?)
}

fn compute(cli: &Cli, target: &Target) -> CliResult<()> {
    let cap = DEFAULT_EVALUATION_CAP;
    let out = match target {
        Target::ZetaCzp { s, x } => {
            let ctx = context(cli)?;
            let e = engine(cli, &ctx);
            let (sp, sq) = parse_s(&ctx, s)?;
            let (xp, xl) = parse_point(&ctx, x)?;
            let value = e.zeta_czp(&sp, &xp)?;
            let oracle = match cli.oracle_depth {
                Some(n) => Some((n, e.zeta_czp_oracle(&sp, &xp, n, cap)?)),
                None => None,
            };
            let obj = json!({"function": "zeta-czp", "p": ctx.p(), "s": format_rational(&sq), "x": xl});
            render_with_oracle(cli, obj, &value, oracle)?
        }
        Target::ZetaChar { character: spec, s, x } => {
            let ctx = context(cli)?;
            let e = engine(cli, &ctx);
            let chi = character(&ctx, spec)?;
            let (sp, sq) = parse_s(&ctx, s)?;
            let (xp, xl) = parse_point(&ctx, x)?;
            let value = zeta_char(&e, &chi, &sp, &xp)?;
            let oracle = match cli.oracle_depth {
                Some(n) => Some((n, zeta_char_oracle(&e, &chi, &sp, &xp, n, cap)?)),
                None => None,
            };
            let obj = json!({"function": "zeta-char", "p": ctx.p(), "char": chi.to_string(),
                "s": format_rational(&sq), "x": xl});
            render_with_oracle(cli, obj, &value, oracle)?
        }
        Target::Ell { character: spec, s } => {
            let ctx = context(cli)?;
            let e = engine(cli, &ctx);
            let chi = character(&ctx, spec)?;
            let (sp, sq) = parse_s(&ctx, s)?;
            let value = ell(&e, &chi, &sp)?;
            let oracle = match cli.oracle_depth {
                Some(n) => Some((n, ell_limit_oracle(&e, &chi, &sp, n, cap)?)),
                None => None,
            };
            let obj = json!({"function": "ell", "p": ctx.p(), "char": chi.to_string(), "s": format_rational(&sq)});
            render_with_oracle(cli, obj, &value, oracle)?
        }
        Target::EulerNumber { m } => {
            let table = EulerTable::build(*m);
            let value = format_rational(table.number(*m)?);
            if text_format(cli)? {
                format!("{value}\n")
            } else {
                format!("{}\n", json!({"function": "euler-number", "m": m, "value": value}))
            }
        }
        Target::EulerPoly { m, x } => {
            let q = parse_rational(x)?;
            let table = EulerTable::build(*m);
            let value = table.euler_poly_eval(*m, &q)?;
            let mut out = if text_format(cli)? {
                format!("{}\n", format_rational(&value))
            } else {
                format!(
                    "{}\n",
                    json!({"function": "euler-poly", "m": m, "x": format_rational(&q), "value": format_rational(&value)})
                )
            };
            if let Some(p) = cli.p {
                // Also show the image in Q_p when a prime is given.
                let ctx = PadicContext::new(p as u64, cli.prec, cli.guard)?;
                let embedded = ctx.from_rational(&value).cap_absprec(cli.prec as i64);
                if text_format(cli)? {
                    out.push_str(&format!("{}\n", embedded.render_text()));
                } else {
                    out = format!(
                        "{}\n",
                        json!({"function": "euler-poly", "m": m, "x": format_rational(&q),
                            "value": format_rational(&value), "padic": padic_value(&embedded)})
                    );
                }
            }
            out
        }
        Target::Teichmuller { x } => {
            let ctx = context(cli)?;
            let (xp, xl) = parse_point(&ctx, x)?;
            let value = teichmuller(&xp)?;
            let obj = json!({"function": "teichmuller", "p": ctx.p(), "x": xl});
            render_with_oracle(cli, obj, &value, None)?
        }
    };
    emit(cli, &out)
}

fn run_verify(cli: &Cli, args: &VerifyArgs) -> CliResult<u8> {
    if args.list {
        let mut out = verify::FAMILIES.join("\n");
        out.push('\n');
        emit(cli, &out)?;
        return Ok(0);
    }
    let slack = match &args.slack {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
            SlackTable::parse(&text)?
        }
        None => SlackTable::embedded(),
    };
    let config = VerifyConfig {
        primes: cli.p.map_or_else(|| vec![3, 5, 7], |p| vec![p]),
        workprec: cli.prec,
        guard: cli.guard,
        oracle_depth: cli.oracle_depth,
        max_terms: cli.max_terms,
        evaluation_cap: DEFAULT_EVALUATION_CAP,
        seed: cli.seed,
        families: args.identities.clone(),
        report_both_forms: args.report_both_forms,
        slack,
    };
    if args.calibrate {
        let measured = verify::calibrate(&config)?;
        emit(cli, &measured.to_json())?;
        return Ok(0);
    }
    let reports = verify::run(&config)?;
    let summary = Summary::of(&reports);
    let mut out = String::new();
    if text_format(cli)? {
        for r in &reports {
            out.push_str(&r.render_line());
            out.push('\n');
        }
        out.push_str(&format!(
            "summary: total={} pass={} fail={} hypothesis-violation={} budget={} info={}\n",
            summary.total, summary.pass, summary.fail, summary.hypothesis_violation, summary.budget, summary.informational
        ));
    } else {
        for r in &reports {
            out.push_str(&serde_json::to_string(r).expect("serializable"));
            out.push('\n');
        }
        out.push_str(&json!({"summary": summary}).to_string());
        out.push('\n');
    }
    emit(cli, &out)?;
    Ok(if summary.all_passed() { 0 } else { 1 })
}

/// Explicit `--format` wins, then the extension of `-o`, then `fallback`.
fn table_format(cli: &Cli, fallback: Format) -> CliResult<Format> {
    match cli.format {
        Some(Format::Text) => Err(usage("tables are written as json or csv")),
        Some(f) => Ok(f),
        None => Ok(match cli.output.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            _ => fallback,
        }),
    }
}

fn parse_list(ctx: &PadicContext, items: &[String]) -> CliResult<Vec<(PadicNumber, ExactRational)>> {
    if items.is_empty() {
        return Err(usage("empty value list"));
    }
    items.iter().map(|t| parse_s(ctx, t.trim())).collect()
}

fn parse_k_range(text: &str) -> CliResult<Vec<i64>> {
    let bad = || usage(format!("--chars must be a list or a range a..b, got {text:?}"));
    if let Some((a, b)) = text.split_once("..") {
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: i64 = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    text.split(',').map(|k| k.trim().parse().map_err(|_| bad())).collect()
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn table(cli: &Cli, kind: &TableKind) -> CliResult<()> {
    let out = match kind {
        TableKind::Euler { max } => {
            let t = EulerTable::build(*max);
            match table_format(cli, Format::Json)? {
                Format::Csv => {
                    let mut out = String::from("m,E_m(0),E_m\n");
                    for m in 0..=*max {
                        out.push_str(&format!(
                            "{m},{},{}\n",
                            format_rational(&t.zero_values()[m]),
                            format_rational(&t.numbers()[m])
                        ));
                    }
                    out
                }
                _ => t.to_cache_json(),
            }
        }
        TableKind::ZetaValues { s_list, x_list } => {
            let ctx = context(cli)?;
            let e = engine(cli, &ctx);
            let ss = parse_list(&ctx, s_list)?;
            let xs = parse_list(&ctx, x_list)?;
            let mut rows = Vec::new();
            for (sp, sq) in &ss {
                for (xp, xq) in &xs {
                    rows.push((format_rational(sq), format_rational(xq), e.zeta_czp(sp, xp)?));
                }
            }
            grid_output(cli, &ctx, &["s", "x"], rows.into_iter().map(|(s, x, v)| (vec![s, x], v)).collect())?
        }
        TableKind::EllValues { chars, s_list, v } => {
            let ctx = context(cli)?;
            let e = Arc::new(engine(cli, &ctx));
            let ks = parse_k_range(chars)?;
            let ss = parse_list(&ctx, s_list)?;
            let mut rows = Vec::new();
            for k in ks {
                let chi = DirichletCharacter::new(ctx.p(), *v, k)?;
                for (sp, sq) in &ss {
                    rows.push((vec![chi.to_string(), format_rational(sq)], ell(&e, &chi, sp)?));
                }
            }
            grid_output(cli, &ctx, &["char", "s"], rows)?
        }
    };
    emit(cli, &out)
}

fn grid_output(cli: &Cli, ctx: &PadicContext, keys: &[&str], rows: Vec<(Vec<String>, PadicNumber)>) -> CliResult<String> {
    match table_format(cli, Format::Csv)? {
        Format::Csv => {
            let mut out = format!("p,{},valuation,digits,relprec,value\n", keys.join(","));
            for (labels, v) in rows {
                let digits = v.digits().iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ");
                let fields: Vec<String> = std::iter::once(ctx.p().to_string())
                    .chain(labels)
                    .chain([
                        v.valuation().map_or(String::new(), |x| x.to_string()),
                        digits,
                        v.relprec().to_string(),
                        v.render_text(),
                    ])
                    .map(|f| csv_escape(&f))
                    .collect();
                out.push_str(&fields.join(","));
                out.push('\n');
            }
            Ok(out)
        }
        _ => {
            let rows: Vec<Value> = rows
                .into_iter()
                .map(|(labels, v)| {
                    let mut obj = serde_json::Map::new();
                    for (k, l) in keys.iter().zip(labels) {
                        obj.insert(k.to_string(), json!(l));
                    }
                    obj.insert("value".into(), padic_value(&v));
                    Value::Object(obj)
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&json!({"p": ctx.p(), "rows": rows})).expect("serializable");
            s.push('\n');
            Ok(s)
        }
    }
}
