//! Command-line front end for the `certseq` library: every experiment behind
//! one reproducible, machine-readable interface.
//!
//! Reports go to stdout as JSON (default) or flattened CSV; log lines go to
//! stderr.  Every report embeds the full configuration that produced it, and
//! re-running an identical configuration byte-reproduces the report except
//! for the `elapsed_hint` field.
//!
//! Exit status: 0 on success, 2 when a requested certification reached a
//! negative verdict (a failed `verify-t5`/`verify-t4`, or a witness search
//! that exhausted its budget), 1 on domain errors (reported under the
//! library's error name), 64 on usage errors.

use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use certseq::cf::{self, EvenQuotientVerdict, Side};
use certseq::counting::{count_exceed, theorem5_bound, verify_t5};
use certseq::parse::{parse_fspec, parse_gpoly, parse_rational, parse_real, GRAMMAR_HELP};
use certseq::real::RealSource;
use certseq::seq::CertifiedOrder;
use certseq::t4::{construct_t4_alpha, verify_t4, T4Construction};
use certseq::witness::{
    find_cos_witness, find_frac_witness, find_square_witness, zaharescu_pairs, CosSearchBudget,
    WitnessReport,
};
use certseq::{Error, Precision, Result};

const EXIT_VERDICT: u8 = 2;
const EXIT_ERROR: u8 = 1;
const EXIT_USAGE: u8 = 64;

/// Environment variable consulted for the precision cap when the
/// `--precision-cap` flag is absent.
const CAP_ENV: &str = "CERTSEQ_PRECISION_CAP";

/// Certified experiments on the sequences |cos(πnα)|ⁿ and {nα}ⁿ.
#[derive(Parser)]
#[command(name = "certseq", version, after_help = GRAMMAR_HELP)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Report format written to stdout.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    output: OutputFormat,

    /// Cap on adaptive precision, in bits.  Overrides the
    /// CERTSEQ_PRECISION_CAP environment variable; with neither set, each
    /// command uses its library default.
    #[arg(long, global = true, value_name = "BITS")]
    precision_cap: Option<u32>,

    /// Seed echoed into the config for downstream tooling; the commands
    /// themselves are deterministic and do not consume it.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    fn name(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Expand α into its continued fraction.
    Expand {
        /// The real number, in the grammar shown by `certseq --help`.
        #[arg(long)]
        alpha: String,
        /// How many partial quotients to list.
        #[arg(long, default_value_t = 32)]
        terms: u64,
    },
    /// Decide whether the even-indexed partial quotients of α are bounded.
    Classify {
        #[arg(long)]
        alpha: String,
        /// Expansion depth scanned for the observed quotient maxima.
        #[arg(long, default_value_t = 64)]
        depth: u64,
    },
    /// List the convergents of α passing the filter |α − p/q| < 1/(√5·q²).
    Hurwitz {
        #[arg(long)]
        alpha: String,
        /// How many leading convergents to scan.
        #[arg(long, default_value_t = 20)]
        count: u64,
    },
    /// Find n with {nα}ⁿ certifiably within --tol of --target.
    WitnessFrac {
        #[arg(long)]
        alpha: String,
        /// Target value in (0,1); rational or decimal literal.
        #[arg(long)]
        target: String,
        /// Half-width of the acceptance interval around the target.
        #[arg(long, default_value = "0.02")]
        tol: String,
        /// Deepest convergent level searched.
        #[arg(long, default_value_t = 60)]
        t_max: u32,
    },
    /// Find n with |g(cos(αn))|ⁿ certifiably within --tol of --target.
    WitnessCos {
        #[arg(long)]
        alpha: String,
        /// Shaping polynomial, e.g. poly:[0,1] for g(y) = y.
        #[arg(long, default_value = "poly:[0,1]")]
        g: String,
        #[arg(long)]
        target: String,
        #[arg(long, default_value = "0.05")]
        tol: String,
        /// Deepest continued-fraction index of α/π mined for denominators.
        #[arg(long, default_value_t = CosSearchBudget::default().max_cf_index)]
        max_cf_index: u32,
        /// Largest multiple of a mined denominator considered as n.
        #[arg(long, default_value_t = CosSearchBudget::default().max_multiplier)]
        max_multiplier: u64,
        /// Indices tried on each side of a predicted candidate.
        #[arg(long, default_value_t = CosSearchBudget::default().neighborhood)]
        neighborhood: u64,
        /// Total certified evaluations allowed before giving up.
        #[arg(long, default_value_t = CosSearchBudget::default().max_evaluations)]
        max_evals: u64,
        /// Keep only n ≡ R (mod 4) whose rounded nα/(2π) has parity P.
        #[arg(long, value_name = "R,P")]
        congruence: Option<String>,
        /// Trace |g(sin(αn))|ⁿ instead of the cosine.
        #[arg(long)]
        sin: bool,
    },
    /// Find n with |g(cos(n²α))|ⁿ certifiably within --tol of --target.
    WitnessSquare {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "poly:[0,1]")]
        g: String,
        #[arg(long)]
        target: String,
        #[arg(long, default_value = "0.05")]
        tol: String,
        /// Scan ceiling for the index n.
        #[arg(long, default_value_t = 100_000)]
        n_max: u64,
        /// Total certified evaluations allowed before giving up.
        #[arg(long, default_value_t = 4_000)]
        max_evals: u64,
    },
    /// List n ≤ n-max whose nearest integer m to n²ζ obeys |n²ζ − m| < n^(−θ).
    Zpairs {
        /// The number ζ, in the grammar shown by `certseq --help`.
        #[arg(long)]
        alpha: String,
        /// Exponent θ in the closeness threshold, a positive rational.
        #[arg(long, default_value = "1/2")]
        theta: String,
        #[arg(long, default_value_t = 200)]
        n_max: u64,
    },
    /// Build the staged decimal-series angle for thresholds r < r′.
    ConstructT4 {
        /// Exceedance threshold in (0,1).
        #[arg(long)]
        r: String,
        /// Margin threshold in (r,1); defaults to (1+r)/2.
        #[arg(long)]
        r_prime: Option<String>,
        /// Stage decay profile: pow:B, loginv, or expinv:L.
        #[arg(long)]
        f: String,
        /// Number of stages to construct.
        #[arg(long, default_value_t = 3)]
        k_max: u32,
    },
    /// Certify one stage of a constructed angle: every scheduled multiple
    /// exceeds r, and the two count-bound readings.
    VerifyT4 {
        #[arg(long)]
        r: String,
        #[arg(long)]
        r_prime: Option<String>,
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 3)]
        k_max: u32,
        /// Stage to certify (2 ≤ k ≤ k-max).
        #[arg(long)]
        k: u32,
    },
    /// Count n ≤ N with |cos(πnα)|ⁿ certifiably above r.
    Count {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        r: String,
        #[arg(long = "N")]
        n_max: u64,
    },
    /// Evaluate the exceedance lower bound 5^{1/4}(1−r)^{1/4}N^{1/4}/(2√π).
    Bound {
        #[arg(long)]
        r: String,
        #[arg(long = "N")]
        n_max: String,
    },
    /// Run the full lower-bound pipeline at convergent level t and compare
    /// the certified count against the bound.
    VerifyT5 {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        r: String,
        /// Hurwitz-quality convergent level (1-based).
        #[arg(long)]
        t: u32,
    },
}

/// Report field list in emission order.
type Fields = Vec<(&'static str, Value)>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    run(cli)
}

fn run(cli: Cli) -> ExitCode {
    let started = Instant::now();
    let format = cli.output;
    let cap_flag = cli.precision_cap;
    let seed = cli.seed;

    let cap_override = match resolve_cap_override(cap_flag) {
        Ok(c) => c,
        Err(e) => {
            let report = assemble(
                command_name(&cli.cmd),
                vec![],
                error_fields(&e),
                format,
                seed,
                started,
            );
            print!("{report}");
            eprintln!("certseq: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    };

    let command = command_name(&cli.cmd);
    let (config, outcome) = dispatch(cli.cmd, cap_override);
    let (fields, exit) = match outcome {
        Ok(pair) => pair,
        Err(e) => {
            eprintln!("certseq: {command}: {e}");
            let exit = match e {
                Error::BudgetExhausted { .. } => EXIT_VERDICT,
                _ => EXIT_ERROR,
            };
            (error_fields(&e), exit)
        }
    };

    let report = assemble(command, config, fields, format, seed, started);
    print!("{report}");
    ExitCode::from(exit)
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Expand { .. } => "expand",
        Cmd::Classify { .. } => "classify",
        Cmd::Hurwitz { .. } => "hurwitz",
        Cmd::WitnessFrac { .. } => "witness-frac",
        Cmd::WitnessCos { .. } => "witness-cos",
        Cmd::WitnessSquare { .. } => "witness-square",
        Cmd::Zpairs { .. } => "zpairs",
        Cmd::ConstructT4 { .. } => "construct-t4",
        Cmd::VerifyT4 { .. } => "verify-t4",
        Cmd::Count { .. } => "count",
        Cmd::Bound { .. } => "bound",
        Cmd::VerifyT5 { .. } => "verify-t5",
    }
}

/// Flag value wins over the environment variable; a set-but-unparseable
/// environment value is an error rather than a silent fallback.
fn resolve_cap_override(flag: Option<u32>) -> Result<Option<u32>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(CAP_ENV) {
        Ok(s) => s.trim().parse::<u32>().map(Some).map_err(|_| {
            Error::InvalidParameter(format!("cannot parse {CAP_ENV}={s:?} as a bit count"))
        }),
        Err(_) => Ok(None),
    }
}

fn apply_cap(base: Precision, cap_override: Option<u32>) -> Precision {
    match cap_override {
        Some(c) => base.with_cap(c),
        None => base,
    }
}

/// Run one subcommand: returns the config echo and either the report fields
/// with their exit status or a library error.
fn dispatch(cmd: Cmd, cap_override: Option<u32>) -> (Fields, Result<(Fields, u8)>) {
    match cmd {
        Cmd::Expand { alpha, terms } => {
            let prec = apply_cap(Precision::expand_default(), cap_override);
            let config = vec![
                ("alpha_spec", json!(alpha)),
                ("terms", json!(terms)),
                ("precision_cap", json!(prec.cap)),
            ];
            (config, run_expand(&alpha, terms, &prec))
        }
        Cmd::Classify { alpha, depth } => {
            let prec = apply_cap(Precision::expand_default(), cap_override);
            let config = vec![
                ("alpha_spec", json!(alpha)),
                ("depth", json!(depth)),
                ("precision_cap", json!(prec.cap)),
            ];
            (config, run_classify(&alpha, depth, &prec))
        }
        Cmd::Hurwitz { alpha, count } => {
            let prec = apply_cap(Precision::expand_default(), cap_override);
            let config = vec![
                ("alpha_spec", json!(alpha)),
                ("count", json!(count)),
                ("precision_cap", json!(prec.cap)),
            ];
            (config, run_hurwitz(&alpha, count, &prec))
        }
        Cmd::WitnessFrac { alpha, target, tol, t_max } => {
            let prec = apply_cap(Precision::eval_default(), cap_override);
            let config = vec![
                ("alpha_spec", json!(alpha)),
                ("target", json!(target)),
                ("tol", json!(tol)),
                ("t_max", json!(t_max)),
                ("precision_cap", json!(prec.cap)),
            ];
            (config, run_witness_frac(&alpha, &target, &tol, t_max, &prec))
        }
        Cmd::WitnessCos {
            alpha,
            g,
            target,
            tol,
            max_cf_index,
            max_multiplier,
            neighborhood,
            max_evals,
            congruence,
            sin,
        } => {
            let prec = apply_cap(Precision::eval_default(), cap_override);
            let config = vec![
                ("alpha_spec", json!(alpha)),
                ("g", json!(g)),
                ("target", json!(target)),
                ("tol", json!(tol)),
                ("max_cf_index", json!(max_cf_index)),
                ("max_multiplier", json!(max_multiplier)),
                ("neighborhood", json!(neighborhood)),
                ("max_evals", json!(max_evals)),
                ("congruence", congruence.as_deref().map_or(Value::Null, |c| json!(c))),
                ("sin", json!(sin)),
                ("precision_cap", json!(prec.cap)),
            ];
            let budget = CosSearchBudget {
                max_cf_index,
                max_multiplier,
                neighborhood,
                max_evaluations: max_evals,
            };
            let outcome =
                run_witness_cos(&alpha, &g, &target, &tol, &budget, congruence.as_deref(), sin, &prec);
            (config, outcome)
        }
        Cmd::WitnessSquare { alpha, g, target, tol, n_max, max_evals } => {
            let prec = apply_cap(Precision::eval_default(), cap_override);
            let config = vec![
                ("alpha_spec", json!(alpha)),
                ("g", json!(g)),
                ("target", json!(target)),
                ("tol", json!(tol)),
                ("n_max", json!(n_max)),
                ("max_evals", json!(max_evals)),
                ("precision_cap", json!(prec.cap)),
            ];
            (config, run_witness_square(&alpha, &g, &target, &tol, n_max, max_evals, &prec))
        }
        Cmd::Zpairs { alpha, theta, n_max } => {
            let prec = apply_cap(Precision::eval_default(), cap_override);
            let config = vec![
                ("alpha_spec", json!(alpha)),
                ("theta", json!(theta)),
                ("n_max", json!(n_max)),
                ("precision_cap", json!(prec.cap)),
            ];
            (config, run_zpairs(&alpha, &theta, n_max, &prec))
        }
        Cmd::ConstructT4 { r, r_prime, f, k_max } => {
            let prec = apply_cap(Precision::eval_default(), cap_override);
            let config = vec![
                ("r", json!(r)),
                ("r_prime", r_prime.as_deref().map_or(Value::Null, |s| json!(s))),
                ("f", json!(f)),
                ("k_max", json!(k_max)),
                ("precision_cap", json!(prec.cap)),
            ];
            let outcome = build_t4(&r, r_prime.as_deref(), &f, k_max, &prec).map(|c| {
                let mut fields = t4_construction_fields(&c);
                fields.push(("stages", json!(c.steps.len())));
                (fields, 0)
            });
            (config, outcome)
        }
        Cmd::VerifyT4 { r, r_prime, f, k_max, k } => {
            let prec = apply_cap(Precision::eval_default(), cap_override);
            let config = vec![
                ("r", json!(r)),
                ("r_prime", r_prime.as_deref().map_or(Value::Null, |s| json!(s))),
                ("f", json!(f)),
                ("k_max", json!(k_max)),
                ("k", json!(k)),
                ("precision_cap", json!(prec.cap)),
            ];
            (config, run_verify_t4(&r, r_prime.as_deref(), &f, k_max, k, &prec))
        }
        Cmd::Count { alpha, r, n_max } => {
            let prec = apply_cap(Precision::eval_default(), cap_override);
            let config = vec![
                ("alpha_spec", json!(alpha)),
                ("r", json!(r)),
                ("N", json!(n_max)),
                ("precision_cap", json!(prec.cap)),
            ];
            (config, run_count(&alpha, &r, n_max, &prec))
        }
        Cmd::Bound { r, n_max } => {
            let prec = apply_cap(Precision::eval_default(), cap_override);
            let config = vec![
                ("r", json!(r)),
                ("N", json!(n_max)),
                ("precision_cap", json!(prec.cap)),
            ];
            (config, run_bound(&r, &n_max, &prec))
        }
        Cmd::VerifyT5 { alpha, r, t } => {
            let prec = apply_cap(Precision::eval_default(), cap_override);
            let config = vec![
                ("alpha_spec", json!(alpha)),
                ("r", json!(r)),
                ("t", json!(t)),
                ("precision_cap", json!(prec.cap)),
            ];
            (config, run_verify_t5(&alpha, &r, t, &prec))
        }
    }
}

fn run_expand(alpha: &str, terms: u64, prec: &Precision) -> Result<(Fields, u8)> {
    let x = parse_real(alpha)?;
    let cf = cf::expand_real(&x, terms, prec)?;
    let mut quotients = Vec::new();
    for i in 0..terms {
        match cf.quotient(i) {
            Some(a) => quotients.push(Value::String(a.to_string())),
            None => break,
        }
    }
    let fields = vec![
        ("quotients", Value::Array(quotients)),
        ("finite", json!(cf.is_finite())),
        ("exact", json!(cf.is_exact_value())),
        ("value", json!(cf.approx(64).to_f64())),
    ];
    Ok((fields, 0))
}

fn run_classify(alpha: &str, depth: u64, prec: &Precision) -> Result<(Fields, u8)> {
    let x = parse_real(alpha)?;
    let cf = cf::expand_real(&x, depth, prec)?;
    let cls = cf::classify_even_pq(&cf, depth);
    let mut fields = Vec::new();
    match cls.verdict {
        EvenQuotientVerdict::BoundedEven { m } => {
            fields.push(("verdict", json!("BoundedEven")));
            fields.push(("M", uint_value(&m)));
        }
        EvenQuotientVerdict::UnboundedEven => fields.push(("verdict", json!("UnboundedEven"))),
        EvenQuotientVerdict::UnknownAtDepth { scanned } => {
            fields.push(("verdict", json!("UnknownAtDepth")));
            fields.push(("scanned", json!(scanned)));
        }
    }
    fields.push(("observed_even_max", uint_value(&cls.observed_even_max)));
    fields.push(("observed_odd_max", uint_value(&cls.observed_odd_max)));
    fields.push(("depth", json!(cls.depth)));
    Ok((fields, 0))
}

fn run_hurwitz(alpha: &str, count: u64, prec: &Precision) -> Result<(Fields, u8)> {
    let x = parse_real(alpha)?;
    let passers = cf::hurwitz_filter(&x, count, prec)?;
    let list: Vec<Value> = passers
        .iter()
        .map(|c| {
            json!({
                "index": c.index,
                "p": c.p.to_string(),
                "q": c.q.to_string(),
                "side": match c.side { Side::Below => "below", Side::Above => "above" },
            })
        })
        .collect();
    let fields = vec![
        ("scanned", json!(count)),
        ("passing", json!(list.len())),
        ("convergents", Value::Array(list)),
    ];
    Ok((fields, 0))
}

fn run_witness_frac(
    alpha: &str,
    target: &str,
    tol: &str,
    t_max: u32,
    prec: &Precision,
) -> Result<(Fields, u8)> {
    let x = parse_real(alpha)?;
    let y = parse_rational(target)?;
    let eps = parse_rational(tol)?;
    witness_outcome(find_frac_witness(&x, &y, &eps, t_max, prec))
}

#[allow(clippy::too_many_arguments)]
fn run_witness_cos(
    alpha: &str,
    g: &str,
    target: &str,
    tol: &str,
    budget: &CosSearchBudget,
    congruence: Option<&str>,
    sin: bool,
    prec: &Precision,
) -> Result<(Fields, u8)> {
    let x = parse_real(alpha)?;
    let poly = parse_gpoly(g)?;
    let y = parse_rational(target)?;
    let eps = parse_rational(tol)?;
    let cong = congruence.map(parse_congruence).transpose()?;
    witness_outcome(find_cos_witness(&x, &poly, &y, &eps, budget, cong, sin, prec))
}

fn run_witness_square(
    alpha: &str,
    g: &str,
    target: &str,
    tol: &str,
    n_max: u64,
    max_evals: u64,
    prec: &Precision,
) -> Result<(Fields, u8)> {
    let x = parse_real(alpha)?;
    let poly = parse_gpoly(g)?;
    let y = parse_rational(target)?;
    let eps = parse_rational(tol)?;
    witness_outcome(find_square_witness(&x, &poly, &y, &eps, n_max, max_evals, prec))
}

fn run_zpairs(alpha: &str, theta: &str, n_max: u64, prec: &Precision) -> Result<(Fields, u8)> {
    let zeta = parse_real(alpha)?;
    let th = parse_rational(theta)?;
    let zp = zaharescu_pairs(&zeta, &th, n_max, prec)?;
    let pairs: Vec<Value> = zp
        .pairs
        .iter()
        .map(|(n, m)| json!({ "n": n, "m": m.to_string() }))
        .collect();
    let fields = vec![
        ("count", json!(pairs.len())),
        ("pairs", Value::Array(pairs)),
        ("skipped", json!(zp.skipped)),
    ];
    Ok((fields, 0))
}

fn build_t4(
    r: &str,
    r_prime: Option<&str>,
    f: &str,
    k_max: u32,
    prec: &Precision,
) -> Result<T4Construction> {
    let r = parse_rational(r)?;
    let rp = r_prime.map(parse_rational).transpose()?;
    let f = parse_fspec(f)?;
    construct_t4_alpha(&r, rp.as_ref(), &f, k_max, prec)
}

fn t4_construction_fields(c: &T4Construction) -> Fields {
    let steps: Vec<Value> = c
        .steps
        .iter()
        .enumerate()
        .map(|(i, (d, n))| json!({ "k": i + 1, "d": d, "N": n.to_string() }))
        .collect();
    vec![
        ("r", json!(c.r.to_string())),
        ("r_prime", json!(c.r_prime.to_string())),
        ("f", json!(c.f.describe())),
        ("steps", Value::Array(steps)),
        ("alpha_spec", json!(decimal_series_spec(&c.alpha))),
    ]
}

/// Render the constructed angle back into the input grammar, so a report
/// can be fed straight into `--alpha`.
fn decimal_series_spec(x: &RealSource) -> String {
    match x {
        RealSource::DecimalSeries(s) => {
            let digits: Vec<String> = s.prefix().iter().map(u64::to_string).collect();
            if s.has_tail() {
                format!("decseq-rule:doubling({})", digits.join(","))
            } else {
                format!("decseq:[{}]", digits.join(","))
            }
        }
        other => format!("{other:?}"),
    }
}

fn run_verify_t4(
    r: &str,
    r_prime: Option<&str>,
    f: &str,
    k_max: u32,
    k: u32,
    prec: &Precision,
) -> Result<(Fields, u8)> {
    let c = build_t4(r, r_prime, f, k_max, prec)?;
    let rep = verify_t4(&c, k, prec)?;
    let multiples: Vec<Value> = rep
        .multiples
        .iter()
        .map(|(n, ord)| json!({ "n": n.to_string(), "order": order_name(ord) }))
        .collect();
    let certified = rep.all_exceed && rep.chain_holds;
    let fields = vec![
        ("k", json!(rep.k)),
        ("d_prev", json!(rep.d_prev)),
        ("N_k", json!(rep.n_k.to_string())),
        ("multiples", Value::Array(multiples)),
        ("all_exceed", json!(rep.all_exceed)),
        ("implied_count_bound", json!(rep.implied_count_bound.to_string())),
        ("nf_lo", json!(rep.nf_lo)),
        ("nf_hi", json!(rep.nf_hi)),
        ("count_bound_holds", rep.count_bound_holds.map_or(Value::Null, |b| json!(b))),
        ("chain_holds", json!(rep.chain_holds)),
        ("certified", json!(certified)),
    ];
    Ok((fields, if certified { 0 } else { EXIT_VERDICT }))
}

fn run_count(alpha: &str, r: &str, n_max: u64, prec: &Precision) -> Result<(Fields, u8)> {
    let x = parse_real(alpha)?;
    let threshold = parse_rational(r)?;
    let rep = count_exceed(&x, &threshold, n_max, prec)?;
    let fields = vec![
        ("N", json!(rep.n_max)),
        ("r", json!(rep.r.to_string())),
        ("count_certain", json!(rep.count_certain)),
        ("count_unresolved", json!(rep.count_unresolved)),
    ];
    Ok((fields, 0))
}

fn run_bound(r: &str, n_max: &str, prec: &Precision) -> Result<(Fields, u8)> {
    let threshold = parse_rational(r)?;
    let n: BigInt = n_max
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("cannot parse N from {n_max:?}")))?;
    let b = theorem5_bound(&threshold, &n, prec)?;
    let fields = vec![
        ("r", json!(threshold.to_string())),
        ("N", int_value(&n)),
        ("bound", json!(b.to_f64())),
        ("bound_lo", json!(b.lo_f64())),
        ("bound_hi", json!(b.hi_f64())),
    ];
    Ok((fields, 0))
}

fn run_verify_t5(alpha: &str, r: &str, t: u32, prec: &Precision) -> Result<(Fields, u8)> {
    let x = parse_real(alpha)?;
    let threshold = parse_rational(r)?;
    let v = verify_t5(&x, &threshold, t, prec)?;
    let fields = vec![
        ("t", json!(v.t)),
        ("v_t", json!(v.v_t.to_string())),
        ("N_t", json!(v.n_t.to_string())),
        ("d_max", json!(v.d_max)),
        ("bound", json!(v.bound.to_f64())),
        ("bound_lo", json!(v.bound.lo_f64())),
        ("bound_hi", json!(v.bound.hi_f64())),
        ("count_certain", json!(v.count.count_certain)),
        ("count_unresolved", json!(v.count.count_unresolved)),
        ("multiples_certified", json!(v.multiples_certified)),
        ("pass", json!(v.pass)),
    ];
    Ok((fields, if v.pass { 0 } else { EXIT_VERDICT }))
}

/// Shared tail for the three witness searches: a certified report exits 0,
/// an exhausted budget reports the best uncertified attempt and exits 2.
fn witness_outcome(res: Result<WitnessReport>) -> Result<(Fields, u8)> {
    match res {
        Ok(w) => {
            let exit = if w.certified { 0 } else { EXIT_VERDICT };
            let mut fields = vec![("verdict", json!("certified"))];
            fields.extend(witness_fields(&w));
            Ok((fields, exit))
        }
        Err(Error::BudgetExhausted { best }) => {
            let mut fields = vec![("verdict", json!("budget-exhausted"))];
            match best {
                Some(b) => fields.extend(witness_fields(&b)),
                None => fields.push(("n", Value::Null)),
            }
            Ok((fields, EXIT_VERDICT))
        }
        Err(e) => Err(e),
    }
}

fn witness_fields(w: &WitnessReport) -> Fields {
    vec![
        ("n", Value::String(w.n.to_string())),
        ("value_lo", json!(w.value_lo)),
        ("value_hi", json!(w.value_hi)),
        ("target", json!(w.target)),
        ("tolerance", json!(w.tolerance)),
        ("distance_hi", json!(w.distance_hi)),
        ("certified", json!(w.certified)),
        ("evaluations", json!(w.evaluations)),
        ("screened", json!(w.screened)),
        ("precision_bits", json!(w.precision_bits)),
        ("detail", json!(w.detail)),
    ]
}

/// `--congruence R,P`: residue of n mod 4 and parity of the rounded nα/(2π).
fn parse_congruence(s: &str) -> Result<(u8, u8)> {
    let bad = || Error::InvalidParameter(format!("cannot parse congruence from {s:?}: want R,P"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let r: u8 = a.trim().parse().map_err(|_| bad())?;
    let p: u8 = b.trim().parse().map_err(|_| bad())?;
    Ok((r, p))
}

fn order_name(ord: &CertifiedOrder) -> &'static str {
    match ord {
        CertifiedOrder::Less => "less",
        CertifiedOrder::Greater => "greater",
        CertifiedOrder::Unresolved => "unresolved",
    }
}

fn error_fields(e: &Error) -> Fields {
    vec![("error", json!(e.name())), ("detail", json!(e.to_string()))]
}

fn uint_value(b: &BigUint) -> Value {
    match b.to_u64() {
        Some(v) => json!(v),
        None => Value::String(b.to_string()),
    }
}

fn int_value(b: &BigInt) -> Value {
    match b.to_i64() {
        Some(v) => json!(v),
        None => Value::String(b.to_string()),
    }
}

/// Assemble the final report string: command, config echo, report fields,
/// and the wall-clock hint (the one field excluded from reproducibility).
fn assemble(
    command: &'static str,
    config: Fields,
    fields: Fields,
    format: OutputFormat,
    seed: Option<u64>,
    started: Instant,
) -> String {
    let mut cfg = Map::new();
    for (k, v) in config {
        cfg.insert(k.to_string(), v);
    }
    cfg.insert("output".into(), json!(format.name()));
    cfg.insert("seed".into(), seed.map_or(Value::Null, |s| json!(s)));

    let mut top = Map::new();
    top.insert("command".into(), json!(command));
    top.insert("config".into(), Value::Object(cfg));
    for (k, v) in fields {
        top.insert(k.to_string(), v);
    }
    top.insert("elapsed_hint".into(), json!(started.elapsed().as_secs_f64()));

    let value = Value::Object(top);
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&value).expect("report serializes");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let mut rows = Vec::new();
            flatten("", &value, &mut rows);
            let mut s = String::from("key,value\n");
            for (k, v) in rows {
                s.push_str(&csv_cell(&k));
                s.push(',');
                s.push_str(&csv_cell(&v));
                s.push('\n');
            }
            s
        }
    }
}

/// Depth-first flattening of a JSON tree into dotted-path/value rows, in
/// emission order, for the CSV format.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let path = |key: &str| {
        if prefix.is_empty() {
            key.to_string()
        } else {
            format!("{prefix}.{key}")
        }
    };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&path(k), x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&path(&i.to_string()), x, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn csv_cell(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
