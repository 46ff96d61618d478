//! `twistcrit` command-line front end.
//!
//! Every subcommand builds its whole output in memory, writes it to stdout
//! once, and reports diagnostics on stderr. Exit codes: 0 success, 1 a
//! hypothesis of the criterion fails (the report is still printed), 2 bad
//! input, 3 precision or recognition failure.

use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use twistcrit::congruence::{verify_congruence, CongruenceError, Verdict};
use twistcrit::curves::{CurveError, CurveQ, Point, PointK, QuadExt};
use twistcrit::formal_log::{check_star_with, Embedding, LogError, LogOptions};
use twistcrit::heegner::{compute_heegner_point, HeegnerError, DEFAULT_DENOMINATOR_BOUND};
use twistcrit::io::{params_line, parse_point, resolve_curve, tsv};
use twistcrit::sieve::{predict, LemmaOracle, SMode, SieveContext, SieveError};

#[derive(Parser)]
#[command(name = "twistcrit", version, about = "Rank criterion for prime quadratic twists of curves with partial 2-torsion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CurveArg {
    /// `label@file` or inline `a1,a2,a3,a4,a6,N=..,w=..[,min2][,label=..]`
    #[arg(long, allow_hyphen_values = true)]
    curve: String,
}

#[derive(Args, Clone)]
struct FieldArg {
    /// Radicand D of K = Q(sqrt D)
    #[arg(long = "K", allow_negative_numbers = true)]
    k: i64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SetName {
    #[value(name = "S")]
    S,
    #[value(name = "N")]
    N,
    #[value(name = "T")]
    T,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the 2-adic criterion at a point
    CheckStar {
        #[command(flatten)]
        curve: CurveArg,
        #[command(flatten)]
        field: FieldArg,
        /// Point `x,y` with coordinates `a/b+c/d*w`, w = sqrt D
        #[arg(long = "P", allow_hyphen_values = true)]
        point: String,
        /// Use the other embedding of K into Q_2
        #[arg(long)]
        conjugate: bool,
    },
    /// List the primes of S or T, or the signed twists of N
    Sieve {
        #[command(flatten)]
        curve: CurveArg,
        #[command(flatten)]
        field: FieldArg,
        #[arg(long, value_enum, ignore_case = true)]
        set: SetName,
        #[arg(long)]
        bound: u64,
        /// Decide S both by point counts and by splitting, failing on disagreement
        #[arg(long)]
        cross_check: bool,
    },
    /// Predict the ranks of the twist by d
    Predict {
        #[command(flatten)]
        curve: CurveArg,
        #[command(flatten)]
        field: FieldArg,
        #[arg(long = "P", allow_hyphen_values = true)]
        point: String,
        #[arg(long, allow_negative_numbers = true)]
        d: i64,
    },
    /// Check the three equivalent mod-4 conditions at every good prime
    LemmaTest {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long)]
        bound: u64,
    },
    /// Compare the two sides of the Heegner-point congruence
    Congruence {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long, allow_hyphen_values = true)]
        curve2: String,
        #[command(flatten)]
        field: FieldArg,
        #[arg(long = "P", allow_hyphen_values = true)]
        point: String,
        #[arg(long = "P2", allow_hyphen_values = true)]
        point2: String,
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        m: u32,
    },
    /// Compute a Heegner point from the modular parametrization
    Heegner {
        #[command(flatten)]
        curve: CurveArg,
        #[command(flatten)]
        field: FieldArg,
        /// Number of q-series terms (default: enough for a 1e-10 tail)
        #[arg(long)]
        terms: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_DENOMINATOR_BOUND)]
        denbound: u64,
    },
    /// Empirical and heuristic densities of S and T
    Density {
        #[command(flatten)]
        curve: CurveArg,
        #[command(flatten)]
        field: FieldArg,
        #[arg(long)]
        bound: u64,
    },
}

const HYPOTHESIS: u8 = 1;
const INPUT: u8 = 2;
const PRECISION: u8 = 3;

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl ToString) -> Failure {
    Failure {
        code,
        message: message.to_string(),
    }
}

fn curve_code(e: &CurveError) -> u8 {
    match e {
        CurveError::TwoTorsionCount(_) | CurveError::NonMinimal(_) => HYPOTHESIS,
        _ => INPUT,
    }
}

fn log_code(e: &LogError) -> u8 {
    match e {
        LogError::NotSplit(_) => HYPOTHESIS,
        LogError::WrongField(_) => INPUT,
        LogError::Curve(c) => curve_code(c),
        LogError::NoAdmissibleMultiple(_) | LogError::PrecisionExhausted(_) | LogError::Padic(_) => PRECISION,
    }
}

impl From<SieveError> for Failure {
    fn from(e: SieveError) -> Self {
        let code = match &e {
            SieveError::OutsideClass(..) => HYPOTHESIS,
            SieveError::CrossCheckDisagreement { .. } | SieveError::ReciprocityMismatch { .. } => PRECISION,
            SieveError::Curve(c) => curve_code(c),
            _ => INPUT,
        };
        fail(code, e)
    }
}

impl From<LogError> for Failure {
    fn from(e: LogError) -> Self {
        fail(log_code(&e), e)
    }
}

impl From<CongruenceError> for Failure {
    fn from(e: CongruenceError) -> Self {
        let code = match &e {
            CongruenceError::Log(l) => log_code(l),
            CongruenceError::NoTwoTorsion(_) => HYPOTHESIS,
            CongruenceError::Curve(c) => curve_code(c),
            _ => INPUT,
        };
        fail(code, e)
    }
}

impl From<HeegnerError> for Failure {
    fn from(e: HeegnerError) -> Self {
        let code = match &e {
            HeegnerError::Hypothesis(_) => HYPOTHESIS,
            HeegnerError::UnknownConductor(_) => INPUT,
            HeegnerError::Curve(c) => curve_code(c),
            _ => PRECISION,
        };
        fail(code, e)
    }
}

fn load_curve(spec: &str) -> Result<CurveQ, Failure> {
    let rec = resolve_curve(spec).map_err(|e| fail(INPUT, e))?;
    rec.to_curve().map_err(|e| fail(INPUT, e))
}

fn load_field(d: i64) -> Result<QuadExt, Failure> {
    QuadExt::new(d).map_err(|e| fail(INPUT, format!("--K {d}: {e}")))
}

fn load_point(e: &CurveQ, s: &str, k: QuadExt) -> Result<PointK, Failure> {
    let p = parse_point(s, k).map_err(|m| fail(INPUT, m))?;
    if !e.contains(&p) {
        return Err(fail(INPUT, format!("{s} is not on {}", e.display_label())));
    }
    Ok(p)
}

/// Output buffer plus the exit status it implies.
struct Report {
    out: String,
    code: u8,
}

impl Report {
    fn new(params: &[(&str, String)]) -> Self {
        Report {
            out: params_line(params) + "\n",
            code: 0,
        }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.out.push_str(s.as_ref());
        self.out.push('\n');
    }
}

fn run(cmd: Command) -> Result<Report, Failure> {
    match cmd {
        Command::CheckStar {
            curve,
            field,
            point,
            conjugate,
        } => {
            let e = load_curve(&curve.curve)?;
            let k = load_field(field.k)?;
            let p = load_point(&e, &point, k)?;
            let embedding = if conjugate { Embedding::Conjugate } else { Embedding::Canonical };
            let opts = LogOptions {
                embedding,
                ..LogOptions::default()
            };
            let mut r = Report::new(&[
                ("command", "check-star".into()),
                ("curve", e.display_label()),
                ("K", field.k.to_string()),
                ("P", p.to_string()),
                ("precision", opts.precision.to_string()),
                ("m_max", opts.m_max.to_string()),
                ("embedding", if conjugate { "conjugate" } else { "canonical" }.into()),
            ]);
            let rep = check_star_with(&e, k, &p, &opts)?;
            let v = rep.log_valuation.map_or("inf".to_string(), |v| v.to_string());
            r.line(format!("STAR {} {} {} v2log={v}", e.display_label(), field.k, rep.holds));
            r.line(format!("# {rep}"));
            if !rep.holds {
                r.code = HYPOTHESIS;
            }
            Ok(r)
        }
        Command::Sieve {
            curve,
            field,
            set,
            bound,
            cross_check,
        } => {
            let e = load_curve(&curve.curve)?;
            let k = load_field(field.k)?;
            let ctx = SieveContext::new(&e, k)?;
            let mode = if cross_check { SMode::CrossCheck } else { SMode::Count };
            let name = match set {
                SetName::S => "S",
                SetName::N => "N",
                SetName::T => "T",
            };
            let mut params = vec![
                ("command", "sieve".to_string()),
                ("curve", e.display_label()),
                ("K", field.k.to_string()),
                ("set", name.into()),
                ("bound", bound.to_string()),
            ];
            if !matches!(set, SetName::T) {
                params.push(("mode", format!("{mode:?}").to_lowercase()));
            }
            let mut r = Report::new(&params);
            let items: Vec<String> = match set {
                SetName::S => ctx.enumerate_s(bound, mode)?.iter().map(u64::to_string).collect(),
                SetName::N => ctx.enumerate_n(bound, mode)?.iter().map(i64::to_string).collect(),
                SetName::T => ctx.enumerate_t(bound)?.iter().map(u64::to_string).collect(),
            };
            for it in items {
                r.line(it);
            }
            Ok(r)
        }
        Command::Predict { curve, field, point, d } => {
            let e = load_curve(&curve.curve)?;
            let k = load_field(field.k)?;
            let p = load_point(&e, &point, k)?;
            let mut r = Report::new(&[
                ("command", "predict".into()),
                ("curve", e.display_label()),
                ("K", field.k.to_string()),
                ("P", p.to_string()),
                ("d", d.to_string()),
                ("w", e.root_number().to_string()),
            ]);
            let pred = predict(&e, k, &p, d);
            let rank_k = pred.rank_over_k.map_or("?".to_string(), |v| v.to_string());
            let rank_q = pred.rank_over_q.map_or("?".to_string(), |v| v.to_string());
            r.line(format!("PREDICT {d} rankK={rank_k} w={} rankQ={rank_q}", pred.root_number));
            for h in &pred.hypotheses {
                r.line(h.to_string());
            }
            if !pred.all_passed() {
                r.code = HYPOTHESIS;
            }
            Ok(r)
        }
        Command::LemmaTest { curve, bound } => {
            let e = load_curve(&curve.curve)?;
            let mut r = Report::new(&[
                ("command", "lemma-test".into()),
                ("curve", e.display_label()),
                ("bound", bound.to_string()),
            ]);
            let oracle = LemmaOracle::new(&e)?;
            let primes = twistcrit::arith::primes_in_range(3, bound.max(3)).map_err(|err| fail(INPUT, err))?;
            let mut count = 0usize;
            for l in primes {
                let (a, b, c) = match oracle.check(l) {
                    Ok(t) => t,
                    Err(SieveError::BadPrime { .. }) => continue,
                    Err(err) => return Err(err.into()),
                };
                if !(a == b && b == c) {
                    r.line(tsv(["LEMMA fail".to_string(), l.to_string(), format!("{a},{b},{c}")]));
                    r.code = PRECISION;
                    return Ok(r);
                }
                count += 1;
            }
            r.line(format!("LEMMA ok {count}"));
            Ok(r)
        }
        Command::Congruence {
            curve,
            curve2,
            field,
            point,
            point2,
            p,
            m,
        } => {
            let e = load_curve(&curve.curve)?;
            let e2 = load_curve(&curve2)?;
            let k = load_field(field.k)?;
            let pt = load_point(&e, &point, k)?;
            let pt2 = load_point(&e2, &point2, k)?;
            let mut r = Report::new(&[
                ("command", "congruence".into()),
                ("curve", e.display_label()),
                ("curve2", e2.display_label()),
                ("K", field.k.to_string()),
                ("P", pt.to_string()),
                ("P2", pt2.to_string()),
                ("p", p.to_string()),
                ("m", m.to_string()),
            ]);
            let rep = verify_congruence(&e, &pt, &e2, &pt2, k, p, m)?;
            let primes: Vec<String> = rep.product_primes.iter().map(u64::to_string).collect();
            r.line(tsv(["p".to_string(), rep.p.to_string()]));
            r.line(tsv(["m".to_string(), rep.m.to_string()]));
            r.line(tsv(["M".to_string(), rep.big_m.to_string()]));
            r.line(tsv(["product_primes".to_string(), primes.join(",")]));
            r.line(tsv(["lhs".to_string(), rep.lhs.to_string()]));
            r.line(tsv(["rhs".to_string(), rep.rhs.to_string()]));
            r.line(tsv(["verdict".to_string(), rep.verdict.to_string()]));
            for h in &rep.hypothesis_failures {
                r.line(format!("HYP heegner fail\t{h}"));
            }
            r.code = match rep.verdict {
                _ if !rep.hypothesis_failures.is_empty() => HYPOTHESIS,
                Verdict::InsufficientPrecision => PRECISION,
                Verdict::Fails => HYPOTHESIS,
                Verdict::MatchesPlus | Verdict::MatchesMinus => 0,
            };
            Ok(r)
        }
        Command::Heegner {
            curve,
            field,
            terms,
            denbound,
        } => {
            let e = load_curve(&curve.curve)?;
            let k = load_field(field.k)?;
            let mut r = Report::new(&[
                ("command", "heegner".into()),
                ("curve", e.display_label()),
                ("K", field.k.to_string()),
                ("terms", terms.map_or("auto".into(), |t| t.to_string())),
                ("denbound", denbound.to_string()),
            ]);
            match compute_heegner_point(&e, k, terms, denbound) {
                Ok(Point::Infinity) => r.line(format!("HEEGNER {} {} O", e.display_label(), field.k)),
                Ok(Point::Affine(x, y)) => r.line(format!("HEEGNER {} {} {x},{y}", e.display_label(), field.k)),
                Err(HeegnerError::Recognition { x, y, .. }) => {
                    r.line(tsv(["FAIL".to_string(), format!("x={x:.12}"), format!("y={y:.12}")]));
                    r.code = PRECISION;
                }
                Err(err) => return Err(err.into()),
            }
            Ok(r)
        }
        Command::Density { curve, field, bound } => {
            let e = load_curve(&curve.curve)?;
            let k = load_field(field.k)?;
            let ctx = SieveContext::new(&e, k)?;
            let mut r = Report::new(&[
                ("command", "density".into()),
                ("curve", e.display_label()),
                ("K", field.k.to_string()),
                ("bound", bound.to_string()),
            ]);
            let d = ctx.density_report(bound)?;
            let rows: [(&str, String); 9] = [
                ("primes", d.primes.to_string()),
                ("s_count", d.s_count.to_string()),
                ("s_frequency", format!("{:.6}", d.s_frequency)),
                ("t_count", d.t_count.to_string()),
                ("t_frequency", format!("{:.6}", d.t_frequency)),
                ("condition_rank", d.condition_rank.to_string()),
                ("fields_disjoint", d.fields_disjoint.to_string()),
                ("heuristic", d.heuristic.map_or("withheld".into(), |h| format!("{h:.6}"))),
                ("heuristic_unchecked", format!("{:.6}", d.heuristic_unchecked)),
            ];
            for (key, v) in rows {
                r.line(tsv([key.to_string(), v]));
            }
            Ok(r)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(r) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(r.out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(PRECISION);
            }
            ExitCode::from(r.code)
        }
        Err(f) => {
            eprintln!("twistcrit: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
