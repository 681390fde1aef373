//! Batch command-line frontend. Reports go to standard output (or
//! `--output`), progress to standard error. Exit status: 0 on success, 1
//! on a domain error (with a JSON error object on stdout), 2 on usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::cayley::{
    enumerate_ball_with_cap, growth_rate_bounds, FreeCertificate, GroupBall, DEFAULT_CAP,
};
use crate::constants::{
    constants_pipeline, monotonicity_suite, pingpong_constants, ConstantsInputs, ConstantsRecord,
    MonotonicityReport, PingpongConstants,
};
use crate::error::Error;
use crate::freesets::{
    build_pingpong_set, check_freeness, check_reduced, FreenessReport, ReducedReport,
};
use crate::hypgeom::{energy_profile, estimate_delta, DeltaMode};
use crate::rational::{parse_rational, Rational};
use crate::shortening::{
    build_moving_family, build_radius_family, check_sc_condition, enumerate_shortening_free,
    EnumerationReport, MovingFamily, ScConditionReport, ShorteningContext, TauGate,
};
use crate::smallcancel::{
    check_small_cancellation, DehnSolver, GreendlingerWitness, RewriteStep, Variant,
};
use crate::words::{parse_presentation, Presentation, Word};

fn rational_arg(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Parser, Debug)]
#[command(
    name = "geogrowth",
    version,
    about = "Small cancellation, Cayley-ball growth, finite-ball hyperbolic geometry and shortening-free counting"
)]
pub struct Cli {
    /// Print the JSON schema of a subcommand's output and exit.
    #[arg(long, value_name = "SUBCOMMAND")]
    pub schema: Option<SchemaTarget>,
    /// Output format; csv is available for growth and shortfree.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads (default: available parallelism). Results do not
    /// depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemaTarget {
    CheckSc,
    Dehn,
    Growth,
    Delta,
    Energy,
    Reduced,
    Pingpong,
    Family,
    Shortfree,
    Constants,
    Error,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Cprime,
    Cdoubleprime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exhaustive,
    Sampled,
    Auto,
}

#[derive(Args, Debug)]
pub struct BallArgs {
    /// Presentation file (`generators: …` / `relators: …`).
    pub presentation: PathBuf,
    #[arg(long)]
    pub radius: usize,
    /// Symmetric generating set, comma separated (default: a, A, b, B, …).
    #[arg(long)]
    pub gens: Option<String>,
    /// Maximum number of ball elements.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
}

#[derive(Args, Debug)]
pub struct FamilyArgs {
    /// Generator h of the family's subgroups.
    #[arg(long)]
    pub h: Option<String>,
    /// Conjugators, comma separated.
    #[arg(long, conflicts_with = "conj_radius")]
    pub conjugators: Option<String>,
    /// Every conjugator of length at most this.
    #[arg(long)]
    pub conj_radius: Option<usize>,
    /// Neighbourhood radius used for Δ.
    #[arg(long, value_parser = rational_arg, default_value = "0")]
    pub eps: Rational,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// C'(λ) / C''(λ) verdict with the maximal piece.
    CheckSc {
        presentation: PathBuf,
        #[arg(long, value_parser = rational_arg, default_value = "1/6")]
        lambda: Rational,
        #[arg(long, value_enum, default_value_t = VariantArg::Cprime)]
        variant: VariantArg,
    },
    /// Dehn's algorithm on a word, optionally comparing two words.
    Dehn {
        presentation: PathBuf,
        #[arg(long)]
        word: String,
        /// Decide whether --word equals this word.
        #[arg(long)]
        equal: Option<String>,
    },
    /// Ball sizes and the growth-rate bracket.
    Growth {
        #[command(flatten)]
        ball: BallArgs,
        /// Free set certifying the lower bound, comma separated.
        #[arg(long, requires = "cert_power")]
        cert: Option<String>,
        /// c with the certificate set inside U^c.
        #[arg(long, requires = "cert")]
        cert_power: Option<usize>,
    },
    /// Four-point δ on the ball.
    Delta {
        #[command(flatten)]
        ball: BallArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        #[arg(long, default_value_t = crate::hypgeom::AUTO_SAMPLES)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// ℓ∞-energy profile of a set over the ball.
    Energy {
        #[command(flatten)]
        ball: BallArgs,
        #[arg(long)]
        set: String,
    },
    /// α-reduced verdict, optionally with the freeness audit.
    Reduced {
        #[command(flatten)]
        ball: BallArgs,
        #[arg(long)]
        set: String,
        #[arg(long, default_value = "1")]
        basepoint: String,
        #[arg(long, value_parser = rational_arg)]
        alpha: Rational,
        #[arg(long, value_parser = rational_arg)]
        delta: Rational,
        /// Also audit all reduced words of this length.
        #[arg(long)]
        max_len: Option<usize>,
    },
    /// Ping-pong set {u gᵇ u⁻¹ : u ∈ U(g)}.
    Pingpong {
        #[command(flatten)]
        ball: BallArgs,
        #[arg(long)]
        set: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        b: usize,
        #[arg(long, value_parser = rational_arg)]
        alpha: Rational,
        #[arg(long, value_parser = rational_arg)]
        delta: Rational,
    },
    /// Moving family of conjugates of ⟨h⟩ and the SC1/SC2 checks.
    Family {
        presentation: PathBuf,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_parser = rational_arg, requires_all = ["mu", "delta"])]
        lambda: Option<Rational>,
        #[arg(long, value_parser = rational_arg, requires_all = ["lambda", "delta"])]
        mu: Option<Rational>,
        #[arg(long, value_parser = rational_arg)]
        delta: Option<Rational>,
    },
    /// Counts of τ-shortening-free words and the counting bound.
    Shortfree {
        presentation: PathBuf,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        set: String,
        #[arg(long, default_value = "1")]
        basepoint: String,
        #[arg(long, value_parser = rational_arg)]
        alpha: Rational,
        #[arg(long, value_parser = rational_arg)]
        delta: Rational,
        #[arg(long, value_parser = rational_arg)]
        tau: Rational,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        emit_words: bool,
        /// Δ₀ for the gate τ ≥ Δ₀ + 2L₀ + 223δ.
        #[arg(long, value_parser = rational_arg, requires = "gate_l0")]
        gate_delta0: Option<Rational>,
        #[arg(long, value_parser = rational_arg, requires = "gate_delta0")]
        gate_l0: Option<Rational>,
    },
    /// The constant pipeline.
    Constants {
        /// key=value, repeatable; keys as in the record's "inputs".
        #[arg(long = "input", value_name = "KEY=VALUE")]
        inputs: Vec<String>,
        /// Also report the ping-pong constants (needs N, L, kappa).
        #[arg(long)]
        pingpong: bool,
        /// Also run the monotonicity suite on this many points per input.
        #[arg(long)]
        monotonicity: Option<usize>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct ErrorReport {
    pub error: String,
    pub message: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct DehnReport {
    pub word: Word,
    pub result: Word,
    pub trivial: bool,
    pub trace: Vec<RewriteStep>,
    pub greendlinger: Option<GreendlingerWitness>,
    pub compared_with: Option<Word>,
    pub equal: Option<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
pub struct ReducedOutput {
    pub reduced: ReducedReport,
    pub freeness: Option<FreenessReport>,
}

#[derive(Clone, Debug, Serialize, JsonSchema)]
pub struct FamilyOutput {
    pub family: MovingFamily,
    pub sc: Option<ScConditionReport>,
}

#[derive(Clone, Debug, Serialize, JsonSchema)]
pub struct ShortfreeOutput {
    pub family: Option<MovingFamily>,
    pub enumeration: EnumerationReport,
}

#[derive(Clone, Debug, Serialize, JsonSchema)]
pub struct ConstantsOutput {
    pub record: ConstantsRecord,
    pub pingpong: Option<PingpongConstants>,
    pub monotonicity: Option<MonotonicityReport>,
}

fn schema_json(target: SchemaTarget) -> String {
    use schemars::schema_for;
    let schema = match target {
        SchemaTarget::CheckSc => schema_for!(crate::smallcancel::SCReport),
        SchemaTarget::Dehn => schema_for!(DehnReport),
        SchemaTarget::Growth => schema_for!(crate::cayley::GrowthReport),
        SchemaTarget::Delta => schema_for!(crate::hypgeom::DeltaReport),
        SchemaTarget::Energy => schema_for!(crate::hypgeom::EnergyReport),
        SchemaTarget::Reduced => schema_for!(ReducedOutput),
        SchemaTarget::Pingpong => schema_for!(crate::freesets::PingPongReport),
        SchemaTarget::Family => schema_for!(FamilyOutput),
        SchemaTarget::Shortfree => schema_for!(ShortfreeOutput),
        SchemaTarget::Constants => schema_for!(ConstantsOutput),
        SchemaTarget::Error => schema_for!(ErrorReport),
    };
    serde_json::to_string_pretty(&schema).expect("schema serializes") + "\n"
}

/// A failure after argument parsing.
enum Failure {
    Domain(Error),
    Io(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome = std::result::Result<String, Failure>;

/// Progress lines go straight to the process's standard error so they
/// stream during long scans and never mix with the report.
fn progress(msg: &str) {
    let _ = writeln!(std::io::stderr(), "geogrowth: {msg}");
}

fn json<T: Serialize>(value: &T) -> Outcome {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Failure::Io(e.to_string()))
}

fn load(path: &PathBuf) -> std::result::Result<Presentation, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(parse_presentation(&text)?)
}

fn word_list(p: &Presentation, text: &str) -> std::result::Result<Vec<Word>, Failure> {
    text.split(',')
        .map(|s| p.parse_word(s.trim()).map_err(Failure::from))
        .collect()
}

fn ball_from(args: &BallArgs) -> std::result::Result<GroupBall, Failure> {
    let p = load(&args.presentation)?;
    let gens = match &args.gens {
        Some(g) => word_list(&p, g)?,
        None => p.standard_generators(),
    };
    progress(&format!("enumerating ball of radius {}", args.radius));
    let ball = enumerate_ball_with_cap(&p, &gens, args.radius, args.cap)?;
    progress(&format!("{} elements", ball.len()));
    Ok(ball)
}

/// A tree ball on the standard generators, used by the family commands
/// only to fix the ambient group.
fn tree_ball(p: &Presentation, radius: usize) -> std::result::Result<GroupBall, Failure> {
    if !p.is_free() {
        return Err(Error::UnsupportedStrategy("moving families need a free group".into()).into());
    }
    Ok(enumerate_ball_with_cap(
        p,
        &p.standard_generators(),
        radius,
        DEFAULT_CAP,
    )?)
}

fn family_from(
    p: &Presentation,
    args: &FamilyArgs,
) -> std::result::Result<Option<MovingFamily>, Failure> {
    let Some(h) = &args.h else {
        if args.conjugators.is_some() || args.conj_radius.is_some() {
            return Err(Failure::Usage(
                "--conjugators/--conj-radius need --h".into(),
            ));
        }
        return Ok(None);
    };
    let h = p.parse_word(h)?;
    match (&args.conjugators, args.conj_radius) {
        (Some(list), _) => {
            let conj = word_list(p, list)?;
            let r = conj.iter().map(Word::len).max().unwrap_or(0);
            let ball = tree_ball(p, r)?;
            Ok(Some(build_moving_family(&ball, &h, &conj, &args.eps)?))
        }
        (None, Some(r)) => {
            let ball = tree_ball(p, 1)?;
            Ok(Some(build_radius_family(&ball, &h, r, &args.eps)?))
        }
        (None, None) => Err(Failure::Usage(
            "--h needs --conjugators or --conj-radius".into(),
        )),
    }
}

fn execute(cli: &Cli) -> Outcome {
    let Some(cmd) = &cli.command else {
        return Err(Failure::Usage(
            "a subcommand is required (see --help)".into(),
        ));
    };
    let csv = cli.format == Format::Csv;
    let csv_ok = matches!(cmd, Command::Growth { .. } | Command::Shortfree { .. });
    if csv && !csv_ok {
        return Err(Failure::Usage(
            "--format csv is only available for growth and shortfree".into(),
        ));
    }
    match cmd {
        Command::CheckSc {
            presentation,
            lambda,
            variant,
        } => {
            let p = load(presentation)?;
            let v = match variant {
                VariantArg::Cprime => Variant::CPrime,
                VariantArg::Cdoubleprime => Variant::CDoublePrime,
            };
            json(&check_small_cancellation(&p, lambda, v)?)
        }
        Command::Dehn {
            presentation,
            word,
            equal,
        } => {
            let p = load(presentation)?;
            let w = p.parse_word(word)?;
            let other = equal.as_ref().map(|e| p.parse_word(e)).transpose()?;
            let solver = DehnSolver::new(&p)?;
            let outcome = solver.reduce(&w);
            json(&DehnReport {
                trivial: outcome.result.is_empty(),
                greendlinger: solver.greendlinger_witness(&w),
                equal: other.as_ref().map(|o| solver.equal(&w, o)),
                compared_with: other,
                word: w,
                result: outcome.result,
                trace: outcome.trace,
            })
        }
        Command::Growth {
            ball,
            cert,
            cert_power,
        } => {
            let b = ball_from(ball)?;
            let certificate = match (cert, cert_power) {
                (Some(set), Some(power)) => Some(FreeCertificate {
                    set: word_list(b.presentation(), set)?,
                    power: *power,
                    provenance: "command line".into(),
                    membership_checked: false,
                }),
                _ => None,
            };
            let report = growth_rate_bounds(&b, certificate)?;
            if csv {
                Ok(report.to_csv())
            } else {
                json(&report)
            }
        }
        Command::Delta {
            ball,
            mode,
            samples,
            seed,
        } => {
            let b = ball_from(ball)?;
            let mode = match mode {
                ModeArg::Exhaustive => DeltaMode::Exhaustive,
                ModeArg::Sampled => DeltaMode::Sampled {
                    count: *samples,
                    seed: *seed,
                },
                ModeArg::Auto => DeltaMode::Auto { seed: *seed },
            };
            progress("four-point scan");
            json(&estimate_delta(&b, mode)?)
        }
        Command::Energy { ball, set } => {
            let b = ball_from(ball)?;
            let u = word_list(b.presentation(), set)?;
            json(&energy_profile(&b, &u)?)
        }
        Command::Reduced {
            ball,
            set,
            basepoint,
            alpha,
            delta,
            max_len,
        } => {
            let b = ball_from(ball)?;
            let u = word_list(b.presentation(), set)?;
            let p = b.presentation().parse_word(basepoint)?;
            let reduced = check_reduced(&b, &u, &p, alpha, delta)?;
            let freeness = match max_len {
                Some(n) => Some(check_freeness(&b, &u, &p, alpha, delta, *n)?),
                None => None,
            };
            json(&ReducedOutput { reduced, freeness })
        }
        Command::Pingpong {
            ball,
            set,
            g,
            b: power,
            alpha,
            delta,
        } => {
            let b = ball_from(ball)?;
            let u = word_list(b.presentation(), set)?;
            let g = b.presentation().parse_word(g)?;
            json(&build_pingpong_set(&b, &u, &g, *power, alpha, delta)?)
        }
        Command::Family {
            presentation,
            family,
            lambda,
            mu,
            delta,
        } => {
            let p = load(presentation)?;
            let fam = family_from(&p, family)?
                .ok_or_else(|| Failure::Usage("family needs --h".into()))?;
            let sc = match (lambda, mu, delta) {
                (Some(l), Some(m), Some(d)) => Some(check_sc_condition(&fam, l, m, d)),
                _ => None,
            };
            json(&FamilyOutput { family: fam, sc })
        }
        Command::Shortfree {
            presentation,
            family,
            set,
            basepoint,
            alpha,
            delta,
            tau,
            n,
            emit_words,
            gate_delta0,
            gate_l0,
        } => {
            let p = load(presentation)?;
            let fam = family_from(&p, family)?;
            let u = word_list(&p, set)?;
            let base = p.parse_word(basepoint)?;
            let ball = tree_ball(&p, 1)?;
            let mut ctx = ShorteningContext::new(&ball, &u, &base, alpha, delta)?;
            if let (Some(d0), Some(l0)) = (gate_delta0, gate_l0) {
                ctx = ctx.with_gate(TauGate {
                    big_delta0: d0.clone(),
                    l0: l0.clone(),
                });
            }
            progress(&format!("enumerating reduced words up to length {n}"));
            let enumeration = enumerate_shortening_free(&ctx, fam.as_ref(), tau, *n, *emit_words)?;
            if csv {
                Ok(enumeration.to_csv())
            } else {
                json(&ShortfreeOutput {
                    family: fam,
                    enumeration,
                })
            }
        }
        Command::Constants {
            inputs,
            pingpong,
            monotonicity,
        } => {
            let mut x = ConstantsInputs::default();
            for kv in inputs {
                let (k, v) = kv.split_once('=').ok_or_else(|| {
                    Failure::Usage(format!("--input expects KEY=VALUE, got {kv:?}"))
                })?;
                let k = k.trim();
                if !ConstantsInputs::KEYS.contains(&k) {
                    return Err(Failure::Usage(format!(
                        "--input: unknown key {k:?} (known: {})",
                        ConstantsInputs::KEYS.join(", ")
                    )));
                }
                x.set(k, v)?;
            }
            let record = constants_pipeline(&x)?;
            let pingpong = if *pingpong {
                let l = x.l.clone().ok_or_else(|| {
                    Failure::Domain(Error::InvalidParameter(
                        "ping-pong constants need input L".into(),
                    ))
                })?;
                Some(pingpong_constants(x.n, &l, &x.kappa)?)
            } else {
                None
            };
            let monotonicity = match monotonicity {
                Some(points) => Some(monotonicity_suite(&x, *points)?),
                None => None,
            };
            json(&ConstantsOutput {
                record,
                pingpong,
                monotonicity,
            })
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    if let Some(target) = cli.schema {
        let _ = write!(out, "{}", schema_json(target));
        return 0;
    }

    let threads = cli.threads.map(usize::from).unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker threads: {e}");
            return 1;
        }
    };
    let outcome = pool.install(|| execute(&cli));
    let report = |kind: &str, message: String| ErrorReport {
        error: kind.into(),
        message,
    };
    match outcome {
        Ok(text) => match &cli.output {
            Some(path) => match std::fs::write(path, text) {
                Ok(()) => 0,
                Err(e) => {
                    let r = report("Io", format!("{}: {e}", path.display()));
                    let _ = write!(out, "{}", json(&r).unwrap_or_default());
                    1
                }
            },
            None => {
                let _ = write!(out, "{text}");
                0
            }
        },
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Domain(e)) => {
            let r = report(e.kind(), e.to_string());
            let _ = write!(out, "{}", json(&r).unwrap_or_default());
            1
        }
        Err(Failure::Io(msg)) => {
            let _ = write!(out, "{}", json(&report("Io", msg)).unwrap_or_default());
            1
        }
    }
}
