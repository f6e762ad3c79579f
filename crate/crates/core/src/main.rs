//! Command-line surface: simulate chains, synthesize sharing sequences,
//! emit trade-off curves, and run the verification suites.
//!
//! Exit codes: 0 success, 2 domain error, 3 infeasible synthesis, 64 usage.

use chsh_share::chsh::{closed_form_general, critical_eta, TradeoffCurve};
use chsh_share::engine::{run_protocol, ProtocolConfig};
use chsh_share::protocol::{Scheme, SchemeFamily};
use chsh_share::report::{
    synthesis_to_csv, synthesis_to_json, tradeoff_to_csv, tradeoff_to_json, RunReport,
    SimulationRow, TradeoffRow,
};
use chsh_share::synthesis::{delta_window, synthesize_t1, synthesize_t2, SynthesisResult, Theorem};
use chsh_share::verify::{run_all, VerifyOptions};
use chsh_share::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_FAILURE: u8 = 1;
const EXIT_DOMAIN: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "chsh-share",
    version,
    about = "Sequential CHSH nonlocality-sharing simulator",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sequential chain and report each Bob's CHSH value
    Simulate(SimulateArgs),
    /// Build a sharing sequence realizing k violations
    Synthesize(SynthesizeArgs),
    /// Emit the critical-unsharpness trade-off curves
    Tradeoff(TradeoffArgs),
    /// Run the seeded invariant suites
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Ppm,
    FourKraus,
    TwoKraus,
}

impl SchemeArg {
    fn family(self) -> SchemeFamily {
        match self {
            SchemeArg::Ppm => SchemeFamily::Ppm3,
            SchemeArg::FourKraus => SchemeFamily::FourKraus,
            SchemeArg::TwoKraus => SchemeFamily::TwoKraus,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ThetaRule {
    /// θ = π/4 − δ/2
    T1,
    /// θ = π/4
    MaxEnt,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveArg {
    A,
    B,
    Both,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Measurement-realization scheme for every Bob
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    /// Number of sequential Bobs
    #[arg(long)]
    k: usize,
    /// Tilt of Alice's observables (radians unless --degrees)
    #[arg(long)]
    delta: f64,
    /// State angle (radians unless --degrees)
    #[arg(long, conflicts_with = "theta_rule")]
    theta: Option<f64>,
    /// Derive θ from δ instead of giving it explicitly
    #[arg(long, value_enum)]
    theta_rule: Option<ThetaRule>,
    /// Identity bias v for the two-parameter schemes
    #[arg(long)]
    v: Option<f64>,
    /// Comma-separated α per Bob
    #[arg(long, value_delimiter = ',')]
    alphas: Vec<f64>,
    /// Interpret angles as degrees
    #[arg(long)]
    degrees: bool,
    /// Include the brute-force column
    #[arg(long)]
    oracle: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SynthesizeArgs {
    /// Which construction: 1 (three-Kraus) or 2 (two-Kraus)
    #[arg(long)]
    theorem: u8,
    /// Chain length
    #[arg(long)]
    k: usize,
    /// Tilt in radians unless --degrees, or "auto" to scan the window
    #[arg(long)]
    delta: String,
    /// Fractional excess above each threshold
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// First weight (theorem 1)
    #[arg(long)]
    alpha1: Option<f64>,
    /// Identity bias (theorem 2)
    #[arg(long)]
    v: Option<f64>,
    /// Interpret angles as degrees
    #[arg(long)]
    degrees: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TradeoffArgs {
    /// Which curve to tabulate
    #[arg(long, value_enum)]
    curve: CurveArg,
    /// Number of samples per curve (at least 2)
    #[arg(long)]
    samples: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    trials: usize,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
}

enum CmdError {
    Domain(String),
    Infeasible(String),
    Io(String),
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        CmdError::Domain(e.to_string())
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // help/version requests are not usage errors
            use clap::error::ErrorKind;
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                print!("{err}");
                return ExitCode::from(EXIT_OK);
            }
            eprintln!("error: usage: {err}");
            return ExitCode::from(EXIT_USAGE);
        }
    };

    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Synthesize(args) => cmd_synthesize(args),
        Command::Tradeoff(args) => cmd_tradeoff(args),
        Command::Verify(args) => cmd_verify(args),
    };

    match result {
        Ok(code) => ExitCode::from(code),
        Err(CmdError::Domain(msg)) => {
            eprintln!("error: domain: {msg}");
            ExitCode::from(EXIT_DOMAIN)
        }
        Err(CmdError::Infeasible(msg)) => {
            eprintln!("error: infeasible: {msg}");
            ExitCode::from(EXIT_INFEASIBLE)
        }
        Err(CmdError::Io(msg)) => {
            eprintln!("error: io: {msg}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

fn emit(output: &OutputArgs, content: &str) -> Result<(), CmdError> {
    match &output.out {
        Some(path) => std::fs::write(path, content)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

fn to_radians(x: f64, degrees: bool) -> f64 {
    if degrees {
        x.to_radians()
    } else {
        x
    }
}

/// Snap a decimal angle literal onto a domain boundary it was rounded from
/// (e.g. --theta 0.7853981634 means π/4).
fn snap(x: f64, boundary: f64) -> f64 {
    if x != boundary && (x - boundary).abs() < 1e-9 {
        boundary
    } else {
        x
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<u8, CmdError> {
    let family = args.scheme.family();
    let delta = snap(
        snap(to_radians(args.delta, args.degrees), 0.0),
        std::f64::consts::FRAC_PI_2,
    );
    let theta = match (args.theta, args.theta_rule) {
        (Some(t), None) => {
            let t = to_radians(t, args.degrees);
            snap(snap(t, 0.0), std::f64::consts::FRAC_PI_4)
        }
        (None, Some(ThetaRule::T1)) => std::f64::consts::FRAC_PI_4 - delta / 2.0,
        (None, Some(ThetaRule::MaxEnt)) => std::f64::consts::FRAC_PI_4,
        (None, None) => {
            return Err(CmdError::Domain(
                "either --theta or --theta-rule is required".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    if args.alphas.len() != args.k {
        return Err(CmdError::Domain(format!(
            "--alphas carries {} values but --k is {}",
            args.alphas.len(),
            args.k
        )));
    }
    let v = match (family, args.v) {
        (SchemeFamily::Ppm3, None) => 1.0,
        (SchemeFamily::Ppm3, Some(v)) => {
            if v != 1.0 {
                return Err(CmdError::Domain(format!(
                    "the ppm scheme fixes v = 1 (got {v})"
                )));
            }
            1.0
        }
        (_, Some(v)) => v,
        (_, None) => {
            return Err(CmdError::Domain(
                "--v is required for four-kraus and two-kraus".into(),
            ))
        }
    };

    let schemes: Result<Vec<Scheme>, Error> = args
        .alphas
        .iter()
        .map(|&a| Scheme::from_family(family, a, v))
        .collect();
    let config = ProtocolConfig::new(delta, theta, schemes?)?;

    let brute = if args.oracle {
        Some(run_protocol(&config)?)
    } else {
        None
    };

    let mut rows = Vec::with_capacity(args.k);
    for j in 1..=args.k {
        let closed = closed_form_general(family, j, delta, theta, v, &args.alphas[..j])?;
        rows.push(SimulationRow {
            index: j,
            chsh_closed_form: closed,
            chsh_bruteforce: brute.as_ref().map(|t| t.chsh_values[j - 1]),
            violated: closed > 2.0,
        });
    }

    let report = RunReport {
        scheme: family.name().to_string(),
        k: args.k,
        delta,
        theta,
        v,
        alphas: args.alphas.clone(),
        rows,
    };
    let content = match args.output.format {
        Format::Csv => report.to_csv(),
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&report.to_json()).unwrap()
        ),
    };
    emit(&args.output, &content)?;
    Ok(EXIT_OK)
}

fn synthesize_at(args: &SynthesizeArgs, delta: f64) -> Result<SynthesisResult, CmdError> {
    match args.theorem {
        1 => {
            let alpha1 = args
                .alpha1
                .ok_or_else(|| CmdError::Domain("--alpha1 is required for theorem 1".into()))?;
            Ok(synthesize_t1(args.k, delta, args.epsilon, alpha1)?)
        }
        2 => {
            let v = args
                .v
                .ok_or_else(|| CmdError::Domain("--v is required for theorem 2".into()))?;
            Ok(synthesize_t2(args.k, delta, args.epsilon, v)?)
        }
        t => Err(CmdError::Domain(format!("unknown theorem {t}"))),
    }
}

fn cmd_synthesize(args: SynthesizeArgs) -> Result<u8, CmdError> {
    let theorem = match args.theorem {
        1 => Theorem::T1,
        2 => Theorem::T2,
        t => return Err(CmdError::Domain(format!("unknown theorem {t}"))),
    };

    let result = if args.delta.trim() == "auto" {
        // scan a logarithmic grid downward from the window edge and keep the
        // first feasible tilt
        let window = delta_window(theorem, args.k.max(2), args.v)?;
        let hi = window.hi * if window.hi_inclusive { 1.0 } else { 1.0 - 1e-9 };
        let lo = hi * 1e-8;
        let n = 200;
        let mut found = None;
        for i in 0..n {
            let delta = hi * (lo / hi).powf(i as f64 / (n - 1) as f64);
            let r = synthesize_at(&args, delta)?;
            if r.feasible {
                found = Some(r);
                break;
            }
        }
        found.ok_or_else(|| {
            CmdError::Infeasible(format!(
                "no feasible delta found on ({lo:e}, {hi:e}) for k = {}",
                args.k
            ))
        })?
    } else {
        let raw: f64 = args.delta.parse().map_err(|_| {
            CmdError::Domain(format!(
                "--delta expects a number or 'auto', got {:?}",
                args.delta
            ))
        })?;
        let delta = snap(to_radians(raw, args.degrees), std::f64::consts::FRAC_PI_4);
        synthesize_at(&args, delta)?
    };

    let content = match args.output.format {
        Format::Csv => synthesis_to_csv(&result),
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&synthesis_to_json(&result)).unwrap()
        ),
    };
    emit(&args.output, &content)?;

    if result.feasible {
        Ok(EXIT_OK)
    } else {
        let at = result
            .infeasible_at
            .map(|l| format!(" at Bob {l}"))
            .unwrap_or_default();
        let reason = result
            .infeasible_reason
            .unwrap_or_else(|| "see report".into());
        Err(CmdError::Infeasible(format!("{reason}{at}")))
    }
}

fn cmd_tradeoff(args: TradeoffArgs) -> Result<u8, CmdError> {
    if args.samples < 2 {
        eprintln!("error: usage: --samples must be at least 2");
        return Ok(EXIT_USAGE);
    }
    let grid: Vec<f64> = (0..args.samples)
        .map(|i| 2.0 * i as f64 / (args.samples - 1) as f64)
        .collect();
    let mut rows = Vec::new();
    let push_curve = |curve: TradeoffCurve, label: &'static str, rows: &mut Vec<TradeoffRow>| {
        for &x in &grid {
            rows.push(TradeoffRow {
                curve: label,
                anticomm: x,
                eta_critical: critical_eta(curve, x).expect("grid inside [0, 2]"),
            });
        }
    };
    match args.curve {
        CurveArg::A => push_curve(TradeoffCurve::EqualUnsharpness, "a", &mut rows),
        CurveArg::B => push_curve(TradeoffCurve::OneSharp, "b", &mut rows),
        CurveArg::Both => {
            push_curve(TradeoffCurve::EqualUnsharpness, "a", &mut rows);
            push_curve(TradeoffCurve::OneSharp, "b", &mut rows);
        }
    }
    let content = match args.output.format {
        Format::Csv => tradeoff_to_csv(&rows),
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&tradeoff_to_json(&rows)).unwrap()
        ),
    };
    emit(&args.output, &content)?;
    Ok(EXIT_OK)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, CmdError> {
    let opts = VerifyOptions {
        seed: args.seed,
        trials: args.trials,
        tolerance: args.tolerance,
        inject_channel_fault: false,
    };
    let outcomes = run_all(&opts);
    let mut all_passed = true;
    for o in &outcomes {
        let status = if o.passed { "pass" } else { "FAIL" };
        println!("{}: {} — {}", o.name, status, o.detail);
        all_passed &= o.passed;
    }
    if all_passed {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_FAILURE)
    }
}
