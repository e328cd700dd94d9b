//! `ous`: seeded verification runs, counterexample search, instance
//! generation and spectral tools for order unit space models.
//!
//! Exit codes: 0 pass, 1 fail, 2 usage, 3 internal.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use ous_core::calculus::{self, RealFunction};
use ous_core::harness::{find_counterexample, gen, run_suite, Suite, SuiteConfig, Target, SEARCH_THRESHOLD};
use ous_core::{parse_element, Element, ModelContext, SeededRng, Verdict, VerificationReport};

/// Accepted range of the `l_p` exponent.
const P_RANGE: (f64, f64) = (1.1, 10.0);

#[derive(Parser)]
#[command(name = "ous", version, about = "Verification harness for spectral order unit spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and print the report.
    Verify(VerifyArgs),
    /// Search a spin factor for a witness that it is not a JB-algebra.
    Counterexample(CounterexampleArgs),
    /// Print the spectral decomposition of each element in a file.
    Spectrum {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Apply a real function to each element in a file.
    Calculus {
        #[arg(long = "in")]
        input: PathBuf,
        /// `id`, `square`, `pos`, `abs`, `const c`, `poly c0 .. ck`, `chi u v`
        /// (indicator of `(u, v]`) or `root n`.
        #[arg(long = "fn")]
        function: String,
    },
    /// Write a report file: re-encode an existing one (`--in`) or run the
    /// suites given by the verify options.
    Report {
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "in", conflicts_with = "model")]
        input: Option<PathBuf>,
        #[command(flatten)]
        run: Option<RunArgs>,
    },
    /// Print seeded random instances, one element per line.
    Gen {
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, value_enum, default_value_t = Kind::Element)]
        kind: Kind,
    },
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Also write the report to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Clone)]
struct RunArgs {
    /// `matrix:N` or `spin:P:N`.
    #[arg(long)]
    model: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    /// Suite to run (repeatable); `all` or none selects every applicable suite.
    #[arg(long = "suite")]
    suites: Vec<String>,
    /// Threshold override `CHECK=VALUE` (repeatable).
    #[arg(long = "tol")]
    tolerances: Vec<String>,
    /// Record wall time in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(clap::Args)]
struct CounterexampleArgs {
    /// `spin:P:N`.
    #[arg(long)]
    model: String,
    #[arg(long, value_parser = parse_target)]
    target: Target,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value_t = SEARCH_THRESHOLD)]
    threshold: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Element,
    Effect,
    Projection,
    Atom,
}

fn parse_target(s: &str) -> std::result::Result<Target, String> {
    s.parse().map_err(|e: ous_core::Error| e.to_string())
}

/// Bad input from the command line (exit code 2).
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Usage(msg.into()).into())
}

fn parse_model(desc: &str) -> Result<ModelContext> {
    let ctx = match ModelContext::from_descriptor(desc) {
        Ok(ctx) => ctx,
        Err(e) => return usage(e.to_string()),
    };
    if let Some(p) = ctx.norm_oracle().and_then(|n| n.exponent()) {
        if !(P_RANGE.0..=P_RANGE.1).contains(&p) {
            return usage(format!("l_p exponent {p} outside [{}, {}]", P_RANGE.0, P_RANGE.1));
        }
    }
    Ok(ctx)
}

fn suite_config(args: &RunArgs) -> Result<SuiteConfig> {
    let model = parse_model(&args.model)?;
    let mut suites = Vec::new();
    for name in &args.suites {
        if name == "all" {
            suites.extend(Suite::all_for(&model));
            continue;
        }
        match name.parse::<Suite>() {
            Ok(s) => suites.push(s),
            Err(e) => return usage(e.to_string()),
        }
    }
    let mut cfg = match SuiteConfig::with_suites(model, args.seed, args.trials, suites) {
        Ok(cfg) => cfg,
        Err(e) => return usage(e.to_string()),
    };
    for t in &args.tolerances {
        let Some((name, value)) = t.split_once('=') else {
            return usage(format!("tolerance `{t}` is not CHECK=VALUE"));
        };
        let value: f64 = match value.parse() {
            Ok(v) if v >= 0.0 => v,
            _ => return usage(format!("tolerance value `{value}` is not a nonnegative number")),
        };
        cfg = cfg.override_tolerance(name, value);
    }
    cfg.timing = args.timing;
    Ok(cfg)
}

fn read_elements(path: &Path) -> Result<Vec<(ModelContext, Element)>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_element(line) {
            Ok(e) => out.push(e),
            Err(e) => return usage(format!("{}:{}: {e}", path.display(), i + 1)),
        }
    }
    if out.is_empty() {
        return usage(format!("{} holds no elements", path.display()));
    }
    Ok(out)
}

fn write_report(report: &VerificationReport, path: &Path) -> Result<()> {
    report
        .emit(path)
        .with_context(|| format!("cannot write report to {}", path.display()))
}

fn verdict_code(report: &VerificationReport) -> ExitCode {
    if report.checks.iter().any(|c| c.name.ends_with("internal-error")) {
        return ExitCode::from(3);
    }
    match report.verdict {
        Verdict::Pass => ExitCode::SUCCESS,
        Verdict::Fail | Verdict::Unknown => ExitCode::from(1),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Verify(args) => {
            let report = run_suite(&suite_config(&args.run)?);
            print!("{}", report.to_text());
            if let Some(path) = &args.out {
                write_report(&report, path)?;
            }
            Ok(verdict_code(&report))
        }
        Command::Counterexample(args) => {
            let ctx = parse_model(&args.model)?;
            if ctx.norm_oracle().is_none() {
                return usage("counterexample search needs a spin model");
            }
            if args.samples == 0 {
                return usage("samples must be at least 1");
            }
            let report = find_counterexample(&ctx, args.target, args.seed, args.samples, args.threshold)?;
            print!("{}", report.to_text());
            if let Some(path) = &args.out {
                write_report(&report, path)?;
            }
            Ok(verdict_code(&report))
        }
        Command::Spectrum { input } => {
            for (ctx, a) in read_elements(&input)? {
                let spec = ctx.spectrum(&a)?;
                println!("model: {}", ctx.descriptor());
                println!("tau: {:e}", spec.tau);
                println!("points:");
                for p in &spec.points {
                    println!("  - value: {:?}", p.value);
                    println!("    projection: {}", ctx.format_element(p.projection.element())?);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Calculus { input, function } => {
            let g = match RealFunction::parse(&function) {
                Ok(g) => g,
                Err(e) => return usage(e.to_string()),
            };
            for (ctx, a) in read_elements(&input)? {
                let ga = if g.is_continuous() {
                    calculus::continuous_fc(&ctx, &a, &g)
                } else {
                    calculus::borel_fc(&ctx, &a, &g)
                };
                let ga = match ga {
                    Ok(ga) => ga,
                    Err(e @ ous_core::Error::FunctionDomain { .. }) => return usage(e.to_string()),
                    Err(e) => return Err(e.into()),
                };
                println!("{}", ctx.format_element(&ga)?);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Report { out, input, run } => {
            let report = match (input, run) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("cannot read {}", path.display()))?;
                    match VerificationReport::from_text(&text) {
                        Ok(r) => r,
                        Err(e) => return usage(format!("{}: {e}", path.display())),
                    }
                }
                (None, Some(args)) => run_suite(&suite_config(&args)?),
                (None, None) => return usage("report needs --in FILE or --model"),
            };
            write_report(&report, &out)?;
            println!("{} {} {}", report.suite, report.model, report.verdict);
            Ok(verdict_code(&report))
        }
        Command::Gen { model, seed, count, kind } => {
            let ctx = parse_model(&model)?;
            for i in 0..count {
                let mut rng = SeededRng::substream(seed, i);
                let e = match kind {
                    Kind::Element => gen::random_element(&ctx, &mut rng)?,
                    Kind::Effect => gen::random_effect(&ctx, &mut rng)?,
                    Kind::Projection => gen::random_projection(&ctx, &mut rng)?.into_element(),
                    Kind::Atom => gen::random_atom(&ctx, &mut rng)?.into_element(),
                };
                println!("{}", ctx.format_element(&e)?);
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            if err.downcast_ref::<Usage>().is_some() {
                eprintln!("error: {err}");
                ExitCode::from(2)
            } else {
                eprintln!("internal error: {err:#}");
                ExitCode::from(3)
            }
        }
    }
}
