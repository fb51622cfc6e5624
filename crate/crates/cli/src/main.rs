//! Config-driven experiment runner: every verification is a subcommand that
//! reads one TOML config, writes TSV series plus a JSON report into the
//! output directory, and exits nonzero on a FAIL verdict.

mod config;
mod ops;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ops::RunCtx;
use report::Verdict;

#[derive(Parser)]
#[command(name = "factorgibbs", version, about = "pressure, Gibbs measures and factor maps on subshifts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment description (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Output directory for TSV series and report.json
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override `[run].n_max`
    #[arg(long)]
    n_max: Option<usize>,
    /// Override `[run].seed`
    #[arg(long)]
    seed: Option<u64>,
    /// Run past the enumeration budget
    #[arg(long)]
    force: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Finite-level pressure estimates with rigorous brackets
    Pressure(CommonArgs),
    /// Fiberwise pressure terms along an eventually periodic point
    RelativePressure(CommonArgs),
    /// Image-potential sandwich and pushforward Gibbs verification
    FactorGibbs(CommonArgs),
    /// Preimage potential from fiber counts and its pushforward check
    Preimage(CommonArgs),
    /// Near-multiplicativity scan of fiber counts
    ConditionA(CommonArgs),
    /// Fiber-ratio criterion for preimage-measure equality
    RatioCriterion(CommonArgs),
    /// Convergence of the one-step image ratios u_{w,n}
    UConverge(CommonArgs),
    /// Compensation function for full-shift collapses
    Compensation(CommonArgs),
    /// Transfer-operator eigendata and exact Gibbs chain
    Oracle(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args): (&str, &CommonArgs) = match &cli.command {
        Command::Pressure(a) => ("pressure", a),
        Command::RelativePressure(a) => ("relative-pressure", a),
        Command::FactorGibbs(a) => ("factor-gibbs", a),
        Command::Preimage(a) => ("preimage", a),
        Command::ConditionA(a) => ("condition-a", a),
        Command::RatioCriterion(a) => ("ratio-criterion", a),
        Command::UConverge(a) => ("u-converge", a),
        Command::Compensation(a) => ("compensation", a),
        Command::Oracle(a) => ("oracle", a),
    };
    match execute(name, args) {
        Ok(Verdict::Fail) => {
            eprintln!("{name}: FAIL (see report.json)");
            ExitCode::from(1)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(name: &str, args: &CommonArgs) -> anyhow::Result<Verdict> {
    let resolved = config::load(&args.config)?;
    std::fs::create_dir_all(&args.out)?;
    let ctx = RunCtx {
        resolved: &resolved,
        out_dir: &args.out,
        n_max: args.n_max.or(resolved.run.n_max).unwrap_or(8),
        seed: args.seed.or(resolved.run.seed).unwrap_or(0),
        tolerance: resolved.run.tolerance.unwrap_or(1e-8),
        force: args.force,
    };
    let mut report = match name {
        "pressure" => ops::run_pressure(&ctx)?,
        "relative-pressure" => ops::run_relative_pressure(&ctx)?,
        "factor-gibbs" => ops::run_factor_gibbs(&ctx)?,
        "preimage" => ops::run_preimage(&ctx)?,
        "condition-a" => ops::run_condition_a(&ctx)?,
        "ratio-criterion" => ops::run_ratio_criterion(&ctx)?,
        "u-converge" => ops::run_u_converge(&ctx)?,
        "compensation" => ops::run_compensation(&ctx)?,
        "oracle" => ops::run_oracle(&ctx)?,
        other => anyhow::bail!("unknown operation {other}"),
    };
    report.param("seed", ctx.seed);
    let report = report::save_report(&args.out, report)?;
    println!(
        "{name}: {} ({} outputs in {})",
        match report.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Info => "done",
        },
        report.outputs.len(),
        args.out.display()
    );
    Ok(report.verdict)
}
