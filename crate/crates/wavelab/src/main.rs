//! Command-line laboratory for oscillatory wave multipliers: each subcommand
//! runs one named experiment (or the whole suite) and exits 0 iff every
//! acceptance gate passes.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use wavelab::config::{ExperimentConfig, Suite};
use wavelab::experiments;

#[derive(Parser)]
#[command(name = "wavelab", version, about = "Pseudo-spectral experiments for wave multipliers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Shared {
    /// dimension (2 or 3)
    #[arg(long)]
    n: Option<usize>,
    /// lattice points per axis
    #[arg(long = "N")]
    points: Option<usize>,
    /// box side length
    #[arg(long = "L")]
    length: Option<f64>,
    /// Lebesgue exponent (inf allowed)
    #[arg(long)]
    p: Option<f64>,
    /// atom dimension parameter
    #[arg(long)]
    beta: Option<f64>,
    /// symbol order override (defaults to the critical order for p)
    #[arg(long)]
    b: Option<f64>,
    /// directory for CSV/JSON reports
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML file with [[experiment]] tables
    #[arg(long)]
    config: Option<PathBuf>,
    /// seed for randomized fields
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Dyadic partition-of-unity deviation on the frequency lattice
    PartitionCheck(Shared),
    /// Pointwise residual of the symbol decomposition identity
    DecompositionCheck(Shared),
    /// Dyadic kernel-piece norm growth vs the predicted exponent
    LpKernelScan(Shared),
    /// Radial kernel profile: cone singularity and far-field decay
    KernelProfile(Shared),
    /// Atom construction and the four defining conditions
    AtomValidate(Shared),
    /// Heat-extension sup/L1 norm decay of an atom
    HeatNormScan(Shared),
    /// Riesz-potential scaling across a self-similar atom sweep
    RieszScan(Shared),
    /// Cauchy-evolution norm growth/decay in time
    WaveDecay(Shared),
    /// Dilated multiplier decay across t
    DilatedScan(Shared),
    /// Small-cube region split of the damped multiplier image
    RegionNorms(Shared),
    /// Low/high dyadic frequency split with the cutoff rule
    DyadicSplit(Shared),
    /// Uniform operator bound over an atom sweep
    UniformBound(Shared),
    /// Sharp-maximal BMO probe across cube sizes
    BmoProbe(Shared),
    /// Truncated sharp maximal: domination, selection gap, saturation
    SharpMaximalConvergence(Shared),
    /// Run a configured suite (or the default full suite)
    RunAll(Shared),
}

impl Command {
    fn parts(&self) -> (&'static str, &Shared) {
        match self {
            Command::PartitionCheck(s) => ("partition-check", s),
            Command::DecompositionCheck(s) => ("decomposition-check", s),
            Command::LpKernelScan(s) => ("lp-kernel-scan", s),
            Command::KernelProfile(s) => ("kernel-profile", s),
            Command::AtomValidate(s) => ("atom-validate", s),
            Command::HeatNormScan(s) => ("heat-norm-scan", s),
            Command::RieszScan(s) => ("riesz-scan", s),
            Command::WaveDecay(s) => ("wave-decay", s),
            Command::DilatedScan(s) => ("dilated-scan", s),
            Command::RegionNorms(s) => ("region-norms", s),
            Command::DyadicSplit(s) => ("dyadic-split", s),
            Command::UniformBound(s) => ("uniform-bound", s),
            Command::BmoProbe(s) => ("bmo-probe", s),
            Command::SharpMaximalConvergence(s) => ("sharp-maximal-convergence", s),
            Command::RunAll(s) => ("run-all", s),
        }
    }
}

fn apply_overrides(cfg: &mut ExperimentConfig, shared: &Shared) {
    if let Some(n) = shared.n {
        cfg.n = n;
    }
    if let Some(points) = shared.points {
        cfg.points = points;
    }
    if let Some(length) = shared.length {
        cfg.length = length;
    }
    if shared.p.is_some() {
        cfg.p = shared.p;
    }
    if shared.beta.is_some() {
        cfg.beta = shared.beta;
    }
    if shared.b.is_some() {
        cfg.b = shared.b;
    }
    if let Some(out) = &shared.out {
        cfg.out = Some(out.clone());
    }
    if let Some(seed) = shared.seed {
        cfg.seed = seed;
    }
}

/// Resolve the configs a subcommand should run: the matching entries of the
/// config file when given, else the built-in preset; flags override both.
fn resolve(name: &str, shared: &Shared) -> wavelab::Result<Vec<ExperimentConfig>> {
    let mut configs = if let Some(path) = &shared.config {
        let suite = Suite::load(path)?;
        let selected: Vec<ExperimentConfig> = if name == "run-all" {
            suite.experiments
        } else {
            suite.experiments.into_iter().filter(|c| c.experiment == name).collect()
        };
        if selected.is_empty() && name != "run-all" {
            return Err(wavelab::Error::Config(format!(
                "config file has no '{name}' experiment"
            )));
        }
        selected
    } else if name == "run-all" {
        ExperimentConfig::default_suite()
    } else {
        vec![ExperimentConfig::preset(name)?]
    };
    for cfg in &mut configs {
        apply_overrides(cfg, shared);
    }
    Ok(configs)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, shared) = cli.command.parts();
    let configs = match resolve(name, shared) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let mut all_pass = true;
    for cfg in &configs {
        match experiments::run(cfg) {
            Ok(summary) => {
                all_pass &= summary.pass;
                println!(
                    "{:<28} [{}] {} {}",
                    summary.experiment,
                    summary.anchor,
                    if summary.pass { "pass" } else { "FAIL" },
                    summary.metrics
                );
            }
            Err(e) => {
                all_pass = false;
                eprintln!("{:<28} error: {e}", cfg.experiment);
            }
        }
    }
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
