//! Command-line driver for the width laboratory.

pub mod certificate;
pub mod config;
pub mod experiments;
pub mod output;
pub mod svg;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::certificate::{verify, Certificate};
use crate::config::{ConfigError, ExperimentConfig, ExperimentKind, LoadedConfig};
use crate::experiments::{CliError, Report};
use crate::output::{resolve_dir, Output};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "uwlab", version, about = "Certified local Urysohn width experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Experiment config (TOML).
    pub config: PathBuf,
    /// Output directory; overrides the config and UWLAB_OUTPUT_DIR.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MachineArgs {
    #[command(flatten)]
    pub common: Common,
    /// Residue tolerance for Evaluate.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Diameter bound of constructed supports.
    #[arg(long = "d0")]
    pub d0: Option<f64>,
    /// Radius of constructed supports.
    #[arg(long)]
    pub r_construct: Option<f64>,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Replay this stream CSV instead of sampling.
    #[arg(long)]
    pub stream: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and sample a space.
    Space(Common),
    /// Build a margin problem and validate it.
    Problem(Common),
    /// Certified width brackets for every configured w.
    Width(Common),
    /// Run the machine on sampled or recorded streams.
    Machine(MachineArgs),
    /// Coupon times and permutation-learner success curves.
    Sample(Common),
    /// Nerve of a cyclic arc cover and its Betti bound.
    Nerve(Common),
    /// Width against hypothesis-class size.
    Vc(Common),
    /// Run the experiment named by the config's `experiment` field.
    Run(Common),
    /// Re-check a certificate file from scratch.
    Verify { certificate: PathBuf },
}

fn print_report(r: &Report) {
    for line in &r.lines {
        println!("{line}");
    }
    for c in &r.checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        if c.detail.is_empty() {
            println!("[{status}] {}", c.name);
        } else {
            println!("[{status}] {}: {}", c.name, c.detail);
        }
    }
}

type Runner = fn(&ExperimentConfig, &mut Output) -> Result<Report, CliError>;

fn execute(name: &str, common: &Common, loaded: LoadedConfig, run: Runner) -> Result<u8, CliError> {
    let dir = resolve_dir(common.out.as_deref(), loaded.config.output_dir.as_deref());
    let mut out = Output::create(dir).map_err(|e| ConfigError::new("output_dir", format!("{e:#}")))?;
    let report = run(&loaded.config, &mut out)?;
    print_report(&report);
    let pass = report.pass();
    let dir = out.dir().display().to_string();
    out.finish(
        name,
        Some((&loaded.path, &loaded.sha256)),
        Some(loaded.config.seed),
        pass,
    )?;
    println!("artifacts in {dir}");
    Ok(if pass { EXIT_PASS } else { EXIT_CHECK_FAILED })
}

fn load(path: &Path) -> Result<LoadedConfig, CliError> {
    Ok(config::load(path)?)
}

fn verify_file(path: &Path) -> Result<u8, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("certificate", format!("cannot read {}: {e}", path.display())))?;
    let cert: Certificate = serde_json::from_str(&text)
        .map_err(|e| ConfigError::new("certificate", format!("malformed certificate: {e}")))?;
    let v = verify(&cert);
    for line in &v.summary {
        println!("{line}");
    }
    for f in &v.failures {
        println!("[FAIL] {f}");
    }
    println!(
        "[{}] certificate {}",
        if v.pass { "PASS" } else { "FAIL" },
        path.display()
    );
    Ok(if v.pass { EXIT_PASS } else { EXIT_CHECK_FAILED })
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    use experiments as x;
    match cli.command {
        Command::Space(c) => execute("space", &c, load(&c.config)?, x::space),
        Command::Problem(c) => execute("problem", &c, load(&c.config)?, x::problem),
        Command::Width(c) => execute("width", &c, load(&c.config)?, x::width),
        Command::Sample(c) => execute("sample", &c, load(&c.config)?, x::sample_complexity),
        Command::Nerve(c) => execute("nerve", &c, load(&c.config)?, x::nerve_betti),
        Command::Vc(c) => execute("vc", &c, load(&c.config)?, x::vc_separation),
        Command::Machine(m) => {
            let mut loaded = load(&m.common.config)?;
            let cfg = &mut loaded.config;
            cfg.tau = m.tau.or(cfg.tau);
            cfg.d0 = m.d0.or(cfg.d0);
            cfg.r_construct = m.r_construct.or(cfg.r_construct);
            cfg.seed = m.seed.unwrap_or(cfg.seed);
            cfg.stream = m.stream.clone().or(cfg.stream.take());
            execute("machine", &m.common, loaded, x::machine_run)
        }
        Command::Run(c) => {
            let loaded = load(&c.config)?;
            let kind = loaded
                .config
                .experiment
                .ok_or_else(|| ConfigError::new("experiment", "required by `run`"))?;
            loaded.config.check_kind(kind)?;
            let runner: Runner = match kind {
                ExperimentKind::Hierarchy => x::hierarchy,
                ExperimentKind::Scaling => x::scaling,
                ExperimentKind::VcSeparation => x::vc_separation,
                ExperimentKind::SampleComplexity => x::sample_complexity,
                ExperimentKind::NerveBetti => x::nerve_betti,
                ExperimentKind::MachineRun => x::machine_run,
                ExperimentKind::Additivity => x::additivity,
            };
            execute(kind.name(), &c, loaded, runner)
        }
        Command::Verify { certificate } => verify_file(&certificate),
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}
