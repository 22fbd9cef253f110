//! Command-line runner behind the `nldecay` binary.

pub mod config;
pub mod output;
pub mod tasks;

use crate::report::Verdict;
use clap::{Parser, Subcommand};
use config::{LoadError, RunConfig};
use output::Output;
use std::ffi::OsString;
use std::path::PathBuf;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "nldecay", version, about = "Decay verification for nonlocal-in-time diffusion")]
pub struct Cli {
    /// TOML configuration file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// output directory
    #[arg(long, global = true, default_value = "nldecay-out")]
    pub out: PathBuf,
    /// seed for randomized checks, overrides the config
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// worker threads, overrides the config
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// relaxation curves against the closed form, and two-sided bounds
    Relax,
    /// Mittag-Leffler bounds table
    Ml,
    /// scalar nonlinear problem between its barriers
    Ode,
    /// linear decay envelope, maximum principle and spectral oracle
    Pde,
    /// p-Laplace decay exponents
    Plap,
    /// porous-medium decay exponents
    Pme,
    /// late-time models of each kernel family
    Asympt,
    /// Lp gap and chain-rule identity suites
    VerifyInequalities,
    /// every check
    All,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Relax => "relax",
            Command::Ml => "ml",
            Command::Ode => "ode",
            Command::Pde => "pde",
            Command::Plap => "plap",
            Command::Pme => "pme",
            Command::Asympt => "asympt",
            Command::VerifyInequalities => "verify-inequalities",
            Command::All => "all",
        }
    }
}

pub fn exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::Pass => EXIT_PASS,
        Verdict::Fail => EXIT_FAIL,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

/// Run the selected command with a validated configuration; returns the combined verdict.
pub fn run(command: Command, cfg: &RunConfig, out: &mut Output) -> std::io::Result<Verdict> {
    let work = |out: &mut Output| match command {
        Command::Relax => tasks::relax(cfg, out),
        Command::Ml => tasks::ml(cfg, out),
        Command::Ode => tasks::ode(cfg, out),
        Command::Pde => tasks::pde(cfg, out),
        Command::Plap => tasks::plap(cfg, out),
        Command::Pme => tasks::pme(cfg, out),
        Command::Asympt => tasks::asympt(cfg, out),
        Command::VerifyInequalities => tasks::verify_inequalities(cfg, out),
        Command::All => tasks::all(cfg, out),
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build().map_err(std::io::Error::other)?;
    pool.install(|| work(out))?;
    out.finish(cfg)?;
    Ok(out.verdict())
}

/// Parse arguments, run, and map the outcome to an exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let mut cfg = match RunConfig::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(LoadError::Io(msg)) => {
            eprintln!("error: cannot read configuration: {msg}");
            return EXIT_IO;
        }
        Err(LoadError::Config(e)) => {
            eprint!("{e}");
            return EXIT_CONFIG;
        }
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(j) = cli.jobs {
        cfg.jobs = j;
    }
    let mut out = match Output::create(&cli.out, cli.quiet) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: cannot create {}: {e}", cli.out.display());
            return EXIT_IO;
        }
    };
    match run(cli.command, &cfg, &mut out) {
        Ok(v) => {
            if !cli.quiet {
                eprintln!("{}: {:?}", cli.command.name(), v);
            }
            exit_code(v)
        }
        Err(e) => {
            eprintln!("error: writing to {}: {e}", cli.out.display());
            EXIT_IO
        }
    }
}
