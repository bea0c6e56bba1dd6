//! `liouville` command line: one subcommand per experiment, each writing
//! CSV files with '#' metadata headers plus a `manifest.json` into `--out`.
//!
//! Exit codes: 0 success, 1 numerical failure (or a failed `verify`),
//! 2 usage or configuration error.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{ArgMatches, CommandFactory, FromArgMatches, Parser, Subcommand};

pub use commands::{Failure, Outcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Memory guard: estimated working set above this many MiB is refused.
pub const MEM_LIMIT_ENV: &str = "LIOUVILLE_MEM_LIMIT_MB";
pub const DEFAULT_MEM_LIMIT_MB: u64 = 4096;

#[derive(Parser, Debug)]
#[command(name = "liouville", version, about = "Liouvillian spectra, most coherent modes and dynamics of the dephasing TFIM chain")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Flat key = value file supplying defaults for the flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Full dense spectrum in the complex plane (N <= dense cap).
    Spectrum(commands::SpectrumArgs),
    /// Most coherent mode by imaginary-time propagation.
    Mcm(commands::McmArgs),
    /// Mean-field order parameter over a (gamma, g) grid.
    Meanfield(commands::MeanfieldArgs),
    /// Canonical-average magnetization heatmap over (gamma, g).
    Thermal(commands::ThermalArgs),
    /// Binder-cumulant crossings and infinite-size critical field.
    Binder(commands::BinderArgs),
    /// Cat-state fidelity F(t) and its Fourier transform.
    Dynamics(commands::DynamicsArgs),
    /// Noise-averaged pure-state trajectories against the master equation.
    Unravel(commands::UnravelArgs),
    /// Structural property suite; nonzero exit on any failure.
    Verify(commands::VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Mcm(_) => "mcm",
            Command::Meanfield(_) => "meanfield",
            Command::Thermal(_) => "thermal",
            Command::Binder(_) => "binder",
            Command::Dynamics(_) => "dynamics",
            Command::Unravel(_) => "unravel",
            Command::Verify(_) => "verify",
        }
    }
}

/// Resolved values of every flag, defaults included, keyed by long flag
/// name so the list can be pasted back into a config file.
fn resolved_config(matches: &ArgMatches) -> Vec<(String, String)> {
    let root = Cli::command();
    let mut levels = vec![(&root, matches)];
    if let Some((name, sub)) = matches.subcommand() {
        if let Some(cmd) = root.find_subcommand(name) {
            levels.push((cmd, sub));
        }
    }
    let mut out = Vec::new();
    for (cmd, m) in levels {
        for arg in cmd.get_arguments() {
            let (Some(long), id) = (arg.get_long(), arg.get_id().as_str()) else { continue };
            if long == "config" || long == "help" || long == "version" {
                continue;
            }
            if let Ok(Some(raw)) = m.try_get_raw(id) {
                let v: Vec<String> = raw.map(|s| s.to_string_lossy().into_owned()).collect();
                out.push((long.to_string(), v.join(",")));
            }
        }
    }
    out.sort();
    out.dedup_by(|a, b| a.0 == b.0);
    out
}

/// Runs the CLI on `argv` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match config::splice_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let matches = match Cli::command().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return EXIT_USAGE;
        }
    };
    let workers = cli.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        eprintln!("error: --workers must be positive");
        return EXIT_USAGE;
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_NUMERICAL;
        }
    };
    let name = cli.command.name();
    let mut ctx = match output::RunContext::new(&cli.out, name, resolved_config(&matches), workers) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: cannot create {}: {e}", cli.out.display());
            return EXIT_NUMERICAL;
        }
    };
    let result = pool.install(|| commands::dispatch(&cli.command, &mut ctx));
    let (code, status, convergence) = match result {
        Ok(Outcome { convergence, passed: true }) => (EXIT_OK, "ok", convergence),
        Ok(Outcome { convergence, passed: false }) => {
            eprintln!("{name}: failed, see {}", cli.out.join("manifest.json").display());
            (EXIT_NUMERICAL, "failed", convergence)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            (EXIT_USAGE, "usage_error", serde_json::json!({ "error": msg }))
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("{name}: numerical failure: {msg}");
            (EXIT_NUMERICAL, "numerical_failure", serde_json::json!({ "error": msg }))
        }
    };
    if let Err(e) = ctx.write_manifest(status, convergence) {
        eprintln!("error: cannot write manifest: {e}");
        return EXIT_NUMERICAL;
    }
    code
}
