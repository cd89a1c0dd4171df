//! Batch front-end for `scatgate`.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 for numerical or
//! I/O failures.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod reproduce;
pub mod scenarios;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    /// A module error and the parameter point it occurred at.
    Numerical(scatgate::Error, String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(..) | CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(e, at) if at.is_empty() => write!(f, "numerical failure: {e}"),
            CliError::Numerical(e, at) => write!(f, "numerical failure at {at}: {e}"),
            CliError::Io(m) => write!(f, "i/o failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<scatgate::Error> for CliError {
    fn from(e: scatgate::Error) -> Self {
        match e {
            scatgate::Error::InvalidArgument { .. } => CliError::Config(e.to_string()),
            other => CliError::Numerical(other, String::new()),
        }
    }
}

/// Attaches the parameter point to a module error.
pub(crate) trait At<T> {
    fn at(self, point: impl FnOnce() -> String) -> Result<T, CliError>;
}

impl<T> At<T> for scatgate::Result<T> {
    fn at(self, point: impl FnOnce() -> String) -> Result<T, CliError> {
        self.map_err(|e| match CliError::from(e) {
            CliError::Config(m) => CliError::Config(format!("{m} (at {})", point())),
            CliError::Numerical(e, _) => CliError::Numerical(e, point()),
            other => other,
        })
    }
}

#[derive(Parser, Debug)]
#[command(name = "scatgate", version, about = "Two-qubit gates from 1D contact scattering")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Continuum scattering gate for one momentum pair
    #[command(args_override_self = true)]
    Gate(GateArgs),
    /// Concurrence for Gaussian relative-momentum packets over a (δ, η) grid
    #[command(args_override_self = true)]
    Wavepacket(WavepacketArgs),
    /// Optimal boundary coupling and transfer time for chain lengths N
    #[command(name = "lattice-transfer", args_override_self = true)]
    LatticeTransfer(TransferArgs),
    /// End-to-end concurrence C_1N over a grid of U at the transfer time
    #[command(name = "lattice-sweep", args_override_self = true)]
    LatticeSweep(SweepArgs),
    /// Physical-unit design: coupling, momentum correction, lattice depth
    #[command(args_override_self = true)]
    Design(DesignArgs),
    /// Runs the full reference table and writes every artifact
    #[command(name = "reproduce-paper", args_override_self = true)]
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Flat key = value file; flags given on the command line take precedence
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Worker threads for independent parameter points
    #[arg(long, value_name = "K", default_value_t = 1)]
    pub jobs: usize,
    /// Omit the timestamp comment so repeated runs are byte-identical
    #[arg(long)]
    pub reproducible: bool,
}

#[derive(Args, Debug, Clone)]
pub struct GateArgs {
    #[arg(long = "pA", allow_hyphen_values = true)]
    pub p_a: f64,
    #[arg(long = "pB", allow_hyphen_values = true)]
    pub p_b: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub c: f64,
    /// boson or fermion
    #[arg(long, default_value = "boson")]
    pub stats: String,
    /// CSV with the gate entries
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct WavepacketArgs {
    /// Relative detuning δ: a value, a list or start:stop:step
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub delta: String,
    /// Relative width η: a value, a list or start:stop:step
    #[arg(long, default_value = "0.2")]
    pub eta: String,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Also evaluate the quadrature cross-check
    #[arg(long)]
    pub check: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Plot data (η, C) for the first δ
    #[arg(long)]
    pub dat: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct TransferArgs {
    /// Chain lengths, comma separated
    #[arg(long = "N", default_value = "25,51")]
    pub n: String,
    #[arg(long = "J", default_value_t = 1.0)]
    pub j: f64,
    /// Scan the full J0 grid instead of refining by golden section
    #[arg(long = "full-grid")]
    pub full_grid: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[arg(long = "N", default_value_t = 25)]
    pub n: usize,
    /// U = U_updown/(2J): a list or start:stop:step
    #[arg(long = "U-grid", default_value = "0.1:2:0.05")]
    pub u_grid: String,
    #[arg(long = "J", default_value_t = 1.0)]
    pub j: f64,
    /// Boundary coupling; optimized when absent
    #[arg(long = "J0")]
    pub j0: Option<f64>,
    /// Readout time; the single-particle transfer time when absent
    #[arg(long = "t")]
    pub t: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Plot data (U, C_1N, model)
    #[arg(long)]
    pub dat: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct DesignArgs {
    /// Species preset file; the bundled Rb-87 preset when absent
    #[arg(long)]
    pub species: Option<PathBuf>,
    /// Override the 3D scattering length (e.g. 50A, 5nm)
    #[arg(long)]
    pub a3d: Option<String>,
    /// Transverse trap frequency (e.g. 100kHz, 6.3e5rad/s)
    #[arg(long = "omega-perp", default_value = "100kHz")]
    pub omega_perp: String,
    /// How Hz-suffixed trap frequencies map to rad/s: angular or cyclic
    #[arg(long = "omega-convention", default_value = "angular")]
    pub omega_convention: String,
    /// Longitudinal trap frequency
    #[arg(long = "omega-z")]
    pub omega_z: Option<String>,
    /// Lattice wavelengths, comma separated (e.g. 830nm,1064nm)
    #[arg(long, default_value = "830nm,1064nm")]
    pub lambda: String,
    /// Launch offset x0 for the η estimate
    #[arg(long)]
    pub x0: Option<String>,
    /// Launch position uncertainty Δx0
    #[arg(long)]
    pub dx0: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct ReproduceArgs {
    /// Directory receiving the CSV and plot files
    #[arg(long = "out-dir", default_value = "results")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Gate(a) => &a.common,
            Command::Wavepacket(a) => &a.common,
            Command::LatticeTransfer(a) => &a.common,
            Command::LatticeSweep(a) => &a.common,
            Command::Design(a) => &a.common,
            Command::Reproduce(a) => &a.common,
        }
    }
}

/// Parses `args` (including the program name), runs the scenario and
/// returns the process exit code.
pub fn run(args: Vec<OsString>) -> i32 {
    let args = match config::expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("scatgate: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("scatgate: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: &Command) -> Result<(), CliError> {
    let jobs = cmd.common().jobs;
    if jobs == 0 {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    pool.install(|| match cmd {
        Command::Gate(a) => scenarios::gate(a),
        Command::Wavepacket(a) => scenarios::wavepacket(a),
        Command::LatticeTransfer(a) => scenarios::lattice_transfer(a),
        Command::LatticeSweep(a) => scenarios::lattice_sweep(a),
        Command::Design(a) => scenarios::design(a),
        Command::Reproduce(a) => reproduce::run(a),
    })
}
