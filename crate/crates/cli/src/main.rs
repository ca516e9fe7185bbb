use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qpc_cli::{CliError, Command, RunConfig};

/// Sweeps and reports for the cocycle `(ω, A_E)` with `A_E(θ) = [[λf(θ)−E, −1], [1, 0]]`.
#[derive(Parser)]
#[command(name = "qpc", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Lyapunov exponent, rotation number and certificate over an energy grid (CSV).
    Lyapunov(Flags),
    /// Spectral gaps and a cover of the spectrum (JSON).
    Spectrum(Flags),
    /// Rotation number against the density of states (CSV).
    Rotation(Flags),
    /// Classify each grid energy by the multi-scale construction (JSON).
    Classify(Flags),
    /// Scale-0 probe at one energy (CSV, with a JSON summary).
    Probe(Flags),
    /// Per-scale log of the construction at one energy (JSON).
    Induct(Flags),
    /// One orbit of the fiber map and its visited-cell fraction (CSV).
    Orbit(Flags),
    /// Eigenvalues of a truncation (CSV), or the eigenvector nearest --energy (JSON).
    OperatorEigs(Flags),
}

/// Flags shared by every command. Each overrides the same key of --config.
#[derive(Args)]
struct Flags {
    /// Flat key=value file with the same keys as the flags.
    #[arg(long = "config")]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    energy: Option<String>,
    #[arg(long = "e-min", allow_hyphen_values = true)]
    e_min: Option<String>,
    #[arg(long = "e-max", allow_hyphen_values = true)]
    e_max: Option<String>,
    #[arg(long = "e-grid", allow_hyphen_values = true)]
    e_grid: Option<String>,
    /// `golden` or a decimal.
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<String>,
    /// `cos` or a file of `k a_k b_k` lines.
    #[arg(long, allow_hyphen_values = true)]
    potential: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
    /// Orbit length, or number of scales for classify and induct.
    #[arg(long, allow_hyphen_values = true)]
    n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    samples: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    seed: Option<String>,
    /// `paper` or `toy`.
    #[arg(long, allow_hyphen_values = true)]
    mode: Option<String>,
    #[arg(long = "toy-k0", allow_hyphen_values = true)]
    toy_k0: Option<String>,
    #[arg(long = "toy-growth", allow_hyphen_values = true)]
    toy_growth: Option<String>,
    /// Probe grid per arc.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    theta0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    r0: Option<String>,
    /// Truncation size of the operator.
    #[arg(long, allow_hyphen_values = true)]
    trunc: Option<String>,
    /// Output path; `<out>.cfg` receives the configuration.
    #[arg(long = "out")]
    out: Option<PathBuf>,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, &str)> {
        let all = [
            ("lambda", &self.lambda),
            ("energy", &self.energy),
            ("e-min", &self.e_min),
            ("e-max", &self.e_max),
            ("e-grid", &self.e_grid),
            ("omega", &self.omega),
            ("potential", &self.potential),
            ("kappa", &self.kappa),
            ("tau", &self.tau),
            ("n", &self.n),
            ("samples", &self.samples),
            ("seed", &self.seed),
            ("mode", &self.mode),
            ("toy-k0", &self.toy_k0),
            ("toy-growth", &self.toy_growth),
            ("grid", &self.grid),
            ("theta0", &self.theta0),
            ("r0", &self.r0),
            ("trunc", &self.trunc),
        ];
        all.into_iter().filter_map(|(k, v)| v.as_deref().map(|v| (k, v))).collect()
    }

    fn config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            cfg.apply_text(&text)?;
        }
        for (k, v) in self.pairs() {
            cfg.set(k, v)?;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        Ok(cfg)
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(text) = std::env::var("COCYCLE_THREADS") else {
        return Ok(());
    };
    let threads: usize = text
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("COCYCLE_THREADS must be a positive integer, got {text:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build_global()
        .map_err(|e| CliError::Run(e.to_string()))
}

fn write(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Run(format!("cannot write {}: {e}", path.display())))
}

fn with_suffix(path: &PathBuf, suffix: &str) -> PathBuf {
    let mut s = path.clone().into_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let (command, flags) = match &cli.command {
        Sub::Lyapunov(f) => (Command::Lyapunov, f),
        Sub::Spectrum(f) => (Command::Spectrum, f),
        Sub::Rotation(f) => (Command::Rotation, f),
        Sub::Classify(f) => (Command::Classify, f),
        Sub::Probe(f) => (Command::Probe, f),
        Sub::Induct(f) => (Command::Induct, f),
        Sub::Orbit(f) => (Command::Orbit, f),
        Sub::OperatorEigs(f) => (Command::OperatorEigs, f),
    };
    let cfg = flags.config()?;
    let report = command.run(&cfg)?;
    match &cfg.out {
        Some(out) => {
            write(out, &report.body)?;
            write(&with_suffix(out, ".cfg"), &cfg.to_text())?;
            if let Some(summary) = &report.summary {
                write(&with_suffix(out, ".json"), summary)?;
            }
        }
        None => {
            print!("{}", report.body);
            if let Some(summary) = &report.summary {
                eprint!("{summary}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qpc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
