use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use motzkin_rydberg::config::{RunConfig, StateFamily, FIXTURES};
use motzkin_rydberg::pipeline::{exit_code, run, Command};
use motzkin_rydberg::{Error, Result};

#[derive(Parser)]
#[command(name = "motzkin-ryd", version, about = "Motzkin spin chains in Rydberg arrays")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long, conflicts_with = "fixture")]
    config: Option<PathBuf>,
    /// Built-in configuration (rb87_adiabatic, cs133_finetune).
    #[arg(long)]
    fixture: Option<String>,
    /// Output directory; defaults to the configuration's output_dir.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Chain lengths, overriding the configuration.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Energy spectrum and ground state of the Rydberg Hamiltonian.
    Spectrum(Common),
    /// GRAPE preparation of the Rydberg ground state.
    Prepare(Common),
    /// Propagate a basis state or the ground state under the detuning ramp.
    Evolve {
        #[command(flatten)]
        common: Common,
        /// Initial basis configuration, e.g. 0u0d.
        #[arg(long)]
        initial: Option<String>,
    },
    /// Adiabatic protocol sweep over the configured ramp durations.
    Protocol(Common),
    /// Half-chain entropy scaling for the configured state families.
    Scaling(Common),
    /// Entropies at every cut for one state family.
    Entropy {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "ideal")]
        state: String,
    },
    /// Reduced density matrix and magnetisation blocks.
    Rdm {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "ideal")]
        state: String,
    },
    /// Motzkin and inverse-Motzkin configurations.
    Paths(Common),
    /// Two-site fine-tuning conditions and comparison with the Motzkin block.
    FineTune {
        #[command(flatten)]
        common: Common,
        /// Relative tolerance for each condition.
        #[arg(long, default_value_t = 0.05)]
        tolerance: f64,
    },
}

fn load(common: &Common) -> Result<RunConfig> {
    match (&common.config, &common.fixture) {
        (Some(p), _) => RunConfig::load(p),
        (None, Some(name)) => RunConfig::fixture(name),
        (None, None) => Err(Error::Config(format!("pass --config <file> or --fixture <{}>", FIXTURES.join("|")))),
    }
}

fn execute(cli: Cli) -> Result<()> {
    let (common, command) = match cli.command {
        Cmd::Spectrum(c) => (c, Command::Spectrum),
        Cmd::Prepare(c) => (c, Command::Prepare),
        Cmd::Evolve { common, initial } => (common, Command::Evolve { initial }),
        Cmd::Protocol(c) => (c, Command::Protocol),
        Cmd::Scaling(c) => (c, Command::Scaling),
        Cmd::Entropy { common, state } => (common, Command::Entropy { state: state.parse::<StateFamily>()? }),
        Cmd::Rdm { common, state } => (common, Command::Rdm { state: state.parse::<StateFamily>()? }),
        Cmd::Paths(c) => (c, Command::Paths),
        Cmd::FineTune { common, tolerance } => (common, Command::FineTune { tolerance }),
    };
    let cfg = load(&common)?;
    let out = common.out.clone().or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let summary = run(&command, &cfg, &out, common.n.as_deref())?;
    println!("{}", serde_json::to_string_pretty(&summary).map_err(|e| Error::Numerical(e.to_string()))?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(t) = std::env::var("MOTZKIN_THREADS") {
        match t.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: MOTZKIN_THREADS must be a positive integer, got {t:?}");
                return ExitCode::from(2);
            }
        }
    }
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
