use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;
use snhopf_cli::commands::{self, Documents, Model};
use snhopf_cli::{CliError, Result, RunConfig};

#[derive(Parser, Debug)]
#[command(
    author,
    version,
    about = "Equivariant Hopf normal form and phase reduction toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file (stdout if omitted and the config names none)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for random initial phases
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Integration step
    #[arg(long, global = true)]
    dt: Option<f64>,

    /// Integration horizon
    #[arg(long = "t-end", global = true)]
    t_end: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Derive the phase model coefficients
    Derive,
    /// Integrate the full or the reduced model
    Simulate {
        #[arg(long, value_enum, default_value_t = ModelArg::Full)]
        model: ModelArg,
    },
    /// Compare full and reduced trajectories from matched initial data
    Compare,
    /// Tabulate two-cluster states and stability of synchrony
    ClusterScan,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModelArg {
    Full,
    Phase,
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.run.seed = Some(seed);
    }
    if let Some(dt) = cli.dt {
        cfg.run.dt = Some(dt);
    }
    if let Some(t) = cli.t_end {
        cfg.run.t_end = Some(t);
    }
    if let Some(out) = &cli.out {
        cfg.run.output = Some(out.display().to_string());
    }
    cfg.validate()?;
    Ok(cfg)
}

/// `scan.csv` + `alpha_roots` -> `scan.alpha_roots.csv`.
fn sibling(path: &Path, name: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let file = match path.extension() {
        Some(ext) => format!("{stem}.{name}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{name}"),
    };
    path.with_file_name(file)
}

fn emit(docs: Documents, output: Option<&str>) -> Result<()> {
    match output {
        Some(path) => {
            let primary = PathBuf::from(path);
            for (i, (name, bytes)) in docs.iter().enumerate() {
                let target = if i == 0 {
                    primary.clone()
                } else {
                    sibling(&primary, name)
                };
                std::fs::write(&target, bytes)
                    .map_err(|e| CliError::io(target.display().to_string(), e))?;
                info!("wrote {}", target.display());
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            for (i, (_, bytes)) in docs.iter().enumerate() {
                if i > 0 {
                    writeln!(stdout).map_err(|e| CliError::io("stdout", e))?;
                }
                stdout
                    .write_all(bytes)
                    .map_err(|e| CliError::io("stdout", e))?;
            }
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = load(cli)?;
    let docs = match cli.command {
        Command::Derive => commands::derive(&cfg)?,
        Command::Simulate { model } => {
            let model = match model {
                ModelArg::Full => Model::Full,
                ModelArg::Phase => Model::Phase,
            };
            commands::simulate(&cfg, model)?
        }
        Command::Compare => commands::compare_models(&cfg)?,
        Command::ClusterScan => commands::cluster_scan(&cfg)?,
    };
    emit(docs, cfg.run.output.as_deref())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
