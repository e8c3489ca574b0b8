use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::error;

use mazer::experiments::{
    load_config_file, run_experiment, validate_config, ExperimentConfig, ExperimentError,
    ExperimentId, ResultTable,
};

#[derive(Parser)]
#[command(name = "mazer", version, about = "Cavity-atom scattering experiments as CSV tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run {
        /// fig1, fig2, fig3a, fig3b, fig4, fig5, fig6, fig7, fig8 or custom.
        id: String,
        /// JSON file with one object per experiment id.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output CSV path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override a field, e.g. `--set lambda0=2 --set sweep.points=20`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
    },
    /// Check every experiment in a config file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// List experiments and their default parameters.
    List,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { id, config, out, sets } => run(&id, config, out, &sets),
        Command::Validate { config } => validate(config),
        Command::List => list(),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn read_configs(path: &PathBuf) -> Result<Vec<ExperimentConfig>, ExperimentError> {
    let text = std::fs::read_to_string(path)?;
    load_config_file(&text)
}

fn run(id: &str, config: Option<PathBuf>, out: Option<PathBuf>, sets: &[String]) -> Result<u8, ExperimentError> {
    let id: ExperimentId = id.parse()?;
    let base = match &config {
        Some(path) => read_configs(path)?
            .into_iter()
            .find(|c| c.id == id)
            .unwrap_or_else(|| ExperimentConfig::defaults(id)),
        None => ExperimentConfig::defaults(id),
    };
    let cfg = base.apply_sets(sets)?;
    match run_experiment(&cfg) {
        Ok(table) => {
            write_table(&table, out.as_ref())?;
            Ok(0)
        }
        Err(ExperimentError::Convergence { point, message, partial }) => {
            if let Some(table) = &partial {
                write_table(table, out.as_ref())?;
            }
            Err(ExperimentError::Convergence { point, message, partial })
        }
        Err(e) => Err(e),
    }
}

fn write_table(table: &ResultTable, out: Option<&PathBuf>) -> Result<(), ExperimentError> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write_csv(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            table.write_csv(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn validate(path: PathBuf) -> Result<u8, ExperimentError> {
    let configs = read_configs(&path)?;
    let mut clean = true;
    for c in &configs {
        let diags = validate_config(c);
        if diags.is_empty() {
            println!("{}: ok", c.id);
        }
        for d in diags {
            clean = false;
            println!("{}: [{}] {}", c.id, d.rule, d.message);
        }
    }
    Ok(if clean { 0 } else { 1 })
}

fn list() -> Result<u8, ExperimentError> {
    for id in ExperimentId::ALL {
        println!("{:<7} {}", id.name(), id.description());
        println!("        {}", ExperimentConfig::defaults(id).to_json());
    }
    Ok(0)
}
