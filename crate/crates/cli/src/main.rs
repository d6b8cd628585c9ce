use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use wsn_sched_core::deployment::{deploy_grid_with, deploy_random_with, GatewayPlacement};
use wsn_sched_core::harness::{
    emit_plot_series, load_config, run_logged, run_sweep, summarize, write_summary_csv,
    write_topology_dumps, Dataset,
};
use wsn_sched_core::{Area, Error, ErrorKind};

#[derive(Parser)]
#[command(name = "wsn-sched", version, about = "Time-zone scheduled sensor network energy simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Random,
    Grid,
}

#[derive(Clone, Copy, ValueEnum)]
enum Gateway {
    Corner,
    Center,
}

#[derive(Subcommand)]
enum Command {
    /// Write a node placement file.
    Deploy {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 50)]
        count: usize,
        /// Generator seed (random placements).
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 800.0)]
        width_cm: f64,
        #[arg(long, default_value_t = 500.0)]
        height_cm: f64,
        #[arg(long, value_enum, default_value_t = Gateway::Corner)]
        gateway: Gateway,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every configuration of a config file on one thread and write the dataset CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write the MAC event log (single-run configs only).
        #[arg(long)]
        events: Option<PathBuf>,
    },
    /// Run a full sweep and write DIR/dataset.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; the output does not depend on this.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Summarize DIR/dataset.csv into plot series and summary.csv.
    Report {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also dump the deployments and topologies of this config.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn write(path: &Path, text: String) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn create_dir(path: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Deploy {
            kind,
            count,
            seed,
            width_cm,
            height_cm,
            gateway,
            out,
        } => {
            let area = Area::new(width_cm, height_cm)?;
            let gateway = match gateway {
                Gateway::Corner => GatewayPlacement::Corner,
                Gateway::Center => GatewayPlacement::Center,
            };
            let d = match kind {
                Kind::Random => deploy_random_with(count, area, seed, gateway)?,
                Kind::Grid => deploy_grid_with(count, area, gateway)?,
            };
            write(&out, d.to_placement_file())
        }
        Command::Run {
            config,
            out,
            events,
        } => {
            let spec = load_config(&config)?;
            let data = match events {
                Some(path) => {
                    let (row, log) = run_logged(&spec)?;
                    let mut text = String::from("# t_s frame slot node event detail\n");
                    for e in &log {
                        text.push_str(&e.to_string());
                        text.push('\n');
                    }
                    write(&path, text)?;
                    Dataset { rows: vec![row] }
                }
                None => run_sweep(&spec, 1)?,
            };
            data.write_csv(&out)
        }
        Command::Sweep { config, out, jobs } => {
            let spec = load_config(&config)?;
            create_dir(&out)?;
            let start = Instant::now();
            let data = run_sweep(&spec, jobs)?;
            let path = out.join("dataset.csv");
            data.write_csv(&path)?;
            eprintln!(
                "{} runs in {:.1} s -> {}",
                data.rows.len(),
                start.elapsed().as_secs_f64(),
                path.display()
            );
            Ok(())
        }
        Command::Report { data, out, config } => {
            let dataset = Dataset::read_csv(data.join("dataset.csv"))?;
            if dataset.rows.is_empty() {
                return Err(Error::Data {
                    path: data.join("dataset.csv").display().to_string(),
                    message: "no rows".into(),
                });
            }
            let summary = summarize(&dataset);
            create_dir(&out)?;
            write_summary_csv(&summary, out.join("summary.csv"))?;
            let files = emit_plot_series(&summary, &out)?;
            if let Some(config) = config {
                write_topology_dumps(&load_config(&config)?, &out)?;
            }
            eprintln!("{} plot series -> {}", files.len(), out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Config => 1,
                ErrorKind::Simulation => 2,
                ErrorKind::Io => 3,
            })
        }
    }
}
