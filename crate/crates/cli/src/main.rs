//! Command-line front end: detuning/control sweeps to CSV and the
//! formula-vs-oracle verification report.

mod config;
mod sweep;
mod verify;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use config::ScenarioConfig;
use eit_core::response::ChannelKind;

#[derive(Parser)]
#[command(name = "eit", version, about = "Steady-state optical response of a driven three-level lambda system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by the config and write a CSV file.
    Sweep {
        /// Scenario config (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path (overrides the config's sweep.output).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Comma-separated channel kinds (overrides the config list).
        #[arg(long)]
        channels: Option<String>,
        /// Worker threads for sweep evaluation.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run the verification checks; exit nonzero on any unledgered failure.
    Verify {
        /// Scenario config (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Optional JSON report path (text always goes to stdout).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Errata ledger consulted for expected deviations.
        #[arg(long, default_value = "errata.toml")]
        errata: PathBuf,
    },
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Sweep { config, output, channels, jobs } => {
            let cfg = ScenarioConfig::load(&config)?;
            let kinds: Vec<ChannelKind> = match &channels {
                Some(list) => list
                    .split(',')
                    .map(|s| ChannelKind::parse(s.trim()).map_err(|e| anyhow::anyhow!("{e}")))
                    .collect::<anyhow::Result<_>>()?,
                None => cfg.kinds()?,
            };
            let out_path: PathBuf = match output {
                Some(p) => p,
                None => cfg
                    .sweep
                    .as_ref()
                    .and_then(|s| s.output.clone())
                    .map(PathBuf::from)
                    .ok_or_else(|| {
                        anyhow::anyhow!("no output path: set sweep.output or pass --output")
                    })?,
            };
            let result = sweep::run_sweep(&cfg, &kinds, jobs)?;
            for w in &result.warnings {
                eprintln!("warning: {w}");
            }
            let mut f = std::fs::File::create(&out_path)
                .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", out_path.display()))?;
            f.write_all(result.csv.as_bytes())?;
            eprintln!(
                "wrote {} ({} channel kinds, {} rows)",
                out_path.display(),
                kinds.len(),
                cfg.sweep.as_ref().map(|s| s.count).unwrap_or(0)
            );
            Ok(())
        }
        Command::Verify { config, output, errata } => {
            let cfg = ScenarioConfig::load(&config)?;
            let report = verify::run_verify(&cfg, &errata)?;
            print!("{}", verify::render_text(&report));
            if let Some(path) = output {
                std::fs::write(&path, serde_json::to_string_pretty(&report)?)?;
            }
            std::process::exit(report.exit_code);
        }
    }
}
