use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jetphase::cli::{cmd_audit, cmd_integrate, load_config, CliError};

#[derive(Parser)]
#[command(name = "jetphase", version, about = "Charged test particles on jet-space phase space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the equation of motion and report charge drift.
    Integrate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for the CSV files and summary.json.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Check structure identities and symmetry residuals at random probes.
    Audit {
        #[arg(long)]
        config: PathBuf,
        /// Path of the JSON report.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Tolerance override, e.g. `--tol duality=1e-10`; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Seed for probe sampling.
    #[arg(long)]
    seed: Option<u64>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Integrate { config, out, common } => {
            let cfg = load_config(&config)?;
            let s = cmd_integrate(&cfg, &out, &common.tol, common.seed)?;
            for t in &s.trajectories {
                let drift = t.max_drift.map_or("n/a".to_string(), |d| format!("{d:e}"));
                println!("{} {} samples, {:?}, max drift {drift} {}", t.file, t.samples, t.termination, t.status);
            }
            if let Some(why) = &s.charges_unavailable {
                println!("charges not computed: {why}");
            }
        }
        Command::Audit { config, out, common } => {
            let cfg = load_config(&config)?;
            let r = cmd_audit(&cfg, &out, &common.tol, common.seed)?;
            for row in r.rows.iter().filter(|r| r.status != "PASS") {
                let why = row.diagnostic.clone().unwrap_or_else(|| format!("{:?}", row.value));
                println!("FAIL {} {}: {why}", row.check, row.subject);
            }
            println!("{} passed, {} failed, report in {}", r.passed, r.failed, out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("jetphase: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
