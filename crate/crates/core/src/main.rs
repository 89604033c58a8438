use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use imcf_core::io::{
    run_experiment, run_sweep, verify_output, IoError, RunConfig, SweepConfig, SWEEP_FILE,
};

#[derive(Parser)]
#[command(name = "imcf", version, about = "Inverse mean curvature flow of rotationally symmetric tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one flow and write series, snapshots, rescaled bands and a manifest.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-check a finished run directory; exit 1 if any check fails.
    Verify {
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a grid of configurations in parallel (IMCF_THREADS caps the threads).
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "sweep")]
        out: PathBuf,
    },
}

fn fail(e: IoError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match cli.command {
        Command::Run { config, out } => {
            let outcome = match RunConfig::load(&config).and_then(|c| run_experiment(&c, &out)) {
                Ok(o) => o,
                Err(e) => return fail(e),
            };
            for (k, v) in outcome.manifest.entries() {
                println!("{k}={v}");
            }
            ExitCode::SUCCESS
        }
        Command::Verify { out } => match verify_output(&out) {
            Ok(report) => {
                for c in &report.checks {
                    println!("{c}");
                }
                if report.passed() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(e) => fail(e),
        },
        Command::Sweep { config, out } => {
            let rows = match SweepConfig::load(&config).and_then(|c| run_sweep(&c, &out)) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            for r in &rows {
                println!(
                    "cell {:3} R={} r={} {} {} T in [{:.6}, {:.6}] {}",
                    r.cell,
                    r.config.scenario.major_radius,
                    r.config.scenario.minor_radius,
                    r.status,
                    r.stop_reason,
                    r.t_max_lower,
                    r.t_max_upper,
                    r.message
                );
            }
            println!("table: {}", out.join(SWEEP_FILE).display());
            ExitCode::SUCCESS
        }
    }
}
