//! `stellar-zeros`: build stellar-rank states, track their wavefunction zeros
//! and cross-check them against a Fock-basis simulation.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Flags, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "stellar-zeros", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the wavefunction form (JSON) of a state.
    Build(Flags),
    /// Print the zeros of the position wavefunction, one `re im` pair per line.
    Zeros(Flags),
    /// Trajectory of the zeros under a quadratic Hamiltonian (CSV).
    Evolve(Flags),
    /// Real-axis crossings over one period of the phase-shift flow (JSON lines).
    Crossings(Flags),
    /// Check observed crossings against the separation guarantee.
    Audit(Flags),
    /// Compare closed form, integrator and Fock simulation on one fixture.
    Verify(Flags),
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("STELLAR_ZEROS_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("STELLAR_ZEROS_THREADS must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn fail(kind: &str, message: impl std::fmt::Display) -> ExitCode {
    let message = message.to_string().replace('\n', " ");
    eprintln!("error: kind={kind} message={}", message.trim());
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            return fail("Usage", first);
        }
    };
    if let Err(e) = configure_threads() {
        return fail("InvalidParameter", e);
    }
    let (run, flags): (fn(&RunConfig) -> stellar_zeros::Result<u8>, &Flags) = match &cli.command {
        Command::Build(f) => (commands::build, f),
        Command::Zeros(f) => (commands::zeros, f),
        Command::Evolve(f) => (commands::evolve, f),
        Command::Crossings(f) => (commands::crossings, f),
        Command::Audit(f) => (commands::audit, f),
        Command::Verify(f) => (commands::verify, f),
    };
    match RunConfig::resolve(flags).and_then(|cfg| run(&cfg)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => fail(e.kind(), e),
    }
}
