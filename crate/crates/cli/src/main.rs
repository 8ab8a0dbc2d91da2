//! `berryres`: complex geometric phases of two-level resonances from the command line.

mod commands;
mod output;
mod scenario;

use clap::{Parser, Subcommand};
use commands::{Axis, ChernArgs, Options};
use output::{Format, Sink};
use scenario::{Invalid, Scenario};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "berryres", version, about = "Complex Berry phases of decaying two-level systems")]
struct Cli {
    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format (phase, classify, evolve and chern default to json, sweep to csv)
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Suppress notices and per-item diagnostics on standard error
    #[arg(long, global = true)]
    quiet: bool,
    /// Leave wall-clock columns empty so reports are byte-identical between runs
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Geometric phases of a scenario loop by the requested methods
    Phase { file: PathBuf },
    /// Rerun a scenario over a list of values of one parameter
    Sweep {
        file: PathBuf,
        #[arg(long, value_enum)]
        axis: Axis,
        /// Comma-separated values
        #[arg(long, allow_hyphen_values = true, value_parser = parse_list)]
        values: ::std::vec::Vec<f64>,
    },
    /// Chern number and curvature flux through a sphere about the origin
    Chern {
        /// Width vector as x,y,z
        #[arg(long, allow_hyphen_values = true, value_parser = parse_vec3)]
        gamma: [f64; 3],
        #[arg(long)]
        radius: f64,
        /// Plaquette mesh as n_theta x n_phi
        #[arg(long, default_value = "64x128", value_parser = parse_mesh)]
        mesh: (usize, usize),
        #[arg(long, default_value_t = scenario::DEFAULT_DEGENERACY_TOL)]
        degeneracy_tol: f64,
        #[arg(long, default_value_t = scenario::DEFAULT_QUAD_RTOL)]
        quad_rtol: f64,
    },
    /// Drive the system around the loop and extract the geometric phase
    Evolve {
        file: PathBuf,
        /// Also integrate in the fixed basis (periods up to 50 only)
        #[arg(long)]
        fixed_frame: bool,
    },
    /// Winding and linking numbers of the scenario loop
    Classify { file: PathBuf },
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}")))
        .collect()
}

fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let v = parse_list(s)?;
    <[f64; 3]>::try_from(v.as_slice()).map_err(|_| format!("expected x,y,z, got {} values", v.len()))
}

fn parse_mesh(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("mesh {s:?} is not of the form 64x128"))?;
    let a = a.trim().parse().map_err(|e| format!("n_theta: {e}"))?;
    let b = b.trim().parse().map_err(|e| format!("n_phi: {e}"))?;
    Ok((a, b))
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    let default = |f| cli.format.unwrap_or(f);
    let opts = |f| Options { sink: Sink { out: cli.out.clone(), format: default(f) }, quiet: cli.quiet, timing: !cli.no_timing };
    match &cli.cmd {
        Cmd::Phase { file } => commands::phase(&Scenario::load(file)?, &opts(Format::Json)),
        Cmd::Sweep { file, axis, values } => commands::sweep(&Scenario::load(file)?, *axis, values, &opts(Format::Csv)),
        Cmd::Chern { gamma, radius, mesh, degeneracy_tol, quad_rtol } => {
            let a = ChernArgs {
                gamma: *gamma,
                radius: *radius,
                mesh: *mesh,
                tol: *degeneracy_tol,
                rtol: *quad_rtol,
            };
            commands::chern(&a, &opts(Format::Json))
        }
        Cmd::Evolve { file, fixed_frame } => commands::evolve(&Scenario::load(file)?, &opts(Format::Json), *fixed_frame),
        Cmd::Classify { file } => commands::classify(&Scenario::load(file)?, &opts(Format::Json)),
    }
}

fn code_of(e: &anyhow::Error) -> u8 {
    if let Some(e) = e.downcast_ref::<berryres::Error>() {
        commands::exit_code(e) as u8
    } else if e.downcast_ref::<Invalid>().is_some() {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code_of(&e))
        }
    }
}
