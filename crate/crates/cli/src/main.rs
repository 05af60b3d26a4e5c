use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use surfkin_cli::{init_threads, jobs, render, write_outputs, CliError, Command, JobConfig, JobOptions};

#[derive(Parser)]
#[command(name = "surfkin", version, about = "Kinematics of deforming surfaces: residual checks and mesh export")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compatibility identities of a chart.
    Check(JobOptions),
    /// Classification, energies and curvature laws of a deformation.
    Analyze(JobOptions),
    /// Pure-bending eversion of a surface of revolution.
    Evert(JobOptions),
    /// Bonnet transformations of the catenoid.
    Bonnet(JobOptions),
    /// Source and image OBJ meshes.
    ExportMesh(JobOptions),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, opts) = match cli.command {
        Cmd::Check(o) => (Command::Check, o),
        Cmd::Analyze(o) => (Command::Analyze, o),
        Cmd::Evert(o) => (Command::Evert, o),
        Cmd::Bonnet(o) => (Command::Bonnet, o),
        Cmd::ExportMesh(o) => (Command::ExportMesh, o),
    };
    match execute(cmd, &opts) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("surfkin: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(cmd: Command, opts: &JobOptions) -> Result<bool, CliError> {
    init_threads()?;
    let cfg = JobConfig::resolve(opts)?;
    let out = jobs::run(cmd, &cfg)?;
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    let dir = match (&cfg.out, cmd) {
        (Some(d), _) => Some(d.clone()),
        (None, Command::ExportMesh) => Some(PathBuf::from(".")),
        (None, _) => None,
    };
    match dir {
        Some(d) => {
            for name in write_outputs(&out, cfg.format, &d)? {
                eprintln!("wrote {}", d.join(name).display());
            }
        }
        None => {
            if let Some(r) = &out.report {
                let mut stdout = std::io::stdout().lock();
                let _ = stdout.write_all(render(r, cfg.format).as_bytes());
            }
        }
    }
    if let Some(r) = &out.report {
        for f in r.failures() {
            eprintln!("FAIL {} (max {:e} > tol {:e})", f.name, f.max.unwrap_or(f64::NAN), f.tol.unwrap_or(f64::NAN));
        }
    }
    Ok(out.passed())
}
