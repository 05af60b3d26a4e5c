//! Library side of the `surfkin` command-line tool.

pub mod config;
pub mod jobs;
pub mod mesh;
pub mod report;

use std::path::Path;

use thiserror::Error;

pub use config::{Format, JobConfig, JobFile, JobOptions};
pub use jobs::{run, Command, Output};
pub use report::{Report, Residual};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] surfkin::Error),

    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl From<surfkin::expr::ExprError> for CliError {
    fn from(e: surfkin::expr::ExprError) -> Self {
        CliError::Core(e.into())
    }
}

/// Report text in the configured format.
pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    }
}

/// Writes meshes and the report into `dir`; returns the written file names.
pub fn write_outputs(out: &Output, format: Format, dir: &Path) -> Result<Vec<String>, CliError> {
    fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
        move |source| CliError::Io { path: path.display().to_string(), source }
    }
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let mut written = Vec::new();
    if let Some(r) = &out.report {
        let name = match format {
            Format::Csv => "report.csv",
            Format::Json => "report.json",
        };
        let path = dir.join(name);
        std::fs::write(&path, render(r, format)).map_err(io(&path))?;
        written.push(name.to_string());
    }
    for (name, text) in &out.meshes {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(io(&path))?;
        written.push(name.clone());
    }
    Ok(written)
}

/// Caps the worker pool at `SURFKIN_THREADS` if it is set.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("SURFKIN_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("SURFKIN_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size the worker pool: {e}")))
}
