//! Batch front end for the `twinbeam` closed forms and oracle.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod format;

use std::path::Path;

pub use commands::{execute, Rendered};
pub use config::{Command, Format, RunConfig, Settings};
pub use error::{CliError, Result};

#[derive(Debug)]
pub struct RunOutcome {
    /// the document, when no `out` path is set
    pub stdout: Option<String>,
    /// the command ran but its verdict is a failure
    pub failure: Option<CliError>,
}

/// Runs a resolved configuration and writes its files.
pub fn run(settings: &Settings) -> Result<RunOutcome> {
    let r = execute(settings)?;
    let printed = match &settings.out {
        Some(path) => {
            write(path, &r.body)?;
            None
        }
        None => Some(r.body.clone()),
    };
    for (path, text) in &r.side {
        write(path, text)?;
    }
    if let (Some(stub), Some((x, ys))) = (&settings.plot, &r.plot) {
        let data = settings.out.as_deref().unwrap_or(Path::new("data.csv"));
        write(stub, &gnuplot_stub(data, &r.columns, *x, ys))?;
    }
    Ok(RunOutcome { stdout: printed, failure: r.failure })
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

fn gnuplot_stub(data: &Path, columns: &[String], x: usize, ys: &[usize]) -> String {
    let mut s = String::from("set datafile separator ','\nset key autotitle columnheader\n");
    s.push_str(&format!("set xlabel '{}'\n", columns.get(x - 1).map(String::as_str).unwrap_or("x")));
    let plots: Vec<String> = ys
        .iter()
        .filter(|&&c| columns.get(c - 1).is_some_and(|n| n != "note" && n != "violated"))
        .map(|c| format!("'{}' using {x}:{c} with lines", data.display()))
        .collect();
    s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    s
}
