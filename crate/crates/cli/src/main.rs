use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use twinbeam_cli::args::Cli;
use twinbeam_cli::{run, CliError};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match try_main() {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(e)) | Err(e) => {
            eprintln!("twinbeam: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn try_main() -> Result<Option<CliError>, CliError> {
    let settings = Cli::parse().into_config()?.resolve()?;
    let outcome = run(&settings)?;
    if let Some(text) = outcome.stdout {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|e| CliError::Config(format!("cannot write stdout: {e}")))?;
    }
    Ok(outcome.failure)
}
