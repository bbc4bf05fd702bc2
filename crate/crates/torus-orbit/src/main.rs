use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use torus_orbit::{exit, run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(exit::INPUT) } else { ExitCode::SUCCESS };
        }
    };
    let run = run(&cli);
    if let Some(msg) = &run.message {
        eprintln!("torus-orbit: {msg}");
    }
    let written = match &run.out {
        Some(path) => std::fs::write(path, &run.output),
        None => std::io::stdout().lock().write_all(run.output.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("torus-orbit: cannot write report: {e}");
        return ExitCode::from(exit::INPUT);
    }
    ExitCode::from(run.exit_code)
}
