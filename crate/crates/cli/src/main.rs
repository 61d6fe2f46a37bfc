use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use arborcheck_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            // A closed pipe is not worth a panic.
            let _ = stdout.write_all(out.render(&cli).as_bytes());
            let _ = stdout.flush();
            ExitCode::from(out.status.code())
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.status.code())
        }
    }
}
