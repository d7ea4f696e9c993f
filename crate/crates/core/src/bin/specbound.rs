use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use specbound::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    for m in &out.messages {
        eprintln!("{m}");
    }
    let text = out.render();
    let written = match &cli.opts.out {
        Some(p) => std::fs::write(p, text).map_err(|e| e.to_string()),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if out.failed {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}
