use std::process::ExitCode;

use clap::Parser;
use coxarith_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                print!("{}", out.report.to_json());
            } else {
                println!("{}", out.text);
            }
            for c in out.report.failures() {
                eprintln!("{}: {} (observed {})", c.verdict, c.name, c.observed);
            }
            ExitCode::from(out.report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
