use std::process::ExitCode;

use clap::Parser;

use hydro_cli::{execute, Cli};

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error kind=usage msg=\"{}\"", one_line(first).replace('"', "'"));
            return ExitCode::from(2);
        }
    };
    if let Ok(n) = std::env::var("HYDRO_THREADS") {
        match n.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error kind=bad_argument msg=\"HYDRO_THREADS must be a positive integer, got '{}'\"", one_line(&n));
                return ExitCode::from(2);
            }
        }
    }
    match execute(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error kind={} msg=\"{}\"", e.kind(), one_line(&e.to_string()).replace('"', "'"));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
