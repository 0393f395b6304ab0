use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;

use segsel_cli::{run, Cli};

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("SEGSEL_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("SEGSEL_THREADS must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("segsel: {msg}");
        return ExitCode::from(1);
    }
    let stdin = io::stdin();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = run(cli, &mut stdin.lock(), &mut out);
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(()), Ok(())) => ExitCode::SUCCESS,
        (Err(e), _) => {
            eprintln!("segsel: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        (Ok(()), Err(e)) => {
            eprintln!("segsel: <stdout>: {e}");
            ExitCode::from(3)
        }
    }
}
