use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use dipole_loop::cli::{run, thread_count, Args, Failure, THREADS_ENV};

fn configure_threads() -> Result<(), Failure> {
    let var = std::env::var(THREADS_ENV).ok();
    if let Some(n) = thread_count(var.as_deref())? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(format!("{THREADS_ENV}: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match configure_threads().and_then(|()| run(&args)) {
        Ok(outcome) => {
            // a closed stdout (e.g. piped into head) is not a failure; the files are already written
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "{}", outcome.summary);
            for f in &outcome.files {
                let _ = writeln!(out, "wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("dipole-loop: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
