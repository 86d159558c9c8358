use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use strip_homology::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(limit) = cli.cell_limit {
        std::env::set_var(strip_homology::complexes::CELL_LIMIT_VAR, limit.to_string());
    }
    #[cfg(feature = "parallel")]
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let mut sink: Box<dyn Write> = match &cli.output {
        Some(p) => match std::fs::File::create(p) {
            Ok(f) => Box::new(std::io::BufWriter::new(f)),
            Err(e) => {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(2);
            }
        },
        None => Box::new(std::io::stdout().lock()),
    };
    let result = run(&cli, &mut sink);
    let _ = sink.flush();
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
