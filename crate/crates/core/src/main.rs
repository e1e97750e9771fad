use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use mixent::cli::{run, Cli, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };

    let mut out: Box<dyn Write> = match cli.output.as_deref() {
        Some(p) if p.as_os_str() != "-" => match File::create(p) {
            Ok(f) => Box::new(BufWriter::new(f)),
            Err(e) => {
                eprintln!("error: cannot open {}: {e}", p.display());
                return ExitCode::from(EXIT_USAGE);
            }
        },
        _ => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let code = run(&cli, &mut out, &mut io::stderr());
    if let Err(e) = out.flush() {
        eprintln!("error: {e}");
        return ExitCode::FAILURE;
    }
    ExitCode::from(code)
}
