use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ldlab::scenario::{self, OutputFormat, SEED_ENV};
use ldlab::Error;

#[derive(Parser)]
#[command(name = "ldlab", version, about = "Left-definite spectral theory laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config and write report.txt (and tables/*.csv).
    Run {
        config: PathBuf,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Text,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let Command::Run { config, out, format } = cli.command;
    let loaded = scenario::load_config(&config)
        .and_then(|c| c.with_seed_override(std::env::var(SEED_ENV).ok().as_deref()));
    let cfg = match loaded {
        Ok(c) => c,
        Err(Error::Config(errs)) => {
            eprintln!("invalid config {}:", config.display());
            for e in errs {
                eprintln!("  {e}");
            }
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = scenario::run_scenario(&cfg);
    let format = match format {
        Format::Csv => OutputFormat::Csv,
        Format::Text => OutputFormat::Text,
    };
    if let Err(e) = scenario::emit(&report, format, &out) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    print!("{}", report.to_text());
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
