use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use grhom::cli::{run_script, CliError, RunOptions};

#[derive(Parser)]
#[command(name = "grhom", version, about = "Ext groups of complexes of coherent sheaves")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a .gx script and print every result.
    Run {
        script: PathBuf,
        /// Also write all results as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Override the characteristic declared by the script.
        #[arg(long)]
        prime: Option<u64>,
        /// Log progress to stderr.
        #[arg(short, long)]
        verbose: bool,
    },
    /// Parse and check a script without running it.
    Check { script: PathBuf },
}

fn run(args: Args) -> Result<(), CliError> {
    match args.command {
        Command::Run { script, json, prime, verbose } => {
            let level = if verbose { "info" } else { "warn" };
            env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
            let text = std::fs::read_to_string(&script)?;
            let report = run_script(&text, RunOptions { prime })?;
            for r in &report.results {
                println!("-- {}", r.command);
                println!("{}", r.text);
                log::info!("{} took {:.1} ms", r.kind, r.millis);
            }
            if let Some(path) = json {
                let body = serde_json::to_string_pretty(&report).expect("report serializes");
                std::fs::write(path, body)?;
            }
            Ok(())
        }
        Command::Check { script } => {
            let text = std::fs::read_to_string(&script)?;
            let parsed = grhom::cli::parse(&text)?;
            grhom::cli::check(&parsed)?;
            println!("ok: {} statements", parsed.statements.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
