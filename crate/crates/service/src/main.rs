use std::path::PathBuf;
use std::process::ExitCode;

use capsicaps_core::protocol::{to_json_lines, SessionConfig};
use capsicaps_core::strategist::StrategyConfig;
use capsicaps_service::{cli_autoplay, cli_verify, load_fixtures, read_level, read_log, ServiceError, DATA_DIR_ENV};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "capsicaps", version, about = "Caps i Caps engine: replay verification, autoplay and session server")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a game log and compare against golden state dumps.
    Verify {
        /// Level file (TOML) or built-in level name.
        #[arg(long)]
        level: String,
        #[arg(long)]
        log: PathBuf,
        /// Directory of `J<n>.state` fixtures.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Print the result as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Let the strategist play with every gate approved.
    Autoplay {
        #[arg(long)]
        level: String,
        /// Strategy config (TOML).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        max_moves: u32,
        /// Write the session log (JSON Lines) here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the HTTP API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: String,
        #[arg(long, env = DATA_DIR_ENV, default_value = "sessions")]
        data: PathBuf,
    },
}

fn run(cli: Cli) -> Result<bool, ServiceError> {
    match cli.command {
        Command::Verify { level, log, fixtures, json } => {
            let level = read_level(&level)?;
            let log = read_log(&log)?;
            let fixtures = match fixtures {
                Some(d) => load_fixtures(&d)?,
                None => Default::default(),
            };
            let result = cli_verify(&level, &log, &fixtures);
            if json {
                println!("{}", serde_json::to_string_pretty(&result).expect("result serializes"));
            } else {
                print!("{}", result.render());
            }
            Ok(result.passed)
        }
        Command::Autoplay { level, config, max_moves, out } => {
            let level = read_level(&level)?;
            let strategy = match config {
                Some(p) => {
                    let text = std::fs::read_to_string(&p).map_err(|e| ServiceError::io(&p, e))?;
                    StrategyConfig::from_toml(&text).map_err(|e| ServiceError::Invalid(e.to_string()))?
                }
                None => StrategyConfig::default(),
            };
            let result = cli_autoplay(&level, SessionConfig { strategy, ..SessionConfig::default() }, max_moves)?;
            let lines = to_json_lines(&result.log);
            match out {
                Some(p) => std::fs::write(&p, lines).map_err(|e| ServiceError::io(&p, e))?,
                None => print!("{lines}"),
            }
            for c in &result.checksums {
                eprintln!("{c}");
            }
            eprintln!("outcome: {:?} after {} moves", result.outcome, result.moves_played);
            Ok(true)
        }
        Command::Serve { bind, data } => {
            let rt = tokio::runtime::Runtime::new().map_err(|e| ServiceError::Invalid(e.to_string()))?;
            eprintln!("listening on {bind}, data in {}", data.display());
            rt.block_on(capsicaps_service::serve(&bind, &data))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
