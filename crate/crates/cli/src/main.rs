use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use parapoly::dsl::parse_model;
use parapoly::network::export_dot;
use parapoly_cli::{repl, run_script, Session};

#[derive(Parser)]
#[command(name = "parapoly", version, about = "Symbolic inference and analysis for parametric probability networks")]
struct Cli {
    #[command(subcommand)]
    command: Option<Mode>,
}

#[derive(Subcommand)]
enum Mode {
    /// Interactive shell (the default).
    Shell,
    /// Execute a command script, stopping at the first error.
    Run { script: PathBuf },
    /// Print a model's graph in DOT format.
    Dot { model: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut session = Session::new();
    let stdout = std::io::stdout();
    match cli.command.unwrap_or(Mode::Shell) {
        Mode::Shell => {
            let stdin = std::io::stdin();
            let prompt = stdin.is_terminal().then_some("parapoly> ");
            if let Err(e) = repl(&mut session, &mut stdin.lock(), &mut stdout.lock(), prompt) {
                eprintln!("{e}");
                return ExitCode::FAILURE;
            }
        }
        Mode::Run { script } => {
            let text = match std::fs::read_to_string(&script) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("cannot read {}: {e}", script.display());
                    return ExitCode::FAILURE;
                }
            };
            if let Some(dir) = script.parent() {
                session.search_path.push(dir.to_path_buf());
            }
            if let Err(e) = run_script(&mut session, &text, &mut stdout.lock()) {
                eprintln!("{e}");
                return ExitCode::FAILURE;
            }
        }
        Mode::Dot { model } => {
            let parsed = std::fs::read_to_string(&model)
                .map_err(|e| format!("cannot read {}: {e}", model.display()))
                .and_then(|t| parse_model(&t).map_err(|e| e.to_string()));
            match parsed {
                Ok(m) => print!("{}", export_dot(&m)),
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::FAILURE;
                }
            }
        }
    }
    ExitCode::SUCCESS
}
