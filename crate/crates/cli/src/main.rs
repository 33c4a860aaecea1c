use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};
use dualfem_cli::output::{resolve_out_dir, write_error, write_output, OUT_ENV};
use dualfem_cli::{find_preset, list_presets, run, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "dualfem", version, about = "Space-time dual finite-element solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the problem described by a JSON config file
    Run {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named preset
    Preset {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// print the preset's config instead of running it
        #[arg(long)]
        show: bool,
    },
    /// List the available presets
    ListPresets,
}

fn execute(config: RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    let label = config.label();
    let env = std::env::var(OUT_ENV).ok();
    let dir = resolve_out_dir(out, env.as_deref(), config.out_dir.as_deref(), &label);
    match run(&config) {
        Ok(output) => {
            let paths = write_output(&dir, &output)?;
            for (k, v) in &output.summary.metrics {
                println!("{k} = {v}");
            }
            println!("wrote {} files to {} in {:.2}s", paths.len(), dir.display(), output.summary.wall_time_s);
            Ok(())
        }
        Err(e) => {
            // the record is best effort; the original error decides the exit code
            if let Err(w) = write_error(&dir, &label, &e) {
                eprintln!("{w}");
            }
            Err(e)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::ListPresets => {
            for p in list_presets() {
                let alias = p.alias.map(|a| format!(" (alias {a})")).unwrap_or_default();
                println!("{:<26} {:<10} {}{alias}", p.name, p.config.problem.kind(), p.description);
            }
            Ok(())
        }
        Command::Preset { name, out, show } => match find_preset(&name) {
            Some(p) if show => {
                println!("{}", p.config.to_json());
                Ok(())
            }
            Some(p) => execute(p.config, out.as_deref()),
            None => Err(CliError::config(format!("unknown preset '{name}' (see list-presets)"))),
        },
        Command::Run { config, out } => std::fs::read_to_string(&config)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", config.display())))
            .and_then(|text| {
                if text.trim().is_empty() {
                    let _ = Cli::command().print_help();
                }
                RunConfig::parse(&text)
            })
            .and_then(|c| execute(c, out.as_deref())),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
