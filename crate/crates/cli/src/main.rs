use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use rotor_pair_cli::output::OUTPUT_DIR_ENV;
use rotor_pair_cli::{exit_code, execute, Cli, CliError};

fn exit(code: i32) -> ExitCode {
    ExitCode::from(u8::try_from(code).unwrap_or(1))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit(exit_code::OK),
                _ => exit(exit_code::CONFIG),
            };
        }
    };
    let env_dir = std::env::var_os(OUTPUT_DIR_ENV).filter(|d| !d.is_empty()).map(PathBuf::from);
    let result = cli.settings().and_then(|s| execute(cli.command, &s, cli.output.clone(), env_dir));
    match result {
        Ok(out) => {
            println!("{}", serde_json::to_string_pretty(&out.summary).expect("summaries serialize"));
            if out.failed > 0 {
                let e = CliError::Verification { failed: out.failed, total: out.total };
                eprintln!("rotor-pair: {e}");
                return exit(e.exit_code());
            }
            exit(exit_code::OK)
        }
        Err(e) => {
            eprintln!("rotor-pair: {e}");
            exit(e.exit_code())
        }
    }
}
