use std::process::exit;

use clap::error::ErrorKind;
use clap::Parser;

use milnor_forge::cli::{
    cap_from_env, config_from_cli, regression, run, Cli, CliCommand, Outcome, EXIT_CERTIFIED_FAILURE,
    EXIT_CONFIG, EXIT_OK, EXIT_USAGE,
};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{}", e);
            exit(EXIT_OK);
        }
        Err(e) => {
            eprint!("{}", e);
            exit(EXIT_USAGE);
        }
    };
    let cap = cap_from_env();

    if let CliCommand::Regression { goldens_dir } = &cli.command {
        match regression(goldens_dir, cap) {
            Ok(summary) => {
                for s in &summary.skipped {
                    println!("skipped: {}", s);
                }
                for f in &summary.failures {
                    println!("FAIL: {}", f);
                }
                if let Some(w) = &summary.warning {
                    println!("warning: {}", w);
                }
                println!(
                    "regression: {} passed / {} checked",
                    summary.passed, summary.checked
                );
                exit(if summary.failures.is_empty() {
                    EXIT_OK
                } else {
                    EXIT_CERTIFIED_FAILURE
                });
            }
            Err(e) => {
                eprintln!("error: {}", e);
                exit(EXIT_CONFIG);
            }
        }
    }

    let config = match config_from_cli(&cli.command, cap) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}", e);
            exit(EXIT_CONFIG);
        }
    };
    match run(&config) {
        Ok((envelope, outcome)) => {
            println!("{}", milnor_forge::cli::summarize(&envelope, outcome));
            if let Some(path) = &config.output {
                if let Err(e) = std::fs::write(path, envelope.to_canonical_string()) {
                    eprintln!("error: {}", e);
                    exit(EXIT_CONFIG);
                }
                println!("wrote {}", path.display());
            }
            exit(match outcome {
                Outcome::Certified => EXIT_OK,
                Outcome::CertifiedFailure => EXIT_CERTIFIED_FAILURE,
            });
        }
        Err(e) => {
            eprintln!("error: {}", e);
            exit(EXIT_CONFIG);
        }
    }
}
