//! `subshift`: command-line front end for subshift-core.

mod args;
mod bundle;
mod commands;
mod error;
mod manifest;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;
pub use error::CliError;

/// Defaults from `--config`. Keys are long flag names; `-` and `_` are interchangeable.
#[derive(Debug, Default)]
pub struct Config(toml::Table);

impl Config {
    fn get(&self, key: &str) -> Option<&toml::Value> {
        self.0.get(key).or_else(|| self.0.get(&key.replace('-', "_")))
    }

    pub fn u64(&self, key: &str) -> Option<u64> {
        self.get(key).and_then(toml::Value::as_integer).and_then(|v| u64::try_from(v).ok())
    }

    pub fn u32(&self, key: &str) -> Option<u32> {
        self.u64(key).and_then(|v| u32::try_from(v).ok())
    }

    pub fn usize(&self, key: &str) -> Option<usize> {
        self.u64(key).and_then(|v| usize::try_from(v).ok())
    }

    pub fn string(&self, key: &str) -> Option<String> {
        self.get(key).and_then(toml::Value::as_str).map(str::to_string)
    }
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
    let result = match &cli.config {
        Some(path) => commands::read_config(path),
        None => Ok(Config::default()),
    }
    .and_then(|cfg| commands::run(cli.command, &cfg));
    match result {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(if e.kind == "usage" { 2 } else { 1 })
        }
    }
}
