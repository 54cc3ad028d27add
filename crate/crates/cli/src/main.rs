mod args;
mod commands;

use std::fmt::Debug;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use sha2::{Digest, Sha256};
use stockyard_core::Error;

use args::{Cli, Command};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Config(String),
    Numeric(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Config(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Config(m) | Failure::Numeric(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::Io { .. } | Error::InvalidArgument(_) | Error::InvalidDensity(_) => {
                Failure::Config(e.to_string())
            }
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

pub type Outcome = Result<(), Failure>;

/// Hash over the parsed arguments (minus output-only fields) and the bytes of
/// every input file, so reruns with the same inputs carry the same header.
pub struct ConfigHash(Sha256);

impl ConfigHash {
    pub fn new(command: &str, args: &impl Debug) -> Self {
        let mut h = Sha256::new();
        h.update(VERSION.as_bytes());
        h.update(command.as_bytes());
        h.update(format!("{args:?}").as_bytes());
        Self(h)
    }

    pub fn file(mut self, bytes: &[u8]) -> Self {
        self.0.update((bytes.len() as u64).to_le_bytes());
        self.0.update(bytes);
        self
    }

    pub fn hex(self) -> String {
        self.0.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

pub fn header_line(hash: &str) -> String {
    format!("# stockyard {VERSION} config sha256:{hash}")
}

pub fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Config(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Config(format!("stdout: {e}")))
        }
    }
}

fn set_jobs(jobs: usize) -> Outcome {
    if jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Config(format!("--jobs {jobs}: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Lambda(a) => {
            set_jobs(a.common.jobs)?;
            commands::lambda(&a)
        }
        Command::Sweep(a) => {
            set_jobs(a.common.jobs)?;
            commands::sweep(&a)
        }
        Command::Classify(a) => {
            set_jobs(a.common.jobs)?;
            commands::classify(&a)
        }
        Command::Volume(a) => {
            set_jobs(a.common.jobs)?;
            commands::volume(&a)
        }
        Command::Validate(a) => {
            set_jobs(a.jobs)?;
            commands::validate(&a)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("stockyard: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
