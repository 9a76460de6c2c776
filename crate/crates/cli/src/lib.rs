//! Command-line front end: `gevrey-nse <subcommand> [flags]`.
//!
//! Exit codes: 0 success, 2 input error (including usage errors), 3 numerical
//! failure. Outputs are written before a numerical failure is reported.

use std::ffi::OsString;

use clap::{CommandFactory, FromArgMatches};

pub mod args;
mod commands;
pub mod config;

pub use args::{Cli, Command};

/// Caps the worker pool when set to a positive integer.
pub const THREADS_ENV: &str = "GEVREY_NSE_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug)]
pub(crate) enum Failure {
    Input(String),
    Numerical(String),
}

impl From<gevrey_nse::Error> for Failure {
    fn from(e: gevrey_nse::Error) -> Self {
        match e {
            gevrey_nse::Error::Numerical(_) => Failure::Numerical(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

/// Completed runs may still carry a flagged state (blow-up, overflow).
pub(crate) enum Status {
    Clean,
    Flagged(String),
}

fn worker_pool() -> Result<Option<rayon::ThreadPool>, String> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(None) };
    let n: usize = v.trim().parse().map_err(|_| format!("{THREADS_ENV} must be a positive integer, got '{v}'"))?;
    if n == 0 {
        return Err(format!("{THREADS_ENV} must be a positive integer, got 0"));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build().map(Some).map_err(|e| e.to_string())
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<String> = argv.into_iter().map(|a| a.into().to_string_lossy().into_owned()).collect();
    let root = Cli::command();
    let argv = match config::expand_argv(&root, argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let matches = match root.clone().try_get_matches_from(&argv) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return EXIT_INPUT;
        }
    };
    let (name, sub_m) = matches.subcommand().expect("subcommand is required");
    let sub = root.find_subcommand(name).expect("parsed subcommand exists");
    let meta = config::render_meta(sub, sub_m, cli.command.output().seed);

    let pool = match worker_pool() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let exec = || commands::execute(&cli.command, &meta);
    let outcome = match &pool {
        Some(p) => p.install(exec),
        None => exec(),
    };
    match outcome {
        Ok(Status::Clean) => EXIT_OK,
        Ok(Status::Flagged(msg)) => {
            eprintln!("numerical failure: {msg}");
            EXIT_NUMERICAL
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            EXIT_INPUT
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("{msg}");
            EXIT_NUMERICAL
        }
    }
}
