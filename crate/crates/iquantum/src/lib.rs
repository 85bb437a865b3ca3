//! Command-line front end over `iquantum-core`: configuration, command
//! dispatch and JSON reports.

pub mod commands;
pub mod config;
pub mod report;

pub use config::RunConfig;
pub use report::{Check, Report};

use iquantum_core::CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("configuration: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Stable machine-readable kind (the core variant name where applicable).
    pub fn kind(&self) -> String {
        match self {
            CliError::Core(e) => {
                let dbg = format!("{:?}", e);
                dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Core").to_string()
            }
            CliError::Config(_) => "Config".into(),
            CliError::Io(_) => "Io".into(),
        }
    }
}

/// The commands of the `iquantum` binary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    VerifyBraid,
    Iseq,
    RootVectors,
    Pbw,
    Hall,
    CrossCheck,
    Reflect,
    CountIndec,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyBraid => "verify-braid",
            Command::Iseq => "iseq",
            Command::RootVectors => "root-vectors",
            Command::Pbw => "pbw",
            Command::Hall => "hall",
            Command::CrossCheck => "cross-check",
            Command::Reflect => "reflect",
            Command::CountIndec => "count-indec",
        }
    }
}

/// Run one command. Failures become a report with an `error` record.
pub fn run(cmd: Command, cfg: &RunConfig) -> Report {
    let out = match cmd {
        Command::VerifyBraid => commands::verify_braid(cfg),
        Command::Iseq => commands::iseq(cfg),
        Command::RootVectors => commands::root_vectors(cfg),
        Command::Pbw => commands::pbw(cfg),
        Command::Hall => commands::hall(cfg),
        Command::CrossCheck => commands::cross_check(cfg),
        Command::Reflect => commands::reflect(cfg),
        Command::CountIndec => commands::count_indec(cfg),
    };
    match out {
        Ok((checks, data)) => Report::new(cmd.name(), cfg, checks, data),
        Err(e) => Report::failure(cmd.name(), cfg, &e),
    }
}

/// Cap rayon's worker count from `IQUANTUM_WORKERS` (ignored if unset or invalid).
pub fn init_workers() {
    if let Some(n) = std::env::var("IQUANTUM_WORKERS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}
