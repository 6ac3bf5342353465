use std::io;
use std::path::PathBuf;

use railvuln_core::curves::CurveError;
use railvuln_core::demand::DemandError;
use railvuln_core::metrics::MetricsError;
use railvuln_core::network::NetworkError;
use railvuln_core::sim::SimError;
use railvuln_core::vulnerability::VulnerabilityError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}:{line}: {message}", path.display())]
    Parse { path: PathBuf, line: u64, message: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("config: {0}")]
    Config(String),
    #[error("delay {delay} min is above the short-delay threshold {threshold} min")]
    DelayAboveThreshold { delay: f64, threshold: f64 },
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Demand(#[from] DemandError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Vulnerability(#[from] VulnerabilityError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("{}: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// 1 for bad input, 2 for anything that failed while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::Config(_)
            | Error::DelayAboveThreshold { .. }
            | Error::Network(_)
            | Error::Json { .. } => 1,
            _ => 2,
        }
    }
}
