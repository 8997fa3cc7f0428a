use std::path::PathBuf;

use crate::model::DecisionRule;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("decision rule {rule} is not supported with false-positive rate {p_fp}")]
    UnsupportedCombination { rule: DecisionRule, p_fp: f64 },

    #[error(
        "series did not converge after {terms} terms (tail bound {tail:e} > tolerance {tol:e})"
    )]
    FailedToConverge { terms: u64, tail: f64, tol: f64 },

    #[error("cannot merge campaigns: {0}")]
    IncompatibleCampaigns(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
