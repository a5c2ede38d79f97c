use std::fmt;

use livmt_core::cmea::AlignError;
use livmt_core::corpus::{ConfigError, CorpusError};
use livmt_core::embed::EmbedError;
use livmt_core::eval::{BleuError, RoundTripError};
use livmt_core::pivot::SynthError;
use livmt_core::postproc::PostprocError;

/// A failure with its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or arguments: exit 1.
    Usage(String),
    /// Unreadable, malformed or inconsistent input: exit 2.
    Data(String),
    /// An external translator command failed: exit 3.
    External(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::External(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::External(m) => f.write_str(m),
        }
    }
}

impl From<EmbedError> for CliError {
    fn from(e: EmbedError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<AlignError> for CliError {
    fn from(e: AlignError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::UnknownLang { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Usage(format!("config: {e}"))
    }
}

impl From<BleuError> for CliError {
    fn from(e: BleuError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<RoundTripError> for CliError {
    fn from(e: RoundTripError) -> Self {
        match e {
            RoundTripError::Translator { .. } => CliError::External(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::Translator(_) => CliError::External(e.to_string()),
            SynthError::PivotNotInCorpus { .. } | SynthError::KeptSide { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<PostprocError> for CliError {
    fn from(e: PostprocError) -> Self {
        match e {
            PostprocError::Threshold { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}
