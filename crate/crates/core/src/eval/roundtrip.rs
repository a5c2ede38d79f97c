//! Round-trip BLEU: translate monolingual text out and back, then score the
//! result against the original input.

use std::fmt;

use thiserror::Error;

use super::bleu::{bleu, BleuError, BleuReport};
use crate::translate::{translate_batched, BatchError, Translator};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leg {
    Forward,
    Backward,
}

impl fmt::Display for Leg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Leg::Forward => "forward",
            Leg::Backward => "backward",
        })
    }
}

#[derive(Debug, Error)]
pub enum RoundTripError {
    #[error("monolingual input is empty")]
    Empty,
    #[error("{leg} translation failed at {source}")]
    Translator { leg: Leg, source: BatchError },
    #[error(transparent)]
    Bleu(#[from] BleuError),
}

#[derive(Debug, Clone)]
pub struct RoundTrip {
    pub report: BleuReport,
    /// Output of the forward leg.
    pub pivot: Vec<String>,
    /// Output of the backward leg, scored against the input.
    pub back: Vec<String>,
}

/// `bleu(bwd(fwd(mono)), mono)` with both legs run in batches of `batch_size`.
pub fn round_trip_bleu<F, B>(
    mono: &[String],
    fwd: &mut F,
    bwd: &mut B,
    batch_size: usize,
) -> Result<RoundTrip, RoundTripError>
where
    F: Translator + ?Sized,
    B: Translator + ?Sized,
{
    if mono.is_empty() {
        return Err(RoundTripError::Empty);
    }
    let pivot = translate_batched(fwd, mono, batch_size, 0)
        .map_err(|source| RoundTripError::Translator { leg: Leg::Forward, source })?;
    let back = translate_batched(bwd, &pivot, batch_size, 0)
        .map_err(|source| RoundTripError::Translator { leg: Leg::Backward, source })?;
    let report = bleu(&back, mono, None, None)?;
    Ok(RoundTrip { report, pivot, back })
}
