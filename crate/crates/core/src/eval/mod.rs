//! BLEU scoring, Unicode auditing and round-trip evaluation.

pub mod bleu;
pub mod roundtrip;
pub mod tokenize;
pub mod unicode;

pub use bleu::{bleu, signature, BleuError, BleuReport};
pub use roundtrip::{round_trip_bleu, Leg, RoundTrip, RoundTripError};
pub use tokenize::{tokenize_13a, tokenize_13a_string};
pub use unicode::{audit_unicode, normalize_corpus, NormForm, UnicodeAuditReport};
