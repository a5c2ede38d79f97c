//! Bitext types and the data-cleaning pipeline.

pub mod config;
pub mod filter;
pub mod langid;
pub mod punct;
pub mod sample;

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

pub use config::{parse_clean_config, CleanConfig, ConfigError};
pub use filter::{
    apply_filters, apply_filters_bytes, build_eval_index, filter_mono, run_pipeline, EvalIndex, FilterConfig,
    FilterDecision, FilterKind,
};
pub use langid::{LanguageIdentifier, NgramLangId, PassThrough};
pub use punct::normalize_punct;
pub use sample::{draw_indices, temperature_probabilities, temperature_sample, SamplingSpec, Temperature};

/// Languages accepted when no explicit set is configured.
pub const DEFAULT_LANGS: [&str; 4] = ["en", "liv", "et", "lv"];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("line count mismatch: {src_path} has {src_lines} lines but {tgt_path} has {tgt_lines}")]
    LineCountMismatch { src_path: PathBuf, src_lines: usize, tgt_path: PathBuf, tgt_lines: usize },
    #[error("{path}:{line}: expected exactly one TAB separating source and target")]
    BadTsv { path: PathBuf, line: usize },
    #[error("language code {code:?} is not in the configured set {allowed:?}")]
    UnknownLang { code: String, allowed: Vec<String> },
}

impl CorpusError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        Self::Io { path: path.to_path_buf(), source }
    }
}

/// A language code such as `en` or `liv`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lang(String);

impl Lang {
    /// Wraps a code without checking it against a language set.
    pub fn new(code: impl Into<String>) -> Self {
        Self(code.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_livonian(&self) -> bool {
        self.0 == "liv"
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The closed set of language codes a run accepts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LangSet(BTreeSet<String>);

impl Default for LangSet {
    fn default() -> Self {
        Self(DEFAULT_LANGS.iter().map(|s| s.to_string()).collect())
    }
}

impl LangSet {
    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(codes: I) -> Self {
        Self(codes.into_iter().map(Into::into).collect())
    }

    pub fn parse(&self, code: &str) -> Result<Lang, CorpusError> {
        if self.0.contains(code) {
            Ok(Lang::new(code))
        } else {
            Err(CorpusError::UnknownLang { code: code.to_string(), allowed: self.0.iter().cloned().collect() })
        }
    }
}

/// Which side of a pair is authentic human text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Origin {
    #[default]
    Authentic,
    /// Source side authentic, target side machine-generated.
    SyntheticSrcOriginal,
    /// Target side authentic, source side machine-generated.
    SyntheticTgtOriginal,
}

impl Origin {
    pub fn as_str(&self) -> &'static str {
        match self {
            Origin::Authentic => "authentic",
            Origin::SyntheticSrcOriginal => "synthetic-src-original",
            Origin::SyntheticTgtOriginal => "synthetic-tgt-original",
        }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Origin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "authentic" => Ok(Origin::Authentic),
            "synthetic-src-original" => Ok(Origin::SyntheticSrcOriginal),
            "synthetic-tgt-original" => Ok(Origin::SyntheticTgtOriginal),
            other => Err(format!("unknown origin {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentencePair {
    pub src: String,
    pub tgt: String,
    pub src_lang: Lang,
    pub tgt_lang: Lang,
    pub origin: Origin,
    /// 1-based position in the input.
    pub line_no: usize,
}

impl SentencePair {
    pub fn new(src: impl Into<String>, tgt: impl Into<String>, src_lang: Lang, tgt_lang: Lang) -> Self {
        Self { src: src.into(), tgt: tgt.into(), src_lang, tgt_lang, origin: Origin::Authentic, line_no: 0 }
    }
}

/// Line-aligned bitext in one language direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelCorpus {
    pub src_lang: Lang,
    pub tgt_lang: Lang,
    /// Pivot language used to generate the synthetic side, if any.
    pub pivot: Option<Lang>,
    pub pairs: Vec<SentencePair>,
}

impl ParallelCorpus {
    pub fn from_lines(src_lang: Lang, tgt_lang: Lang, src: Vec<String>, tgt: Vec<String>) -> Self {
        assert_eq!(src.len(), tgt.len(), "line-aligned input required");
        let pairs = src
            .into_iter()
            .zip(tgt)
            .enumerate()
            .map(|(i, (s, t))| SentencePair {
                line_no: i + 1,
                ..SentencePair::new(s, t, src_lang.clone(), tgt_lang.clone())
            })
            .collect();
        Self { src_lang, tgt_lang, pivot: None, pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn src_lines(&self) -> Vec<String> {
        self.pairs.iter().map(|p| p.src.clone()).collect()
    }

    pub fn tgt_lines(&self) -> Vec<String> {
        self.pairs.iter().map(|p| p.tgt.clone()).collect()
    }
}

/// Splits raw file bytes into lines, dropping one trailing newline and any `\r` before `\n`.
pub fn split_lines_bytes(bytes: &[u8]) -> Vec<&[u8]> {
    if bytes.is_empty() {
        return Vec::new();
    }
    let body = bytes.strip_suffix(b"\n").unwrap_or(bytes);
    body.split(|b| *b == b'\n').map(|l| l.strip_suffix(b"\r").unwrap_or(l)).collect()
}

pub fn read_lines_bytes(path: &Path) -> Result<Vec<Vec<u8>>, CorpusError> {
    let bytes = fs::read(path).map_err(|e| CorpusError::io(path, e))?;
    Ok(split_lines_bytes(&bytes).into_iter().map(<[u8]>::to_vec).collect())
}

/// Reads a UTF-8 text file as lines. Invalid UTF-8 is replaced with U+FFFD.
pub fn read_lines(path: &Path) -> Result<Vec<String>, CorpusError> {
    Ok(read_lines_bytes(path)?
        .into_iter()
        .map(|l| String::from_utf8(l).unwrap_or_else(|e| String::from_utf8_lossy(e.as_bytes()).into_owned()))
        .collect())
}

/// Raw bitext lines as read from disk, before any decoding.
pub type RawBitext = Vec<(Vec<u8>, Vec<u8>)>;

/// Reads two line-aligned files. Differing line counts are a hard error.
pub fn read_bitext_pair(src: &Path, tgt: &Path) -> Result<RawBitext, CorpusError> {
    let s = read_lines_bytes(src)?;
    let t = read_lines_bytes(tgt)?;
    if s.len() != t.len() {
        return Err(CorpusError::LineCountMismatch {
            src_path: src.to_path_buf(),
            src_lines: s.len(),
            tgt_path: tgt.to_path_buf(),
            tgt_lines: t.len(),
        });
    }
    Ok(s.into_iter().zip(t).collect())
}

/// Reads `src<TAB>tgt` lines.
pub fn read_bitext_tsv(path: &Path) -> Result<RawBitext, CorpusError> {
    read_lines_bytes(path)?
        .into_iter()
        .enumerate()
        .map(|(i, line)| {
            let mut parts = line.split(|b| *b == b'\t');
            match (parts.next(), parts.next(), parts.next()) {
                (Some(s), Some(t), None) => Ok((s.to_vec(), t.to_vec())),
                _ => Err(CorpusError::BadTsv { path: path.to_path_buf(), line: i + 1 }),
            }
        })
        .collect()
}
