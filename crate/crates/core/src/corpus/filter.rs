//! Sentence-pair and monolingual filters.
//!
//! Filters run in a fixed order and the first failing one is recorded as the
//! reason for rejection. The order is part of the report format:
//!
//! `encoding`, `punct_norm` (transform), `lang_id`, `punctuation`,
//! `identical`, `url`, `eval_overlap`, `length`, `length_ratio`.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use unicode_normalization::UnicodeNormalization;

use super::langid::LanguageIdentifier;
use super::punct::{is_punctuation, normalize_punct};
use super::{read_lines_bytes, CorpusError, Lang};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FilterKind {
    /// Invalid UTF-8; always checked.
    Encoding,
    PunctNorm,
    LangId,
    Punctuation,
    Identical,
    Url,
    EvalOverlap,
    Length,
    LengthRatio,
}

impl FilterKind {
    pub const ALL: [FilterKind; 9] = [
        FilterKind::Encoding,
        FilterKind::PunctNorm,
        FilterKind::LangId,
        FilterKind::Punctuation,
        FilterKind::Identical,
        FilterKind::Url,
        FilterKind::EvalOverlap,
        FilterKind::Length,
        FilterKind::LengthRatio,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FilterKind::Encoding => "encoding",
            FilterKind::PunctNorm => "punct_norm",
            FilterKind::LangId => "lang_id",
            FilterKind::Punctuation => "punctuation",
            FilterKind::Identical => "identical",
            FilterKind::Url => "url",
            FilterKind::EvalOverlap => "eval_overlap",
            FilterKind::Length => "length",
            FilterKind::LengthRatio => "length_ratio",
        }
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FilterKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.iter().copied().find(|k| k.name() == s).ok_or_else(|| format!("unknown filter {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterConfig {
    pub filters: Vec<FilterKind>,
    pub max_tokens: usize,
    pub max_len_ratio: f64,
    pub punct_ratio_threshold: f64,
    pub lang_id_enabled: bool,
    pub skip_punct_norm: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            filters: FilterKind::ALL.to_vec(),
            max_tokens: 175,
            max_len_ratio: 1.5,
            punct_ratio_threshold: 0.5,
            lang_id_enabled: true,
            skip_punct_norm: false,
        }
    }
}

impl FilterConfig {
    /// Settings for small in-domain corpora: no punctuation normalization,
    /// no language identification and no length-ratio check.
    pub fn lenient() -> Self {
        Self {
            filters: FilterKind::ALL.iter().copied().filter(|k| *k != FilterKind::LengthRatio).collect(),
            lang_id_enabled: false,
            skip_punct_norm: true,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.max_tokens == 0 {
            return Err("max_tokens must be positive".into());
        }
        if !(self.max_len_ratio > 0.0 && self.max_len_ratio.is_finite()) {
            return Err("max_len_ratio must be positive".into());
        }
        if !(self.punct_ratio_threshold > 0.0 && self.punct_ratio_threshold.is_finite()) {
            return Err("punct_ratio_threshold must be positive".into());
        }
        Ok(())
    }

    pub fn enabled(&self, kind: FilterKind) -> bool {
        match kind {
            FilterKind::Encoding => true,
            FilterKind::PunctNorm => !self.skip_punct_norm && self.filters.contains(&kind),
            FilterKind::LangId => self.lang_id_enabled && self.filters.contains(&kind),
            _ => self.filters.contains(&kind),
        }
    }

    pub fn without(&self, kind: FilterKind) -> Self {
        Self { filters: self.filters.iter().copied().filter(|k| *k != kind).collect(), ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterDecision {
    pub kept: bool,
    pub rejecting_filter: Option<FilterKind>,
    pub src: String,
    /// Empty for monolingual decisions.
    pub tgt: String,
}

impl FilterDecision {
    fn keep(src: String, tgt: String) -> Self {
        Self { kept: true, rejecting_filter: None, src, tgt }
    }

    fn reject(kind: FilterKind, src: String, tgt: String) -> Self {
        Self { kept: false, rejecting_filter: Some(kind), src, tgt }
    }

    /// `kept` or `rejected`, as written to the filter report.
    pub fn status(&self) -> &'static str {
        if self.kept {
            "kept"
        } else {
            "rejected"
        }
    }
}

/// NFKC-normalized, whitespace-collapsed sentences of the evaluation sets.
#[derive(Debug, Clone, Default)]
pub struct EvalIndex(HashSet<String>);

impl EvalIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, line: &str) {
        let key = eval_key(line);
        if !key.is_empty() {
            self.0.insert(key);
        }
    }

    pub fn contains(&self, line: &str) -> bool {
        self.0.contains(&eval_key(line))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Matching key for evaluation-overlap checks.
pub fn eval_key(line: &str) -> String {
    let nfkc: String = line.nfkc().collect();
    nfkc.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn build_eval_index<P: AsRef<Path>>(eval_files: &[P]) -> Result<EvalIndex, CorpusError> {
    let mut index = EvalIndex::new();
    for path in eval_files {
        for line in read_lines_bytes(path.as_ref())? {
            index.insert(&String::from_utf8_lossy(&line));
        }
    }
    Ok(index)
}

fn token_count(s: &str) -> usize {
    s.split_whitespace().count()
}

fn punct_ratio(s: &str) -> f64 {
    let (mut punct, mut visible) = (0usize, 0usize);
    for c in s.chars().filter(|c| !c.is_whitespace()) {
        visible += 1;
        if is_punctuation(c) {
            punct += 1;
        }
    }
    if visible == 0 {
        0.0
    } else {
        punct as f64 / visible as f64
    }
}

pub fn contains_url(s: &str) -> bool {
    let lower = s.to_lowercase();
    ["http://", "https://", "www."].iter().any(|m| lower.contains(m))
}

fn length_ratio(a: usize, b: usize) -> f64 {
    match (a.min(b), a.max(b)) {
        (_, 0) => 1.0,
        (0, _) => f64::INFINITY,
        (lo, hi) => hi as f64 / lo as f64,
    }
}

/// Runs the pair filters on already-decoded text.
pub fn apply_filters(
    src: &str,
    tgt: &str,
    src_lang: &Lang,
    tgt_lang: &Lang,
    cfg: &FilterConfig,
    eval_index: &EvalIndex,
    lang_id: &dyn LanguageIdentifier,
) -> FilterDecision {
    let (src, tgt) = if cfg.enabled(FilterKind::PunctNorm) {
        (normalize_punct(src), normalize_punct(tgt))
    } else {
        (src.to_string(), tgt.to_string())
    };
    let failing = pair_rejection(&src, &tgt, src_lang, tgt_lang, cfg, eval_index, lang_id);
    match failing {
        Some(kind) => FilterDecision::reject(kind, src, tgt),
        None => FilterDecision::keep(src, tgt),
    }
}

fn pair_rejection(
    src: &str,
    tgt: &str,
    src_lang: &Lang,
    tgt_lang: &Lang,
    cfg: &FilterConfig,
    eval_index: &EvalIndex,
    lang_id: &dyn LanguageIdentifier,
) -> Option<FilterKind> {
    use FilterKind::*;
    let on = |k| cfg.enabled(k);
    if on(LangId) && !(lang_id.accepts(src, src_lang.as_str()) && lang_id.accepts(tgt, tgt_lang.as_str())) {
        return Some(LangId);
    }
    if on(Punctuation) && (punct_ratio(src) > cfg.punct_ratio_threshold || punct_ratio(tgt) > cfg.punct_ratio_threshold)
    {
        return Some(Punctuation);
    }
    if on(Identical) && src == tgt {
        return Some(Identical);
    }
    if on(Url) && (contains_url(src) || contains_url(tgt)) {
        return Some(Url);
    }
    if on(EvalOverlap) && (eval_index.contains(src) || eval_index.contains(tgt)) {
        return Some(EvalOverlap);
    }
    let (ns, nt) = (token_count(src), token_count(tgt));
    if on(Length) && (ns > cfg.max_tokens || nt > cfg.max_tokens) {
        return Some(Length);
    }
    if on(LengthRatio) && length_ratio(ns, nt) > cfg.max_len_ratio {
        return Some(LengthRatio);
    }
    None
}

/// Decodes a raw pair and runs [`apply_filters`]. Invalid UTF-8 on either side is rejected as `encoding`.
#[allow(clippy::too_many_arguments)]
pub fn apply_filters_bytes(
    src: &[u8],
    tgt: &[u8],
    src_lang: &Lang,
    tgt_lang: &Lang,
    cfg: &FilterConfig,
    eval_index: &EvalIndex,
    lang_id: &dyn LanguageIdentifier,
) -> FilterDecision {
    match (std::str::from_utf8(src), std::str::from_utf8(tgt)) {
        (Ok(s), Ok(t)) => apply_filters(s, t, src_lang, tgt_lang, cfg, eval_index, lang_id),
        _ => FilterDecision::reject(
            FilterKind::Encoding,
            String::from_utf8_lossy(src).into_owned(),
            String::from_utf8_lossy(tgt).into_owned(),
        ),
    }
}

/// Monolingual cleaning: the pair pipeline minus `identical` and `length_ratio`, on one side.
pub fn filter_mono(
    line: &[u8],
    lang: &Lang,
    cfg: &FilterConfig,
    eval_index: &EvalIndex,
    lang_id: &dyn LanguageIdentifier,
) -> FilterDecision {
    use FilterKind::*;
    let Ok(text) = std::str::from_utf8(line) else {
        return FilterDecision::reject(Encoding, String::from_utf8_lossy(line).into_owned(), String::new());
    };
    let on = |k| cfg.enabled(k);
    let text = if on(PunctNorm) { normalize_punct(text) } else { text.to_string() };
    let failing = if on(LangId) && !lang_id.accepts(&text, lang.as_str()) {
        Some(LangId)
    } else if on(Punctuation) && punct_ratio(&text) > cfg.punct_ratio_threshold {
        Some(Punctuation)
    } else if on(Url) && contains_url(&text) {
        Some(Url)
    } else if on(EvalOverlap) && eval_index.contains(&text) {
        Some(EvalOverlap)
    } else if on(Length) && token_count(&text) > cfg.max_tokens {
        Some(Length)
    } else {
        None
    };
    match failing {
        Some(kind) => FilterDecision::reject(kind, text, String::new()),
        None => FilterDecision::keep(text, String::new()),
    }
}

/// Filters a whole bitext on `jobs` worker threads. Output order always matches input order.
pub fn run_pipeline(
    pairs: &[(Vec<u8>, Vec<u8>)],
    src_lang: &Lang,
    tgt_lang: &Lang,
    cfg: &FilterConfig,
    eval_index: &EvalIndex,
    lang_id: &dyn LanguageIdentifier,
    jobs: usize,
) -> Vec<FilterDecision> {
    let run = || {
        pairs.par_iter().map(|(s, t)| apply_filters_bytes(s, t, src_lang, tgt_lang, cfg, eval_index, lang_id)).collect()
    };
    match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(pool) => pool.install(run),
        Err(_) => {
            pairs.iter().map(|(s, t)| apply_filters_bytes(s, t, src_lang, tgt_lang, cfg, eval_index, lang_id)).collect()
        }
    }
}
