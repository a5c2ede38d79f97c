//! Rule-based clean-up of system output.
//!
//! Rules, in order: NFC normalization, `httpshttp` -> `https://`, removal of
//! `<unk>`, and for Livonian output a decimal comma between ASCII digits
//! becomes a period. Livonian lines where the same n-gram repeats too many
//! times in a row are flagged for regeneration; regenerating them needs the
//! model and is left to the caller.
//!
//! Removing `<unk>` can create a new `httpshttp` or an unnormalized sequence,
//! so the rules repeat until the line stops changing.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::corpus::{read_lines, CorpusError, Lang};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleSet {
    pub nfc: bool,
    pub fix_https: bool,
    pub drop_unk: bool,
    pub decimal_comma: bool,
    pub repetition: bool,
}

impl Default for RuleSet {
    fn default() -> Self {
        Self { nfc: true, fix_https: true, drop_unk: true, decimal_comma: true, repetition: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PostprocConfig {
    pub target_lang: Lang,
    pub rules: RuleSet,
    pub repetition_ngram: usize,
    pub repetition_min_repeats: usize,
}

impl PostprocConfig {
    pub fn new(target_lang: Lang) -> Self {
        Self { target_lang, rules: RuleSet::default(), repetition_ngram: 2, repetition_min_repeats: 4 }
    }

    pub fn validate(&self) -> Result<(), PostprocError> {
        if self.repetition_ngram < 2 || self.repetition_min_repeats < 2 {
            return Err(PostprocError::Threshold {
                ngram: self.repetition_ngram,
                repeats: self.repetition_min_repeats,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum PostprocError {
    #[error("repetition thresholds must be >= 2 (ngram {ngram}, repeats {repeats})")]
    Threshold { ngram: usize, repeats: usize },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Postprocessed {
    pub line: String,
    pub needs_regen: bool,
}

fn replace_decimal_commas(s: &str) -> String {
    let chars: Vec<char> = s.chars().collect();
    chars
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let digit_before = i > 0 && chars[i - 1].is_ascii_digit();
            let digit_after = chars.get(i + 1).is_some_and(|n| n.is_ascii_digit());
            if c == ',' && digit_before && digit_after {
                '.'
            } else {
                c
            }
        })
        .collect()
}

fn apply_rules(line: &str, cfg: &PostprocConfig) -> String {
    let r = &cfg.rules;
    let mut s = if r.nfc { line.nfc().collect() } else { line.to_string() };
    if r.fix_https {
        s = s.replace("httpshttp", "https://");
    }
    if r.drop_unk {
        s = s.replace("<unk>", "");
    }
    if r.decimal_comma && cfg.target_lang.is_livonian() {
        s = replace_decimal_commas(&s);
    }
    s
}

/// True when some `n`-gram occurs at least `k` times back to back.
pub fn has_repetition(line: &str, n: usize, k: usize) -> bool {
    let toks: Vec<&str> = line.split_whitespace().collect();
    if n == 0 || toks.len() < n * k {
        return false;
    }
    for start in 0..=toks.len() - n * k {
        let gram = &toks[start..start + n];
        let mut reps = 1;
        let mut pos = start + n;
        while pos + n <= toks.len() && &toks[pos..pos + n] == gram {
            reps += 1;
            if reps >= k {
                return true;
            }
            pos += n;
        }
    }
    false
}

pub fn postprocess(line: &str, cfg: &PostprocConfig) -> Postprocessed {
    let mut current = apply_rules(line, cfg);
    loop {
        let next = apply_rules(&current, cfg);
        if next == current {
            break;
        }
        current = next;
    }
    let needs_regen = cfg.rules.repetition
        && cfg.target_lang.is_livonian()
        && has_repetition(&current, cfg.repetition_ngram, cfg.repetition_min_repeats);
    Postprocessed { line: current, needs_regen }
}

/// Processes a file line by line, writes the result to `output` and the
/// 1-based regeneration line numbers to `regen_path`.
pub fn postprocess_file(
    input: &Path,
    output: &Path,
    regen_path: Option<&Path>,
    cfg: &PostprocConfig,
) -> Result<Vec<usize>, PostprocError> {
    cfg.validate()?;
    let (text, regen) = postprocess_lines(&read_lines(input)?, cfg);
    fs::write(output, text).map_err(|source| PostprocError::Io { path: output.to_path_buf(), source })?;
    if let Some(p) = regen_path {
        fs::write(p, regen_list(&regen)).map_err(|source| PostprocError::Io { path: p.to_path_buf(), source })?;
    }
    Ok(regen)
}

/// Processed text (newline-terminated lines) and regeneration line numbers.
pub fn postprocess_lines<S: AsRef<str>>(lines: &[S], cfg: &PostprocConfig) -> (String, Vec<usize>) {
    let mut text = String::new();
    let mut regen = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        let out = postprocess(line.as_ref(), cfg);
        if out.needs_regen {
            regen.push(i + 1);
        }
        text.push_str(&out.line);
        text.push('\n');
    }
    (text, regen)
}

pub fn regen_list(regen: &[usize]) -> String {
    regen.iter().map(|n| format!("{n}\n")).collect()
}
