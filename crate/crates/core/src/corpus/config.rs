//! Flat `key = value` configuration for the cleaning stage.
//!
//! ```text
//! # comments start with '#'
//! filters = punct_norm,lang_id,punctuation,identical,url,eval_overlap,length,length_ratio
//! max_tokens = 175
//! max_len_ratio = 1.5
//! punct_ratio_threshold = 0.5
//! lang_id = true
//! skip_punct_norm = false
//! langs = en,liv,et,lv
//! src_lang = en
//! tgt_lang = liv
//! lang_id_seed.en = seeds/en.txt
//! ```
//!
//! Unknown keys are an error. Seed paths are relative to the config file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::filter::{FilterConfig, FilterKind};
use super::langid::{LanguageIdentifier, NgramLangId, PassThrough};
use super::CorpusError;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: expected key = value")]
    Syntax { line: usize },
    #[error("line {line}: invalid value for {key}: {message}")]
    Value { line: usize, key: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CleanConfig {
    pub filter: FilterConfig,
    pub langs: Option<Vec<String>>,
    pub src_lang: Option<String>,
    pub tgt_lang: Option<String>,
    /// Seed text per language for the n-gram identifier.
    pub lang_id_seeds: BTreeMap<String, PathBuf>,
}

impl CleanConfig {
    /// An n-gram identifier trained on the seed files, or [`PassThrough`] when there are none.
    pub fn build_lang_id(&self) -> Result<Box<dyn LanguageIdentifier>, CorpusError> {
        if self.lang_id_seeds.is_empty() {
            return Ok(Box::new(PassThrough));
        }
        let mut id = NgramLangId::new();
        for (lang, path) in &self.lang_id_seeds {
            let text =
                std::fs::read_to_string(path).map_err(|source| CorpusError::Io { path: path.clone(), source })?;
            id.train(lang, &text);
        }
        Ok(Box::new(id))
    }
}

fn parse_bool(v: &str) -> Option<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Some(true),
        "false" | "no" | "0" | "off" => Some(false),
        _ => None,
    }
}

fn list(v: &str) -> Vec<String> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

/// Parses config text. `base_dir` resolves relative seed paths.
pub fn parse_clean_config(text: &str, base_dir: &Path) -> Result<CleanConfig, ConfigError> {
    let mut cfg = CleanConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Syntax { line: line_no });
        };
        let (key, value) = (key.trim(), value.trim());
        let bad = |message: String| ConfigError::Value { line: line_no, key: key.to_string(), message };
        match key {
            "filters" => {
                cfg.filter.filters =
                    list(value).iter().map(|n| n.parse::<FilterKind>()).collect::<Result<_, _>>().map_err(bad)?;
            }
            "max_tokens" => {
                cfg.filter.max_tokens = value.parse().map_err(|_| bad(format!("{value:?} is not an integer")))?;
            }
            "max_len_ratio" => {
                cfg.filter.max_len_ratio = value.parse().map_err(|_| bad(format!("{value:?} is not a number")))?;
            }
            "punct_ratio_threshold" => {
                cfg.filter.punct_ratio_threshold =
                    value.parse().map_err(|_| bad(format!("{value:?} is not a number")))?;
            }
            "lang_id" => {
                cfg.filter.lang_id_enabled = parse_bool(value).ok_or_else(|| bad("expected a boolean".into()))?;
            }
            "skip_punct_norm" => {
                cfg.filter.skip_punct_norm = parse_bool(value).ok_or_else(|| bad("expected a boolean".into()))?;
            }
            "langs" => cfg.langs = Some(list(value)),
            "src_lang" => cfg.src_lang = Some(value.to_string()),
            "tgt_lang" => cfg.tgt_lang = Some(value.to_string()),
            _ => match key.strip_prefix("lang_id_seed.") {
                Some(lang) if !lang.is_empty() => {
                    cfg.lang_id_seeds.insert(lang.to_string(), base_dir.join(value));
                }
                _ => return Err(ConfigError::UnknownKey { line: line_no, key: key.to_string() }),
            },
        }
    }
    cfg.filter.validate().map_err(ConfigError::Invalid)?;
    Ok(cfg)
}
