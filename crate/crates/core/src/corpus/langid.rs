//! Language identification for the cleaning pipeline.
//!
//! [`NgramLangId`] is a multinomial naive Bayes model over character
//! trigrams with add-one smoothing, trained from per-language seed text.
//! Languages without a model are never rejected, which is how Livonian is
//! handled when no seed text is available.

use std::collections::{BTreeMap, HashMap, HashSet};

pub trait LanguageIdentifier: Send + Sync {
    /// Most likely language of `text`, or `None` when there is no usable evidence.
    fn identify(&self, text: &str) -> Option<String>;

    /// Whether this identifier can judge text claimed to be in `lang`.
    fn supports(&self, lang: &str) -> bool;

    /// True when `text` should be accepted as `declared`.
    fn accepts(&self, text: &str, declared: &str) -> bool {
        if !self.supports(declared) {
            return true;
        }
        match self.identify(text) {
            Some(pred) => pred == declared,
            None => true,
        }
    }
}

/// Accepts every line.
#[derive(Debug, Clone, Copy, Default)]
pub struct PassThrough;

impl LanguageIdentifier for PassThrough {
    fn identify(&self, _text: &str) -> Option<String> {
        None
    }

    fn supports(&self, _lang: &str) -> bool {
        false
    }
}

#[derive(Debug, Clone, Default)]
struct LangModel {
    counts: HashMap<String, u64>,
    total: u64,
}

#[derive(Debug, Clone, Default)]
pub struct NgramLangId {
    models: BTreeMap<String, LangModel>,
    vocab: HashSet<String>,
}

/// Lowercased letters with every other run of characters folded to one space, padded.
fn prepare(text: &str) -> Vec<char> {
    let mut out = vec![' '];
    for c in text.chars().flat_map(char::to_lowercase) {
        if c.is_alphabetic() {
            out.push(c);
        } else if out.last() != Some(&' ') {
            out.push(' ');
        }
    }
    if out.last() != Some(&' ') {
        out.push(' ');
    }
    out
}

fn trigrams(text: &str) -> HashMap<String, u64> {
    let chars = prepare(text);
    let mut grams = HashMap::new();
    for w in chars.windows(3) {
        *grams.entry(w.iter().collect::<String>()).or_insert(0) += 1;
    }
    grams
}

impl NgramLangId {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds seed text for `lang`. May be called repeatedly.
    pub fn train(&mut self, lang: &str, text: &str) {
        let model = self.models.entry(lang.to_string()).or_default();
        for line in text.lines() {
            for (g, n) in trigrams(line) {
                model.total += n;
                self.vocab.insert(g.clone());
                *model.counts.entry(g).or_insert(0) += n;
            }
        }
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.models.keys().map(String::as_str)
    }

    /// Log-likelihood of `text` under each language model.
    pub fn scores(&self, text: &str) -> Vec<(String, f64)> {
        let grams = trigrams(text);
        let v = self.vocab.len().max(1) as f64;
        self.models
            .iter()
            .map(|(lang, m)| {
                let denom = (m.total as f64 + v).ln();
                let ll = grams
                    .iter()
                    .map(|(g, n)| {
                        let c = m.counts.get(g).copied().unwrap_or(0) as f64;
                        *n as f64 * ((c + 1.0).ln() - denom)
                    })
                    .sum();
                (lang.clone(), ll)
            })
            .collect()
    }
}

impl LanguageIdentifier for NgramLangId {
    fn identify(&self, text: &str) -> Option<String> {
        let grams = trigrams(text);
        if !grams.keys().any(|g| self.vocab.contains(g)) {
            return None;
        }
        let mut best: Option<(String, f64)> = None;
        // models iterate in code order, so ties go to the smaller code
        for (lang, score) in self.scores(text) {
            if best.as_ref().is_none_or(|(_, b)| score > *b) {
                best = Some((lang, score));
            }
        }
        best.map(|(l, _)| l)
    }

    fn supports(&self, lang: &str) -> bool {
        self.models.contains_key(lang)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> NgramLangId {
        let mut id = NgramLangId::new();
        id.train(
            "en",
            "the quick brown fox jumps over the lazy dog\nthis is the house that we built\nwhere is the weather today",
        );
        id.train("et", "see on meie maja\nilm on täna väga ilus\nkus on raamatukogu ja kool");
        id
    }

    #[test]
    fn picks_the_right_language() {
        let id = model();
        assert_eq!(id.identify("the house is over there").as_deref(), Some("en"));
        assert_eq!(id.identify("täna on ilus ilm").as_deref(), Some("et"));
    }

    #[test]
    fn no_evidence_yields_none() {
        let id = model();
        assert_eq!(id.identify("12345 !!!"), None);
        assert!(id.accepts("12345", "et"));
    }

    #[test]
    fn unsupported_languages_are_accepted() {
        let id = model();
        assert!(id.accepts("the house is over there", "liv"));
        assert!(!id.accepts("the house is over there", "et"));
        assert!(PassThrough.accepts("anything", "en"));
    }
}
