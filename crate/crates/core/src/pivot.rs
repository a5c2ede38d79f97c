//! Synthetic bitext through a pivot language.
//!
//! Given authentic bitext where one side is a pivot language (say English -
//! Estonian), the pivot side is machine-translated into a third language
//! (Livonian) while the other side passes through byte-for-byte. The result
//! is tagged by which side is original text.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::corpus::{Lang, Origin, ParallelCorpus, SentencePair};
use crate::translate::{translate_batched, BatchError, Translator};

pub const DEFAULT_BATCH_SIZE: usize = 64;
pub const DEFAULT_RETRIES: usize = 1;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("corpus is empty")]
    Empty,
    #[error("pivot language {pivot} is not a side of the {src}-{tgt} corpus")]
    PivotNotInCorpus { pivot: Lang, src: Lang, tgt: Lang },
    #[error("the kept side of the corpus is {found}, but the output pair needs {expected}")]
    KeptSide { expected: Lang, found: Lang },
    #[error("translation failed at {0}")]
    Translator(#[from] BatchError),
    #[error("corpus {index}, line {line_no}: pair is not tagged as synthetic with a pivot")]
    Untagged { index: usize, line_no: usize },
}

/// Which side of the output pair the pivot is translated into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Pivot becomes the output target; the authentic side is the output source.
    PivotToTarget,
    /// Pivot becomes the output source; the authentic side is the output target.
    PivotToSource,
}

impl Direction {
    pub fn origin(&self) -> Origin {
        match self {
            Direction::PivotToTarget => Origin::SyntheticSrcOriginal,
            Direction::PivotToSource => Origin::SyntheticTgtOriginal,
        }
    }
}

pub struct SynthJob<'a, T: Translator + ?Sized> {
    pub corpus: &'a ParallelCorpus,
    pub pivot: Lang,
    pub direction: Direction,
    /// Language pair of the generated corpus, e.g. (en, liv).
    pub output: (Lang, Lang),
    pub translator: &'a mut T,
    pub batch_size: usize,
    pub retries: usize,
}

pub fn synthesize<T: Translator + ?Sized>(job: SynthJob<'_, T>) -> Result<ParallelCorpus, SynthError> {
    let corpus = job.corpus;
    if corpus.is_empty() {
        return Err(SynthError::Empty);
    }
    let pivot_is_src = if corpus.src_lang == job.pivot {
        true
    } else if corpus.tgt_lang == job.pivot {
        false
    } else {
        return Err(SynthError::PivotNotInCorpus {
            pivot: job.pivot,
            src: corpus.src_lang.clone(),
            tgt: corpus.tgt_lang.clone(),
        });
    };
    let (kept_lang, pivot_lines, kept_lines) = if pivot_is_src {
        (&corpus.tgt_lang, corpus.src_lines(), corpus.tgt_lines())
    } else {
        (&corpus.src_lang, corpus.tgt_lines(), corpus.src_lines())
    };
    let (out_src, out_tgt) = job.output;
    let expected_kept = match job.direction {
        Direction::PivotToTarget => &out_src,
        Direction::PivotToSource => &out_tgt,
    };
    if kept_lang != expected_kept {
        return Err(SynthError::KeptSide { expected: expected_kept.clone(), found: kept_lang.clone() });
    }

    let translated = translate_batched(job.translator, &pivot_lines, job.batch_size, job.retries)?;
    let origin = job.direction.origin();
    let pairs = kept_lines
        .into_iter()
        .zip(translated)
        .zip(&corpus.pairs)
        .map(|((kept, synth), orig)| {
            let (src, tgt) = match job.direction {
                Direction::PivotToTarget => (kept, synth),
                Direction::PivotToSource => (synth, kept),
            };
            SentencePair {
                src,
                tgt,
                src_lang: out_src.clone(),
                tgt_lang: out_tgt.clone(),
                origin,
                line_no: orig.line_no,
            }
        })
        .collect();
    Ok(ParallelCorpus { src_lang: out_src, tgt_lang: out_tgt, pivot: Some(job.pivot), pairs })
}

/// Pair counts per (origin, pivot) cell.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynthSummary {
    pub cells: BTreeMap<(Origin, Lang), usize>,
}

impl SynthSummary {
    pub fn get(&self, origin: Origin, pivot: &Lang) -> usize {
        self.cells.get(&(origin, pivot.clone())).copied().unwrap_or(0)
    }

    pub fn pivots(&self) -> Vec<Lang> {
        let mut p: Vec<Lang> = self.cells.keys().map(|(_, l)| l.clone()).collect();
        p.sort();
        p.dedup();
        p
    }

    pub fn origin_total(&self, origin: Origin) -> usize {
        self.cells.iter().filter(|((o, _), _)| *o == origin).map(|(_, n)| n).sum()
    }

    pub fn pivot_total(&self, pivot: &Lang) -> usize {
        self.cells.iter().filter(|((_, p), _)| p == pivot).map(|(_, n)| n).sum()
    }

    pub fn total(&self) -> usize {
        self.cells.values().sum()
    }

    const ORIGINS: [Origin; 2] = [Origin::SyntheticSrcOriginal, Origin::SyntheticTgtOriginal];

    pub fn to_tsv(&self) -> String {
        let pivots = self.pivots();
        let mut out = String::from("origin");
        for p in &pivots {
            out.push_str(&format!("\t{p}"));
        }
        out.push_str("\ttotal\n");
        for o in Self::ORIGINS {
            out.push_str(o.as_str());
            for p in &pivots {
                out.push_str(&format!("\t{}", self.get(o, p)));
            }
            out.push_str(&format!("\t{}\n", self.origin_total(o)));
        }
        out.push_str("total");
        for p in &pivots {
            out.push_str(&format!("\t{}", self.pivot_total(p)));
        }
        out.push_str(&format!("\t{}\n", self.total()));
        out
    }
}

impl fmt::Display for SynthSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pivots = self.pivots();
        write!(f, "{:<24}", "origin \\ pivot")?;
        for p in &pivots {
            write!(f, "{:>10}", p.as_str())?;
        }
        writeln!(f, "{:>10}", "total")?;
        for o in Self::ORIGINS {
            write!(f, "{:<24}", o.as_str())?;
            for p in &pivots {
                write!(f, "{:>10}", self.get(o, p))?;
            }
            writeln!(f, "{:>10}", self.origin_total(o))?;
        }
        write!(f, "{:<24}", "total")?;
        for p in &pivots {
            write!(f, "{:>10}", self.pivot_total(p))?;
        }
        writeln!(f, "{:>10}", self.total())
    }
}

pub fn summarize(corpora: &[ParallelCorpus]) -> Result<SynthSummary, SynthError> {
    let mut summary = SynthSummary::default();
    for (index, corpus) in corpora.iter().enumerate() {
        for pair in &corpus.pairs {
            let pivot = match (&corpus.pivot, pair.origin) {
                (Some(p), Origin::SyntheticSrcOriginal | Origin::SyntheticTgtOriginal) => p,
                _ => return Err(SynthError::Untagged { index, line_no: pair.line_no }),
            };
            *summary.cells.entry((pair.origin, pivot.clone())).or_insert(0) += 1;
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::translate::{ExternalCommand, Identity};

    fn l(s: &str) -> Lang {
        Lang::new(s)
    }

    fn en_et() -> ParallelCorpus {
        ParallelCorpus::from_lines(
            l("en"),
            l("et"),
            vec!["Good morning".into(), "Thank you".into()],
            vec!["Tere hommikust".into(), "Aitäh".into()],
        )
    }

    fn job<'a>(
        corpus: &'a ParallelCorpus,
        t: &'a mut Identity,
        direction: Direction,
        output: (Lang, Lang),
    ) -> SynthJob<'a, Identity> {
        SynthJob { corpus, pivot: l("et"), direction, output, translator: t, batch_size: 64, retries: 1 }
    }

    #[test]
    fn identity_pivot_to_target() {
        let c = en_et();
        let out = synthesize(job(&c, &mut Identity, Direction::PivotToTarget, (l("en"), l("liv")))).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out.pivot, Some(l("et")));
        assert_eq!(out.src_lines(), c.src_lines());
        assert_eq!(out.tgt_lines(), c.tgt_lines());
        assert!(out.pairs.iter().all(|p| p.origin == Origin::SyntheticSrcOriginal && p.tgt_lang == l("liv")));
    }

    #[test]
    fn pivot_to_source_keeps_target() {
        // authentic (et, liv) with the Estonian side translated into English
        let c = ParallelCorpus::from_lines(l("et"), l("liv"), vec!["Aitäh".into()], vec!["Tienū".into()]);
        let out = synthesize(SynthJob {
            corpus: &c,
            pivot: l("et"),
            direction: Direction::PivotToSource,
            output: (l("en"), l("liv")),
            translator: &mut Identity,
            batch_size: 8,
            retries: 1,
        })
        .unwrap();
        assert_eq!(out.pairs[0].tgt, "Tienū");
        assert_eq!(out.pairs[0].origin, Origin::SyntheticTgtOriginal);
    }

    #[test]
    fn pivot_must_be_in_corpus() {
        let c = en_et();
        let mut t = Identity;
        let j = SynthJob { pivot: l("lv"), ..job(&c, &mut t, Direction::PivotToTarget, (l("en"), l("liv"))) };
        assert!(matches!(synthesize(j), Err(SynthError::PivotNotInCorpus { .. })));
    }

    #[test]
    fn kept_side_must_match_output_pair() {
        let c = en_et();
        let mut t = Identity;
        let j = job(&c, &mut t, Direction::PivotToSource, (l("en"), l("liv")));
        assert!(matches!(synthesize(j), Err(SynthError::KeptSide { .. })));
    }

    #[test]
    fn translator_line_count_mismatch_is_fatal() {
        let c = en_et();
        let mut t = ExternalCommand::new("head -n 1");
        let j = SynthJob {
            corpus: &c,
            pivot: l("et"),
            direction: Direction::PivotToTarget,
            output: (l("en"), l("liv")),
            translator: &mut t,
            batch_size: 64,
            retries: 1,
        };
        assert!(matches!(synthesize(j), Err(SynthError::Translator(BatchError { batch: 0, .. }))));
    }

    #[test]
    fn empty_summary() {
        let s = summarize(&[]).unwrap();
        assert_eq!(s.total(), 0);
        assert!(s.to_tsv().contains("total\t0"));
    }

    #[test]
    fn authentic_pairs_are_untagged() {
        assert!(matches!(summarize(&[en_et()]), Err(SynthError::Untagged { index: 0, line_no: 1 })));
    }
}
