//! Corpus BLEU compatible with SacreBLEU 2.x using `tok:13a` and `smooth:exp`.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::tokenize::{is_py_space, py_split, tokenize_13a_string};
use super::unicode::NormForm;

pub const MAX_ORDER: usize = 4;

#[derive(Debug, Error, PartialEq)]
pub enum BleuError {
    #[error("hypotheses ({hyps}) and references ({refs}) differ in line count")]
    LengthMismatch { hyps: usize, refs: usize },
    #[error("cannot score an empty corpus")]
    Empty,
}

pub fn signature() -> String {
    format!("nrefs:1|case:mixed|eff:no|tok:13a|smooth:exp|version:{}", env!("CARGO_PKG_VERSION"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BleuReport {
    pub score: f64,
    /// Smoothed n-gram precisions in percent.
    pub precisions: [f64; MAX_ORDER],
    pub bp: f64,
    pub sys_len: usize,
    pub ref_len: usize,
    /// Clipped n-gram matches per order.
    pub counts: [usize; MAX_ORDER],
    /// Hypothesis n-grams per order.
    pub totals: [usize; MAX_ORDER],
    pub signature: String,
}

/// Sufficient statistics, summed over segments.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BleuStats {
    pub sys_len: usize,
    pub ref_len: usize,
    pub counts: [usize; MAX_ORDER],
    pub totals: [usize; MAX_ORDER],
}

impl std::ops::AddAssign for BleuStats {
    fn add_assign(&mut self, rhs: Self) {
        self.sys_len += rhs.sys_len;
        self.ref_len += rhs.ref_len;
        for n in 0..MAX_ORDER {
            self.counts[n] += rhs.counts[n];
            self.totals[n] += rhs.totals[n];
        }
    }
}

fn ngram_counts<'a>(tokens: &'a [&'a str], n: usize) -> HashMap<&'a [&'a str], usize> {
    let mut map = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *map.entry(w).or_insert(0) += 1;
        }
    }
    map
}

/// Statistics of one already-tokenized segment pair.
pub fn segment_stats(hyp_tokens: &str, ref_tokens: &str) -> BleuStats {
    let hyp: Vec<&str> = py_split(hyp_tokens).collect();
    let rf: Vec<&str> = py_split(ref_tokens).collect();
    let mut stats = BleuStats { sys_len: hyp.len(), ref_len: rf.len(), ..Default::default() };
    for n in 1..=MAX_ORDER {
        let h = ngram_counts(&hyp, n);
        let r = ngram_counts(&rf, n);
        stats.totals[n - 1] = hyp.len().saturating_sub(n - 1);
        stats.counts[n - 1] = h.iter().map(|(g, c)| (*c).min(r.get(g).copied().unwrap_or(0))).sum();
    }
    stats
}

fn floored_log(x: f64) -> f64 {
    if x == 0.0 {
        -9_999_999_999.0
    } else {
        x.ln()
    }
}

// exp(4 ln 100 / 4) lands one ulp above 100, so perfect output is clamped.
fn combine(bp: f64, log_sum: f64) -> f64 {
    (bp * (log_sum / MAX_ORDER as f64).exp()).min(100.0)
}

/// Final score from summed statistics, following SacreBLEU's `compute_bleu` with `exp` smoothing.
pub fn score_from_stats(stats: &BleuStats) -> BleuReport {
    let (sys_len, ref_len) = (stats.sys_len, stats.ref_len);
    let bp = if sys_len < ref_len {
        if sys_len > 0 {
            (1.0 - ref_len as f64 / sys_len as f64).exp()
        } else {
            0.0
        }
    } else {
        1.0
    };
    let mut precisions = [0.0; MAX_ORDER];
    let report = |score: f64, precisions: [f64; MAX_ORDER]| BleuReport {
        score,
        precisions,
        bp,
        sys_len,
        ref_len,
        counts: stats.counts,
        totals: stats.totals,
        signature: signature(),
    };
    if stats.counts.iter().all(|c| *c == 0) {
        return report(0.0, precisions);
    }
    let mut smooth = 1.0;
    #[allow(clippy::needless_range_loop)] // three arrays indexed by order
    for n in 0..MAX_ORDER {
        if stats.totals[n] == 0 {
            break;
        }
        precisions[n] = if stats.counts[n] == 0 {
            smooth *= 2.0;
            100.0 / (smooth * stats.totals[n] as f64)
        } else {
            100.0 * stats.counts[n] as f64 / stats.totals[n] as f64
        };
    }
    let log_sum: f64 = precisions.iter().map(|p| floored_log(*p)).sum();
    report(combine(bp, log_sum), precisions)
}

fn prepare(line: &str, form: Option<NormForm>) -> String {
    let line = match form {
        Some(f) => f.apply(line),
        None => line.to_string(),
    };
    tokenize_13a_string(line.trim_end_matches(is_py_space))
}

/// Corpus BLEU of `hyps` against one reference each, with optional Unicode
/// normalization of either side before tokenization.
pub fn bleu<H: AsRef<str>, R: AsRef<str>>(
    hyps: &[H],
    refs: &[R],
    normalize_ref: Option<NormForm>,
    normalize_hyp: Option<NormForm>,
) -> Result<BleuReport, BleuError> {
    if hyps.len() != refs.len() {
        return Err(BleuError::LengthMismatch { hyps: hyps.len(), refs: refs.len() });
    }
    if hyps.is_empty() {
        return Err(BleuError::Empty);
    }
    let mut total = BleuStats::default();
    for (h, r) in hyps.iter().zip(refs) {
        total += segment_stats(&prepare(h.as_ref(), normalize_hyp), &prepare(r.as_ref(), normalize_ref));
    }
    Ok(score_from_stats(&total))
}

impl BleuReport {
    pub fn ratio(&self) -> f64 {
        if self.ref_len == 0 {
            0.0
        } else {
            self.sys_len as f64 / self.ref_len as f64
        }
    }

    /// Recomputes the score from the stored precisions and brevity penalty.
    pub fn recompute(&self) -> f64 {
        if self.counts.iter().all(|c| *c == 0) {
            return 0.0;
        }
        let log_sum: f64 = self.precisions.iter().map(|p| floored_log(*p)).sum();
        combine(self.bp, log_sum)
    }

    pub fn to_json(&self) -> String {
        let p: Vec<String> = self.precisions.iter().map(|x| format!("{x}")).collect();
        let c: Vec<String> = self.counts.iter().map(usize::to_string).collect();
        let t: Vec<String> = self.totals.iter().map(usize::to_string).collect();
        format!(
            "{{\"name\": \"BLEU\", \"score\": {:.2}, \"score_raw\": {}, \"signature\": \"{}\", \"precisions\": [{}], \"bp\": {}, \"ratio\": {}, \"sys_len\": {}, \"ref_len\": {}, \"counts\": [{}], \"totals\": [{}]}}",
            self.score,
            self.score,
            self.signature,
            p.join(", "),
            self.bp,
            self.ratio(),
            self.sys_len,
            self.ref_len,
            c.join(", "),
            t.join(", "),
        )
    }
}

impl fmt::Display for BleuReport {
    /// SacreBLEU's one-line format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec: Vec<String> = self.precisions.iter().map(|p| format!("{p:.1}")).collect();
        write!(
            f,
            "BLEU = {:.2} {} (BP = {:.3} ratio = {:.3} hyp_len = {} ref_len = {})",
            self.score,
            prec.join("/"),
            self.bp,
            self.ratio(),
            self.sys_len,
            self.ref_len
        )
    }
}
