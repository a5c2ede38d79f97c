//! Unicode normalization and auditing of inconsistent encodings.
//!
//! The audit groups extended grapheme clusters by their NFC form and reports
//! every cluster that occurs under two or more distinct byte sequences, for
//! instance precomposed `ā` (U+0101) next to `a` + U+0304.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use unicode_normalization::{is_nfc, is_nfd, is_nfkc, is_nfkd, UnicodeNormalization};
use unicode_segmentation::UnicodeSegmentation;

/// Line numbers kept per observed encoding.
pub const MAX_SAMPLE_LINES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NormForm {
    Nfc,
    Nfd,
    Nfkc,
    Nfkd,
}

impl NormForm {
    pub const ALL: [NormForm; 4] = [NormForm::Nfc, NormForm::Nfd, NormForm::Nfkc, NormForm::Nfkd];

    pub fn name(&self) -> &'static str {
        match self {
            NormForm::Nfc => "NFC",
            NormForm::Nfd => "NFD",
            NormForm::Nfkc => "NFKC",
            NormForm::Nfkd => "NFKD",
        }
    }

    pub fn apply(&self, s: &str) -> String {
        match self {
            NormForm::Nfc => s.nfc().collect(),
            NormForm::Nfd => s.nfd().collect(),
            NormForm::Nfkc => s.nfkc().collect(),
            NormForm::Nfkd => s.nfkd().collect(),
        }
    }

    pub fn is_normalized(&self, s: &str) -> bool {
        match self {
            NormForm::Nfc => is_nfc(s),
            NormForm::Nfd => is_nfd(s),
            NormForm::Nfkc => is_nfkc(s),
            NormForm::Nfkd => is_nfkd(s),
        }
    }
}

impl fmt::Display for NormForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NormForm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NormForm::ALL
            .iter()
            .copied()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown normalization form {s:?} (expected nfc, nfd, nfkc or nfkd)"))
    }
}

pub fn normalize_corpus<S: AsRef<str>>(lines: &[S], form: NormForm) -> Vec<String> {
    lines.iter().map(|l| form.apply(l.as_ref())).collect()
}

/// One byte sequence observed for a cluster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoding {
    pub text: String,
    pub count: usize,
    /// First [`MAX_SAMPLE_LINES`] 1-based line numbers.
    pub lines: Vec<usize>,
}

impl Encoding {
    /// Space-separated code points, e.g. `U+0061 U+0304`.
    pub fn code_points(&self) -> String {
        self.text.chars().map(|c| format!("U+{:04X}", c as u32)).collect::<Vec<_>>().join(" ")
    }

    /// UTF-8 bytes in hex, e.g. `61cc84`.
    pub fn hex(&self) -> String {
        self.text.bytes().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InconsistentCluster {
    /// NFC form of the cluster.
    pub cluster: String,
    /// Ordered by first occurrence.
    pub encodings: Vec<Encoding>,
}

impl InconsistentCluster {
    pub fn first_line(&self) -> usize {
        self.encodings.iter().filter_map(|e| e.lines.first()).min().copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnicodeAuditReport {
    pub total_lines: usize,
    /// Lines already in each form.
    pub form_counts: BTreeMap<NormForm, usize>,
    pub clusters: Vec<InconsistentCluster>,
}

pub fn audit_unicode<S: AsRef<str>>(lines: &[S]) -> UnicodeAuditReport {
    let mut form_counts: BTreeMap<NormForm, usize> = NormForm::ALL.iter().map(|f| (*f, 0)).collect();
    // NFC key -> raw encoding -> observation
    let mut seen: BTreeMap<String, BTreeMap<String, Encoding>> = BTreeMap::new();

    for (i, line) in lines.iter().enumerate() {
        let line = line.as_ref();
        let line_no = i + 1;
        for form in NormForm::ALL {
            if form.is_normalized(line) {
                *form_counts.get_mut(&form).unwrap() += 1;
            }
        }
        for g in line.graphemes(true).filter(|g| !g.is_ascii()) {
            let key: String = g.nfc().collect();
            let enc = seen.entry(key).or_default().entry(g.to_string()).or_insert_with(|| Encoding {
                text: g.to_string(),
                count: 0,
                lines: Vec::new(),
            });
            enc.count += 1;
            if enc.lines.last() != Some(&line_no) && enc.lines.len() < MAX_SAMPLE_LINES {
                enc.lines.push(line_no);
            }
        }
    }

    let mut clusters: Vec<InconsistentCluster> = seen
        .into_iter()
        .filter(|(_, encs)| encs.len() >= 2)
        .map(|(cluster, encs)| {
            let mut encodings: Vec<Encoding> = encs.into_values().collect();
            encodings.sort_by(|a, b| a.lines.first().cmp(&b.lines.first()).then_with(|| a.text.cmp(&b.text)));
            InconsistentCluster { cluster, encodings }
        })
        .collect();
    // String order on the NFC key is code point order.
    clusters.sort_by(|a, b| a.cluster.cmp(&b.cluster).then(a.first_line().cmp(&b.first_line())));

    UnicodeAuditReport { total_lines: lines.len(), form_counts, clusters }
}

impl UnicodeAuditReport {
    /// One row per (cluster, encoding): cluster, encoding hex, count, sample lines.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("cluster\tencoding_hex\tcount\tsample_lines\n");
        for c in &self.clusters {
            for e in &c.encodings {
                let lines: Vec<String> = e.lines.iter().map(usize::to_string).collect();
                out.push_str(&format!("{}\t{}\t{}\t{}\n", c.cluster, e.hex(), e.count, lines.join(",")));
            }
        }
        out
    }
}

impl fmt::Display for UnicodeAuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lines: {}", self.total_lines)?;
        for (form, n) in &self.form_counts {
            writeln!(f, "already {form:<4}: {n}")?;
        }
        writeln!(f, "inconsistent clusters: {}", self.clusters.len())?;
        for c in &self.clusters {
            writeln!(f, "  {} ({} encodings)", c.cluster, c.encodings.len())?;
            for e in &c.encodings {
                let lines: Vec<String> = e.lines.iter().map(usize::to_string).collect();
                writeln!(f, "    {:<28} x{:<6} lines {}", e.code_points(), e.count, lines.join(","))?;
            }
        }
        Ok(())
    }
}
