//! Punctuation normalization modeled on the Moses `replace-unicode-punctuation`
//! and `normalize-punctuation` scripts, reduced to a context-free character table.
//!
//! Steps, in order:
//! 1. drop non-printing characters (category Cc except TAB, and Cf);
//! 2. map each character through [`PUNCT_MAP`];
//! 3. collapse runs of spaces to one space and trim.

use unicode_general_category::{get_general_category, GeneralCategory};

/// Character replacements applied by [`normalize_punct`]. Also published in `docs/punct-mapping.md`.
pub const PUNCT_MAP: &[(char, &str)] = &[
    // double quotes
    ('\u{201C}', "\""), // “
    ('\u{201D}', "\""), // ”
    ('\u{201E}', "\""), // „
    ('\u{201F}', "\""), // ‟
    ('\u{00AB}', "\""), // «
    ('\u{00BB}', "\""), // »
    ('\u{300A}', "\""), // 《
    ('\u{300B}', "\""), // 》
    ('\u{300C}', "\""), // 「
    ('\u{300D}', "\""), // 」
    // single quotes and accents used as apostrophes
    ('\u{2018}', "'"), // ‘
    ('\u{2019}', "'"), // ’
    ('\u{201A}', "'"), // ‚
    ('\u{201B}', "'"), // ‛
    ('\u{00B4}', "'"), // ´
    // dashes
    ('\u{2010}', "-"), // hyphen
    ('\u{2011}', "-"), // non-breaking hyphen
    ('\u{2012}', "-"), // figure dash
    ('\u{2013}', "-"), // en dash
    ('\u{2014}', "-"), // em dash
    ('\u{2015}', "-"), // horizontal bar
    ('\u{2212}', "-"), // minus sign
    ('\u{2501}', "-"), // ━
    // ellipsis
    ('\u{2026}', "..."),
    // full-width and CJK punctuation
    ('\u{FF0C}', ","),
    ('\u{3001}', ","),
    ('\u{3002}', "."),
    ('\u{FF0E}', "."),
    ('\u{FF1A}', ":"),
    ('\u{2236}', ":"),
    ('\u{FF1B}', ";"),
    ('\u{FF1F}', "?"),
    ('\u{FF01}', "!"),
    ('\u{FF08}', "("),
    ('\u{FF09}', ")"),
    ('\u{3010}', "["),
    ('\u{3011}', "]"),
    ('\u{3008}', "<"),
    ('\u{3009}', ">"),
    ('\u{FF05}', "%"),
    ('\u{FF5E}', "~"),
    ('\u{FF10}', "0"),
    ('\u{FF11}', "1"),
    ('\u{FF12}', "2"),
    ('\u{FF13}', "3"),
    ('\u{FF14}', "4"),
    ('\u{FF15}', "5"),
    ('\u{FF16}', "6"),
    ('\u{FF17}', "7"),
    ('\u{FF18}', "8"),
    ('\u{FF19}', "9"),
    // spaces
    ('\u{00A0}', " "),
    ('\u{2000}', " "),
    ('\u{2001}', " "),
    ('\u{2002}', " "),
    ('\u{2003}', " "),
    ('\u{2004}', " "),
    ('\u{2005}', " "),
    ('\u{2006}', " "),
    ('\u{2007}', " "),
    ('\u{2008}', " "),
    ('\u{2009}', " "),
    ('\u{200A}', " "),
    ('\u{202F}', " "),
    ('\u{205F}', " "),
    ('\u{3000}', " "),
];

fn lookup(c: char) -> Option<&'static str> {
    PUNCT_MAP.iter().find(|(from, _)| *from == c).map(|(_, to)| *to)
}

pub fn is_non_printing(c: char) -> bool {
    match get_general_category(c) {
        GeneralCategory::Control => c != '\t',
        GeneralCategory::Format => true,
        _ => false,
    }
}

/// Unicode general category P* (connector, dash, open, close, initial, final, other).
pub fn is_punctuation(c: char) -> bool {
    matches!(
        get_general_category(c),
        GeneralCategory::ConnectorPunctuation
            | GeneralCategory::DashPunctuation
            | GeneralCategory::OpenPunctuation
            | GeneralCategory::ClosePunctuation
            | GeneralCategory::InitialPunctuation
            | GeneralCategory::FinalPunctuation
            | GeneralCategory::OtherPunctuation
    )
}

pub fn normalize_punct(line: &str) -> String {
    let mut mapped = String::with_capacity(line.len());
    for c in line.chars().filter(|c| !is_non_printing(*c)) {
        match lookup(c) {
            Some(rep) => mapped.push_str(rep),
            None => mapped.push(c),
        }
    }
    let mut out = String::with_capacity(mapped.len());
    let mut prev_space = false;
    for c in mapped.chars() {
        if c == ' ' {
            if !prev_space {
                out.push(c);
            }
            prev_space = true;
        } else {
            out.push(c);
            prev_space = false;
        }
    }
    out.trim().to_string()
}
