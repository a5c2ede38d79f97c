//! The mteval-v13a tokenizer as implemented by SacreBLEU.

use std::sync::OnceLock;

use regex::Regex;

struct Rules {
    symbols: Regex,
    period_comma_after_nondigit: Regex,
    period_comma_before_nondigit: Regex,
    dash_after_digit: Regex,
}

fn rules() -> &'static Rules {
    static RULES: OnceLock<Rules> = OnceLock::new();
    RULES.get_or_init(|| Rules {
        symbols: Regex::new(r"([\{-~\[-` -&\(-\+:-@/])").unwrap(),
        period_comma_after_nondigit: Regex::new(r"([^0-9])([\.,])").unwrap(),
        period_comma_before_nondigit: Regex::new(r"([\.,])([^0-9])").unwrap(),
        dash_after_digit: Regex::new(r"([0-9])(-)").unwrap(),
    })
}

/// Whitespace as understood by Python's `str.split()` / `str.isspace()`.
pub fn is_py_space(c: char) -> bool {
    c.is_whitespace() || ('\u{1C}'..='\u{1F}').contains(&c)
}

/// Python's `str.split()` with no arguments.
pub fn py_split(s: &str) -> impl Iterator<Item = &str> {
    s.split(is_py_space).filter(|t| !t.is_empty())
}

/// Tokenizes one segment and joins tokens with single spaces.
pub fn tokenize_13a_string(line: &str) -> String {
    let mut line = line.replace("<skipped>", "").replace("-\n", "").replace('\n', " ");
    if line.contains('&') {
        line = line.replace("&quot;", "\"").replace("&amp;", "&").replace("&lt;", "<").replace("&gt;", ">");
    }
    let r = rules();
    let padded = format!(" {line} ");
    let s = r.symbols.replace_all(&padded, " ${1} ");
    let s = r.period_comma_after_nondigit.replace_all(&s, "${1} ${2} ");
    let s = r.period_comma_before_nondigit.replace_all(&s, " ${1} ${2}");
    let s = r.dash_after_digit.replace_all(&s, "${1} ${2} ");
    py_split(&s).collect::<Vec<_>>().join(" ")
}

pub fn tokenize_13a(line: &str) -> Vec<String> {
    py_split(&tokenize_13a_string(line)).map(String::from).collect()
}
