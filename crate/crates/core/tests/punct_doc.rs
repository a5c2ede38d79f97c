use livmt_core::corpus::normalize_punct;
use livmt_core::corpus::punct::PUNCT_MAP;

#[test]
fn published_table_matches_code() {
    let doc = include_str!("../../../docs/punct-mapping.md");
    let rows: Vec<(char, String)> = doc
        .lines()
        .filter(|l| l.starts_with("| U+"))
        .map(|l| {
            let cells: Vec<&str> = l.trim_matches('|').split('|').map(str::trim).collect();
            let c = char::from_u32(u32::from_str_radix(&cells[0][2..], 16).unwrap()).unwrap();
            let to = if cells[2] == "space" { " ".to_string() } else { cells[2].trim_matches('`').to_string() };
            (c, to)
        })
        .collect();
    let code: Vec<(char, String)> = PUNCT_MAP.iter().map(|(c, s)| (*c, s.to_string())).collect();
    assert_eq!(rows, code);
}

#[test]
fn mapping_examples() {
    assert_eq!(normalize_punct("\u{201E}Tere\u{201C} \u{2014} ütles ta\u{2026}"), "\"Tere\" - ütles ta...");
    assert_eq!(normalize_punct("a\u{00A0}\u{00A0}b\u{200B}c "), "a bc");
}
