use std::path::{Path, PathBuf};

use livmt_core::corpus::{build_eval_index, parse_clean_config, read_bitext_pair, run_pipeline, FilterKind, Lang};

fn golden() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/golden")
}

#[test]
fn golden_corpus_rejections() {
    let dir = golden();
    let cfg = parse_clean_config(&std::fs::read_to_string(dir.join("clean.conf")).unwrap(), &dir).unwrap();
    let lang_id = cfg.build_lang_id().unwrap();
    let idx = build_eval_index(&[dir.join("eval.et")]).unwrap();
    let pairs = read_bitext_pair(&dir.join("train.en"), &dir.join("train.et")).unwrap();
    let expected = [
        None,
        None,
        None,
        None,
        Some(FilterKind::Encoding),
        Some(FilterKind::LangId),
        Some(FilterKind::Punctuation),
        Some(FilterKind::Identical),
        Some(FilterKind::Url),
        Some(FilterKind::EvalOverlap),
        Some(FilterKind::Length),
        Some(FilterKind::LengthRatio),
    ];
    for jobs in [1, 2, 4, 8] {
        let got = run_pipeline(&pairs, &Lang::new("en"), &Lang::new("et"), &cfg.filter, &idx, lang_id.as_ref(), jobs);
        let kinds: Vec<_> = got.iter().map(|d| d.rejecting_filter).collect();
        assert_eq!(kinds, expected, "jobs={jobs}");
        assert_eq!(got.iter().filter(|d| d.kept).count(), 4);
    }
}
