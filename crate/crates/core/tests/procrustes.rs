mod common;

use common::*;
use livmt_core::cmea::{
    align, build_anchors, orthogonality_defect, procrustes_solve, residual, transform_and_merge, AlignError,
    AlignOptions,
};
use livmt_core::embed::{EmbeddingTable, Vocabulary};
use livmt_core::matrix::{frobenius_norm, matmul, DenseMatrix};

fn table(tokens: &[String], vectors: DenseMatrix) -> EmbeddingTable {
    EmbeddingTable::new(Vocabulary::new(tokens.iter().cloned()).unwrap(), vectors).unwrap()
}

fn toks(prefix: &str, range: std::ops::Range<usize>) -> Vec<String> {
    range.map(|i| format!("{prefix}{i}")).collect()
}

#[test]
fn recovers_planted_rotation() {
    let mut r = rng(31);
    let rot = random_orthonormal(&mut r, 8, 8);
    let a_l = random_matrix(&mut r, 8, 32);
    let a_m = matmul(&rot, &a_l).unwrap();
    let sol = procrustes_solve(&a_l, &a_m).unwrap();
    assert!(frobenius_norm(&sol.w.sub(&rot).unwrap()) < 1e-8);
    assert!(orthogonality_defect(&sol.w) < 1e-9);
}

#[test]
fn rectangular_map_is_semi_orthogonal() {
    let mut r = rng(32);
    let q = random_orthonormal(&mut r, 12, 5);
    let a_l = random_matrix(&mut r, 5, 40);
    let a_m = matmul(&q, &a_l).unwrap();
    let sol = procrustes_solve(&a_l, &a_m).unwrap();
    assert_eq!(sol.w.shape(), (12, 5));
    assert!(orthogonality_defect(&sol.w) < 1e-9);
    assert!(frobenius_norm(&sol.w.sub(&q).unwrap()) < 1e-8);
}

#[test]
fn transplanted_vectors_match_naive_product() {
    // d_l: 12 tokens, 8 shared with d_m, 4 only in d_l
    let mut r = rng(33);
    let l_tokens = toks("t", 0..12);
    let m_tokens: Vec<String> = toks("t", 4..12).into_iter().chain(toks("m", 0..5)).collect();
    let tl = table(&l_tokens, random_matrix(&mut r, 12, 6));
    let tm = table(&m_tokens, random_matrix(&mut r, 13, 6));
    let anchors = build_anchors(&tl, &tm).unwrap();
    assert_eq!(anchors.tokens, toks("t", 4..12));
    let w = procrustes_solve(&anchors.l, &anchors.m).unwrap().w;
    let (merged, report) = transform_and_merge(&tl, &tm, &w).unwrap();
    assert_eq!(report.overlap_count, 8);
    assert_eq!(report.l_only_count, 4);
    for tok in &l_tokens[..4] {
        let want = naive_mul_vec(&w, tl.vector(tok).unwrap());
        let got = merged.vector(tok).unwrap();
        assert!(got.iter().zip(&want).all(|(a, b)| (a - b).abs() < 1e-12), "{tok}");
    }
    for tok in &l_tokens[4..] {
        assert_eq!(merged.vector(tok).unwrap(), tm.vector(tok).unwrap());
    }
}

#[test]
fn anchors_follow_brute_force_lookup() {
    let mut r = rng(34);
    let l_tokens = toks("w", 0..30);
    let m_tokens: Vec<String> = toks("w", 10..40).into_iter().rev().collect();
    let tl = table(&l_tokens, random_matrix(&mut r, 30, 4));
    let tm = table(&m_tokens, random_matrix(&mut r, 30, 5));
    let a = build_anchors(&tl, &tm).unwrap();
    assert_eq!(a.l.shape(), (4, 20));
    assert_eq!(a.m.shape(), (5, 20));
    for (j, tok) in a.tokens.iter().enumerate() {
        let li = l_tokens.iter().position(|t| t == tok).unwrap();
        let mi = m_tokens.iter().position(|t| t == tok).unwrap();
        assert_eq!(a.l.column(j), tl.vectors().row(li));
        assert_eq!(a.m.column(j), tm.vectors().row(mi));
    }
}

#[test]
fn align_end_to_end_with_planted_rotation() {
    let mut r = rng(35);
    let d = 10;
    let rot = random_orthonormal(&mut r, d, d);
    let l_tokens = toks("x", 0..60);
    let vl = random_matrix(&mut r, 60, d);
    // overlap x0..x39 gets R v in the second model
    let m_tokens = toks("x", 0..40);
    let vm = DenseMatrix::from_fn(40, d, |i, k| (0..d).map(|c| rot.get(k, c) * vl.get(i, c)).sum());
    let tl = table(&l_tokens, vl);
    let tm = table(&m_tokens, vm);
    let (merged, report) = align(&tl, &tm, &AlignOptions::default()).unwrap();
    assert!(report.residual_after < 1e-9);
    assert!(!report.degenerate);
    for tok in &l_tokens[40..] {
        let want = naive_mul_vec(&rot, tl.vector(tok).unwrap());
        let got = merged.vector(tok).unwrap();
        assert!(got.iter().zip(&want).all(|(a, b)| (a - b).abs() < 1e-7));
    }
    assert!(merged.vectors().data().iter().all(|x| x.is_finite()));
}

#[test]
fn excluding_every_anchor_is_an_error() {
    let mut r = rng(36);
    let t = toks("a", 0..3);
    let tl = table(&t, random_matrix(&mut r, 3, 2));
    let tm = table(&t, random_matrix(&mut r, 3, 2));
    let opts = AlignOptions { exclude: t.clone(), ..Default::default() };
    assert!(matches!(align(&tl, &tm, &opts), Err(AlignError::EmptyOverlap)));
}

#[test]
fn beats_random_semi_orthogonal_maps() {
    let mut r = rng(37);
    for trial in 0..5 {
        let (dl, dm, n) = (6 + trial, 8 + trial, 30);
        let a_l = random_matrix(&mut r, dl, n);
        let a_m = random_matrix(&mut r, dm, n);
        let w = procrustes_solve(&a_l, &a_m).unwrap().w;
        let best = residual(&w, &a_l, &a_m).unwrap();
        for _ in 0..100 {
            let challenger = random_orthonormal(&mut r, dm, dl);
            assert!(best <= residual(&challenger, &a_l, &a_m).unwrap() + 1e-9);
        }
    }
}

#[test]
fn scaling_anchors_leaves_solution_unchanged() {
    let mut r = rng(38);
    let a_l = random_matrix(&mut r, 7, 25);
    let a_m = random_matrix(&mut r, 9, 25);
    let w = procrustes_solve(&a_l, &a_m).unwrap().w;
    for c in [0.5, 2.0, 10.0] {
        let wc = procrustes_solve(&a_l.scale(c), &a_m).unwrap().w;
        assert!(frobenius_norm(&w.sub(&wc).unwrap()) < 1e-9, "c={c}");
    }
}
