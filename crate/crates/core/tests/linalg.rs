mod common;

use common::*;
use livmt_core::matrix::{matmul, svd, DenseMatrix};
use proptest::prelude::*;

fn orthonormality_defect(q: &DenseMatrix) -> f64 {
    let g = gram(q);
    let mut s = 0.0;
    for (i, row) in g.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let e = if i == j { 1.0 } else { 0.0 };
            s += (v - e).powi(2);
        }
    }
    s.sqrt()
}

#[test]
fn matmul_matches_triple_loop() {
    let mut r = rng(7);
    let a = random_matrix(&mut r, 5, 3);
    let b = random_matrix(&mut r, 3, 4);
    let c = matmul(&a, &b).unwrap();
    assert_eq!(c.shape(), (5, 4));
    assert!(frob_diff(&c, &naive_matmul(&a, &b)) < 1e-12);
}

#[test]
fn svd_tall_50_by_30() {
    let mut r = rng(11);
    let a = random_matrix(&mut r, 50, 30);
    let s = svd(&a).unwrap();
    assert_eq!(s.u.shape(), (50, 30));
    assert_eq!(s.vt.shape(), (30, 30));
    assert!(a.max_abs_diff(&s.reconstruct()).unwrap() < 1e-10);
    assert!(orthonormality_defect(&s.u) < 1e-10);
    assert!(orthonormality_defect(&s.vt.transpose()) < 1e-10);
    let ev = symmetric_eigenvalues(&gram(&a));
    for (sig, lam) in s.sigma.iter().zip(&ev) {
        assert!((sig * sig - lam).abs() < 1e-9 * ev[0].max(1.0), "{sig} vs {lam}");
    }
}

#[test]
fn svd_of_wide_matrix() {
    let mut r = rng(12);
    let a = random_matrix(&mut r, 6, 17);
    let s = svd(&a).unwrap();
    assert_eq!(s.sigma.len(), 6);
    assert!(a.max_abs_diff(&s.reconstruct()).unwrap() < 1e-10);
}

#[test]
fn svd_of_rank_deficient_matrix() {
    let mut r = rng(13);
    let b = random_matrix(&mut r, 10, 2);
    let c = random_matrix(&mut r, 2, 6);
    let a = matmul(&b, &c).unwrap();
    let s = svd(&a).unwrap();
    assert!(s.sigma[2..].iter().all(|x| x.abs() < 1e-10));
    assert!(orthonormality_defect(&s.u) < 1e-9);
    assert!(a.max_abs_diff(&s.reconstruct()).unwrap() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn svd_invariants(rows in 1usize..12, cols in 1usize..12, seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, rows, cols);
        let s = svd(&a).unwrap();
        prop_assert!(a.max_abs_diff(&s.reconstruct()).unwrap() < 1e-10);
        prop_assert!(s.sigma.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(s.sigma.iter().all(|x| *x >= 0.0));
        prop_assert!(orthonormality_defect(&s.u) < 1e-9);
        prop_assert!(orthonormality_defect(&s.vt.transpose()) < 1e-9);
        for j in 0..s.u.cols() {
            let col = s.u.column(j);
            let big = col.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            prop_assert!(big >= 0.0);
        }
    }
}
