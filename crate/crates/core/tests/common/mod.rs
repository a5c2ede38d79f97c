//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code, clippy::needless_range_loop)]

use livmt_core::matrix::DenseMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

/// Triple-loop product over plain nested vectors.
pub fn naive_matmul(a: &DenseMatrix, b: &DenseMatrix) -> Vec<Vec<f64>> {
    assert_eq!(a.cols(), b.rows());
    let mut out = vec![vec![0.0; b.cols()]; a.rows()];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            for k in 0..a.cols() {
                *cell += a.get(i, k) * b.get(k, j);
            }
        }
    }
    out
}

pub fn naive_mul_vec(a: &DenseMatrix, v: &[f64]) -> Vec<f64> {
    (0..a.rows()).map(|i| (0..a.cols()).map(|k| a.get(i, k) * v[k]).sum()).collect()
}

/// Eigenvalues of a symmetric matrix by classical two-sided Jacobi rotations, descending.
pub fn symmetric_eigenvalues(s: &[Vec<f64>]) -> Vec<f64> {
    let n = s.len();
    let mut a = s.to_vec();
    for _ in 0..200 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(1e-300);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - sn * akq;
                    a[k][q] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - sn * aqk;
                    a[q][k] = sn * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.partial_cmp(x).unwrap());
    ev
}

/// `a^T a` as nested vectors.
pub fn gram(a: &DenseMatrix) -> Vec<Vec<f64>> {
    naive_matmul(&a.transpose(), a)
}

/// `rows x cols` matrix with orthonormal columns, by modified Gram-Schmidt on a random matrix.
pub fn random_orthonormal(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
    assert!(rows >= cols);
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(cols);
    while q.len() < cols {
        let mut v: Vec<f64> = (0..rows).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for _ in 0..2 {
            for u in &q {
                let d: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(u).for_each(|(a, b)| *a -= d * b);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            q.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    DenseMatrix::from_fn(rows, cols, |i, j| q[j][i])
}

pub fn frob_diff(a: &DenseMatrix, b: &[Vec<f64>]) -> f64 {
    let mut s = 0.0;
    for (i, row) in b.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            s += (a.get(i, j) - v).powi(2);
        }
    }
    s.sqrt()
}

/// Corpus BLEU over whitespace-tokenized text, written out longhand: clipped
/// counts, exp smoothing for zero-match orders, brevity penalty.
pub fn hand_bleu(hyps: &[&str], refs: &[&str]) -> f64 {
    let mut matches = [0usize; 4];
    let mut totals = [0usize; 4];
    let (mut hyp_len, mut ref_len) = (0usize, 0usize);
    for (h, r) in hyps.iter().zip(refs) {
        let h: Vec<&str> = h.split_whitespace().collect();
        let r: Vec<&str> = r.split_whitespace().collect();
        hyp_len += h.len();
        ref_len += r.len();
        for n in 1..=4 {
            if h.len() < n {
                continue;
            }
            let hg: Vec<&[&str]> = h.windows(n).collect();
            let mut rg: Vec<&[&str]> = if r.len() >= n { r.windows(n).collect() } else { Vec::new() };
            totals[n - 1] += hg.len();
            for g in hg {
                if let Some(pos) = rg.iter().position(|x| *x == g) {
                    rg.remove(pos);
                    matches[n - 1] += 1;
                }
            }
        }
    }
    if matches.iter().all(|m| *m == 0) {
        return 0.0;
    }
    let mut k = 0;
    let mut log_sum = 0.0;
    for n in 0..4 {
        if totals[n] == 0 {
            // an order with no hypothesis n-grams zeroes the score
            return 0.0;
        }
        let p = if matches[n] == 0 {
            k += 1;
            100.0 / (2f64.powi(k) * totals[n] as f64)
        } else {
            100.0 * matches[n] as f64 / totals[n] as f64
        };
        log_sum += p.ln();
    }
    let bp = if hyp_len < ref_len { (1.0 - ref_len as f64 / hyp_len as f64).exp() } else { 1.0 };
    (bp * (log_sum / 4.0).exp()).min(100.0)
}
