//! Cross-model embedding alignment.
//!
//! Given a small model's table (`l`) and a large model's table (`m`), the
//! shared tokens serve as anchors for a semi-orthogonal map `W` (D_m x D_l)
//! minimizing `||W A_l - A_m||_F`. The merged table keeps the `l` vocabulary:
//! shared tokens copy their `m` vectors verbatim and the remaining tokens
//! receive `W v`. Word vectors are columns of the anchor matrices.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::embed::{vocab_partition, EmbedError, EmbeddingTable, Vocabulary};
use crate::matrix::{frobenius_norm, matmul, svd, DenseMatrix, MatrixError};

/// Smallest singular value of the cross-covariance below which the solve is flagged as degenerate.
pub const DEGENERATE_SIGMA: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum AlignError {
    #[error("no shared anchor tokens between the two vocabularies (after exclusions); check that both tables use the same subword vocabulary")]
    EmptyOverlap,
    #[error("target dimension {d_m} is smaller than source dimension {d_l}; a map with W^T W = I needs D_m >= D_l")]
    Dimensionality { d_l: usize, d_m: usize },
    #[error("anchor matrices disagree on anchor count: {l} vs {m}")]
    AnchorCount { l: usize, m: usize },
    #[error("transform is {rows}x{cols} but tables need {d_m}x{d_l}")]
    TransformShape { rows: usize, cols: usize, d_m: usize, d_l: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
}

/// Anchor matrices for the shared tokens, one column per token in `d_l` order.
#[derive(Debug, Clone)]
pub struct Anchors {
    pub tokens: Vec<String>,
    /// D_l x n
    pub l: DenseMatrix,
    /// D_m x n
    pub m: DenseMatrix,
}

#[derive(Debug, Clone, Default)]
pub struct AlignOptions {
    /// Shared tokens kept out of the anchor set. They still appear in the output.
    pub exclude: Vec<String>,
    /// Scale every anchor column to unit length before solving.
    pub normalize_anchors: bool,
}

/// Result of a Procrustes solve.
#[derive(Debug, Clone)]
pub struct Solution {
    /// D_m x D_l with orthonormal columns.
    pub w: DenseMatrix,
    /// Singular values of `A_m A_l^T`.
    pub sigma: Vec<f64>,
}

impl Solution {
    pub fn sigma_min(&self) -> f64 {
        self.sigma.last().copied().unwrap_or(0.0)
    }

    pub fn is_degenerate(&self) -> bool {
        self.sigma_min() < DEGENERATE_SIGMA
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentReport {
    pub overlap_count: usize,
    pub l_only_count: usize,
    pub anchor_count: usize,
    pub dim_l: usize,
    pub dim_m: usize,
    /// `||A_l - A_m||_F`, only defined when both tables share a dimension.
    pub residual_before: Option<f64>,
    /// `||W A_l - A_m||_F`
    pub residual_after: f64,
    /// `||W^T W - I||_F`
    pub orthogonality_defect: f64,
    pub sigma_min: f64,
    pub degenerate: bool,
}

impl AlignmentReport {
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("field\tvalue\n");
        for (k, v) in self.fields() {
            s.push_str(&format!("{k}\t{v}\n"));
        }
        s
    }

    fn fields(&self) -> Vec<(&'static str, String)> {
        vec![
            ("overlap_count", self.overlap_count.to_string()),
            ("l_only_count", self.l_only_count.to_string()),
            ("anchor_count", self.anchor_count.to_string()),
            ("dim_l", self.dim_l.to_string()),
            ("dim_m", self.dim_m.to_string()),
            ("residual_before", self.residual_before.map_or_else(|| "NA".to_string(), |r| format!("{r:.6e}"))),
            ("residual_after", format!("{:.6e}", self.residual_after)),
            ("orthogonality_defect", format!("{:.6e}", self.orthogonality_defect)),
            ("sigma_min", format!("{:.6e}", self.sigma_min)),
            ("degenerate", self.degenerate.to_string()),
        ]
    }
}

impl fmt::Display for AlignmentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.fields() {
            writeln!(f, "{k:<22} {v}")?;
        }
        if self.degenerate {
            writeln!(f, "warning: cross-covariance is rank deficient (sigma_min < {DEGENERATE_SIGMA:e})")?;
        }
        Ok(())
    }
}

pub fn build_anchors(table_l: &EmbeddingTable, table_m: &EmbeddingTable) -> Result<Anchors, AlignError> {
    build_anchors_excluding(table_l, table_m, &HashSet::new())
}

fn build_anchors_excluding(
    table_l: &EmbeddingTable,
    table_m: &EmbeddingTable,
    exclude: &HashSet<&str>,
) -> Result<Anchors, AlignError> {
    let tokens: Vec<String> = vocab_partition(table_l.vocab(), table_m.vocab())
        .overlap
        .into_iter()
        .filter(|t| !exclude.contains(t.as_str()))
        .collect();
    if tokens.is_empty() {
        return Err(AlignError::EmptyOverlap);
    }
    let l = columns_of(table_l, &tokens);
    let m = columns_of(table_m, &tokens);
    Ok(Anchors { tokens, l, m })
}

/// Stacks the vectors of `tokens` as columns: dim x tokens.len().
fn columns_of(table: &EmbeddingTable, tokens: &[String]) -> DenseMatrix {
    let rows: Vec<&[f64]> = tokens.iter().map(|t| table.vector(t).expect("anchor token present in table")).collect();
    DenseMatrix::from_fn(table.dim(), tokens.len(), |i, j| rows[j][i])
}

/// Semi-orthogonal Procrustes: `W = U V^T` where `U S V^T = svd(A_m A_l^T)`.
pub fn procrustes_solve(a_l: &DenseMatrix, a_m: &DenseMatrix) -> Result<Solution, AlignError> {
    if a_l.cols() != a_m.cols() {
        return Err(AlignError::AnchorCount { l: a_l.cols(), m: a_m.cols() });
    }
    let (d_l, d_m) = (a_l.rows(), a_m.rows());
    if d_m < d_l {
        return Err(AlignError::Dimensionality { d_l, d_m });
    }
    let cross = matmul(a_m, &a_l.transpose())?;
    let dec = svd(&cross)?;
    let w = matmul(&dec.u, &dec.vt)?;
    Ok(Solution { w, sigma: dec.sigma })
}

pub fn orthogonality_defect(w: &DenseMatrix) -> f64 {
    let wtw = matmul(&w.transpose(), w).expect("W^T W is always conformable");
    let eye = DenseMatrix::identity(w.cols());
    frobenius_norm(&wtw.sub(&eye).expect("square"))
}

/// Residual `||W A_l - A_m||_F` of a map on a set of anchors.
pub fn residual(w: &DenseMatrix, a_l: &DenseMatrix, a_m: &DenseMatrix) -> Result<f64, AlignError> {
    Ok(frobenius_norm(&matmul(w, a_l)?.sub(a_m)?))
}

pub fn transform_and_merge(
    table_l: &EmbeddingTable,
    table_m: &EmbeddingTable,
    w: &DenseMatrix,
) -> Result<(EmbeddingTable, AlignmentReport), AlignError> {
    let anchors = build_anchors(table_l, table_m)?;
    let sigma = svd(&matmul(&anchors.m, &anchors.l.transpose())?)?.sigma;
    merge(table_l, table_m, w, &anchors, &sigma)
}

fn merge(
    table_l: &EmbeddingTable,
    table_m: &EmbeddingTable,
    w: &DenseMatrix,
    anchors: &Anchors,
    sigma: &[f64],
) -> Result<(EmbeddingTable, AlignmentReport), AlignError> {
    let (d_l, d_m) = (table_l.dim(), table_m.dim());
    if w.shape() != (d_m, d_l) {
        return Err(AlignError::TransformShape { rows: w.rows(), cols: w.cols(), d_m, d_l });
    }
    let part = vocab_partition(table_l.vocab(), table_m.vocab());
    let mut data = Vec::with_capacity(table_l.len() * d_m);
    for token in table_l.vocab().tokens() {
        match table_m.vector(token) {
            Some(v) => data.extend_from_slice(v),
            None => {
                let v = table_l.vector(token).expect("token from own vocabulary");
                data.extend(w.mul_vec(v)?);
            }
        }
    }
    let vocab = Vocabulary::new(table_l.vocab().tokens().iter().cloned())?;
    let vectors = DenseMatrix::new(table_l.len(), d_m, data)?;
    let merged = EmbeddingTable::new(vocab, vectors)?;

    let residual_before =
        (d_l == d_m).then(|| frobenius_norm(&anchors.l.sub(&anchors.m).expect("same shape when dims agree")));
    let sigma_min = sigma.last().copied().unwrap_or(0.0);
    let report = AlignmentReport {
        overlap_count: part.overlap.len(),
        l_only_count: part.l_only.len(),
        anchor_count: anchors.tokens.len(),
        dim_l: d_l,
        dim_m: d_m,
        residual_before,
        residual_after: residual(w, &anchors.l, &anchors.m)?,
        orthogonality_defect: orthogonality_defect(w),
        sigma_min,
        degenerate: sigma_min < DEGENERATE_SIGMA,
    };
    Ok((merged, report))
}

/// Full alignment: anchors (minus exclusions), Procrustes solve, transplant.
pub fn align(
    table_l: &EmbeddingTable,
    table_m: &EmbeddingTable,
    opts: &AlignOptions,
) -> Result<(EmbeddingTable, AlignmentReport), AlignError> {
    if table_m.dim() < table_l.dim() {
        return Err(AlignError::Dimensionality { d_l: table_l.dim(), d_m: table_m.dim() });
    }
    let exclude: HashSet<&str> = opts.exclude.iter().map(String::as_str).collect();
    let mut anchors = build_anchors_excluding(table_l, table_m, &exclude)?;
    if opts.normalize_anchors {
        anchors.l = unit_columns(&anchors.l);
        anchors.m = unit_columns(&anchors.m);
    }
    let solution = procrustes_solve(&anchors.l, &anchors.m)?;
    merge(table_l, table_m, &solution.w, &anchors, &solution.sigma)
}

fn unit_columns(a: &DenseMatrix) -> DenseMatrix {
    let norms: Vec<f64> = (0..a.cols()).map(|j| a.column(j).iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    DenseMatrix::from_fn(a.rows(), a.cols(), |i, j| if norms[j] > 0.0 { a.get(i, j) / norms[j] } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(tokens: &[&str], rows: &[&[f64]]) -> EmbeddingTable {
        EmbeddingTable::new(Vocabulary::new(tokens.iter().copied()).unwrap(), DenseMatrix::from_rows(rows).unwrap())
            .unwrap()
    }

    #[test]
    fn single_token_identity_anchors() {
        let t = table(&["a"], &[&[1.0, 2.0]]);
        let a = build_anchors(&t, &t).unwrap();
        assert_eq!(a.l, a.m);
        assert_eq!(a.l.shape(), (2, 1));
    }

    #[test]
    fn anchors_follow_l_order() {
        let l = table(&["a", "b", "c"], &[&[1.0], &[2.0], &[3.0]]);
        let m = table(&["c", "a"], &[&[30.0], &[10.0]]);
        let a = build_anchors(&l, &m).unwrap();
        assert_eq!(a.tokens, vec!["a", "c"]);
        assert_eq!(a.l.row(0), &[1.0, 3.0]);
        assert_eq!(a.m.row(0), &[10.0, 30.0]);
    }

    #[test]
    fn empty_overlap_is_an_error() {
        let l = table(&["a"], &[&[1.0]]);
        let m = table(&["b"], &[&[1.0]]);
        assert!(matches!(build_anchors(&l, &m), Err(AlignError::EmptyOverlap)));
    }

    #[test]
    fn identity_recovery() {
        let a = DenseMatrix::from_rows(&[[2.0, 0.5, 1.0], [0.0, 1.0, -1.0], [1.0, 1.0, 3.0]]).unwrap();
        let s = procrustes_solve(&a, &a).unwrap();
        assert!(s.w.max_abs_diff(&DenseMatrix::identity(3)).unwrap() < 1e-9);
    }

    #[test]
    fn quarter_turn_in_the_plane() {
        let a_l = DenseMatrix::identity(2);
        let a_m = DenseMatrix::from_rows(&[[0.0, -1.0], [1.0, 0.0]]).unwrap();
        let s = procrustes_solve(&a_l, &a_m).unwrap();
        assert!(s.w.max_abs_diff(&a_m).unwrap() < 1e-12, "{:?}", s.w);
    }

    #[test]
    fn smaller_target_dimension_is_rejected() {
        let a_l = DenseMatrix::zeros(3, 4);
        let a_m = DenseMatrix::zeros(2, 4);
        assert!(matches!(procrustes_solve(&a_l, &a_m), Err(AlignError::Dimensionality { d_l: 3, d_m: 2 })));
    }

    #[test]
    fn rectangular_map_is_semi_orthogonal() {
        // D_l = 2, D_m = 3, embedding into the first two axes
        let a_l = DenseMatrix::from_rows(&[[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]]).unwrap();
        let a_m = DenseMatrix::from_rows(&[[1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [0.0, 0.0, 0.0]]).unwrap();
        let s = procrustes_solve(&a_l, &a_m).unwrap();
        assert_eq!(s.w.shape(), (3, 2));
        assert!(orthogonality_defect(&s.w) < 1e-12);
        assert!(residual(&s.w, &a_l, &a_m).unwrap() < 1e-12);
    }

    #[test]
    fn overlap_only_copies_m_vectors() {
        let l = table(&["a", "b"], &[&[1.0, 0.0], &[0.0, 1.0]]);
        let m = table(&["b", "a", "z"], &[&[5.0, 6.0], &[7.0, 8.0], &[9.0, 9.0]]);
        // deliberately wrong transform: it must never be applied
        let w = DenseMatrix::from_rows(&[[0.0, 0.0], [0.0, 0.0]]).unwrap();
        let (f, r) = transform_and_merge(&l, &m, &w).unwrap();
        assert_eq!(f.vocab().tokens(), l.vocab().tokens());
        assert_eq!(f.vector("a").unwrap(), &[7.0, 8.0]);
        assert_eq!(f.vector("b").unwrap(), &[5.0, 6.0]);
        assert_eq!(r.l_only_count, 0);
    }

    #[test]
    fn identity_transform_keeps_l_only_vector() {
        let l = table(&["a", "new"], &[&[1.0, 0.0], &[0.25, -3.0]]);
        let m = table(&["a"], &[&[1.0, 0.0]]);
        let (f, r) = transform_and_merge(&l, &m, &DenseMatrix::identity(2)).unwrap();
        assert_eq!(f.vector("new").unwrap(), &[0.25, -3.0]);
        assert_eq!((r.overlap_count, r.l_only_count), (1, 1));
        assert!(r.degenerate);
    }

    #[test]
    fn wrong_transform_shape() {
        let l = table(&["a"], &[&[1.0, 0.0]]);
        let m = table(&["a"], &[&[1.0, 0.0]]);
        assert!(matches!(
            transform_and_merge(&l, &m, &DenseMatrix::identity(3)),
            Err(AlignError::TransformShape { .. })
        ));
    }

    #[test]
    fn excluding_all_anchors_fails() {
        let l = table(&["a", "b"], &[&[1.0], &[2.0]]);
        let m = table(&["a", "b"], &[&[1.0], &[2.0]]);
        let opts = AlignOptions { exclude: vec!["a".into(), "b".into()], ..Default::default() };
        assert!(matches!(align(&l, &m, &opts), Err(AlignError::EmptyOverlap)));
    }

    #[test]
    fn excluded_tokens_stay_in_output() {
        let l = table(&["<tag>", "a", "b"], &[&[9.0, 9.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let m = table(&["<tag>", "a", "b"], &[&[-1.0, -1.0], &[0.0, 1.0], &[-1.0, 0.0]]);
        let opts = AlignOptions { exclude: vec!["<tag>".into()], ..Default::default() };
        let (f, r) = align(&l, &m, &opts).unwrap();
        assert_eq!(r.anchor_count, 2);
        assert_eq!(r.overlap_count, 3);
        assert_eq!(f.vector("<tag>").unwrap(), &[-1.0, -1.0]);
        assert!(r.residual_after < 1e-12);
    }
}
