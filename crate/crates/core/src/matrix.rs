//! Dense row-major matrices and a one-sided Jacobi SVD.

use std::fmt;

use thiserror::Error;

/// Maximum number of cyclic Jacobi sweeps before giving up.
pub const MAX_SWEEPS: usize = 60;

/// Relative off-diagonal threshold below which two columns count as orthogonal.
const ORTHO_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum MatrixError {
    #[error("matrix data length {len} does not match shape {rows}x{cols}")]
    DataLength { rows: usize, cols: usize, len: usize },
    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    EmptyShape { rows: usize, cols: usize },
    #[error("non-finite entry {value} at ({row}, {col})")]
    NonFinite { row: usize, col: usize, value: f64 },
    #[error("ragged rows: row {row} has {found} entries, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("dimension mismatch in {op}: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    Shape { op: &'static str, left_rows: usize, left_cols: usize, right_rows: usize, right_cols: usize },
    #[error("SVD did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },
}

/// A real matrix stored in row-major order. Entries are always finite.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::EmptyShape { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(MatrixError::DataLength { rows, cols, len: data.len() });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(MatrixError::NonFinite { row: pos / cols, col: pos % cols, value: data[pos] });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, MatrixError> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n_cols {
                return Err(MatrixError::Ragged { row: i, expected: n_cols, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Self::new(n_rows, n_cols, data)
    }

    /// Builds a matrix by evaluating `f(row, col)`. Panics on an empty shape or non-finite value.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data).expect("from_fn produced an invalid matrix")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| 0.0)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diag(values: &[f64]) -> Result<Self, MatrixError> {
        let n = values.len();
        let mut data = vec![0.0; n * n];
        for (i, v) in values.iter().enumerate() {
            data[i * n + i] = *v;
        }
        Self::new(n, n, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) * factor)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_same_shape("sub", other)?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) - other.get(i, j)))
    }

    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_same_shape("add", other)?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + other.get(i, j)))
    }

    /// Matrix-vector product `self * v`.
    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>, MatrixError> {
        if v.len() != self.cols {
            return Err(self.shape_error("mul_vec", v.len(), 1));
        }
        Ok((0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect())
    }

    /// Largest absolute entry-wise difference between two equally shaped matrices.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64, MatrixError> {
        self.check_same_shape("max_abs_diff", other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    fn check_same_shape(&self, op: &'static str, other: &Self) -> Result<(), MatrixError> {
        if self.shape() != other.shape() {
            return Err(self.shape_error(op, other.rows, other.cols));
        }
        Ok(())
    }

    fn shape_error(&self, op: &'static str, rows: usize, cols: usize) -> MatrixError {
        MatrixError::Shape { op, left_rows: self.rows, left_cols: self.cols, right_rows: rows, right_cols: cols }
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Standard matrix product. Each entry sums in ascending inner index order.
pub fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix, MatrixError> {
    if a.cols != b.rows {
        return Err(a.shape_error("matmul", b.rows, b.cols));
    }
    let (m, k, n) = (a.rows, a.cols, b.cols);
    let mut data = vec![0.0; m * n];
    for i in 0..m {
        let out = &mut data[i * n..(i + 1) * n];
        for p in 0..k {
            let aip = a.data[i * k + p];
            let brow = &b.data[p * n..(p + 1) * n];
            for (o, bv) in out.iter_mut().zip(brow) {
                *o += aip * bv;
            }
        }
    }
    DenseMatrix::new(m, n, data)
}

pub fn frobenius_norm(a: &DenseMatrix) -> f64 {
    a.data.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Thin singular value decomposition `a = u * diag(sigma) * vt`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// m x k with orthonormal columns.
    pub u: DenseMatrix,
    /// Non-increasing, non-negative; length k = min(m, n).
    pub sigma: Vec<f64>,
    /// k x n with orthonormal rows.
    pub vt: DenseMatrix,
    /// Sweeps used by the Jacobi iteration.
    pub sweeps: usize,
}

impl SvdResult {
    pub fn reconstruct(&self) -> DenseMatrix {
        let us = DenseMatrix::from_fn(self.u.rows(), self.u.cols(), |i, j| self.u.get(i, j) * self.sigma[j]);
        matmul(&us, &self.vt).expect("SVD factors are conformable")
    }
}

/// Computes the thin SVD with cyclic one-sided Jacobi sweeps.
///
/// Wide inputs are decomposed through their transpose. Each column of `u` is
/// sign-normalized so that its largest-magnitude entry is non-negative, with
/// the matching row of `vt` flipped to compensate.
pub fn svd(a: &DenseMatrix) -> Result<SvdResult, MatrixError> {
    if a.rows < a.cols {
        let t = svd_tall(&a.transpose())?;
        // a^T = U S V^T  =>  a = V S U^T
        let mut out = SvdResult { u: t.vt.transpose(), sigma: t.sigma, vt: t.u.transpose(), sweeps: t.sweeps };
        normalize_signs(&mut out);
        return Ok(out);
    }
    let mut out = svd_tall(a)?;
    normalize_signs(&mut out);
    Ok(out)
}

/// One-sided Jacobi on a matrix with rows >= cols. Works column-major internally.
fn svd_tall(a: &DenseMatrix) -> Result<SvdResult, MatrixError> {
    let (m, n) = a.shape();
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect()).collect();

    let mut sweeps = 0;
    let mut residual = f64::INFINITY;
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        residual = 0.0;
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                let scale = (alpha * beta).sqrt();
                if scale == 0.0 {
                    continue;
                }
                let off = gamma.abs() / scale;
                residual = residual.max(off);
                if off <= ORTHO_TOL {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    if residual > ORTHO_TOL {
        return Err(MatrixError::NoConvergence { sweeps, residual });
    }

    let norms: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps ties in column order, which keeps the output deterministic
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));

    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let rank_tol = sigma_max * (m.max(n) as f64) * f64::EPSILON;

    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut missing = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        if sigma[k] > rank_tol {
            u_cols.push(cols[j].iter().map(|x| x / sigma[k]).collect());
        } else {
            u_cols.push(vec![0.0; m]);
            missing.push(k);
        }
    }
    complete_orthonormal(&mut u_cols, &missing, m);

    let u = DenseMatrix::from_fn(m, n, |i, k| u_cols[k][i]);
    let vt = DenseMatrix::from_fn(n, n, |k, j| v[order[k]][j]);
    Ok(SvdResult { u, sigma, vt, sweeps })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    let (cp, cq) = (&mut left[p], &mut right[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

/// Fills the columns listed in `missing` with unit vectors orthogonal to all
/// other columns, using Gram-Schmidt over the standard basis.
fn complete_orthonormal(cols: &mut [Vec<f64>], missing: &[usize], m: usize) {
    let mut basis = 0;
    for &k in missing {
        loop {
            assert!(basis < m, "cannot complete orthonormal basis");
            let mut cand = vec![0.0; m];
            cand[basis] = 1.0;
            basis += 1;
            // two passes of modified Gram-Schmidt for numerical orthogonality
            for _ in 0..2 {
                for (j, other) in cols.iter().enumerate() {
                    if j == k || (missing.contains(&j) && other.iter().all(|x| *x == 0.0)) {
                        continue;
                    }
                    let d = dot(&cand, other);
                    for (c, o) in cand.iter_mut().zip(other) {
                        *c -= d * o;
                    }
                }
            }
            let norm = dot(&cand, &cand).sqrt();
            if norm > 1e-6 {
                cols[k] = cand.into_iter().map(|x| x / norm).collect();
                break;
            }
        }
    }
}

fn normalize_signs(out: &mut SvdResult) {
    let (m, k) = out.u.shape();
    let n = out.vt.cols();
    for j in 0..k {
        let mut best = 0.0f64;
        let mut best_val = 0.0;
        for i in 0..m {
            let x = out.u.get(i, j);
            if x.abs() > best {
                best = x.abs();
                best_val = x;
            }
        }
        if best_val < 0.0 {
            for i in 0..m {
                out.u.data[i * k + j] = -out.u.data[i * k + j];
            }
            for c in 0..n {
                out.vt.data[j * n + c] = -out.vt.data[j * n + c];
            }
        }
    }
}
