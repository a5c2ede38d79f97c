//! Python bindings for `livmt-core`.
//!
//! Matrices cross the boundary as lists of rows. Errors surface as
//! `ValueError` with the core message.

// pyo3 0.22's macros trip this lint on every `PyResult` return
#![allow(clippy::useless_conversion)]

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use livmt_core::cmea::{self, AlignOptions, AlignmentReport};
use livmt_core::corpus::{self, Lang, SamplingSpec, Temperature};
use livmt_core::embed::{self, Vocabulary};
use livmt_core::eval::{self, NormForm};
use livmt_core::matrix::{self, DenseMatrix};
use livmt_core::postproc::{self, PostprocConfig};
use livmt_core::translate::from_spec;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A matrix as a list of rows.
type Rows = Vec<Vec<f64>>;

fn to_matrix(rows: Rows) -> PyResult<DenseMatrix> {
    DenseMatrix::from_rows(&rows).map_err(err)
}

fn form(name: &str) -> PyResult<NormForm> {
    name.parse().map_err(err)
}

/// Thin SVD: returns `(u, sigma, vt)` with `a = u * diag(sigma) * vt`.
#[pyfunction]
fn svd(a: Rows) -> PyResult<(Rows, Vec<f64>, Rows)> {
    let s = matrix::svd(&to_matrix(a)?).map_err(err)?;
    Ok((s.u.to_rows(), s.sigma, s.vt.to_rows()))
}

/// Semi-orthogonal `W` (D_m x D_l) minimizing `|W a_l - a_m|`; anchors are columns.
/// Returns `(w, sigma_min, degenerate)`.
#[pyfunction]
fn procrustes(a_l: Rows, a_m: Rows) -> PyResult<(Rows, f64, bool)> {
    let sol = cmea::procrustes_solve(&to_matrix(a_l)?, &to_matrix(a_m)?).map_err(err)?;
    Ok((sol.w.to_rows(), sol.sigma_min(), sol.is_degenerate()))
}

#[pyclass(name = "EmbeddingTable", module = "livmt")]
#[derive(Clone)]
struct PyEmbeddingTable(embed::EmbeddingTable);

#[pymethods]
impl PyEmbeddingTable {
    #[new]
    fn new(tokens: Vec<String>, vectors: Rows) -> PyResult<Self> {
        let vocab = Vocabulary::new(tokens).map_err(err)?;
        Ok(Self(embed::EmbeddingTable::new(vocab, to_matrix(vectors)?).map_err(err)?))
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Self(embed::load_embeddings(path).map_err(err)?))
    }

    fn save(&self, path: &str) -> PyResult<()> {
        embed::save_embeddings(&self.0, path).map_err(err)
    }

    #[getter]
    fn tokens(&self) -> Vec<String> {
        self.0.vocab().tokens().to_vec()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn vector(&self, token: &str) -> Option<Vec<f64>> {
        self.0.vector(token).map(<[f64]>::to_vec)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("EmbeddingTable(tokens={}, dim={})", self.0.len(), self.0.dim())
    }
}

#[pyclass(name = "AlignmentReport", module = "livmt", get_all)]
struct PyAlignmentReport {
    overlap_count: usize,
    l_only_count: usize,
    anchor_count: usize,
    residual_before: Option<f64>,
    residual_after: f64,
    orthogonality_defect: f64,
    sigma_min: f64,
    degenerate: bool,
    tsv: String,
}

impl From<AlignmentReport> for PyAlignmentReport {
    fn from(r: AlignmentReport) -> Self {
        Self {
            tsv: r.to_tsv(),
            overlap_count: r.overlap_count,
            l_only_count: r.l_only_count,
            anchor_count: r.anchor_count,
            residual_before: r.residual_before,
            residual_after: r.residual_after,
            orthogonality_defect: r.orthogonality_defect,
            sigma_min: r.sigma_min,
            degenerate: r.degenerate,
        }
    }
}

/// Maps `table_l` into the space of `table_m`; returns `(merged, report)`.
#[pyfunction]
#[pyo3(signature = (table_l, table_m, exclude = Vec::new(), normalize_anchors = false))]
fn align(
    table_l: &PyEmbeddingTable,
    table_m: &PyEmbeddingTable,
    exclude: Vec<String>,
    normalize_anchors: bool,
) -> PyResult<(PyEmbeddingTable, PyAlignmentReport)> {
    let opts = AlignOptions { exclude, normalize_anchors };
    let (merged, report) = cmea::align(&table_l.0, &table_m.0, &opts).map_err(err)?;
    Ok((PyEmbeddingTable(merged), report.into()))
}

#[pyclass(name = "BleuReport", module = "livmt", get_all)]
struct PyBleuReport {
    score: f64,
    precisions: Vec<f64>,
    bp: f64,
    sys_len: usize,
    ref_len: usize,
    counts: Vec<usize>,
    totals: Vec<usize>,
    signature: String,
}

#[pymethods]
impl PyBleuReport {
    fn __repr__(&self) -> String {
        format!("BleuReport(score={:.2}, bp={:.3})", self.score, self.bp)
    }
}

impl From<eval::BleuReport> for PyBleuReport {
    fn from(r: eval::BleuReport) -> Self {
        Self {
            score: r.score,
            precisions: r.precisions.to_vec(),
            bp: r.bp,
            sys_len: r.sys_len,
            ref_len: r.ref_len,
            counts: r.counts.to_vec(),
            totals: r.totals.to_vec(),
            signature: r.signature,
        }
    }
}

/// Corpus BLEU with 13a tokenization and exp smoothing.
#[pyfunction]
#[pyo3(signature = (hyps, refs, normalize_ref = None, normalize_hyp = None))]
fn bleu(
    hyps: Vec<String>,
    refs: Vec<String>,
    normalize_ref: Option<&str>,
    normalize_hyp: Option<&str>,
) -> PyResult<PyBleuReport> {
    let nr = normalize_ref.map(form).transpose()?;
    let nh = normalize_hyp.map(form).transpose()?;
    Ok(eval::bleu(&hyps, &refs, nr, nh).map_err(err)?.into())
}

/// `bleu(bwd(fwd(lines)), lines)`; translators are shell commands or `builtin:*` names.
#[pyfunction]
#[pyo3(signature = (lines, fwd, bwd, batch_size = 64))]
fn round_trip_bleu(lines: Vec<String>, fwd: &str, bwd: &str, batch_size: usize) -> PyResult<PyBleuReport> {
    if batch_size == 0 {
        return Err(err("batch_size must be positive"));
    }
    let (mut f, mut b) = (from_spec(fwd), from_spec(bwd));
    Ok(eval::round_trip_bleu(&lines, &mut f, &mut b, batch_size).map_err(err)?.report.into())
}

#[pyfunction]
fn tokenize_13a(line: &str) -> Vec<String> {
    eval::tokenize_13a(line)
}

#[pyfunction]
fn normalize_punct(line: &str) -> String {
    corpus::normalize_punct(line)
}

/// Normalizes every line to `form` (nfc, nfd, nfkc or nfkd).
#[pyfunction]
fn normalize(lines: Vec<String>, form_name: &str) -> PyResult<Vec<String>> {
    Ok(eval::normalize_corpus(&lines, form(form_name)?))
}

/// Unicode audit of `lines` as TSV.
#[pyfunction]
fn audit(lines: Vec<String>) -> String {
    eval::audit_unicode(&lines).to_tsv()
}

#[derive(FromPyObject)]
enum TemperatureArg {
    Number(f64),
    Text(String),
}

/// Lines per corpus for a budget; `t` is a number or `"concat"`.
#[pyfunction]
fn temperature_counts(sizes: Vec<u64>, t: TemperatureArg, budget: u64) -> PyResult<Vec<u64>> {
    let temperature = match t {
        TemperatureArg::Number(v) => v.to_string().parse::<Temperature>(),
        TemperatureArg::Text(s) => s.parse::<Temperature>(),
    }
    .map_err(err)?;
    let spec = SamplingSpec { sizes, temperature, budget };
    spec.validate().map_err(err)?;
    Ok(corpus::temperature_sample(&spec))
}

/// Applies the clean-up rules; returns `(line, needs_regen)`.
#[pyfunction]
#[pyo3(signature = (line, lang = "liv"))]
fn postprocess(line: &str, lang: &str) -> (String, bool) {
    let out = postproc::postprocess(line, &PostprocConfig::new(Lang::new(lang)));
    (out.line, out.needs_regen)
}

#[pymodule]
fn livmt(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEmbeddingTable>()?;
    m.add_class::<PyAlignmentReport>()?;
    m.add_class::<PyBleuReport>()?;
    m.add_function(wrap_pyfunction!(svd, m)?)?;
    m.add_function(wrap_pyfunction!(procrustes, m)?)?;
    m.add_function(wrap_pyfunction!(align, m)?)?;
    m.add_function(wrap_pyfunction!(bleu, m)?)?;
    m.add_function(wrap_pyfunction!(round_trip_bleu, m)?)?;
    m.add_function(wrap_pyfunction!(tokenize_13a, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_punct, m)?)?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(audit, m)?)?;
    m.add_function(wrap_pyfunction!(temperature_counts, m)?)?;
    m.add_function(wrap_pyfunction!(postprocess, m)?)?;
    Ok(())
}
