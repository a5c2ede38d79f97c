//! Vocabularies, embedding tables and the plain-text embedding format.
//!
//! The file format is the common word2vec-style text layout: a header line
//! `<count> <dim>` followed by one line per token holding the token and `dim`
//! space-separated decimals. LF and CRLF endings are accepted.

use std::collections::HashMap;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::matrix::{DenseMatrix, MatrixError};

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate token {token:?}")]
    DuplicateToken { line: usize, token: String },
    #[error("invalid token {token:?}: tokens must be non-empty and contain no whitespace")]
    InvalidToken { token: String },
    #[error("duplicate token {0:?} in vocabulary")]
    Duplicate(String),
    #[error("embedding table must contain at least one token")]
    Empty,
    #[error("vocabulary has {vocab} tokens but matrix has {rows} rows")]
    RowMismatch { vocab: usize, rows: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

fn valid_token(token: &str) -> bool {
    !token.is_empty() && !token.chars().any(char::is_whitespace)
}

/// Ordered set of unique tokens with constant-time lookup. Tokens are compared byte-exactly.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn new<I, S>(tokens: I) -> Result<Self, EmbedError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = Self::default();
        for tok in tokens {
            let tok = tok.into();
            if tok.is_empty() {
                return Err(EmbedError::InvalidToken { token: tok });
            }
            if vocab.index.contains_key(&tok) {
                return Err(EmbedError::Duplicate(tok));
            }
            vocab.index.insert(tok.clone(), vocab.tokens.len());
            vocab.tokens.push(tok);
        }
        Ok(vocab)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }
}

/// Split of `d_l` into tokens shared with `d_m` and tokens only in `d_l`, both in `d_l` order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabPartition {
    pub overlap: Vec<String>,
    pub l_only: Vec<String>,
}

pub fn vocab_partition(d_l: &Vocabulary, d_m: &Vocabulary) -> VocabPartition {
    let (overlap, l_only) = d_l.tokens().iter().cloned().partition(|t| d_m.contains(t));
    VocabPartition { overlap, l_only }
}

/// A vocabulary paired with one row vector per token.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    vocab: Vocabulary,
    vectors: DenseMatrix,
}

impl EmbeddingTable {
    pub fn new(vocab: Vocabulary, vectors: DenseMatrix) -> Result<Self, EmbedError> {
        if vocab.is_empty() {
            return Err(EmbedError::Empty);
        }
        if vectors.rows() != vocab.len() {
            return Err(EmbedError::RowMismatch { vocab: vocab.len(), rows: vectors.rows() });
        }
        Ok(Self { vocab, vectors })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn vectors(&self) -> &DenseMatrix {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn vector(&self, token: &str) -> Option<&[f64]> {
        self.vocab.get(token).map(|i| self.vectors.row(i))
    }
}

pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingTable, EmbedError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| EmbedError::Io { path: path.to_path_buf(), source })?;
    parse_embeddings(&text)
}

pub fn parse_embeddings(text: &str) -> Result<EmbeddingTable, EmbedError> {
    let mut lines = text.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l)).enumerate().map(|(i, l)| (i + 1, l));

    let (_, header) = lines.next().unwrap_or((1, ""));
    let header_fields: Vec<&str> = fields(header).collect();
    let parse_err = |line: usize, message: String| EmbedError::Parse { line, message };
    let [count, dim] = header_fields[..] else {
        return Err(parse_err(1, format!("expected header \"<count> <dim>\", found {header:?}")));
    };
    let count: usize = count.parse().map_err(|_| parse_err(1, format!("invalid token count {count:?}")))?;
    let dim: usize = dim.parse().map_err(|_| parse_err(1, format!("invalid dimension {dim:?}")))?;
    if count == 0 || dim == 0 {
        return Err(parse_err(1, "token count and dimension must be positive".into()));
    }

    let mut tokens = Vec::with_capacity(count);
    let mut index: HashMap<&str, usize> = HashMap::with_capacity(count);
    let mut data = Vec::with_capacity(count * dim);
    let mut last_line = 1;
    for (line_no, line) in lines {
        if line.is_empty() {
            // a trailing newline yields one empty final segment
            continue;
        }
        if tokens.len() == count {
            return Err(parse_err(line_no, format!("more rows than the declared {count}")));
        }
        let mut parts = fields(line);
        let token = parts.next().unwrap_or_default();
        if !valid_token(token) {
            return Err(parse_err(line_no, format!("invalid token {token:?}")));
        }
        if index.insert(token, line_no).is_some() {
            return Err(EmbedError::DuplicateToken { line: line_no, token: token.to_string() });
        }
        let before = data.len();
        for field in parts {
            let value: f64 = field.parse().map_err(|_| parse_err(line_no, format!("non-numeric field {field:?}")))?;
            if !value.is_finite() {
                return Err(parse_err(line_no, format!("non-finite value {field:?}")));
            }
            data.push(value);
        }
        let found = data.len() - before;
        if found != dim {
            return Err(parse_err(line_no, format!("expected {dim} values, found {found}")));
        }
        tokens.push(token.to_string());
        last_line = line_no;
    }
    if tokens.len() != count {
        return Err(parse_err(last_line, format!("header declares {count} rows but file has {}", tokens.len())));
    }
    let vocab = Vocabulary::new(tokens)?;
    let vectors = DenseMatrix::new(count, dim, data)?;
    EmbeddingTable::new(vocab, vectors)
}

fn fields(line: &str) -> impl Iterator<Item = &str> {
    line.split(' ').filter(|f| !f.is_empty())
}

pub fn save_embeddings(table: &EmbeddingTable, path: impl AsRef<Path>) -> Result<(), EmbedError> {
    let path = path.as_ref();
    let io_err = |source| EmbedError::Io { path: path.to_path_buf(), source };
    let file = fs::File::create(path).map_err(io_err)?;
    let mut out = BufWriter::new(file);
    write_embeddings(table, &mut out).map_err(|e| match e {
        EmbedError::Io { source, .. } => io_err(source),
        other => other,
    })?;
    out.flush().map_err(io_err)
}

/// Serializes a table with 17 significant digits per value, enough to round-trip binary64.
pub fn write_embeddings<W: Write>(table: &EmbeddingTable, out: &mut W) -> Result<(), EmbedError> {
    if table.is_empty() {
        return Err(EmbedError::Empty);
    }
    if let Some(bad) = table.vocab.tokens().iter().find(|t| !valid_token(t)) {
        return Err(EmbedError::InvalidToken { token: bad.clone() });
    }
    let io_err = |source| EmbedError::Io { path: PathBuf::new(), source };
    writeln!(out, "{} {}", table.len(), table.dim()).map_err(io_err)?;
    for (i, token) in table.vocab.tokens().iter().enumerate() {
        out.write_all(token.as_bytes()).map_err(io_err)?;
        for v in table.vectors.row(i) {
            write!(out, " {v:.16e}").map_err(io_err)?;
        }
        out.write_all(b"\n").map_err(io_err)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab(tokens: &[&str]) -> Vocabulary {
        Vocabulary::new(tokens.iter().copied()).unwrap()
    }

    #[test]
    fn minimal_file_parses() {
        let t = parse_embeddings("2 3\na 1 0 0\nb 0 1 0\n").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.dim(), 3);
        assert_eq!(t.vector("b").unwrap(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn crlf_and_missing_trailing_newline() {
        let t = parse_embeddings("2 2\r\na 1 2\r\nb 3 4").unwrap();
        assert_eq!(t.vector("a").unwrap(), &[1.0, 2.0]);
        assert_eq!(t.vector("b").unwrap(), &[3.0, 4.0]);
    }

    #[test]
    fn duplicate_token_cites_second_line() {
        let err = parse_embeddings("2 1\na 1\na 2\n").unwrap_err();
        assert!(matches!(err, EmbedError::DuplicateToken { line: 3, .. }), "{err}");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("2 2\na 1 2\n", 2),        // fewer rows than declared
            ("1 2\na 1 2\nb 3 4\n", 3), // more rows
            ("1 2\na 1 x\n", 2),        // non-numeric
            ("1 2\na 1 2 3\n", 2),      // wrong length
            ("1 2\na 1 NaN\n", 2),      // non-finite
            ("two 2\na 1 2\n", 1),      // bad header
            ("0 2\n", 1),               // empty table
        ];
        for (text, line) in cases {
            match parse_embeddings(text) {
                Err(EmbedError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn tokens_are_byte_exact() {
        let v = vocab(&["\u{101}", "a\u{304}"]);
        assert_eq!(v.len(), 2);
        assert_ne!(v.get("\u{101}"), v.get("a\u{304}"));
    }

    #[test]
    fn partition_small_case() {
        let p = vocab_partition(&vocab(&["a", "b", "c"]), &vocab(&["b", "c", "d"]));
        assert_eq!(p.overlap, vec!["b", "c"]);
        assert_eq!(p.l_only, vec!["a"]);
    }

    #[test]
    fn partition_identical_vocabularies() {
        let v = vocab(&["x", "y", "z"]);
        let p = vocab_partition(&v, &v);
        assert_eq!(p.overlap, v.tokens());
        assert!(p.l_only.is_empty());
    }

    #[test]
    fn partition_distinguishes_normalization_forms() {
        let p = vocab_partition(&vocab(&["\u{101}"]), &vocab(&["a\u{304}"]));
        assert!(p.overlap.is_empty());
    }

    #[test]
    fn save_rejects_whitespace_tokens_and_empty_tables() {
        let v = Vocabulary::new(["a b"]).unwrap();
        let t = EmbeddingTable::new(v, DenseMatrix::zeros(1, 2)).unwrap();
        let mut buf = Vec::new();
        assert!(matches!(write_embeddings(&t, &mut buf), Err(EmbedError::InvalidToken { .. })));
        assert!(matches!(EmbeddingTable::new(Vocabulary::default(), DenseMatrix::zeros(1, 1)), Err(EmbedError::Empty)));
    }

    #[test]
    fn save_then_load_is_exact() {
        let v = vocab(&["x", "y"]);
        let m = DenseMatrix::from_rows(&[vec![0.1, -1e-300], vec![std::f64::consts::PI, 1e300]]).unwrap();
        let t = EmbeddingTable::new(v, m).unwrap();
        let mut buf = Vec::new();
        write_embeddings(&t, &mut buf).unwrap();
        let back = parse_embeddings(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, t);
    }
}
