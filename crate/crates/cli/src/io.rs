//! Input reading and all-or-nothing output.

use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use livmt_core::corpus::read_lines_bytes;

use crate::error::{CliError, CliResult};

/// Reads a UTF-8 line file. Invalid UTF-8 is a data error naming the line.
pub fn read_text_lines(path: &Path) -> CliResult<Vec<String>> {
    read_lines_bytes(path)?
        .into_iter()
        .enumerate()
        .map(|(i, l)| {
            String::from_utf8(l).map_err(|_| CliError::Data(format!("{}:{}: invalid UTF-8", path.display(), i + 1)))
        })
        .collect()
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn lines_to_text<S: AsRef<str>>(lines: &[S]) -> String {
    let mut out = String::new();
    for l in lines {
        out.push_str(l.as_ref());
        out.push('\n');
    }
    out
}

/// Output files staged next to their destinations and renamed into place together.
#[derive(Default)]
pub struct Outputs {
    staged: Vec<(NamedTempFile, PathBuf)>,
}

impl Outputs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, path: impl Into<PathBuf>, bytes: impl AsRef<[u8]>) -> CliResult<()> {
        let path = path.into();
        if self.staged.iter().any(|(_, p)| *p == path) {
            return Err(CliError::Usage(format!("{} is named as two different outputs", path.display())));
        }
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
            _ => PathBuf::from("."),
        };
        let err = |e: std::io::Error| CliError::Data(format!("{}: {e}", path.display()));
        let mut tmp = NamedTempFile::new_in(&dir).map_err(err)?;
        tmp.write_all(bytes.as_ref()).map_err(err)?;
        tmp.as_file().sync_all().map_err(err)?;
        self.staged.push((tmp, path));
        Ok(())
    }

    /// Moves every staged file into place. Nothing is renamed if staging failed earlier.
    pub fn commit(self) -> CliResult<()> {
        for (tmp, path) in self.staged {
            tmp.persist(&path).map_err(|e| CliError::Data(format!("{}: {}", path.display(), e.error)))?;
        }
        Ok(())
    }
}

/// Writes one file atomically.
pub fn write_atomic(path: &Path, bytes: impl AsRef<[u8]>) -> CliResult<()> {
    let mut out = Outputs::new();
    out.add(path, bytes)?;
    out.commit()
}
