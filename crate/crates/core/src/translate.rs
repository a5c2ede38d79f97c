//! The translator contract used by round-trip evaluation and pivot synthesis:
//! a batch of lines goes in and the same number of lines comes back.

use std::collections::HashMap;
use std::io::Write;
use std::process::{Command, Stdio};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TranslateError {
    #[error("could not start `{command}`: {message}")]
    Spawn { command: String, message: String },
    #[error("`{command}` exited with {status}{}", stderr_suffix(stderr))]
    Exit { command: String, status: String, stderr: String },
    #[error("translator returned {got} lines for a batch of {expected}")]
    LineCount { expected: usize, got: usize },
    #[error("translator output is not valid UTF-8")]
    Encoding,
    #[error("{0}")]
    Other(String),
}

fn stderr_suffix(stderr: &str) -> String {
    if stderr.is_empty() {
        String::new()
    } else {
        format!(": {stderr}")
    }
}

pub trait Translator {
    fn translate(&mut self, batch: &[String]) -> Result<Vec<String>, TranslateError>;
}

impl<T: Translator + ?Sized> Translator for Box<T> {
    fn translate(&mut self, batch: &[String]) -> Result<Vec<String>, TranslateError> {
        (**self).translate(batch)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl Translator for Identity {
    fn translate(&mut self, batch: &[String]) -> Result<Vec<String>, TranslateError> {
        Ok(batch.to_vec())
    }
}

/// Reverses the characters of every line.
#[derive(Debug, Clone, Copy, Default)]
pub struct ReverseChars;

impl Translator for ReverseChars {
    fn translate(&mut self, batch: &[String]) -> Result<Vec<String>, TranslateError> {
        Ok(batch.iter().map(|l| l.chars().rev().collect()).collect())
    }
}

/// Drops the last whitespace-separated token of every line.
#[derive(Debug, Clone, Copy, Default)]
pub struct DropLastToken;

impl Translator for DropLastToken {
    fn translate(&mut self, batch: &[String]) -> Result<Vec<String>, TranslateError> {
        Ok(batch
            .iter()
            .map(|l| {
                let toks: Vec<&str> = l.split_whitespace().collect();
                toks[..toks.len().saturating_sub(1)].join(" ")
            })
            .collect())
    }
}

/// Whole-line dictionary lookup. Unknown lines pass through unchanged.
#[derive(Debug, Clone, Default)]
pub struct Lookup(pub HashMap<String, String>);

impl Translator for Lookup {
    fn translate(&mut self, batch: &[String]) -> Result<Vec<String>, TranslateError> {
        Ok(batch.iter().map(|l| self.0.get(l).cloned().unwrap_or_else(|| l.clone())).collect())
    }
}

/// Runs a shell command per batch: source lines on stdin, translations on stdout.
#[derive(Debug, Clone)]
pub struct ExternalCommand {
    command: String,
}

impl ExternalCommand {
    pub fn new(command: impl Into<String>) -> Self {
        Self { command: command.into() }
    }

    pub fn command(&self) -> &str {
        &self.command
    }
}

impl Translator for ExternalCommand {
    fn translate(&mut self, batch: &[String]) -> Result<Vec<String>, TranslateError> {
        let spawn_err =
            |e: std::io::Error| TranslateError::Spawn { command: self.command.clone(), message: e.to_string() };
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(spawn_err)?;

        let mut input = String::new();
        for line in batch {
            input.push_str(line);
            input.push('\n');
        }
        let mut stdin = child.stdin.take().expect("piped stdin");
        // write from a separate thread so a chatty child cannot deadlock on a full stdout pipe
        let writer = std::thread::spawn(move || {
            let r = stdin.write_all(input.as_bytes()).and_then(|_| stdin.flush());
            drop(stdin);
            r
        });
        let output = child.wait_with_output().map_err(spawn_err)?;
        let write_result = writer.join().unwrap_or(Ok(()));
        if !output.status.success() {
            return Err(TranslateError::Exit {
                command: self.command.clone(),
                status: output.status.to_string(),
                stderr: String::from_utf8_lossy(&output.stderr).trim().to_string(),
            });
        }
        let text = String::from_utf8(output.stdout).map_err(|_| TranslateError::Encoding)?;
        let lines: Vec<String> = crate::corpus::split_lines_bytes(text.as_bytes())
            .into_iter()
            .map(|l| String::from_utf8_lossy(l).into_owned())
            .collect();
        if lines.len() != batch.len() {
            return Err(TranslateError::LineCount { expected: batch.len(), got: lines.len() });
        }
        write_result.map_err(spawn_err)?;
        Ok(lines)
    }
}

/// Builds a translator from a command-line spec: `builtin:identity`,
/// `builtin:reverse`, `builtin:drop-last` or any shell command.
pub fn from_spec(spec: &str) -> Box<dyn Translator + Send> {
    match spec {
        "builtin:identity" => Box::new(Identity),
        "builtin:reverse" => Box::new(ReverseChars),
        "builtin:drop-last" => Box::new(DropLastToken),
        cmd => Box::new(ExternalCommand::new(cmd)),
    }
}

/// A batch that failed, with its 0-based index.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("batch {batch}: {source}")]
pub struct BatchError {
    pub batch: usize,
    pub source: TranslateError,
}

/// Translates `lines` in fixed-size batches, retrying each failed batch `retries` times.
pub fn translate_batched<T: Translator + ?Sized>(
    translator: &mut T,
    lines: &[String],
    batch_size: usize,
    retries: usize,
) -> Result<Vec<String>, BatchError> {
    let mut out = Vec::with_capacity(lines.len());
    for (batch, chunk) in lines.chunks(batch_size.max(1)).enumerate() {
        let mut attempt = 0;
        loop {
            let result = translator.translate(chunk).and_then(|t| {
                if t.len() == chunk.len() {
                    Ok(t)
                } else {
                    Err(TranslateError::LineCount { expected: chunk.len(), got: t.len() })
                }
            });
            match result {
                Ok(t) => {
                    out.extend(t);
                    break;
                }
                Err(source) if attempt >= retries => return Err(BatchError { batch, source }),
                Err(_) => attempt += 1,
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lines(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn toy_translators() {
        let b = lines(&["ab c", "x"]);
        assert_eq!(Identity.translate(&b).unwrap(), b);
        assert_eq!(ReverseChars.translate(&b).unwrap(), lines(&["c ba", "x"]));
        assert_eq!(DropLastToken.translate(&b).unwrap(), lines(&["ab", ""]));
    }

    #[test]
    fn external_cat_round_trips() {
        let b = lines(&["tere", "", "kēļ"]);
        assert_eq!(ExternalCommand::new("cat").translate(&b).unwrap(), b);
    }

    #[test]
    fn external_failure_modes() {
        let b = lines(&["a", "b"]);
        assert!(matches!(ExternalCommand::new("exit 3").translate(&b), Err(TranslateError::Exit { .. })));
        assert!(matches!(
            ExternalCommand::new("head -n 1").translate(&b),
            Err(TranslateError::LineCount { expected: 2, got: 1 })
        ));
    }

    struct Flaky {
        failures_left: usize,
    }

    impl Translator for Flaky {
        fn translate(&mut self, batch: &[String]) -> Result<Vec<String>, TranslateError> {
            if self.failures_left > 0 {
                self.failures_left -= 1;
                return Err(TranslateError::Other("transient".into()));
            }
            Ok(batch.to_vec())
        }
    }

    #[test]
    fn one_retry_per_batch() {
        let b = lines(&["a", "b", "c"]);
        assert_eq!(translate_batched(&mut Flaky { failures_left: 1 }, &b, 2, 1).unwrap(), b);
        let err = translate_batched(&mut Flaky { failures_left: 2 }, &b, 2, 1).unwrap_err();
        assert_eq!(err.batch, 0);
    }
}
