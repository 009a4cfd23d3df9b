//! Append-only line-delimited JSON files.
//!
//! Each record is written with a single `write` on a file opened in append
//! mode, so concurrent appenders never interleave within a line. A final
//! line without its newline is a torn write from a crash and is skipped.

use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JsonlError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> JsonlError + '_ {
    move |source| JsonlError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn append<T: Serialize>(path: &Path, value: &T) -> Result<(), JsonlError> {
    let mut line = serde_json::to_vec(value).expect("records serialize");
    line.push(b'\n');
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(io_err(path))?;
    file.write_all(&line).map_err(io_err(path))?;
    file.sync_data().map_err(io_err(path))
}

/// Reads every complete record; a missing file reads as empty.
pub fn read_all<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, JsonlError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(io_err(path)(e)),
    };
    let mut reader = BufReader::new(file);
    let mut out = Vec::new();
    let mut buf = String::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        let n = reader.read_line(&mut buf).map_err(io_err(path))?;
        if n == 0 {
            break;
        }
        line_no += 1;
        if !buf.ends_with('\n') {
            log::warn!("{}:{line_no}: ignoring incomplete final record", path.display());
            break;
        }
        if buf.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&buf).map_err(|e| JsonlError::Parse {
            path: path.to_path_buf(),
            line: line_no,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn append_then_read() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.jsonl");
        assert!(read_all::<u32>(&path).unwrap().is_empty());
        append(&path, &1u32).unwrap();
        append(&path, &2u32).unwrap();
        assert_eq!(read_all::<u32>(&path).unwrap(), vec![1, 2]);
    }

    #[test]
    fn torn_tail_is_skipped_but_bad_lines_are_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.jsonl");
        std::fs::write(&path, "1\n2\n3").unwrap();
        assert_eq!(read_all::<u32>(&path).unwrap(), vec![1, 2]);
        std::fs::write(&path, "1\nx\n").unwrap();
        match read_all::<u32>(&path) {
            Err(JsonlError::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
    }
}
