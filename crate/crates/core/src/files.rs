//! File output used by the command-line front end and the experiment
//! runner. Every writer goes through [`write_atomic`], so a reader never
//! sees a partially written file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::altproj::TracePoint;
use crate::error::{Error, Result};
use crate::matrix::QuatMatrix;

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidConfig(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = dir.join(tmp_name);
    let result = fs::File::create(&tmp)
        .and_then(|mut f| {
            f.write_all(bytes)?;
            f.sync_all()
        })
        .and_then(|()| fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn read_matrix(path: &Path) -> Result<QuatMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    QuatMatrix::from_json(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_matrix(path: &Path, a: &QuatMatrix) -> Result<()> {
    write_atomic(path, a.to_json().as_bytes())
}

fn csv_bytes<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::io(path, e.into()))?;
    }
    w.into_inner().map_err(|e| Error::io(path, e.into_error()))
}

/// `phase,step,residual,objective,seconds`.
pub fn write_trace_csv(path: &Path, trace: &[TracePoint]) -> Result<()> {
    write_atomic(path, &csv_bytes(path, trace)?)
}

#[derive(Serialize)]
struct SingularValueRow {
    index: usize,
    sigma: f64,
}

/// `index,sigma` with 1-based indices.
pub fn write_singular_values_csv(path: &Path, sigma: &[f64]) -> Result<()> {
    let rows = sigma.iter().enumerate().map(|(i, &s)| SingularValueRow { index: i + 1, sigma: s });
    write_atomic(path, &csv_bytes(path, rows)?)
}
