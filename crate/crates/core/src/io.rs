//! CSV and JSON export of coefficient grids, with whole-file atomic writes.

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::analytic::{CoefficientMatrix, PhysicalParams};
use crate::error::{HgError, Result};

/// Writes `bytes` to a sibling temp file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| HgError::Io(e.error))?;
    Ok(())
}

/// `a,b,value` rows for every entry, zeros included, row-major in `a`.
pub fn matrix_to_csv(m: &CoefficientMatrix) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["a", "b", "value"])?;
    for a in 0..m.dim() {
        for b in 0..m.dim() {
            w.write_record([a.to_string(), b.to_string(), format!("{:.16e}", m.get(a, b))])?;
        }
    }
    w.into_inner().map_err(|e| HgError::Io(e.into_error()))
}

/// Reads the grid written by [`matrix_to_csv`].
pub fn matrix_from_csv(bytes: &[u8]) -> Result<DMatrix<f64>> {
    let mut r = csv::Reader::from_reader(bytes);
    let mut rows = Vec::new();
    for rec in r.deserialize() {
        let (a, b, v): (usize, usize, f64) = rec?;
        rows.push((a, b, v));
    }
    let dim = rows.iter().map(|&(a, b, _)| a.max(b) + 1).max().unwrap_or(0);
    let mut m = DMatrix::zeros(dim, dim);
    for (a, b, v) in rows {
        m[(a, b)] = v;
    }
    Ok(m)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub n: usize,
    pub params: PhysicalParams,
    pub sigma: f64,
    pub max_index: usize,
    pub entries: Vec<Vec<f64>>,
    pub raw_frobenius_norm: f64,
    pub normalized: bool,
    pub truncation_tail: f64,
    pub fallback_entries: usize,
}

impl From<&CoefficientMatrix> for MatrixDocument {
    fn from(m: &CoefficientMatrix) -> Self {
        Self {
            n: m.pump_index_1d,
            params: m.params,
            sigma: m.params.sigma(),
            max_index: m.max_index,
            entries: (0..m.dim())
                .map(|a| (0..m.dim()).map(|b| m.get(a, b)).collect())
                .collect(),
            raw_frobenius_norm: m.raw_frobenius_norm,
            normalized: m.normalized,
            truncation_tail: m.truncation_tail,
            fallback_entries: m.fallback_entries,
        }
    }
}

pub fn matrix_to_json(m: &CoefficientMatrix) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(&MatrixDocument::from(m))?;
    out.push(b'\n');
    Ok(out)
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}
