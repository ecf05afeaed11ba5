//! File formats: structure-constant JSON and coordinate-triple operator text.

use std::fmt::Write as _;

use ncosc_core::lie::LieAlgebra;
use ncosc_core::{Complex64, SparseMatrix};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// `{dim, labels, c: [[i, j, k, re, im], ...]}` with one entry per `i < j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureConstants {
    pub dim: usize,
    pub labels: Vec<String>,
    pub c: Vec<(usize, usize, usize, f64, f64)>,
}

impl StructureConstants {
    pub fn from_algebra(alg: &LieAlgebra) -> Self {
        StructureConstants {
            dim: alg.dim(),
            labels: alg.labels().to_vec(),
            c: alg.nonzero_constants().map(|(i, j, k, v)| (i, j, k, v.re, v.im)).collect(),
        }
    }

    pub fn to_algebra(&self) -> Result<LieAlgebra, CliError> {
        if self.labels.len() != self.dim {
            return Err(CliError::Validation(format!(
                "structure constants: {} labels for dim {}",
                self.labels.len(),
                self.dim
            )));
        }
        let entries = self.c.iter().map(|&(i, j, k, re, im)| (i, j, k, Complex64::new(re, im)));
        Ok(LieAlgebra::from_structure_constants(self.labels.clone(), entries)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("structure constants: {e}")))
    }
}

/// One `row col re im` line per stored entry, row-major.
pub fn write_triples(m: &SparseMatrix) -> String {
    let mut out = String::new();
    for (r, c, v) in m.triples() {
        writeln!(out, "{r} {c} {:?} {:?}", v.re, v.im).expect("writing to a String");
    }
    out
}

/// Inverse of [`write_triples`]; `dim` is not stored in the text.
pub fn read_triples(text: &str, dim: usize) -> Result<SparseMatrix, CliError> {
    let bad = |line: usize, what: &str| CliError::Validation(format!("triples line {}: {what}", line + 1));
    let mut entries = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 4 {
            return Err(bad(n, "expected `row col re im`"));
        }
        let r: usize = f[0].parse().map_err(|_| bad(n, "bad row"))?;
        let c: usize = f[1].parse().map_err(|_| bad(n, "bad column"))?;
        let re: f64 = f[2].parse().map_err(|_| bad(n, "bad real part"))?;
        let im: f64 = f[3].parse().map_err(|_| bad(n, "bad imaginary part"))?;
        if r >= dim || c >= dim {
            return Err(bad(n, "index out of range"));
        }
        entries.push((r, c, Complex64::new(re, im)));
    }
    Ok(SparseMatrix::from_triples(dim, dim, entries))
}
