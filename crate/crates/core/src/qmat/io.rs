//! JSON file formats.
//!
//! A matrix is `{"dim": n, "entries": [[[re, im], ...], ...]}` (row-major).
//! A POVM is `{"dim": n, "elements": [matrix, ...]}`; each element may be a
//! full matrix object or a bare `entries` array. An optional `"labels"`
//! array names the outcomes.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::hermitian::HermitianMatrix;
use super::measurement::Povm;
use super::state::DensityMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum ElementFile {
    Matrix(MatrixFile),
    Entries(Vec<Vec<[f64; 2]>>),
}

#[derive(Clone, Debug, Serialize)]
pub struct PovmFileOut {
    pub dim: usize,
    pub elements: Vec<MatrixFile>,
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
struct PovmFileIn {
    dim: usize,
    elements: Vec<ElementFile>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

impl MatrixFile {
    pub fn from_matrix(h: &HermitianMatrix) -> Self {
        Self { dim: h.dim(), entries: h.to_rows() }
    }

    pub fn to_matrix(&self) -> Result<HermitianMatrix> {
        if self.entries.len() != self.dim {
            return Err(Error::Parse(format!("declared dim {} but {} rows", self.dim, self.entries.len())));
        }
        HermitianMatrix::from_rows(&self.entries)
    }
}

pub fn matrix_to_json(h: &HermitianMatrix) -> serde_json::Value {
    serde_json::to_value(MatrixFile::from_matrix(h)).expect("matrix serializes")
}

pub fn state_to_json(rho: &DensityMatrix) -> serde_json::Value {
    matrix_to_json(rho.matrix())
}

pub fn povm_to_json(m: &Povm) -> serde_json::Value {
    let out = PovmFileOut {
        dim: m.dim(),
        elements: m.elements().iter().map(MatrixFile::from_matrix).collect(),
        labels: m.labels().to_vec(),
    };
    serde_json::to_value(out).expect("POVM serializes")
}

pub fn state_from_json(v: &serde_json::Value) -> Result<DensityMatrix> {
    let f: MatrixFile = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("state: {e}")))?;
    DensityMatrix::new(f.to_matrix()?)
}

pub fn povm_from_json(v: &serde_json::Value) -> Result<Povm> {
    let f: PovmFileIn = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("POVM: {e}")))?;
    let mut elements = Vec::with_capacity(f.elements.len());
    for e in &f.elements {
        let h = match e {
            ElementFile::Matrix(m) => m.to_matrix()?,
            ElementFile::Entries(rows) => HermitianMatrix::from_rows(rows)?,
        };
        if h.dim() != f.dim {
            return Err(Error::DimensionMismatch { expected: f.dim, found: h.dim() });
        }
        elements.push(h);
    }
    match f.labels {
        Some(labels) => Povm::with_labels(elements, labels),
        None => Povm::new(elements),
    }
}

fn read_json(path: &Path) -> Result<serde_json::Value> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn read_state(path: &Path) -> Result<DensityMatrix> {
    state_from_json(&read_json(path)?)
}

pub fn read_povm(path: &Path) -> Result<Povm> {
    povm_from_json(&read_json(path)?)
}

pub fn write_state(path: &Path, rho: &DensityMatrix) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(&state_to_json(rho))?)?;
    Ok(())
}

pub fn write_povm(path: &Path, m: &Povm) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(&povm_to_json(m))?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::random::{random_density, random_povm, rng_from_seed};

    #[test]
    fn state_and_povm_survive_json() {
        let mut rng = rng_from_seed(3);
        let rho = random_density(3, 2, &mut rng).unwrap();
        let back = state_from_json(&state_to_json(&rho)).unwrap();
        assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-15);
        let m = random_povm(3, 4, &mut rng).unwrap();
        let back = povm_from_json(&povm_to_json(&m)).unwrap();
        assert_eq!(back.len(), 4);
        assert!(back.element(2).max_abs_diff(m.element(2)) < 1e-15);
    }

    #[test]
    fn bare_entries_accepted() {
        let v = serde_json::json!({
            "dim": 2,
            "elements": [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
                         [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]]
        });
        assert_eq!(povm_from_json(&v).unwrap().len(), 2);
    }

    #[test]
    fn incomplete_povm_file_names_completeness() {
        let v = serde_json::json!({"dim": 1, "elements": [{"dim": 1, "entries": [[[0.5, 0.0]]]}]});
        assert!(povm_from_json(&v).unwrap_err().to_string().contains("completeness"));
    }
}
