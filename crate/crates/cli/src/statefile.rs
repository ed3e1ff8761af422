//! JSON state and observable files.
//!
//! ```json
//! {"kind": "density", "dims": [2, 2], "matrix": [[[0.5, 0.0], ...], ...]}
//! {"kind": "pure", "dims": [2, 2], "vector": [[0.7071, 0.0], ...]}
//! {"kind": "observable", "dims": [2], "matrix": [[[1.0, 0.0], ...], ...]}
//! ```

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use qcorr::numeric::ensure_hermitian;
use qcorr::{BipartiteState, ComplexMatrix, Dims, Observable, StateVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Density,
    Pure,
    Observable,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Kind::Density => "density",
            Kind::Pure => "pure",
            Kind::Observable => "observable",
        };
        f.write_str(s)
    }
}

/// On-disk layout. Complex entries are `[re, im]` pairs, matrices row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub kind: Kind,
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    /// Malformed JSON or layout.
    #[error("{0}")]
    Parse(String),
    /// Well-formed file whose content breaks a state or observable invariant.
    #[error("{0}")]
    Validation(String),
}

/// A parsed and validated file.
#[derive(Debug, Clone)]
pub enum Loaded {
    Density(BipartiteState),
    Pure(StateVector, BipartiteState),
    Observable(Observable),
}

impl Loaded {
    pub fn state(&self) -> Option<&BipartiteState> {
        match self {
            Loaded::Density(s) | Loaded::Pure(_, s) => Some(s),
            Loaded::Observable(_) => None,
        }
    }
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl StateFile {
    pub fn density(m: &ComplexMatrix, dims: Dims) -> Self {
        StateFile { kind: Kind::Density, dims: vec![dims.d1, dims.d2], matrix: Some(rows_of(m)), vector: None }
    }

    pub fn pure(v: &StateVector, dims: Dims) -> Self {
        StateFile {
            kind: Kind::Pure,
            dims: vec![dims.d1, dims.d2],
            matrix: None,
            vector: Some(v.iter().map(|z| pair(*z)).collect()),
        }
    }

    pub fn observable(obs: &Observable) -> Self {
        StateFile { kind: Kind::Observable, dims: vec![obs.dim()], matrix: Some(rows_of(&obs.matrix())), vector: None }
    }

    pub fn parse(text: &str) -> Result<Self, FileError> {
        serde_json::from_str(text)
            .map_err(|e| FileError::Parse(format!("line {} column {}: {}", e.line(), e.column(), e)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state file serializes")
    }

    pub fn write(&self, path: &Path) -> Result<(), FileError> {
        std::fs::write(path, self.to_json() + "\n")
            .map_err(|source| FileError::Io { path: path.display().to_string(), source })
    }

    /// Checks layout, then the physical invariants of the declared kind.
    pub fn load(&self) -> Result<Loaded, FileError> {
        match self.kind {
            Kind::Density => {
                let dims = self.bipartite_dims()?;
                if self.vector.is_some() {
                    return Err(FileError::Parse("vector: not allowed for kind density".into()));
                }
                let m = self.matrix_field(dims.total())?;
                let state = BipartiteState::new(&m, dims).map_err(|e| FileError::Validation(e.to_string()))?;
                Ok(Loaded::Density(state))
            }
            Kind::Pure => {
                let dims = self.bipartite_dims()?;
                if self.matrix.is_some() {
                    return Err(FileError::Parse("matrix: not allowed for kind pure".into()));
                }
                let v = self.vector_field(dims.total())?;
                let state = BipartiteState::from_pure(&v, dims).map_err(|e| FileError::Validation(e.to_string()))?;
                Ok(Loaded::Pure(v, state))
            }
            Kind::Observable => {
                if self.dims.len() != 1 || self.dims[0] == 0 {
                    return Err(FileError::Parse(format!(
                        "dims: observable files need one positive dimension, found {:?}",
                        self.dims
                    )));
                }
                if self.vector.is_some() {
                    return Err(FileError::Parse("vector: not allowed for kind observable".into()));
                }
                let m = self.matrix_field(self.dims[0])?;
                ensure_hermitian(&m).map_err(|e| FileError::Validation(e.to_string()))?;
                let obs = Observable::from_matrix(&m).map_err(|e| FileError::Validation(e.to_string()))?;
                Ok(Loaded::Observable(obs))
            }
        }
    }

    fn bipartite_dims(&self) -> Result<Dims, FileError> {
        match self.dims.as_slice() {
            [d1, d2] => Dims::new(*d1, *d2).map_err(|e| FileError::Parse(format!("dims: {e}"))),
            other => Err(FileError::Parse(format!("dims: {} files need [d1, d2], found {:?}", self.kind, other))),
        }
    }

    fn matrix_field(&self, n: usize) -> Result<ComplexMatrix, FileError> {
        let rows = self.matrix.as_ref().ok_or_else(|| FileError::Parse(format!("matrix: missing for kind {}", self.kind)))?;
        if rows.len() != n {
            return Err(FileError::Parse(format!("matrix: expected {n} rows, found {}", rows.len())));
        }
        let mut m = ComplexMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(FileError::Parse(format!("matrix[{i}]: expected {n} entries, found {}", row.len())));
            }
            for (j, z) in row.iter().enumerate() {
                m[(i, j)] = entry(z, || format!("matrix[{i}][{j}]"))?;
            }
        }
        Ok(m)
    }

    fn vector_field(&self, n: usize) -> Result<StateVector, FileError> {
        let entries = self.vector.as_ref().ok_or_else(|| FileError::Parse("vector: missing for kind pure".into()))?;
        if entries.len() != n {
            return Err(FileError::Parse(format!("vector: expected {n} entries, found {}", entries.len())));
        }
        let mut v = StateVector::zeros(n);
        for (i, z) in entries.iter().enumerate() {
            v[i] = entry(z, || format!("vector[{i}]"))?;
        }
        Ok(v)
    }
}

fn entry(z: &[f64; 2], field: impl Fn() -> String) -> Result<Complex64, FileError> {
    if !(z[0].is_finite() && z[1].is_finite()) {
        return Err(FileError::Parse(format!("{}: non-finite entry", field())));
    }
    Ok(Complex64::new(z[0], z[1]))
}

fn rows_of(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| pair(m[(i, j)])).collect()).collect()
}

pub fn read(path: &Path) -> Result<Loaded, FileError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| FileError::Io { path: path.display().to_string(), source })?;
    let file = StateFile::parse(&text).map_err(|e| prefix(path, e))?;
    file.load().map_err(|e| prefix(path, e))
}

fn prefix(path: &Path, e: FileError) -> FileError {
    match e {
        FileError::Parse(m) => FileError::Parse(format!("{}: {m}", path.display())),
        FileError::Validation(m) => FileError::Validation(format!("{}: {m}", path.display())),
        io => io,
    }
}
