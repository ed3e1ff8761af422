//! Dense complex linear algebra on small composite systems.
//!
//! Matrices are `nalgebra` dynamic matrices over `Complex64`. Everything here
//! is a pure function of its arguments.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type StateVector = DVector<Complex64>;

/// Relative gap below which eigenvalues are merged into one spectral projector.
pub const DEFAULT_GROUP_TOL: f64 = 1e-8;
/// Eigenvalues at or below this are treated as exact zeros by matrix functions.
pub const DEFAULT_CLIP: f64 = 1e-12;
/// Frobenius residual allowed for a matrix to count as Hermitian (scaled by `max(1, ‖m‖_F)`).
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Dimensions of the two factors of a bipartite Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub d1: usize,
    pub d2: usize,
}

impl Dims {
    pub fn new(d1: usize, d2: usize) -> Result<Self> {
        if d1 == 0 || d2 == 0 {
            return Err(Error::InvalidDims(format!("{d1}x{d2}: both factors must be >= 1")));
        }
        Ok(Dims { d1, d2 })
    }

    /// Dimension of the composite space.
    pub fn total(&self) -> usize {
        self.d1 * self.d2
    }

    pub fn of(&self, side: Subsystem) -> usize {
        match side {
            Subsystem::First => self.d1,
            Subsystem::Second => self.d2,
        }
    }
}

impl std::fmt::Display for Dims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.d1, self.d2)
    }
}

/// One factor of a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subsystem {
    First,
    Second,
}

impl Subsystem {
    pub fn opposite(self) -> Subsystem {
        match self {
            Subsystem::First => Subsystem::Second,
            Subsystem::Second => Subsystem::First,
        }
    }

    /// 1 or 2, as written in formulas.
    pub fn index(self) -> usize {
        match self {
            Subsystem::First => 1,
            Subsystem::Second => 2,
        }
    }
}

/// Spectral form `Σ λ_i P_i` with distinct, strictly increasing eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub projectors: Vec<ComplexMatrix>,
    pub multiplicities: Vec<usize>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.projectors.first().map_or(0, |p| p.nrows())
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `Σ λ_i P_i`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim();
        self.eigenvalues
            .iter()
            .zip(&self.projectors)
            .fold(ComplexMatrix::zeros(n, n), |acc, (&l, p)| acc + p * Complex64::from(l))
    }
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// `|v⟩⟨v|`.
pub fn outer(v: &StateVector) -> ComplexMatrix {
    v * v.adjoint()
}

pub fn frobenius_norm(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "frobenius_distance on mismatched shapes");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

/// Real part of the trace.
pub fn trace_re(m: &ComplexMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

pub fn ensure_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.nrows())
}

/// Frobenius norm of `m - m†`.
pub fn hermiticity_residual(m: &ComplexMatrix) -> f64 {
    frobenius_distance(m, &m.adjoint())
}

pub fn ensure_hermitian(m: &ComplexMatrix) -> Result<()> {
    ensure_square(m)?;
    let residual = hermiticity_residual(m);
    if residual > HERMITIAN_TOL * frobenius_norm(m).max(1.0) {
        return Err(Error::NotHermitian(residual));
    }
    Ok(())
}

/// `(m + m†)/2`.
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()) * Complex64::from(0.5)
}

/// Kronecker product `a ⊗ b`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn tensor_vec(a: &StateVector, b: &StateVector) -> StateVector {
    a.kronecker(b)
}

/// Embeds an operator acting on one factor as `X ⊗ 1` or `1 ⊗ X`.
pub fn embed(op: &ComplexMatrix, dims: Dims, side: Subsystem) -> Result<ComplexMatrix> {
    let expected = dims.of(side);
    if op.nrows() != expected || op.ncols() != expected {
        return Err(Error::DimensionMismatch { expected, found: op.nrows() });
    }
    Ok(match side {
        Subsystem::First => tensor_product(op, &identity(dims.d2)),
        Subsystem::Second => tensor_product(&identity(dims.d1), op),
    })
}

/// Partial trace keeping subsystem `keep`.
pub fn partial_trace(m: &ComplexMatrix, dims: Dims, keep: Subsystem) -> Result<ComplexMatrix> {
    let n = ensure_square(m)?;
    if n != dims.total() {
        return Err(Error::DimensionMismatch { expected: dims.total(), found: n });
    }
    let (d1, d2) = (dims.d1, dims.d2);
    Ok(match keep {
        Subsystem::First => ComplexMatrix::from_fn(d1, d1, |a, b| {
            (0..d2).map(|k| m[(a * d2 + k, b * d2 + k)]).sum()
        }),
        Subsystem::Second => ComplexMatrix::from_fn(d2, d2, |k, l| {
            (0..d1).map(|a| m[(a * d2 + k, a * d2 + l)]).sum()
        }),
    })
}

/// Eigenpairs of a Hermitian matrix, sorted by ascending eigenvalue.
pub fn eigh_sorted(m: &ComplexMatrix) -> (Vec<f64>, Vec<StateVector>) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    (values, vectors)
}

/// Eigenvalues only, unsorted. Assumes `m` is Hermitian.
pub fn eigvalsh(m: &ComplexMatrix) -> Vec<f64> {
    m.clone().symmetric_eigenvalues().iter().copied().collect()
}

/// Spectral decomposition with eigenvalues closer than `group_tol·(1+|λ|)` merged.
///
/// Eigenvectors are grouped first and projectors are built from each group,
/// so near-degenerate pairs never produce ill-conditioned rank-1 projectors.
pub fn hermitian_eig(m: &ComplexMatrix, group_tol: f64) -> Result<SpectralDecomposition> {
    ensure_hermitian(m)?;
    let n = m.nrows();
    let (values, vectors) = eigh_sorted(&hermitian_part(m));

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in 0..values.len() {
        match groups.last_mut() {
            Some(g) if {
                let prev = values[*g.last().unwrap()];
                values[k] - prev < group_tol * (1.0 + prev.abs())
            } =>
            {
                g.push(k)
            }
            _ => groups.push(vec![k]),
        }
    }

    let mut out = SpectralDecomposition {
        eigenvalues: Vec::with_capacity(groups.len()),
        projectors: Vec::with_capacity(groups.len()),
        multiplicities: Vec::with_capacity(groups.len()),
    };
    for g in groups {
        let mean = g.iter().map(|&k| values[k]).sum::<f64>() / g.len() as f64;
        let proj = g
            .iter()
            .fold(ComplexMatrix::zeros(n, n), |acc, &k| acc + outer(&vectors[k]));
        out.eigenvalues.push(mean);
        out.multiplicities.push(g.len());
        out.projectors.push(proj);
    }
    Ok(out)
}

/// Applies `f` to the eigenvalues of a Hermitian PSD matrix that exceed `clip`;
/// eigenvalues at or below `clip` map to zero.
pub fn matrix_fn_on_support<F>(m: &ComplexMatrix, f: F, clip: f64) -> Result<ComplexMatrix>
where
    F: Fn(f64) -> f64,
{
    ensure_hermitian(m)?;
    let n = m.nrows();
    let (values, vectors) = eigh_sorted(&hermitian_part(m));
    Ok(values
        .iter()
        .zip(&vectors)
        .filter(|(&l, _)| l > clip)
        .fold(ComplexMatrix::zeros(n, n), |acc, (&l, v)| acc + outer(v) * Complex64::from(f(l))))
}

/// Projector onto the span of eigenvectors with eigenvalue above `clip`.
pub fn range_projector(m: &ComplexMatrix, clip: f64) -> Result<ComplexMatrix> {
    matrix_fn_on_support(m, |_| 1.0, clip)
}

/// `exp(i H)` for Hermitian `H`, built from its eigendecomposition.
pub fn unitary_from_generator(h: &ComplexMatrix) -> ComplexMatrix {
    let n = h.nrows();
    let eig = hermitian_part(h).symmetric_eigen();
    let phases = DVector::from_iterator(n, eig.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, l)));
    let v = &eig.eigenvectors;
    v * ComplexMatrix::from_diagonal(&phases) * v.adjoint()
}

/// Largest deviation of `vs† vs` from the identity, as a Frobenius norm.
pub fn gram_residual(vectors: &[StateVector]) -> f64 {
    let k = vectors.len();
    let g = ComplexMatrix::from_fn(k, k, |i, j| vectors[i].dotc(&vectors[j]));
    frobenius_distance(&g, &identity(k))
}

/// Extends an orthonormal set to an orthonormal basis of `C^d` by Gram–Schmidt
/// against the standard basis.
pub fn complete_orthonormal_basis(vectors: &[StateVector], d: usize) -> Vec<StateVector> {
    let mut basis: Vec<StateVector> = vectors.to_vec();
    for e in 0..d {
        if basis.len() == d {
            break;
        }
        let mut v = StateVector::zeros(d);
        v[e] = Complex64::from(1.0);
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for b in &basis {
                let overlap = b.dotc(&v);
                v -= b * overlap;
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            basis.push(v / Complex64::from(norm));
        }
    }
    basis
}

/// Columns of a square matrix.
pub fn columns(m: &ComplexMatrix) -> Vec<StateVector> {
    (0..m.ncols()).map(|j| m.column(j).into_owned()).collect()
}
