//! Validated density operators, bipartite states, and Schmidt forms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{
    eigh_sorted, ensure_square, frobenius_distance, hermitian_part, hermiticity_residual, outer,
    partial_trace, tensor_vec, trace_re, ComplexMatrix, Dims, StateVector, Subsystem, HERMITIAN_TOL,
};

/// Tolerance on trace, Hermiticity and negative eigenvalues of a valid state.
pub const STATE_TOL: f64 = 1e-10;
/// Allowed deviation from unit norm for state vectors.
pub const UNIT_TOL: f64 = 1e-10;
/// Schmidt coefficients at or below this are dropped.
pub const SCHMIDT_CLIP: f64 = 1e-10;

/// A statistical operator: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `|φ⟩⟨φ|` for a unit vector.
    pub fn from_pure(phi: &StateVector) -> Result<Self> {
        ensure_unit(phi)?;
        Ok(DensityOperator { matrix: outer(phi) })
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        // Tr(ρ ρ) = Σ |ρ_ij|² for Hermitian ρ
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Wraps a matrix already known to be a state up to round-off. The matrix is
    /// symmetrized but not otherwise checked.
    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        DensityOperator { matrix: hermitian_part(&m) }
    }
}

pub(crate) fn ensure_unit(phi: &StateVector) -> Result<()> {
    let norm = phi.norm();
    if phi.is_empty() || (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnitVector(norm));
    }
    Ok(())
}

/// Checks Hermiticity, unit trace and positivity, in that order.
pub fn validate_density(m: &ComplexMatrix) -> Result<DensityOperator> {
    ensure_square(m)?;
    if m.nrows() == 0 {
        return Err(Error::InvalidDims("empty matrix".into()));
    }
    let residual = hermiticity_residual(m);
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian(residual));
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
        return Err(Error::TraceNotOne(tr.re));
    }
    let sym = hermitian_part(m);
    let (values, _) = eigh_sorted(&sym);
    let min = values.first().copied().unwrap_or(0.0);
    if min < -STATE_TOL {
        return Err(Error::NegativeEigenvalue(min));
    }
    Ok(DensityOperator { matrix: sym })
}

/// A state `ρ₁₂` of a two-part system with its reductions cached.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    rho12: DensityOperator,
    dims: Dims,
    rho1: DensityOperator,
    rho2: DensityOperator,
}

impl BipartiteState {
    pub fn new(m: &ComplexMatrix, dims: Dims) -> Result<Self> {
        let n = ensure_square(m)?;
        if n != dims.total() {
            return Err(Error::DimensionMismatch { expected: dims.total(), found: n });
        }
        let rho12 = validate_density(m)?;
        Ok(Self::from_density(rho12, dims))
    }

    pub fn from_pure(phi: &StateVector, dims: Dims) -> Result<Self> {
        if phi.len() != dims.total() {
            return Err(Error::DimensionMismatch { expected: dims.total(), found: phi.len() });
        }
        Ok(Self::from_density(DensityOperator::from_pure(phi)?, dims))
    }

    /// `ρ₁ ⊗ ρ₂`.
    pub fn product(rho1: &DensityOperator, rho2: &DensityOperator) -> Self {
        let dims = Dims { d1: rho1.dim(), d2: rho2.dim() };
        let m = crate::numeric::tensor_product(rho1.matrix(), rho2.matrix());
        Self::from_density(DensityOperator::from_trusted(m), dims)
    }

    /// Builds from a matrix known to be a state up to round-off (results of
    /// channels applied to valid states).
    pub(crate) fn from_trusted(m: ComplexMatrix, dims: Dims) -> Self {
        Self::from_density(DensityOperator::from_trusted(m), dims)
    }

    fn from_density(rho12: DensityOperator, dims: Dims) -> Self {
        let rho1 = partial_trace(rho12.matrix(), dims, Subsystem::First)
            .expect("dimensions checked by caller");
        let rho2 = partial_trace(rho12.matrix(), dims, Subsystem::Second)
            .expect("dimensions checked by caller");
        BipartiteState {
            rho12,
            dims,
            rho1: DensityOperator::from_trusted(rho1),
            rho2: DensityOperator::from_trusted(rho2),
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn rho12(&self) -> &DensityOperator {
        &self.rho12
    }

    pub fn rho1(&self) -> &DensityOperator {
        &self.rho1
    }

    pub fn rho2(&self) -> &DensityOperator {
        &self.rho2
    }

    pub fn reduced(&self, side: Subsystem) -> &DensityOperator {
        match side {
            Subsystem::First => &self.rho1,
            Subsystem::Second => &self.rho2,
        }
    }

    /// `‖ρ₁₂ − ρ₁⊗ρ₂‖_F`.
    pub fn product_distance(&self) -> f64 {
        let prod = crate::numeric::tensor_product(self.rho1.matrix(), self.rho2.matrix());
        frobenius_distance(self.rho12.matrix(), &prod)
    }

    /// Conjugation by a local unitary `U₁ ⊗ U₂`.
    pub fn conjugate_local(&self, u1: &ComplexMatrix, u2: &ComplexMatrix) -> Result<Self> {
        if u1.nrows() != self.dims.d1 || u2.nrows() != self.dims.d2 {
            return Err(Error::DimensionMismatch { expected: self.dims.total(), found: u1.nrows() * u2.nrows() });
        }
        let u = crate::numeric::tensor_product(u1, u2);
        Ok(Self::from_trusted(&u * self.rho12.matrix() * u.adjoint(), self.dims))
    }
}

/// Alias of [`BipartiteState::new`].
pub fn make_bipartite(m: &ComplexMatrix, dims: Dims) -> Result<BipartiteState> {
    BipartiteState::new(m, dims)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Purity {
    Pure,
    Mixed,
}

/// Pure iff `Tr ρ² > 1 − tol`.
pub fn purity_class(rho: &DensityOperator, tol: f64) -> Purity {
    if rho.purity() > 1.0 - tol {
        Purity::Pure
    } else {
        Purity::Mixed
    }
}

/// Biorthogonal expansion `Σ √r_i |i⟩₁|i⟩₂` of a pure bipartite vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtForm {
    /// `√r_i`, nonincreasing.
    pub coefficients: Vec<f64>,
    pub basis1: Vec<StateVector>,
    pub basis2: Vec<StateVector>,
}

impl SchmidtForm {
    /// The weights `r_i`.
    pub fn weights(&self) -> Vec<f64> {
        self.coefficients.iter().map(|s| s * s).collect()
    }

    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    pub fn reconstruct(&self) -> StateVector {
        let n = self.basis1[0].len() * self.basis2[0].len();
        self.coefficients
            .iter()
            .zip(self.basis1.iter().zip(&self.basis2))
            .fold(StateVector::zeros(n), |acc, (&s, (u, v))| acc + tensor_vec(u, v) * Complex64::from(s))
    }

    /// Distance between `phi` and the reconstruction after removing the best global phase.
    pub fn reconstruction_residual(&self, phi: &StateVector) -> f64 {
        let rec = self.reconstruct();
        let overlap = rec.dotc(phi);
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::from(1.0) };
        (rec * phase - phi).norm()
    }
}

/// Multiplies `v` by the phase that makes its first non-negligible entry real and
/// nonnegative; returns the phase used.
fn fix_phase(v: &mut StateVector) -> Complex64 {
    let first = v.iter().find(|z| z.norm() > 1e-12).copied();
    match first {
        Some(z) => {
            let phase = z.conj() / z.norm();
            *v *= phase;
            phase
        }
        None => Complex64::from(1.0),
    }
}

/// Schmidt decomposition via SVD of the `d1×d2` coefficient matrix.
///
/// Vectors on side 1 carry the phase convention (first nonzero entry real
/// nonnegative); side-2 vectors absorb the compensating phase.
pub fn schmidt_decompose(phi: &StateVector, dims: Dims) -> Result<SchmidtForm> {
    if phi.len() != dims.total() {
        return Err(Error::DimensionMismatch { expected: dims.total(), found: phi.len() });
    }
    ensure_unit(phi)?;
    let coeff = ComplexMatrix::from_fn(dims.d1, dims.d2, |a, b| phi[a * dims.d2 + b]);
    let svd = coeff.svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");

    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));

    let mut form = SchmidtForm { coefficients: Vec::new(), basis1: Vec::new(), basis2: Vec::new() };
    for k in order {
        let s = svd.singular_values[k];
        if s <= SCHMIDT_CLIP {
            continue;
        }
        let mut left = u.column(k).into_owned();
        // C = Σ s_k u_k v_k†, so the side-2 vector is the conjugated row of V†
        let mut right = v_t.row(k).transpose();
        let phase = fix_phase(&mut left);
        right *= phase.conj();
        form.coefficients.push(s);
        form.basis1.push(left);
        form.basis2.push(right);
    }
    Ok(form)
}

/// The top eigenvector of a state whose purity class is pure.
pub fn pure_vector(rho: &DensityOperator) -> StateVector {
    let (_, vectors) = eigh_sorted(rho.matrix());
    let mut v = vectors.last().expect("non-empty state").clone();
    fix_phase(&mut v);
    v
}

/// Trace of a state, exposed for diagnostics.
pub fn trace_of(rho: &DensityOperator) -> f64 {
    trace_re(rho.matrix())
}
