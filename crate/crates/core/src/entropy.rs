//! Entropies and mutual information, all in bits.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::{eigh_sorted, eigvalsh, tensor_product, trace_re, ComplexMatrix, Dims, StateVector, Subsystem, DEFAULT_CLIP};
use crate::state::{schmidt_decompose, BipartiteState, DensityOperator};

/// Negative results smaller than this in magnitude are round-off and clamp to zero.
pub const ROUNDOFF_TOL: f64 = 1e-9;
/// Weight of `σ` outside the range of `ρ` that makes `S(σ|ρ)` infinite.
pub const SUPPORT_TOL: f64 = 1e-10;

/// An amount of information in bits. May be `+∞` (relative entropy off-support).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Bits(f64);

impl Bits {
    pub const ZERO: Bits = Bits(0.0);
    pub const INFINITY: Bits = Bits(f64::INFINITY);

    /// Clamps round-off negatives to zero, rejects larger negatives and NaN.
    pub fn from_raw(value: f64) -> Result<Bits> {
        if value.is_nan() {
            return Err(Error::NegativeInformation(value));
        }
        if value < 0.0 {
            if value > -ROUNDOFF_TOL {
                return Ok(Bits(0.0));
            }
            return Err(Error::NegativeInformation(value));
        }
        Ok(Bits(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl std::fmt::Display for Bits {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{} bits", self.0)
        }
    }
}

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

/// `−x log₂ x` with `0 log 0 = 0` for `x ≤ clip`.
pub(crate) fn eta(x: f64) -> f64 {
    if x > DEFAULT_CLIP {
        -x * x.log2()
    } else {
        0.0
    }
}

/// `−Σ λ log₂ λ` over the eigenvalues of a Hermitian PSD matrix (not necessarily unit trace).
pub(crate) fn entropy_of_eigenvalues(m: &ComplexMatrix) -> f64 {
    eigvalsh(m).into_iter().map(eta).sum()
}

/// Von Neumann entropy `S(ρ) = −Tr ρ log₂ ρ`.
pub fn von_neumann_entropy(rho: &DensityOperator) -> Bits {
    Bits(entropy_of_eigenvalues(rho.matrix()).max(0.0))
}

/// Shannon entropy of a probability list.
pub fn shannon_entropy(p: &[f64]) -> Result<Bits> {
    if p.is_empty() {
        return Err(Error::NotADistribution("empty list".into()));
    }
    if let Some(bad) = p.iter().find(|&&x| x.is_nan() || x < -1e-12) {
        return Err(Error::NotADistribution(format!("entry {bad} is negative")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::NotADistribution(format!("entries sum to {total}")));
    }
    Ok(Bits(p.iter().map(|&x| eta(x)).sum::<f64>().max(0.0)))
}

/// `S(σ|ρ) = Tr σ log σ − Tr σ log ρ`, evaluated in the range of `ρ`.
///
/// Infinite when `σ` has weight above [`SUPPORT_TOL`] outside the range of `ρ`.
pub fn relative_entropy(sigma: &DensityOperator, rho: &DensityOperator) -> Result<Bits> {
    if sigma.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    let (mu, vectors) = eigh_sorted(rho.matrix());
    let s = sigma.matrix();
    let mut in_support = 0.0;
    let mut cross = 0.0;
    for (&m, v) in mu.iter().zip(&vectors) {
        if m > DEFAULT_CLIP {
            let w = v.dotc(&(s * v)).re;
            in_support += w;
            cross += w * m.log2();
        }
    }
    if trace_re(s) - in_support > SUPPORT_TOL {
        return Ok(Bits::INFINITY);
    }
    let neg_entropy = -entropy_of_eigenvalues(s);
    Bits::from_raw(neg_entropy - cross)
}

/// `I(1:2) = S(1) + S(2) − S(12)`.
pub fn mutual_information(state: &BipartiteState) -> Result<Bits> {
    let s1 = von_neumann_entropy(state.rho1()).value();
    let s2 = von_neumann_entropy(state.rho2()).value();
    let s12 = von_neumann_entropy(state.rho12()).value();
    Bits::from_raw(s1 + s2 - s12)
}

/// `I(1:2)` as `S(ρ₁₂ | ρ₁⊗ρ₂)`.
pub fn mutual_information_via_relative(state: &BipartiteState) -> Result<Bits> {
    let product = DensityOperator::from_trusted(tensor_product(state.rho1().matrix(), state.rho2().matrix()));
    relative_entropy(state.rho12(), &product)
}

/// Entropy of either reduction of a pure bipartite vector, from its Schmidt weights.
pub fn entanglement_entropy(phi: &StateVector, dims: Dims) -> Result<Bits> {
    let form = schmidt_decompose(phi, dims)?;
    let weights = form.weights();
    let total: f64 = weights.iter().sum();
    Ok(Bits(weights.iter().map(|&r| eta(r / total)).sum::<f64>().max(0.0)))
}

/// `S(s)` of one reduction.
pub fn subsystem_entropy(state: &BipartiteState, side: Subsystem) -> Bits {
    von_neumann_entropy(state.reduced(side))
}
