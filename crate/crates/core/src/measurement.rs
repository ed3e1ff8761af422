//! Projective observables, Lüders channels, and the classical quantities they induce.

use num_complex::Complex64;

use crate::entropy::{eta, entropy_of_eigenvalues, von_neumann_entropy, Bits};
use crate::error::{Error, Result};
use crate::numeric::{
    commutator, embed, frobenius_distance, frobenius_norm, hermitian_eig, outer, partial_trace, trace_re,
    ComplexMatrix, Dims, SpectralDecomposition, StateVector, Subsystem, DEFAULT_GROUP_TOL,
};
use crate::state::{BipartiteState, DensityOperator};

/// Probability at or below which an outcome counts as undetectable.
pub const DEFAULT_EPSILON: f64 = 1e-10;

/// A Hermitian operator with purely discrete spectrum, kept in unique spectral form.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    spectral: SpectralDecomposition,
}

impl Observable {
    pub fn from_matrix(m: &ComplexMatrix) -> Result<Self> {
        Ok(Observable { spectral: hermitian_eig(m, DEFAULT_GROUP_TOL)? })
    }

    /// Builds `Σ a_i P^i` from labels and projectors; labels must be distinct and
    /// the projectors an orthogonal resolution of the identity.
    pub fn from_projectors(labels: &[f64], projectors: Vec<ComplexMatrix>) -> Result<Self> {
        if labels.len() != projectors.len() || labels.is_empty() {
            return Err(Error::InvalidObservable("need one label per projector".into()));
        }
        let n = projectors[0].nrows();
        let mut sum = ComplexMatrix::zeros(n, n);
        for (i, p) in projectors.iter().enumerate() {
            if p.shape() != (n, n) {
                return Err(Error::InvalidObservable("projectors differ in shape".into()));
            }
            for q in &projectors[i + 1..] {
                if frobenius_norm(&(p * q)) > 1e-10 {
                    return Err(Error::InvalidObservable("projectors are not orthogonal".into()));
                }
            }
            if frobenius_distance(&(p * p), p) > 1e-10 {
                return Err(Error::InvalidObservable("matrix is not a projector".into()));
            }
            sum += p;
        }
        if frobenius_distance(&sum, &ComplexMatrix::identity(n, n)) > 1e-10 {
            return Err(Error::InvalidObservable("projectors do not sum to the identity".into()));
        }
        let mut order: Vec<usize> = (0..labels.len()).collect();
        order.sort_by(|&i, &j| labels[i].total_cmp(&labels[j]));
        if order.windows(2).any(|w| labels[w[0]] == labels[w[1]]) {
            return Err(Error::InvalidObservable("labels must be distinct".into()));
        }
        let spectral = SpectralDecomposition {
            eigenvalues: order.iter().map(|&i| labels[i]).collect(),
            multiplicities: order.iter().map(|&i| trace_re(&projectors[i]).round() as usize).collect(),
            projectors: order.iter().map(|&i| projectors[i].clone()).collect(),
        };
        Ok(Observable { spectral })
    }

    /// Complete observable `Σ a_i |v_i⟩⟨v_i|` on an orthonormal basis.
    pub fn from_basis(labels: &[f64], basis: &[StateVector]) -> Result<Self> {
        let n = basis.first().map_or(0, |v| v.len());
        if basis.len() != n {
            return Err(Error::InvalidObservable(format!("{} vectors do not form a basis of C^{n}", basis.len())));
        }
        Self::from_projectors(labels, basis.iter().map(outer).collect())
    }

    /// Complete observable with labels `1, 2, …, d` in basis order.
    pub fn from_basis_default_labels(basis: &[StateVector]) -> Result<Self> {
        let labels: Vec<f64> = (1..=basis.len()).map(|k| k as f64).collect();
        Self::from_basis(&labels, basis)
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.spectral
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectral.eigenvalues
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.spectral.projectors
    }

    pub fn dim(&self) -> usize {
        self.spectral.dim()
    }

    /// True iff every spectral projector has rank one.
    pub fn is_complete(&self) -> bool {
        self.spectral.multiplicities.iter().all(|&m| m == 1)
    }

    pub fn matrix(&self) -> ComplexMatrix {
        self.spectral.reconstruct()
    }

    /// Same projectors with new labels.
    pub fn relabel(&self, labels: &[f64]) -> Result<Self> {
        Self::from_projectors(labels, self.spectral.projectors.clone())
    }
}

/// An observable placed on one factor of a bipartite system (`A₁⊗1` or `1⊗B₂`).
#[derive(Debug, Clone, PartialEq)]
pub struct SubsystemObservable {
    pub observable: Observable,
    pub subsystem: Subsystem,
}

impl SubsystemObservable {
    pub fn new(observable: Observable, subsystem: Subsystem) -> Self {
        SubsystemObservable { observable, subsystem }
    }

    fn check(&self, dims: Dims) -> Result<()> {
        let expected = dims.of(self.subsystem);
        if self.observable.dim() != expected {
            return Err(Error::DimensionMismatch { expected, found: self.observable.dim() });
        }
        Ok(())
    }

    fn check_side(&self, side: Subsystem) -> Result<()> {
        if self.subsystem != side {
            return Err(Error::WrongSubsystem { expected: side.index(), found: self.subsystem.index() });
        }
        Ok(())
    }

    /// Spectral projectors tensored with the identity on the other factor.
    pub fn embedded_projectors(&self, dims: Dims) -> Result<Vec<ComplexMatrix>> {
        self.check(dims)?;
        self.observable.projectors().iter().map(|p| embed(p, dims, self.subsystem)).collect()
    }
}

/// `Σ P ρ P` over the given projectors.
pub(crate) fn dephase(projectors: &[ComplexMatrix], rho: &ComplexMatrix) -> ComplexMatrix {
    let n = rho.nrows();
    projectors.iter().fold(ComplexMatrix::zeros(n, n), |acc, p| acc + p * rho * p)
}

/// Nonselective ideal measurement `T_A ρ = Σ P^i ρ P^i`.
pub fn luders_apply(obs: &Observable, rho: &DensityOperator) -> Result<DensityOperator> {
    if obs.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: obs.dim() });
    }
    Ok(DensityOperator::from_trusted(dephase(obs.projectors(), rho.matrix())))
}

/// Lüders channel of a subsystem observable acting on the composite state.
pub fn luders_apply_subsystem(sobs: &SubsystemObservable, state: &BipartiteState) -> Result<BipartiteState> {
    let dims = state.dims();
    let projectors = sobs.embedded_projectors(dims)?;
    Ok(BipartiteState::from_trusted(dephase(&projectors, state.rho12().matrix()), dims))
}

/// One detectable outcome of a side-1 measurement and the state it leaves on side 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalOutcome {
    pub eigenvalue: f64,
    pub probability: f64,
    pub state: DensityOperator,
}

/// `ρ_opposite = Σ p_i ρ^i` induced by measuring one subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct DistantDecomposition {
    pub outcomes: Vec<ConditionalOutcome>,
    /// Eigenvalues whose probability is at or below the detectability threshold.
    pub undetectable: Vec<f64>,
}

impl DistantDecomposition {
    /// `Σ p_i ρ^i`.
    pub fn mixture(&self) -> ComplexMatrix {
        let n = self.outcomes[0].state.dim();
        self.outcomes
            .iter()
            .fold(ComplexMatrix::zeros(n, n), |acc, o| acc + o.state.matrix() * Complex64::from(o.probability))
    }
}

/// Conditional states of the unmeasured side for each detectable outcome of `sobs`.
///
/// Works for either side; the usual case measures side 1 and conditions side 2.
pub fn distant_decomposition(
    state: &BipartiteState,
    sobs: &SubsystemObservable,
    epsilon: f64,
) -> Result<DistantDecomposition> {
    let dims = state.dims();
    let projectors = sobs.embedded_projectors(dims)?;
    let other = sobs.subsystem.opposite();
    let rho = state.rho12().matrix();
    let mut out = DistantDecomposition { outcomes: Vec::new(), undetectable: Vec::new() };
    for (&label, p) in sobs.observable.eigenvalues().iter().zip(&projectors) {
        let post = p * rho * p;
        let prob = trace_re(&post);
        if prob > epsilon {
            let reduced = partial_trace(&post, dims, other)? / Complex64::from(prob);
            out.outcomes.push(ConditionalOutcome {
                eigenvalue: label,
                probability: prob,
                state: DensityOperator::from_trusted(reduced),
            });
        } else {
            out.undetectable.push(label);
        }
    }
    Ok(out)
}

/// Outcome table `p_ij = Tr[ρ₁₂ (P₁^i ⊗ P₂^j)]` of a simultaneous measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    /// Row `i` belongs to the side-1 eigenvalue `row_labels[i]`.
    pub p: Vec<Vec<f64>>,
    pub row_marginals: Vec<f64>,
    pub col_marginals: Vec<f64>,
    pub row_labels: Vec<f64>,
    pub col_labels: Vec<f64>,
}

impl JointDistribution {
    /// Builds the table and its marginals, clamping round-off negatives.
    pub fn from_table(p: Vec<Vec<f64>>, row_labels: Vec<f64>, col_labels: Vec<f64>) -> Result<Self> {
        if p.len() != row_labels.len() || p.iter().any(|r| r.len() != col_labels.len()) {
            return Err(Error::NotADistribution("table shape does not match labels".into()));
        }
        let mut p = p;
        for x in p.iter_mut().flatten() {
            if *x < -1e-12 {
                return Err(Error::NotADistribution(format!("entry {x} is negative")));
            }
            *x = x.max(0.0);
        }
        let total: f64 = p.iter().flatten().sum();
        if (total - 1.0).abs() > 1e-8 {
            return Err(Error::NotADistribution(format!("entries sum to {total}")));
        }
        let row_marginals = p.iter().map(|r| r.iter().sum()).collect();
        let col_marginals = (0..col_labels.len()).map(|j| p.iter().map(|r| r[j]).sum()).collect();
        Ok(JointDistribution { p, row_marginals, col_marginals, row_labels, col_labels })
    }
}

/// Joint outcome distribution of `A₁ ∧ B₂`.
pub fn joint_distribution(
    state: &BipartiteState,
    a1: &SubsystemObservable,
    b2: &SubsystemObservable,
) -> Result<JointDistribution> {
    a1.check_side(Subsystem::First)?;
    b2.check_side(Subsystem::Second)?;
    let dims = state.dims();
    a1.check(dims)?;
    b2.check(dims)?;
    let rho = state.rho12().matrix();
    let p = a1
        .observable
        .projectors()
        .iter()
        .map(|pa| {
            b2.observable
                .projectors()
                .iter()
                .map(|pb| trace_re(&(rho * crate::numeric::tensor_product(pa, pb))))
                .collect()
        })
        .collect();
    JointDistribution::from_table(p, a1.observable.eigenvalues().to_vec(), b2.observable.eigenvalues().to_vec())
}

/// `I(m1:m2)_{A∧B} = H(A) + H(B) − H(A,B)`.
pub fn joint_mutual_information(jd: &JointDistribution) -> Result<Bits> {
    let h_a: f64 = jd.row_marginals.iter().map(|&x| eta(x)).sum();
    let h_b: f64 = jd.col_marginals.iter().map(|&x| eta(x)).sum();
    let h_ab: f64 = jd.p.iter().flatten().map(|&x| eta(x)).sum();
    Bits::from_raw(h_a + h_b - h_ab)
}

/// Entropy decrease of the unmeasured side, `S(opp) − Σ p_i S(ρ_opp^i)`.
///
/// With a side-1 observable this is `I(m1→2)_A`; with a side-2 observable it is
/// the mirror `I(1←m2)_B`.
pub fn information_gain(state: &BipartiteState, sobs: &SubsystemObservable) -> Result<Bits> {
    let dims = state.dims();
    let projectors = sobs.embedded_projectors(dims)?;
    let other = sobs.subsystem.opposite();
    let rho = state.rho12().matrix();
    let s_other = von_neumann_entropy(state.reduced(other)).value();
    // p S(M/p) = η(M) − η(p) for the unnormalized conditional M
    let average: f64 = projectors
        .iter()
        .map(|p| {
            let m = partial_trace(&(p * rho * p), dims, other).expect("dimensions checked");
            entropy_of_eigenvalues(&m) - eta(trace_re(&m))
        })
        .sum();
    Bits::from_raw(s_other - average)
}

/// Entropy of coherence `E_C(A, ρ) = S(T_A ρ) − S(ρ)`.
pub fn entropy_of_coherence(obs: &Observable, rho: &DensityOperator) -> Result<Bits> {
    let measured = luders_apply(obs, rho)?;
    Bits::from_raw(von_neumann_entropy(&measured).value() - von_neumann_entropy(rho).value())
}

/// Pieces of the mixing-property form `E_C = H(A) − (S(ρ) − Σ w_i S(ρ_i))`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceDecomposition {
    /// `H(A) = H(w_i)`.
    pub observable_entropy: Bits,
    /// `S(ρ) − Σ w_i S(ρ_i)`.
    pub deficit: Bits,
    pub weights: Vec<f64>,
    /// `P^i ρ P^i / w_i`; `None` where `w_i` is at or below [`DEFAULT_EPSILON`].
    pub conditionals: Vec<Option<DensityOperator>>,
}

impl CoherenceDecomposition {
    /// `H(A) − deficit`.
    pub fn coherence(&self) -> f64 {
        self.observable_entropy.value() - self.deficit.value()
    }
}

pub fn coherence_decomposition(obs: &Observable, rho: &DensityOperator) -> Result<CoherenceDecomposition> {
    if obs.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: obs.dim() });
    }
    let mut weights = Vec::with_capacity(obs.projectors().len());
    let mut conditionals = Vec::with_capacity(obs.projectors().len());
    let mut average = 0.0;
    for p in obs.projectors() {
        let post = p * rho.matrix() * p;
        let w = trace_re(&post);
        weights.push(w.max(0.0));
        if w > DEFAULT_EPSILON {
            let cond = DensityOperator::from_trusted(post / Complex64::from(w));
            average += w * von_neumann_entropy(&cond).value();
            conditionals.push(Some(cond));
        } else {
            conditionals.push(None);
        }
    }
    let observable_entropy = Bits::from_raw(weights.iter().map(|&w| eta(w)).sum())?;
    let deficit = Bits::from_raw(von_neumann_entropy(rho).value() - average)?;
    Ok(CoherenceDecomposition { observable_entropy, deficit, weights, conditionals })
}

/// `‖[A, ρ]‖_F`.
pub fn commutator_norm(obs: &Observable, rho: &DensityOperator) -> f64 {
    frobenius_norm(&commutator(&obs.matrix(), rho.matrix()))
}
