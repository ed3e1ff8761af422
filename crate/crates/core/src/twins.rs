//! Twin observables: verification through the commutation property, equal
//! detectable cardinalities, and the four equivalent pairing conditions, plus
//! the constructive twins of pure states and their Schmidt-dephased mixtures.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measurement::{Observable, SubsystemObservable, DEFAULT_EPSILON};
use crate::numeric::{
    commutator, complete_orthonormal_basis, embed, frobenius_distance, frobenius_norm, outer, partial_trace,
    range_projector, tensor_product, tensor_vec, trace_re, ComplexMatrix, Dims, StateVector, Subsystem, DEFAULT_CLIP,
};
use crate::state::{schmidt_decompose, BipartiteState};

/// Default tolerance for twin residuals.
pub const DEFAULT_TWIN_TOL: f64 = 1e-8;
/// A condition counts as clearly violated beyond this multiple of the tolerance.
pub const DISAGREEMENT_FACTOR: f64 = 10.0;

/// Eigenvalues of a subsystem observable with positive probability in the state.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectableSpectrum {
    pub subsystem: Subsystem,
    pub eigenvalues: Vec<f64>,
    /// Local spectral projectors (acting on the subsystem only).
    pub projectors: Vec<ComplexMatrix>,
    pub probabilities: Vec<f64>,
    pub undetectable: Vec<f64>,
    pub undetectable_probabilities: Vec<f64>,
    /// Range projector `Q_s` of the reduced state.
    pub range_projector: ComplexMatrix,
}

impl DetectableSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `Σ a_i P^i` over detectable eigenvalues only.
    pub fn restricted_operator(&self) -> ComplexMatrix {
        let n = self.range_projector.nrows();
        self.eigenvalues
            .iter()
            .zip(&self.projectors)
            .fold(ComplexMatrix::zeros(n, n), |acc, (&a, p)| acc + p * Complex64::from(a))
    }
}

pub fn detectable_spectrum(
    state: &BipartiteState,
    sobs: &SubsystemObservable,
    epsilon: f64,
) -> Result<DetectableSpectrum> {
    let side = sobs.subsystem;
    let rho_s = state.reduced(side).matrix();
    if sobs.observable.dim() != rho_s.nrows() {
        return Err(Error::DimensionMismatch { expected: rho_s.nrows(), found: sobs.observable.dim() });
    }
    let mut spec = DetectableSpectrum {
        subsystem: side,
        eigenvalues: Vec::new(),
        projectors: Vec::new(),
        probabilities: Vec::new(),
        undetectable: Vec::new(),
        undetectable_probabilities: Vec::new(),
        range_projector: range_projector(rho_s, DEFAULT_CLIP)?,
    };
    for (&a, p) in sobs.observable.eigenvalues().iter().zip(sobs.observable.projectors()) {
        let prob = trace_re(&(rho_s * p));
        if prob > epsilon {
            spec.eigenvalues.push(a);
            spec.projectors.push(p.clone());
            spec.probabilities.push(prob);
        } else {
            spec.undetectable.push(a);
            spec.undetectable_probabilities.push(prob.max(0.0));
        }
    }
    Ok(spec)
}

/// One-to-one correspondence between detectable spectra, as index pairs
/// `(index in A₁'s detectable spectrum, index in B₂'s)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpectralPairing {
    pub pairs: Vec<(usize, usize)>,
}

impl SpectralPairing {
    pub fn partner_of(&self, i: usize) -> Option<usize> {
        self.pairs.iter().find(|(a, _)| *a == i).map(|&(_, b)| b)
    }
}

/// `p_{ii'} = Tr ρ₁₂ (P₁^i ⊗ P₂^{i'})` over detectable parts.
fn coincidence_table(state: &BipartiteState, spec_a: &DetectableSpectrum, spec_b: &DetectableSpectrum) -> Vec<Vec<f64>> {
    let rho = state.rho12().matrix();
    spec_a
        .projectors
        .iter()
        .map(|pa| spec_b.projectors.iter().map(|pb| trace_re(&(rho * tensor_product(pa, pb)))).collect())
        .collect()
}

/// Pairs `i` with `i'` when `p_{ii'} > (1 − tol)·p_i`; `None` unless this is a
/// bijection between the two detectable spectra.
pub fn pair_spectra(
    state: &BipartiteState,
    spec_a: &DetectableSpectrum,
    spec_b: &DetectableSpectrum,
    tol: f64,
) -> Option<SpectralPairing> {
    if spec_a.len() != spec_b.len() {
        return None;
    }
    let table = coincidence_table(state, spec_a, spec_b);
    let mut used = vec![false; spec_b.len()];
    let mut pairs = Vec::with_capacity(spec_a.len());
    for (i, row) in table.iter().enumerate() {
        let partners: Vec<usize> =
            (0..row.len()).filter(|&j| row[j] > (1.0 - tol) * spec_a.probabilities[i]).collect();
        match partners.as_slice() {
            [j] if !used[*j] => {
                used[*j] = true;
                pairs.push((i, *j));
            }
            _ => return None,
        }
    }
    Some(SpectralPairing { pairs })
}

/// Greedy largest-coincidence matching, used to score residuals when no
/// valid pairing exists.
fn best_effort_matching(table: &[Vec<f64>], rows: usize, cols: usize) -> Vec<(usize, usize)> {
    let mut entries: Vec<(usize, usize)> = (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).collect();
    entries.sort_by(|&(a, b), &(c, d)| table[c][d].total_cmp(&table[a][b]).then((a, b).cmp(&(c, d))));
    let mut row_used = vec![false; rows];
    let mut col_used = vec![false; cols];
    let mut out = Vec::new();
    for (i, j) in entries {
        if !row_used[i] && !col_used[j] {
            row_used[i] = true;
            col_used[j] = true;
            out.push((i, j));
        }
    }
    out.sort_unstable();
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwinReport {
    /// `‖[A₁, ρ₁]‖_F` and `‖[B₂, ρ₂]‖_F`, each divided by `max(1, max |eigenvalue|)`.
    pub commutator_residuals: (f64, f64),
    /// Detectable spectra have equal cardinality.
    pub spectra_match: bool,
    pub pairing: Option<SpectralPairing>,
    /// Information-theoretic condition: worst `|p_{ii'} − δ_{ii'} p_i|`.
    pub residual_a: f64,
    /// Measurement-theoretic condition: worst `‖P₁ρP₁ − P₂ρP₂‖_F / ‖ρ‖_F`.
    pub residual_b: f64,
    /// Quantum-logic condition: worst `|1 − Tr[ρ₂(P₁^i) P₂^i]|`.
    pub residual_c: f64,
    /// Algebraic condition: worst `‖P₁ρ − P₂ρ‖_F / ‖ρ‖_F`.
    pub residual_d: f64,
    pub condition_verdicts: [bool; 4],
    pub verdict: bool,
    pub complete_flag: bool,
    pub strong_algebraic_residual: Option<f64>,
    pub tolerance: f64,
}

impl TwinReport {
    pub fn residuals(&self) -> [f64; 4] {
        [self.residual_a, self.residual_b, self.residual_c, self.residual_d]
    }

    /// Some condition holds while another fails by more than the disagreement factor.
    pub fn conditions_disagree(&self) -> bool {
        let r = self.residuals();
        r.iter().any(|&x| x < self.tolerance) && r.iter().any(|&x| x > DISAGREEMENT_FACTOR * self.tolerance)
    }
}

fn eigen_scale(obs: &Observable) -> f64 {
    obs.eigenvalues().iter().fold(1.0f64, |m, a| m.max(a.abs()))
}

fn check_sides(state: &BipartiteState, a1: &SubsystemObservable, b2: &SubsystemObservable) -> Result<()> {
    if a1.subsystem != Subsystem::First {
        return Err(Error::WrongSubsystem { expected: 1, found: a1.subsystem.index() });
    }
    if b2.subsystem != Subsystem::Second {
        return Err(Error::WrongSubsystem { expected: 2, found: b2.subsystem.index() });
    }
    let dims = state.dims();
    if a1.observable.dim() != dims.d1 {
        return Err(Error::DimensionMismatch { expected: dims.d1, found: a1.observable.dim() });
    }
    if b2.observable.dim() != dims.d2 {
        return Err(Error::DimensionMismatch { expected: dims.d2, found: b2.observable.dim() });
    }
    Ok(())
}

/// Evaluates every twin property and condition; all four residuals are always computed.
///
/// Returns [`Error::ConditionDisagreement`] when one condition holds within
/// `tol` while another is violated by more than `10·tol`.
pub fn verify_twins(
    state: &BipartiteState,
    a1: &SubsystemObservable,
    b2: &SubsystemObservable,
    tol: f64,
) -> Result<TwinReport> {
    check_sides(state, a1, b2)?;
    let dims = state.dims();
    let rho = state.rho12().matrix();
    let rho_norm = frobenius_norm(rho);

    let comm_a = frobenius_norm(&commutator(&a1.observable.matrix(), state.rho1().matrix())) / eigen_scale(&a1.observable);
    let comm_b = frobenius_norm(&commutator(&b2.observable.matrix(), state.rho2().matrix())) / eigen_scale(&b2.observable);

    let spec_a = detectable_spectrum(state, a1, DEFAULT_EPSILON)?;
    let spec_b = detectable_spectrum(state, b2, DEFAULT_EPSILON)?;
    let spectra_match = spec_a.len() == spec_b.len();
    let pairing = pair_spectra(state, &spec_a, &spec_b, tol);
    let table = coincidence_table(state, &spec_a, &spec_b);
    let matching = match &pairing {
        Some(p) => p.pairs.clone(),
        None => best_effort_matching(&table, spec_a.len(), spec_b.len()),
    };

    let emb_a: Vec<ComplexMatrix> =
        spec_a.projectors.iter().map(|p| embed(p, dims, Subsystem::First)).collect::<Result<_>>()?;
    let emb_b: Vec<ComplexMatrix> =
        spec_b.projectors.iter().map(|p| embed(p, dims, Subsystem::Second)).collect::<Result<_>>()?;

    let mut res_a = 0.0f64;
    let mut res_b = 0.0f64;
    let mut res_c = 0.0f64;
    let mut res_d = 0.0f64;

    // (a) every table entry against δ_{ii'} p_i under the matching
    for (i, row) in table.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            let target = if matching.contains(&(i, j)) { spec_a.probabilities[i] } else { 0.0 };
            res_a = res_a.max((p - target).abs());
        }
    }

    for &(i, j) in &matching {
        let pa = &emb_a[i];
        let pb = &emb_b[j];
        // (b)
        res_b = res_b.max(frobenius_distance(&(pa * rho * pa), &(pb * rho * pb)) / rho_norm);
        // (c) conditional state of side 2 given P₁^i
        let cond = partial_trace(&(pa * rho), dims, Subsystem::Second)? / Complex64::from(spec_a.probabilities[i]);
        let implied = (cond * &spec_b.projectors[j]).trace().re;
        res_c = res_c.max((1.0 - implied).abs());
        // (d)
        res_d = res_d.max(frobenius_distance(&(pa * rho), &(pb * rho)) / rho_norm);
    }

    // unmatched detectable values cannot satisfy any condition
    let unmatched_a = (0..spec_a.len()).filter(|i| !matching.iter().any(|(a, _)| a == i));
    let unmatched_b = (0..spec_b.len()).filter(|j| !matching.iter().any(|(_, b)| b == j));
    for (p, prob) in unmatched_a
        .map(|i| (&emb_a[i], spec_a.probabilities[i]))
        .chain(unmatched_b.map(|j| (&emb_b[j], spec_b.probabilities[j])))
    {
        res_a = res_a.max(prob);
        res_b = res_b.max(frobenius_norm(&(p * rho * p)) / rho_norm);
        res_c = res_c.max(1.0);
        res_d = res_d.max(frobenius_norm(&(p * rho)) / rho_norm);
    }

    let complete_flag = [&spec_a, &spec_b].iter().all(|spec| {
        spec.projectors
            .iter()
            .all(|p| (trace_re(&(p * &spec.range_projector)) - 1.0).abs() < tol)
    });

    let condition_verdicts = [res_a < tol, res_b < tol, res_c < tol, res_d < tol];
    let verdict = comm_a < tol && comm_b < tol && pairing.is_some() && condition_verdicts.iter().all(|&v| v);
    let strong_algebraic_residual = match &pairing {
        Some(p) if verdict => strong_residual(state, &spec_a, &spec_b, p, tol),
        _ => None,
    };

    let report = TwinReport {
        commutator_residuals: (comm_a, comm_b),
        spectra_match,
        pairing,
        residual_a: res_a,
        residual_b: res_b,
        residual_c: res_c,
        residual_d: res_d,
        condition_verdicts,
        verdict,
        complete_flag,
        strong_algebraic_residual,
        tolerance: tol,
    };
    if report.conditions_disagree() {
        return Err(Error::ConditionDisagreement(Box::new(report)));
    }
    Ok(report)
}

fn strong_residual(
    state: &BipartiteState,
    spec_a: &DetectableSpectrum,
    spec_b: &DetectableSpectrum,
    pairing: &SpectralPairing,
    tol: f64,
) -> Option<f64> {
    let labels_equal = pairing.pairs.iter().all(|&(i, j)| {
        let (a, b) = (spec_a.eigenvalues[i], spec_b.eigenvalues[j]);
        (a - b).abs() <= tol * a.abs().max(1.0)
    });
    if !labels_equal {
        return None;
    }
    let dims = state.dims();
    let rho = state.rho12().matrix();
    let a = embed(&spec_a.restricted_operator(), dims, Subsystem::First).ok()?;
    let b = embed(&spec_b.restricted_operator(), dims, Subsystem::Second).ok()?;
    Some(frobenius_distance(&(a * rho), &(b * rho)))
}

/// `‖A₁ρ₁₂ − B₂ρ₁₂‖_F` with both operators restricted to their detectable parts,
/// or `None` when some paired eigenvalues differ.
pub fn check_strong_algebraic(
    state: &BipartiteState,
    a1: &SubsystemObservable,
    b2: &SubsystemObservable,
    pairing: &SpectralPairing,
) -> Result<Option<f64>> {
    check_sides(state, a1, b2)?;
    let spec_a = detectable_spectrum(state, a1, DEFAULT_EPSILON)?;
    let spec_b = detectable_spectrum(state, b2, DEFAULT_EPSILON)?;
    if pairing.pairs.iter().any(|&(i, j)| i >= spec_a.len() || j >= spec_b.len()) {
        return Err(Error::InvalidObservable("pairing indexes outside the detectable spectra".into()));
    }
    Ok(strong_residual(state, &spec_a, &spec_b, pairing, DEFAULT_TWIN_TOL))
}

/// Complete twin observables in the Schmidt bases of `phi`, labelled `1, 2, 3, …`
/// on both sides so that paired eigenvalues coincide.
pub fn construct_pure_twins(phi: &StateVector, dims: Dims) -> Result<(SubsystemObservable, SubsystemObservable)> {
    let form = schmidt_decompose(phi, dims)?;
    let basis1 = complete_orthonormal_basis(&form.basis1, dims.d1);
    let basis2 = complete_orthonormal_basis(&form.basis2, dims.d2);
    let a1 = Observable::from_basis_default_labels(&basis1)?;
    let b2 = Observable::from_basis_default_labels(&basis2)?;
    Ok((SubsystemObservable::new(a1, Subsystem::First), SubsystemObservable::new(b2, Subsystem::Second)))
}

/// `Σ r_i |i⟩₁⟨i|₁ ⊗ |i⟩₂⟨i|₂` from the Schmidt form of `phi`.
pub fn dephase_in_schmidt_basis(phi: &StateVector, dims: Dims) -> Result<BipartiteState> {
    let form = schmidt_decompose(phi, dims)?;
    let weights = form.weights();
    let n = dims.total();
    let m = weights
        .iter()
        .zip(form.basis1.iter().zip(&form.basis2))
        .fold(ComplexMatrix::zeros(n, n), |acc, (&r, (u, v))| acc + outer(&tensor_vec(u, v)) * Complex64::from(r));
    BipartiteState::new(&m, dims)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::luders_apply_subsystem;
    use crate::numeric::c;
    use nalgebra::DVector;

    fn diag(values: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|&v| c(v, 0.))))
    }

    fn ket(entries: &[f64]) -> StateVector {
        StateVector::from_iterator(entries.len(), entries.iter().map(|&v| c(v, 0.)))
    }

    fn z(side: Subsystem) -> SubsystemObservable {
        SubsystemObservable::new(Observable::from_matrix(&diag(&[1., -1.])).unwrap(), side)
    }

    fn x(side: Subsystem) -> SubsystemObservable {
        let m = ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        SubsystemObservable::new(Observable::from_matrix(&m).unwrap(), side)
    }

    fn dims22() -> Dims {
        Dims::new(2, 2).unwrap()
    }

    fn bell_vec() -> StateVector {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ket(&[s, 0., 0., s])
    }

    fn bell() -> BipartiteState {
        BipartiteState::from_pure(&bell_vec(), dims22()).unwrap()
    }

    #[test]
    fn detectable_spectrum_examples() {
        let s = detectable_spectrum(&bell(), &z(Subsystem::First), DEFAULT_EPSILON).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.probabilities.iter().all(|&p| (p - 0.5).abs() < 1e-15));

        let zero = BipartiteState::from_pure(&ket(&[1., 0., 0., 0.]), dims22()).unwrap();
        let s = detectable_spectrum(&zero, &z(Subsystem::First), DEFAULT_EPSILON).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0]);
        assert_eq!(s.undetectable, vec![-1.0]);

        // rank-2 ρ₁ on C³ with the third basis vector in its kernel
        let dims = Dims::new(3, 1).unwrap();
        let st = BipartiteState::new(&diag(&[0.4, 0.6, 0.]), dims).unwrap();
        let obs = SubsystemObservable::new(Observable::from_matrix(&diag(&[1., 2., 3.])).unwrap(), Subsystem::First);
        let s = detectable_spectrum(&st, &obs, DEFAULT_EPSILON).unwrap();
        assert_eq!(s.eigenvalues, vec![1., 2.]);
        assert_eq!(s.undetectable, vec![3.]);
    }

    #[test]
    fn pairing_examples() {
        let st = bell();
        let sa = detectable_spectrum(&st, &z(Subsystem::First), DEFAULT_EPSILON).unwrap();
        let sb = detectable_spectrum(&st, &z(Subsystem::Second), DEFAULT_EPSILON).unwrap();
        let p = pair_spectra(&st, &sa, &sb, DEFAULT_TWIN_TOL).unwrap();
        assert_eq!(p.pairs, vec![(0, 0), (1, 1)]);

        let sx = detectable_spectrum(&st, &x(Subsystem::Second), DEFAULT_EPSILON).unwrap();
        assert!(pair_spectra(&st, &sa, &sx, DEFAULT_TWIN_TOL).is_none());

        let (a, b) = (0.75f64.sqrt(), 0.25f64.sqrt());
        let crossed = BipartiteState::from_pure(&ket(&[0., a, b, 0.]), dims22()).unwrap();
        let sa = detectable_spectrum(&crossed, &z(Subsystem::First), DEFAULT_EPSILON).unwrap();
        let sb = detectable_spectrum(&crossed, &z(Subsystem::Second), DEFAULT_EPSILON).unwrap();
        let p = pair_spectra(&crossed, &sa, &sb, DEFAULT_TWIN_TOL).unwrap();
        // index 1 is eigenvalue +1 (|0⟩) on side 1, index 0 is −1 (|1⟩) on side 2
        assert_eq!(p.partner_of(1), Some(0));
        assert_eq!(sa.eigenvalues[1], 1.0);
        assert_eq!(sb.eigenvalues[0], -1.0);
    }

    #[test]
    fn bell_zz_are_complete_twins() {
        let r = verify_twins(&bell(), &z(Subsystem::First), &z(Subsystem::Second), DEFAULT_TWIN_TOL).unwrap();
        assert!(r.verdict && r.complete_flag && r.spectra_match);
        assert!(r.residuals().iter().all(|&v| v < 1e-14));
        assert!(r.strong_algebraic_residual.unwrap() < 1e-10);
    }

    #[test]
    fn bell_zx_fail_every_condition() {
        let r = verify_twins(&bell(), &z(Subsystem::First), &x(Subsystem::Second), DEFAULT_TWIN_TOL).unwrap();
        assert!(!r.verdict);
        assert!(r.pairing.is_none());
        assert!((r.residual_a - 0.25).abs() < 1e-14);
        assert!(r.residuals().iter().all(|&v| v > DEFAULT_TWIN_TOL));
    }

    #[test]
    fn strong_relation_needs_equal_labels() {
        let st = bell();
        let a = z(Subsystem::First);
        let b = z(Subsystem::Second);
        let pairing = SpectralPairing { pairs: vec![(0, 0), (1, 1)] };
        assert!(check_strong_algebraic(&st, &a, &b, &pairing).unwrap().unwrap() < 1e-10);
        let relabeled = SubsystemObservable::new(b.observable.relabel(&[5., 7.]).unwrap(), Subsystem::Second);
        assert!(check_strong_algebraic(&st, &a, &relabeled, &pairing).unwrap().is_none());

        let uneven = BipartiteState::from_pure(&ket(&[0.75f64.sqrt(), 0., 0., 0.25f64.sqrt()]), dims22()).unwrap();
        assert!(check_strong_algebraic(&uneven, &a, &b, &pairing).unwrap().unwrap() < 1e-10);
    }

    #[test]
    fn pure_twins_and_dephasing() {
        let (a, b) = construct_pure_twins(&bell_vec(), dims22()).unwrap();
        let r = verify_twins(&bell(), &a, &b, DEFAULT_TWIN_TOL).unwrap();
        assert!(r.verdict && r.complete_flag);

        let deph = dephase_in_schmidt_basis(&bell_vec(), dims22()).unwrap();
        assert!(frobenius_distance(deph.rho12().matrix(), &diag(&[0.5, 0., 0., 0.5])) < 1e-14);
        let via_a = luders_apply_subsystem(&a, &bell()).unwrap();
        let via_b = luders_apply_subsystem(&b, &bell()).unwrap();
        assert!(frobenius_distance(via_a.rho12().matrix(), deph.rho12().matrix()) < 1e-10);
        assert!(frobenius_distance(via_b.rho12().matrix(), deph.rho12().matrix()) < 1e-10);
        let r = verify_twins(&deph, &a, &b, DEFAULT_TWIN_TOL).unwrap();
        assert!(r.verdict && r.complete_flag);

        let prod = ket(&[0., 1., 0., 0.]);
        let (a, b) = construct_pure_twins(&prod, dims22()).unwrap();
        let st = BipartiteState::from_pure(&prod, dims22()).unwrap();
        let r = verify_twins(&st, &a, &b, DEFAULT_TWIN_TOL).unwrap();
        assert!(r.verdict);
        assert_eq!(r.pairing.unwrap().pairs.len(), 1);
        let d = dephase_in_schmidt_basis(&prod, dims22()).unwrap();
        assert!(frobenius_distance(d.rho12().matrix(), st.rho12().matrix()) < 1e-14);

        let uneven = ket(&[0.75f64.sqrt(), 0., 0., 0.25f64.sqrt()]);
        let d = dephase_in_schmidt_basis(&uneven, dims22()).unwrap();
        assert!(frobenius_distance(d.rho12().matrix(), &diag(&[0.75, 0., 0., 0.25])) < 1e-14);
    }

    #[test]
    fn wrong_sides_rejected() {
        assert!(matches!(
            verify_twins(&bell(), &z(Subsystem::Second), &z(Subsystem::Second), DEFAULT_TWIN_TOL),
            Err(Error::WrongSubsystem { .. })
        ));
        assert!(construct_pure_twins(&ket(&[1., 1., 0., 0.]), dims22()).is_err());
    }
}
