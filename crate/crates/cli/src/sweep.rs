//! Randomized checks of the information inequalities and identities.

use std::collections::BTreeMap;

use qcorr::entropy::{mutual_information, mutual_information_via_relative, relative_entropy, subsystem_entropy};
use qcorr::measurement::{information_gain, joint_distribution, joint_mutual_information, luders_apply};
use qcorr::numeric::{embed, frobenius_distance, partial_trace};
use qcorr::random::{derive_seed, random_basis, random_density_with, random_observable_matrix, rng_from_seed};
use qcorr::state::validate_density;
use qcorr::suprema::basis_observable;
use qcorr::{BipartiteState, Bits, ComplexMatrix, Dims, Observable, Result, Subsystem};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Frobenius residual allowed for the partial-trace identities.
pub const IDENTITY_TOL: f64 = 1e-10;
pub const MAX_SIDE: usize = 8;

pub const CHECKS: [&str; 5] = ["chain", "relative_form", "partial_trace_identities", "lindblad", "lieb"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub sample: usize,
    pub check: &'static str,
    /// Negative slack, or the offending residual.
    pub amount: f64,
}

/// Everything computed for one sample.
#[derive(Debug, Clone)]
pub struct SampleOutcome {
    pub index: usize,
    pub rank: usize,
    pub state: BipartiteState,
    /// Per check: the margin by which it held (negative means violated).
    pub margins: Vec<(&'static str, f64)>,
}

fn finite_gap(upper: Bits, lower: Bits) -> f64 {
    match (upper.is_infinite(), lower.is_infinite()) {
        (true, _) => f64::INFINITY,
        (false, true) => f64::NEG_INFINITY,
        _ => upper.value() - lower.value(),
    }
}

/// Smallest slack in `0 ≤ I(m1:m2) ≤ I(m1→2) ≤ I(1:2)` and its side-2 mirror.
pub fn chain_slack(state: &BipartiteState, a: &[qcorr::StateVector], b: &[qcorr::StateVector]) -> Result<f64> {
    let a1 = basis_observable(a, Subsystem::First)?;
    let b2 = basis_observable(b, Subsystem::Second)?;
    let joint = joint_mutual_information(&joint_distribution(state, &a1, &b2)?)?.value();
    let gain1 = information_gain(state, &a1)?.value();
    let gain2 = information_gain(state, &b2)?.value();
    let total = mutual_information(state)?.value();
    Ok([joint, gain1 - joint, total - gain1, gain2 - joint, total - gain2].into_iter().fold(f64::INFINITY, f64::min))
}

/// `‖Tr₂(T_A T_B ρ₁₂) − T_A ρ₁‖` and `‖Tr₁(T_A T_B ρ₁₂) − T_B ρ₂‖`.
pub fn partial_trace_residuals(state: &BipartiteState, a: &Observable, b: &Observable) -> Result<(f64, f64)> {
    let dims = state.dims();
    let ab = dephase_embedded(state.rho12().matrix(), a, b, dims)?;
    let r1 = frobenius_distance(&partial_trace(&ab, dims, Subsystem::First)?, luders_apply(a, state.rho1())?.matrix());
    let r2 = frobenius_distance(&partial_trace(&ab, dims, Subsystem::Second)?, luders_apply(b, state.rho2())?.matrix());
    Ok((r1, r2))
}

fn dephase_embedded(rho: &ComplexMatrix, a: &Observable, b: &Observable, dims: Dims) -> Result<ComplexMatrix> {
    let mut out = rho.clone();
    for (obs, side) in [(b, Subsystem::Second), (a, Subsystem::First)] {
        let mut next = ComplexMatrix::zeros(out.nrows(), out.ncols());
        for p in obs.projectors() {
            let e = embed(p, dims, side)?;
            next += &e * &out * &e;
        }
        out = next;
    }
    Ok(out)
}

/// Margins of `S(T_Aσ|T_Aρ) ≤ S(σ|ρ)` and `S(T_B T_Aσ|T_B T_Aρ) ≤ S(T_Aσ|T_Aρ)`.
pub fn lindblad_margins(
    sigma: &ComplexMatrix,
    rho: &ComplexMatrix,
    a: &Observable,
    b: &Observable,
) -> Result<(f64, f64)> {
    let sigma = validate_density(sigma)?;
    let rho = validate_density(rho)?;
    let before = relative_entropy(&sigma, &rho)?;
    let (sa, ra) = (luders_apply(a, &sigma)?, luders_apply(a, &rho)?);
    let once = relative_entropy(&sa, &ra)?;
    let twice = relative_entropy(&luders_apply(b, &sa)?, &luders_apply(b, &ra)?)?;
    Ok((finite_gap(before, once), finite_gap(once, twice)))
}

/// `2·min(S(1), S(2)) − I(1:2)`.
pub fn lieb_slack(state: &BipartiteState) -> Result<f64> {
    let s1 = subsystem_entropy(state, Subsystem::First).value();
    let s2 = subsystem_entropy(state, Subsystem::Second).value();
    Ok(2.0 * s1.min(s2) - mutual_information(state)?.value())
}

fn incomplete(n: usize, rng: &mut impl Rng) -> Result<Observable> {
    let blocks = rng.random_range(1..=n);
    Observable::from_matrix(&random_observable_matrix(n, blocks, rng))
}

/// Runs sample `index` of a sweep seeded with `seed`.
pub fn run_sample(dims: Dims, seed: u64, index: usize, tol: f64) -> Result<SampleOutcome> {
    let n = dims.total();
    let rank = 1 + index % n;
    let mut rng = rng_from_seed(derive_seed(seed, index as u64));
    let rho = random_density_with(n, rank, &mut rng)?;
    let state = BipartiteState::new(&rho, dims)?;

    let a = random_basis(dims.d1, &mut rng);
    let b = random_basis(dims.d2, &mut rng);
    let chain = chain_slack(&state, &a, &b)?;

    let relative = tol
        - (mutual_information(&state)?.value() - mutual_information_via_relative(&state)?.value()).abs();

    let a_inc = incomplete(dims.d1, &mut rng)?;
    let b_inc = incomplete(dims.d2, &mut rng)?;
    let (r1, r2) = partial_trace_residuals(&state, &a_inc, &b_inc)?;
    let identities = IDENTITY_TOL - r1.max(r2);

    let sigma = random_density_with(n, n, &mut rng)?;
    let ta = incomplete(n, &mut rng)?;
    let tb = incomplete(n, &mut rng)?;
    let (l1, l2) = lindblad_margins(&sigma, &rho, &ta, &tb)?;

    let margins = vec![
        ("chain", chain + tol),
        ("relative_form", relative),
        ("partial_trace_identities", identities),
        ("lindblad", l1.min(l2) + tol),
        ("lieb", lieb_slack(&state)? + tol),
    ];
    Ok(SampleOutcome { index, rank, state, margins })
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckSummary {
    pub evaluated: usize,
    pub violations: usize,
    /// Smallest margin seen; negative means violated.
    pub worst_margin: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub samples: Vec<SampleOutcome>,
    pub checks: BTreeMap<&'static str, CheckSummary>,
    pub violations: Vec<Violation>,
}

/// Samples run in parallel; results come back in sample order.
pub fn run_sweep(dims: Dims, samples: usize, seed: u64, tol: f64) -> Result<SweepResult> {
    let outcomes: Vec<SampleOutcome> =
        (0..samples).into_par_iter().map(|k| run_sample(dims, seed, k, tol)).collect::<Result<_>>()?;
    let mut checks: BTreeMap<&'static str, CheckSummary> = CHECKS
        .iter()
        .map(|&c| (c, CheckSummary { evaluated: 0, violations: 0, worst_margin: f64::INFINITY }))
        .collect();
    let mut violations = Vec::new();
    for o in &outcomes {
        for &(name, margin) in &o.margins {
            let entry = checks.get_mut(name).expect("known check");
            entry.evaluated += 1;
            entry.worst_margin = entry.worst_margin.min(margin);
            if margin < 0.0 {
                entry.violations += 1;
                violations.push(Violation { sample: o.index, check: name, amount: -margin });
            }
        }
    }
    Ok(SweepResult { samples: outcomes, checks, violations })
}
