//! Seeded generators of twin and non-twin instances, for sweeps and tests.
//!
//! Block instances rely on: with side-1 projectors `P₁^i` and side-2
//! projectors `P₂^i`, any `ρ₁₂ = Σ_i p_i ρ_i` with each `ρ_i` supported on
//! `P₁^i ⊗ P₂^i` satisfies `P₁^i ρ₁₂ = P₂^i ρ₁₂`.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::measurement::{Observable, SubsystemObservable};
use crate::numeric::{outer, tensor_vec, ComplexMatrix, Dims, StateVector, Subsystem};
use crate::random::{random_basis, random_density_with, random_unit_vector, rng_from_seed, StateRng};
use crate::state::BipartiteState;
use crate::twins::{construct_pure_twins, dephase_in_schmidt_basis};

/// Smallest weight given to a detectable block.
pub const MIN_BLOCK_WEIGHT: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct TwinInstance {
    pub state: BipartiteState,
    pub a1: SubsystemObservable,
    pub b2: SubsystemObservable,
    /// Paired eigenvalues coincide.
    pub equal_labels: bool,
}

/// Splits `n` into `blocks` positive sizes.
fn block_sizes(n: usize, blocks: usize, rng: &mut StateRng) -> Vec<usize> {
    let mut sizes = vec![1; blocks];
    for _ in blocks..n {
        sizes[rng.random_range(0..blocks)] += 1;
    }
    sizes
}

fn group(basis: &[StateVector], sizes: &[usize]) -> Vec<Vec<StateVector>> {
    let mut out = Vec::with_capacity(sizes.len());
    let mut start = 0;
    for &s in sizes {
        out.push(basis[start..start + s].to_vec());
        start += s;
    }
    out
}

fn projector(vectors: &[StateVector], d: usize) -> ComplexMatrix {
    vectors.iter().fold(ComplexMatrix::zeros(d, d), |acc, v| acc + outer(v))
}

fn weights(k: usize, rng: &mut StateRng) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let free = 1.0 - MIN_BLOCK_WEIGHT * k as f64;
    raw.iter().map(|r| MIN_BLOCK_WEIGHT + free * r / total).collect()
}

/// Distinct labels per side, disjoint across sides unless `equal`, in which
/// case the first `paired` side-2 labels copy side 1.
fn labels(m1: usize, m2: usize, paired: usize, equal: bool, rng: &mut StateRng) -> (Vec<f64>, Vec<f64>) {
    let mut pool: Vec<f64> = (1..=(m1 + m2) as i64).map(|x| x as f64).collect();
    pool.shuffle(rng);
    let l1 = pool[..m1].to_vec();
    let mut l2 = pool[m1..].to_vec();
    if equal {
        l2[..paired].copy_from_slice(&l1[..paired]);
    }
    (l1, l2)
}

fn pure_twins(phi: &StateVector, dims: Dims, equal_labels: bool) -> Result<(SubsystemObservable, SubsystemObservable)> {
    let (a1, b2) = construct_pure_twins(phi, dims)?;
    if equal_labels {
        return Ok((a1, b2));
    }
    let shifted: Vec<f64> = b2.observable.eigenvalues().iter().map(|x| x + 10.0).collect();
    Ok((a1, SubsystemObservable::new(b2.observable.relabel(&shifted)?, Subsystem::Second)))
}

/// A twin instance; `seed % 4` picks the family:
///
/// 0. a random pure state with its Schmidt twins;
/// 1. the Schmidt-dephased mixture of a random pure state, same twins;
/// 2. a mixture of such dephased states sharing Schmidt bases, some weights zero;
/// 3. paired blocks `P₁^i`, `P₂^i` of equal rank carrying random states on
///    `P₁^i ⊗ P₂^i`, with coarse-grained observables and leftover dimensions
///    in undetectable blocks.
pub fn twin_instance(dims: Dims, seed: u64) -> Result<TwinInstance> {
    let mut rng = rng_from_seed(seed);
    let equal_labels = rng.random_bool(0.5);
    match seed % 4 {
        0 | 1 => {
            let phi = random_unit_vector(dims.total(), &mut rng);
            let state = if seed.is_multiple_of(4) {
                BipartiteState::from_pure(&phi, dims)?
            } else {
                dephase_in_schmidt_basis(&phi, dims)?
            };
            let (a1, b2) = pure_twins(&phi, dims, equal_labels)?;
            Ok(TwinInstance { state, a1, b2, equal_labels })
        }
        2 => {
            let m = dims.d1.min(dims.d2);
            let basis1 = random_basis(dims.d1, &mut rng);
            let basis2 = random_basis(dims.d2, &mut rng);
            let mut w: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
            // drop one weight now and then to leave an undetectable pair
            if m > 1 && rng.random_bool(0.5) {
                w[rng.random_range(0..m)] = 0.0;
            }
            let total: f64 = w.iter().sum();
            let n = dims.total();
            let rho = (0..m).fold(ComplexMatrix::zeros(n, n), |acc, i| {
                acc + outer(&tensor_vec(&basis1[i], &basis2[i])) * Complex64::from(w[i] / total)
            });
            let state = BipartiteState::new(&rho, dims)?;
            let (l1, l2) = labels(dims.d1, dims.d2, m, equal_labels, &mut rng);
            let a1 = SubsystemObservable::new(Observable::from_basis(&l1, &basis1)?, Subsystem::First);
            let b2 = SubsystemObservable::new(Observable::from_basis(&l2, &basis2)?, Subsystem::Second);
            Ok(TwinInstance { state, a1, b2, equal_labels })
        }
        _ => block_twins(dims, equal_labels, &mut rng),
    }
}

fn block_twins(dims: Dims, equal_labels: bool, rng: &mut StateRng) -> Result<TwinInstance> {
    let m = dims.d1.min(dims.d2);
    let used = rng.random_range(1..=m);
    let k = rng.random_range(1..=used);
    let sizes = block_sizes(used, k, rng);
    let basis1 = random_basis(dims.d1, rng);
    let basis2 = random_basis(dims.d2, rng);
    let mut sizes1 = sizes.clone();
    let mut sizes2 = sizes;
    if dims.d1 > used {
        sizes1.push(dims.d1 - used);
    }
    if dims.d2 > used {
        sizes2.push(dims.d2 - used);
    }
    let blocks1 = group(&basis1, &sizes1);
    let blocks2 = group(&basis2, &sizes2);
    let p = weights(k, rng);

    let n = dims.total();
    let mut rho = ComplexMatrix::zeros(n, n);
    for i in 0..k {
        let product: Vec<StateVector> =
            blocks1[i].iter().flat_map(|u| blocks2[i].iter().map(move |v| tensor_vec(u, v))).collect();
        let dim = product.len();
        let rank = rng.random_range(1..=dim);
        let local = random_density_with(dim, rank, rng)?;
        let iso = ComplexMatrix::from_columns(&product);
        rho += (&iso * local * iso.adjoint()) * Complex64::from(p[i]);
    }
    let state = BipartiteState::new(&rho, dims)?;

    let (l1, l2) = labels(sizes1.len(), sizes2.len(), k, equal_labels, rng);
    let proj1: Vec<ComplexMatrix> = blocks1.iter().map(|b| projector(b, dims.d1)).collect();
    let proj2: Vec<ComplexMatrix> = blocks2.iter().map(|b| projector(b, dims.d2)).collect();
    let a1 = SubsystemObservable::new(Observable::from_projectors(&l1, proj1)?, Subsystem::First);
    let b2 = SubsystemObservable::new(Observable::from_projectors(&l2, proj2)?, Subsystem::Second);
    Ok(TwinInstance { state, a1, b2, equal_labels })
}

/// A pair of observables and a state that are not twins.
///
/// Cycles through three families: a twin instance mixed with a full-rank
/// state, random observables on a random state, and local observables on a
/// product of commuting states (commutation holds, correlation does not).
pub fn non_twin_instance(dims: Dims, seed: u64) -> Result<TwinInstance> {
    let mut rng = rng_from_seed(seed ^ 0x9e37_79b9_7f4a_7c15);
    let n = dims.total();
    let base = twin_instance(dims, seed)?;
    // single-valued observables are twins of anything
    let nontrivial = base.a1.observable.eigenvalues().len() > 1 && base.b2.observable.eigenvalues().len() > 1;
    match (seed % 3, nontrivial) {
        (0, true) => {
            let t = rng.random_range(0.05..0.5);
            let noise = random_density_with(n, n, &mut rng)?;
            let m = base.state.rho12().matrix() * Complex64::from(1.0 - t) + noise * Complex64::from(t);
            Ok(TwinInstance { state: BipartiteState::new(&m, dims)?, ..base })
        }
        (0, false) | (1, _) => {
            let rank = rng.random_range(1..=n);
            let state = BipartiteState::new(&random_density_with(n, rank, &mut rng)?, dims)?;
            let a = Observable::from_basis_default_labels(&random_basis(dims.d1, &mut rng))?;
            let b = Observable::from_basis_default_labels(&random_basis(dims.d2, &mut rng))?;
            Ok(TwinInstance {
                state,
                a1: SubsystemObservable::new(a, Subsystem::First),
                b2: SubsystemObservable::new(b, Subsystem::Second),
                equal_labels: true,
            })
        }
        _ => {
            let basis1 = random_basis(dims.d1, &mut rng);
            let basis2 = random_basis(dims.d2, &mut rng);
            // both marginals spread over at least two outcomes
            let w1 = spread_weights(dims.d1, &mut rng);
            let w2 = spread_weights(dims.d2, &mut rng);
            let r1 = diagonal_in(&basis1, &w1);
            let r2 = diagonal_in(&basis2, &w2);
            let state = BipartiteState::new(&crate::numeric::tensor_product(&r1, &r2), dims)?;
            let a = Observable::from_basis_default_labels(&basis1)?;
            let b = Observable::from_basis_default_labels(&basis2)?;
            Ok(TwinInstance {
                state,
                a1: SubsystemObservable::new(a, Subsystem::First),
                b2: SubsystemObservable::new(b, Subsystem::Second),
                equal_labels: true,
            })
        }
    }
}

fn spread_weights(d: usize, rng: &mut StateRng) -> Vec<f64> {
    let raw: Vec<f64> = (0..d).map(|_| 0.2 + rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

fn diagonal_in(basis: &[StateVector], w: &[f64]) -> ComplexMatrix {
    let d = basis.len();
    basis.iter().zip(w).fold(ComplexMatrix::zeros(d, d), |acc, (v, &x)| acc + outer(v) * Complex64::from(x))
}
