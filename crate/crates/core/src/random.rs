//! Seeded sampling of states, unitaries, and observables.
//!
//! Every sample is a pure function of `(seed, parameters)`. Streams are
//! ChaCha8 generators keyed by a seed; independent sub-streams come from
//! [`derive_seed`].

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numeric::{columns, outer, partial_trace, ComplexMatrix, Dims, StateVector, Subsystem};

pub type StateRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> StateRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes a parent seed with a stream index (splitmix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unit vector in `C^n`.
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> StateVector {
    loop {
        let v = DVector::from_fn(n, |_, _| gaussian_complex(rng));
        let norm = v.norm();
        if norm > 1e-12 {
            return v / Complex64::from(norm);
        }
    }
}

/// Haar-random unitary via QR of a complex Ginibre matrix with the phase fix.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| gaussian_complex(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::from(1.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Haar-random orthonormal basis of `C^n`.
pub fn random_basis<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<StateVector> {
    columns(&haar_unitary(n, rng))
}

/// Density matrix of rank `rank`: partial trace of a Haar-random purification
/// with an ancilla of dimension `rank`.
pub fn random_density_with<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if rank == 0 || rank > n {
        return Err(Error::RankOutOfRange { rank, max: n });
    }
    let psi = random_unit_vector(n * rank, rng);
    let dims = Dims::new(n, rank)?;
    partial_trace(&outer(&psi), dims, Subsystem::First)
}

/// Haar-distributed pure state on the composite space; deterministic in `seed`.
pub fn sample_random_pure(dims: Dims, seed: u64) -> StateVector {
    random_unit_vector(dims.total(), &mut rng_from_seed(seed))
}

/// Random mixed state of the requested rank on the composite space.
pub fn sample_random_density(dims: Dims, rank: usize, seed: u64) -> Result<ComplexMatrix> {
    random_density_with(dims.total(), rank, &mut rng_from_seed(seed))
}

/// Random Hermitian matrix whose spectral projectors group a Haar basis into
/// `blocks` consecutive blocks of random sizes, labelled by distinct integers.
///
/// `blocks == n` gives a complete observable.
pub fn random_observable_matrix<R: Rng + ?Sized>(n: usize, blocks: usize, rng: &mut R) -> ComplexMatrix {
    let blocks = blocks.clamp(1, n);
    let basis = random_basis(n, rng);
    // choose blocks-1 distinct cut points in 1..n
    let mut cuts: Vec<usize> = (1..n).collect();
    for i in (1..cuts.len()).rev() {
        let j = rng.random_range(0..=i);
        cuts.swap(i, j);
    }
    let mut cuts: Vec<usize> = cuts.into_iter().take(blocks - 1).collect();
    cuts.sort_unstable();
    cuts.push(n);

    let mut labels: Vec<f64> = (0..blocks).map(|k| k as f64 + 1.0).collect();
    for i in (1..labels.len()).rev() {
        let j = rng.random_range(0..=i);
        labels.swap(i, j);
    }

    let mut m = ComplexMatrix::zeros(n, n);
    let mut start = 0;
    for (block, &end) in cuts.iter().enumerate() {
        for v in &basis[start..end] {
            m += outer(v) * Complex64::from(labels[block]);
        }
        start = end;
    }
    m
}
