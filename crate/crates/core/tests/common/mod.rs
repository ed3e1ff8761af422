//! Test-side reference computations, written without the library's numeric
//! helpers so that they can check them.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use qcorr::random::{random_density_with, rng_from_seed};
use qcorr::{ComplexMatrix, Dims};

pub const DIMS: [(usize, usize); 3] = [(2, 2), (2, 3), (3, 3)];

pub fn dims(d: (usize, usize)) -> Dims {
    Dims::new(d.0, d.1).unwrap()
}

/// Spectrum of a Hermitian matrix from its real symmetric embedding
/// `[[Re, −Im], [Im, Re]]`, where every eigenvalue appears twice.
pub fn spectrum(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.nrows();
    let mut r = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            r[(i, j)] = z.re;
            r[(i + n, j + n)] = z.re;
            r[(i + n, j)] = z.im;
            r[(i, j + n)] = -z.im;
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(r).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev.into_iter().step_by(2).collect()
}

pub fn entropy_bits(m: &ComplexMatrix) -> f64 {
    spectrum(m).into_iter().filter(|&x| x > 1e-14).map(|x| -x * x.log2()).sum()
}

pub fn shannon_bits(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 1e-15).map(|&x| -x * x.log2()).sum()
}

/// Partial trace by explicit index sums; `keep_first` keeps subsystem 1.
pub fn trace_out(m: &ComplexMatrix, d1: usize, d2: usize, keep_first: bool) -> ComplexMatrix {
    if keep_first {
        ComplexMatrix::from_fn(d1, d1, |i, j| (0..d2).map(|k| m[(i * d2 + k, j * d2 + k)]).sum())
    } else {
        ComplexMatrix::from_fn(d2, d2, |i, j| (0..d1).map(|k| m[(k * d2 + i, k * d2 + j)]).sum())
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (p, q) = (b.nrows(), b.ncols());
    ComplexMatrix::from_fn(a.nrows() * p, a.ncols() * q, |i, j| a[(i / p, j / q)] * b[(i % p, j % q)])
}

pub fn fro(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn density(n: usize, rank: usize, seed: u64) -> ComplexMatrix {
    random_density_with(n, rank, &mut rng_from_seed(seed)).unwrap()
}

pub fn cz(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Entropy of a 2×2 Hermitian unit-trace matrix in closed form.
pub fn qubit_entropy(m: &ComplexMatrix) -> f64 {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    let t = a + d;
    let disc = (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt();
    shannon_bits(&[t / 2.0 + disc, t / 2.0 - disc])
}

/// Information gain about side 2 from measuring side 1 of a two-qubit state in
/// the basis {|n⟩, |n⊥⟩} with Bloch angles (θ, φ).
pub fn qubit_gain(rho: &ComplexMatrix, theta: f64, phi: f64) -> f64 {
    let n = [cz((theta / 2.0).cos(), 0.0), Complex64::from_polar((theta / 2.0).sin(), phi)];
    let m = [cz(-(theta / 2.0).sin(), 0.0) * Complex64::from_polar(1.0, -phi), cz((theta / 2.0).cos(), 0.0)];
    let s2 = qubit_entropy(&trace_out(rho, 2, 2, false));
    let mut avg = 0.0;
    for v in [n, m] {
        // ⟨v| ⊗ 1 applied on both sides
        let cond = ComplexMatrix::from_fn(2, 2, |i, j| {
            let mut s = cz(0.0, 0.0);
            for a in 0..2 {
                for b in 0..2 {
                    s += v[a].conj() * rho[(a * 2 + i, b * 2 + j)] * v[b];
                }
            }
            s
        });
        let p = cond[(0, 0)].re + cond[(1, 1)].re;
        if p > 1e-15 {
            avg += p * qubit_entropy(&(cond / cz(p, 0.0)));
        }
    }
    s2 - avg
}
