//! Suprema over complete measurement bases: `I(m1→2)`, `I(1←m2)`, `I(m1:m2)`
//! and quantum discord.
//!
//! A complete basis of `C^d` is parametrized as the columns of
//! `U_ref · exp(−i H/2)`, where `H = Σ p_k G_k` runs over a fixed basis of
//! Hermitian generators and `U_ref` is a per-restart reference frame. Each
//! restart maximizes over `p` with a simplex search; the reported value is the
//! best restart, so it is a lower bound on the true supremum.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::entropy::{eta, mutual_information, von_neumann_entropy, Bits};
use crate::error::{Error, Result};
use crate::measurement::{Observable, SubsystemObservable};
use crate::numeric::{
    columns, eigh_sorted, eigvalsh, tensor_vec, unitary_from_generator, ComplexMatrix, Dims, StateVector, Subsystem,
};
use crate::optimize::{maximize, SimplexOptions};
use crate::random::{derive_seed, haar_unitary, rng_from_seed};
use crate::state::BipartiteState;

/// Restarts whose value is within this of the best count as agreeing.
pub const AGREEMENT_TOL: f64 = 1e-6;
/// Outer sweeps of the alternating maximization for the joint supremum.
pub const MAX_SWEEPS: usize = 10;

const GRID_THETA: usize = 41;
const GRID_PHI: usize = 80;
const INITIAL_STEP: f64 = 0.4;

/// Coordinates of a Hermitian generator; length `d²`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisParams(Vec<f64>);

impl BasisParams {
    pub fn new(params: Vec<f64>, d: usize) -> Result<Self> {
        if params.len() != d * d {
            return Err(Error::DimensionMismatch { expected: d * d, found: params.len() });
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidObservable("basis parameters must be finite".into()));
        }
        Ok(BasisParams(params))
    }

    pub fn zeros(d: usize) -> Self {
        BasisParams(vec![0.0; d * d])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    pub f_tol: f64,
    pub seed: u64,
    /// Deterministic Bloch-sphere grid prepass when the measured side is a qubit.
    pub grid_refine: bool,
}

impl Default for OptimizationConfig {
    fn default() -> Self {
        OptimizationConfig { restarts: 32, max_iterations: 2000, f_tol: 1e-8, seed: 0, grid_refine: true }
    }
}

impl OptimizationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidObservable("restarts must be >= 1".into()));
        }
        if self.f_tol.is_nan() || self.f_tol <= 0.0 {
            return Err(Error::InvalidObservable("f_tol must be > 0".into()));
        }
        Ok(())
    }

    fn simplex(&self) -> SimplexOptions {
        SimplexOptions {
            max_iterations: self.max_iterations,
            f_tol: self.f_tol,
            initial_step: INITIAL_STEP,
            reinitializations: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupremumResult {
    pub value: Bits,
    /// Maximizing basis on the measured side (side 1 for joint suprema).
    pub argmax_basis: Vec<StateVector>,
    /// Side-2 basis of the maximizing pair, for joint suprema.
    pub argmax_partner: Option<Vec<StateVector>>,
    /// Candidates within the agreement tolerance of the best, out of `candidates`.
    pub restarts_agreeing: usize,
    /// Searches run: the restarts plus the grid-seeded search when it ran.
    pub candidates: usize,
    pub converged: bool,
    /// Best value of the grid prepass, when it ran.
    pub grid_value: Option<f64>,
}

/// The `k`-th generator of the fixed Hermitian basis of `d×d` matrices:
/// diagonal units first, then for each pair `j<l` the symmetric and
/// antisymmetric (Pauli-x and Pauli-y like) elements.
fn add_generator(h: &mut ComplexMatrix, k: usize, d: usize, weight: f64) {
    if k < d {
        h[(k, k)] += Complex64::from(weight);
        return;
    }
    let mut idx = d;
    for j in 0..d {
        for l in (j + 1)..d {
            if k == idx {
                h[(j, l)] += Complex64::from(weight);
                h[(l, j)] += Complex64::from(weight);
                return;
            }
            if k == idx + 1 {
                h[(j, l)] += Complex64::new(0.0, -weight);
                h[(l, j)] += Complex64::new(0.0, weight);
                return;
            }
            idx += 2;
        }
    }
    unreachable!("generator index {k} out of range for d={d}");
}

fn generator(params: &[f64], d: usize) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(d, d);
    for (k, &p) in params.iter().enumerate() {
        if p != 0.0 {
            add_generator(&mut h, k, d, p);
        }
    }
    h
}

/// `exp(−i H/2)` for the generator with the given coordinates.
fn local_unitary(params: &[f64], d: usize) -> ComplexMatrix {
    unitary_from_generator(&(generator(params, d) * Complex64::from(-0.5)))
}

/// Complete observable (labels `1..=d`) whose eigenbasis is the columns of `exp(−i H/2)`.
pub fn basis_from_params(p: &BasisParams, d: usize) -> Result<Observable> {
    if p.0.len() != d * d {
        return Err(Error::DimensionMismatch { expected: d * d, found: p.0.len() });
    }
    Observable::from_basis_default_labels(&columns(&local_unitary(&p.0, d)))
}

fn frame_basis(frame: &ComplexMatrix, params: &[f64]) -> Vec<StateVector> {
    columns(&(frame * local_unitary(params, frame.nrows())))
}

/// Rank-one conditional operator `(⟨v| ⊗ 1) ρ (|v⟩ ⊗ 1)` or its side-2 mirror, unnormalized.
fn conditional(rho: &ComplexMatrix, dims: Dims, side: Subsystem, v: &StateVector) -> ComplexMatrix {
    let (d1, d2) = (dims.d1, dims.d2);
    match side {
        Subsystem::First => ComplexMatrix::from_fn(d2, d2, |k, l| {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..d1 {
                for b in 0..d1 {
                    acc += v[a].conj() * rho[(a * d2 + k, b * d2 + l)] * v[b];
                }
            }
            acc
        }),
        Subsystem::Second => ComplexMatrix::from_fn(d1, d1, |a, b| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..d2 {
                for l in 0..d2 {
                    acc += v[k].conj() * rho[(a * d2 + k, b * d2 + l)] * v[l];
                }
            }
            acc
        }),
    }
}

/// `S(opp) − Σ p_i S(ρ_opp^i)` for a complete basis on `side`.
fn gain_for_basis(rho: &ComplexMatrix, dims: Dims, side: Subsystem, s_other: f64, basis: &[StateVector]) -> f64 {
    let average: f64 = basis
        .iter()
        .map(|v| {
            let m = conditional(rho, dims, side, v);
            let p: f64 = m.diagonal().iter().map(|z| z.re).sum();
            eigvalsh(&m).into_iter().map(eta).sum::<f64>() - eta(p)
        })
        .sum();
    s_other - average
}

/// `H(A) + H(B) − H(A,B)` for complete bases on both sides.
fn joint_mi_for_bases(rho: &ComplexMatrix, basis1: &[StateVector], basis2: &[StateVector]) -> f64 {
    let mut rows = vec![0.0; basis1.len()];
    let mut cols = vec![0.0; basis2.len()];
    let mut h_ab = 0.0;
    for (i, u) in basis1.iter().enumerate() {
        for (j, v) in basis2.iter().enumerate() {
            let w = tensor_vec(u, v);
            let p = w.dotc(&(rho * &w)).re.max(0.0);
            rows[i] += p;
            cols[j] += p;
            h_ab += eta(p);
        }
    }
    rows.iter().map(|&x| eta(x)).sum::<f64>() + cols.iter().map(|&x| eta(x)).sum::<f64>() - h_ab
}

fn eigen_frame(m: &ComplexMatrix) -> ComplexMatrix {
    let (_, vectors) = eigh_sorted(m);
    let d = m.nrows();
    ComplexMatrix::from_fn(d, d, |i, j| vectors[j][i])
}

/// Qubit basis `{|n+⟩, |n−⟩}` along the Bloch direction `(θ, φ)`.
pub fn bloch_frame(theta: f64, phi: f64) -> ComplexMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = Complex64::from_polar(1.0, phi);
    ComplexMatrix::from_row_slice(2, 2, &[Complex64::from(c), -e.conj() * s, e * s, Complex64::from(c)])
}

fn bloch_grid() -> impl Iterator<Item = (f64, f64)> {
    use std::f64::consts::PI;
    (0..GRID_THETA).flat_map(|i| {
        let theta = PI * i as f64 / (GRID_THETA - 1) as f64;
        (0..GRID_PHI).map(move |j| (theta, 2.0 * PI * j as f64 / GRID_PHI as f64))
    })
}

/// Reference frames in candidate order: optional grid frame, eigenframe, then Haar frames.
fn gain_frames(
    rho: &ComplexMatrix,
    dims: Dims,
    side: Subsystem,
    s_other: f64,
    reduced: &ComplexMatrix,
    cfg: &OptimizationConfig,
) -> (Vec<ComplexMatrix>, Option<f64>) {
    let d = dims.of(side);
    let mut frames = Vec::with_capacity(cfg.restarts + 1);
    let mut grid_value = None;
    if cfg.grid_refine && d == 2 {
        let (best, value) = bloch_grid()
            .map(|(t, p)| {
                let frame = bloch_frame(t, p);
                let v = gain_for_basis(rho, dims, side, s_other, &columns(&frame));
                (frame, v)
            })
            .fold((None, f64::NEG_INFINITY), |(bf, bv), (f, v)| if v > bv { (Some(f), v) } else { (bf, bv) });
        frames.push(best.expect("grid is non-empty"));
        grid_value = Some(value);
    }
    frames.push(eigen_frame(reduced));
    for r in 1..cfg.restarts {
        frames.push(haar_unitary(d, &mut rng_from_seed(derive_seed(cfg.seed, r as u64))));
    }
    (frames, grid_value)
}

struct Candidate {
    value: f64,
    basis: Vec<StateVector>,
    partner: Option<Vec<StateVector>>,
    converged: bool,
}

/// Deterministic max: the highest value wins, ties go to the lowest index.
fn reduce(candidates: Vec<Candidate>, grid_value: Option<f64>) -> Result<SupremumResult> {
    let best_idx = candidates
        .iter()
        .enumerate()
        .fold(0, |best, (i, c)| if c.value > candidates[best].value { i } else { best });
    let best_value = candidates[best_idx].value;
    let restarts_agreeing = candidates.iter().filter(|c| c.value >= best_value - AGREEMENT_TOL).count();
    let total = candidates.len();
    let best = candidates.into_iter().nth(best_idx).expect("index in range");
    Ok(SupremumResult {
        value: Bits::from_raw(best_value)?,
        argmax_basis: best.basis,
        argmax_partner: best.partner,
        restarts_agreeing,
        candidates: total,
        converged: best.converged,
        grid_value,
    })
}

/// `I(m1→2)` (side 1 measured) or `I(1←m2)` (side 2 measured), maximized over complete bases.
pub fn sup_information_gain(state: &BipartiteState, side: Subsystem, cfg: &OptimizationConfig) -> Result<SupremumResult> {
    cfg.validate()?;
    let dims = state.dims();
    let d = dims.of(side);
    let rho = state.rho12().matrix();
    let s_other = von_neumann_entropy(state.reduced(side.opposite())).value();
    let (frames, grid_value) = gain_frames(rho, dims, side, s_other, state.reduced(side).matrix(), cfg);
    let opts = cfg.simplex();

    let candidates: Vec<Candidate> = frames
        .par_iter()
        .map(|frame| {
            let objective = |p: &[f64]| gain_for_basis(rho, dims, side, s_other, &frame_basis(frame, p));
            let r = maximize(objective, &vec![0.0; d * d], &opts);
            Candidate { value: r.value, basis: frame_basis(frame, &r.x), partner: None, converged: r.converged }
        })
        .collect();
    reduce(candidates, grid_value)
}

/// `I(m1:m2)`, maximized over pairs of complete bases by alternating simplex searches.
pub fn sup_joint_mutual_information(state: &BipartiteState, cfg: &OptimizationConfig) -> Result<SupremumResult> {
    cfg.validate()?;
    let dims = state.dims();
    let (d1, d2) = (dims.d1, dims.d2);
    let rho = state.rho12().matrix();
    let s2 = von_neumann_entropy(state.rho2()).value();
    let (frames1, grid_value) = gain_frames(rho, dims, Subsystem::First, s2, state.rho1().matrix(), cfg);
    let offset = frames1.len() - cfg.restarts;
    let frames2: Vec<ComplexMatrix> = (0..frames1.len())
        .map(|i| {
            if i <= offset {
                eigen_frame(state.rho2().matrix())
            } else {
                let r = (i - offset) as u64;
                haar_unitary(d2, &mut rng_from_seed(derive_seed(derive_seed(cfg.seed, r), 2)))
            }
        })
        .collect();
    let opts = cfg.simplex();

    let candidates: Vec<Candidate> = frames1
        .par_iter()
        .zip(frames2.par_iter())
        .map(|(f1, f2)| {
            let mut p1 = vec![0.0; d1 * d1];
            let mut p2 = vec![0.0; d2 * d2];
            let mut value = joint_mi_for_bases(rho, &frame_basis(f1, &p1), &frame_basis(f2, &p2));
            let mut converged = false;
            for _ in 0..MAX_SWEEPS {
                let previous = value;
                let b2 = frame_basis(f2, &p2);
                let r1 = maximize(|p: &[f64]| joint_mi_for_bases(rho, &frame_basis(f1, p), &b2), &p1, &opts);
                if r1.value >= value {
                    p1 = r1.x;
                    value = r1.value;
                }
                let b1 = frame_basis(f1, &p1);
                let r2 = maximize(|p: &[f64]| joint_mi_for_bases(rho, &b1, &frame_basis(f2, p)), &p2, &opts);
                if r2.value >= value {
                    p2 = r2.x;
                    value = r2.value;
                }
                if value - previous < cfg.f_tol {
                    converged = true;
                    break;
                }
            }
            Candidate {
                value,
                basis: frame_basis(f1, &p1),
                partner: Some(frame_basis(f2, &p2)),
                converged,
            }
        })
        .collect();
    reduce(candidates, grid_value)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscordResult {
    pub discord: Bits,
    pub mutual_information: Bits,
    pub supremum: SupremumResult,
    pub measured: Subsystem,
}

/// `δ = I(1:2) − sup I(measured → other)`.
pub fn quantum_discord(state: &BipartiteState, measured: Subsystem, cfg: &OptimizationConfig) -> Result<DiscordResult> {
    let mi = mutual_information(state)?;
    let supremum = sup_information_gain(state, measured, cfg)?;
    let discord = Bits::from_raw(mi.value() - supremum.value.value())?;
    Ok(DiscordResult { discord, mutual_information: mi, supremum, measured })
}

/// Wraps a basis as a complete subsystem observable with labels `1..=d`.
pub fn basis_observable(basis: &[StateVector], side: Subsystem) -> Result<SubsystemObservable> {
    Ok(SubsystemObservable::new(Observable::from_basis_default_labels(basis)?, side))
}
