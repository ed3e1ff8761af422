//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use qcorr::corpus::{non_twin_instance, twin_instance};
use qcorr::entropy::{mutual_information, mutual_information_via_relative, subsystem_entropy};
use qcorr::measurement::{
    coherence_decomposition, commutator_norm, entropy_of_coherence, joint_distribution, joint_mutual_information,
};
use qcorr::numeric::{frobenius_norm, outer};
use qcorr::random::{
    derive_seed, random_basis, random_density_with, random_observable_matrix, random_unit_vector, rng_from_seed,
    sample_random_pure, StateRng,
};
use qcorr::state::validate_density;
use qcorr::suprema::{quantum_discord, sup_information_gain, sup_joint_mutual_information};
use qcorr::twins::{construct_pure_twins, dephase_in_schmidt_basis, verify_twins};
use qcorr::{BipartiteState, ComplexMatrix, Dims, Error, Observable, OptimizationConfig, StateVector, Subsystem};
use qcorr_cli::sweep::{chain_slack, lieb_slack, lindblad_margins, partial_trace_residuals};
use rand::Rng;

const DIMS: [(usize, usize); 3] = [(2, 2), (2, 3), (3, 3)];

type Check<'a> = Box<dyn Fn() -> Verdict + 'a>;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn dims(d: (usize, usize)) -> Dims {
    Dims::new(d.0, d.1).unwrap()
}

fn cfg(restarts: usize, seed: u64) -> OptimizationConfig {
    OptimizationConfig { restarts, seed, ..OptimizationConfig::default() }
}

fn random_state(d: (usize, usize), rank: usize, rng: &mut StateRng) -> BipartiteState {
    BipartiteState::new(&random_density_with(d.0 * d.1, rank, rng).unwrap(), dims(d)).unwrap()
}

fn incomplete(n: usize, rng: &mut StateRng) -> Observable {
    let blocks = rng.random_range(1..=n);
    Observable::from_matrix(&random_observable_matrix(n, blocks, rng)).unwrap()
}

/// The 1000-per-dimension random corpus shared by criteria 1, 3 and 11.
fn sampled_states() -> Vec<BipartiteState> {
    let mut out = Vec::new();
    for (k, &d) in DIMS.iter().enumerate() {
        for i in 0..1000u64 {
            let mut rng = rng_from_seed(derive_seed(1000 + k as u64, i));
            out.push(random_state(d, 1 + (i as usize) % (d.0 * d.1), &mut rng));
        }
    }
    out
}

fn chain(states: &[BipartiteState]) -> Verdict {
    let mut worst = f64::INFINITY;
    let mut violations = 0;
    for (i, s) in states.iter().enumerate() {
        let d = s.dims();
        let mut rng = rng_from_seed(derive_seed(1100, i as u64));
        for _ in 0..4 {
            let a = random_basis(d.d1, &mut rng);
            let b = random_basis(d.d2, &mut rng);
            let slack = chain_slack(s, &a, &b).unwrap();
            worst = worst.min(slack);
            if slack < -1e-9 {
                violations += 1;
            }
        }
    }
    verdict(violations == 0, format!("{} states x 4 basis pairs, {violations} violations, worst slack {worst:.3e}", states.len()))
}

fn uncorrelated_equality() -> Verdict {
    let mut worst_product = 0.0f64;
    let mut weakest_correlated = f64::INFINITY;
    for i in 0..200u64 {
        let d = DIMS[i as usize % 3];
        let mut rng = rng_from_seed(derive_seed(1200, i));
        let r1 = random_density_with(d.0, 1 + (i as usize) % d.0, &mut rng).unwrap();
        let r2 = random_density_with(d.1, 1 + (i as usize / 3) % d.1, &mut rng).unwrap();
        let product = BipartiteState::new(&r1.kronecker(&r2), dims(d)).unwrap();
        let v = sup_joint_mutual_information(&product, &cfg(2, i)).unwrap().value.value();
        worst_product = worst_product.max(v);
    }
    let mut built = 0u64;
    let mut attempt = 0u64;
    while built < 200 {
        let d = DIMS[built as usize % 3];
        let mut rng = rng_from_seed(derive_seed(1201, attempt));
        attempt += 1;
        let s = random_state(d, 1 + rng.random_range(0..d.0 * d.1), &mut rng);
        if mutual_information(&s).unwrap().value() <= 0.1 {
            continue;
        }
        let v = sup_joint_mutual_information(&s, &cfg(2, built)).unwrap().value.value();
        weakest_correlated = weakest_correlated.min(v);
        built += 1;
    }
    verdict(
        worst_product < 1e-6 && weakest_correlated > 1e-3,
        format!("max over 200 products {worst_product:.3e}; min over 200 correlated {weakest_correlated:.3e}"),
    )
}

fn relative_form(states: &[BipartiteState]) -> Verdict {
    let worst = states
        .iter()
        .map(|s| (mutual_information(s).unwrap().value() - mutual_information_via_relative(s).unwrap().value()).abs())
        .fold(0.0f64, f64::max);
    verdict(worst < 1e-9, format!("{} states, worst gap {worst:.3e}", states.len()))
}

fn partial_trace_identities() -> Verdict {
    let mut worst = 0.0f64;
    let mut count = 0;
    for (k, &d) in DIMS.iter().enumerate() {
        for i in 0..1000u64 {
            let mut rng = rng_from_seed(derive_seed(1300 + k as u64, i));
            let s = random_state(d, 1 + (i as usize) % (d.0 * d.1), &mut rng);
            let a = incomplete(d.0, &mut rng);
            let b = incomplete(d.1, &mut rng);
            let (r1, r2) = partial_trace_residuals(&s, &a, &b).unwrap();
            worst = worst.max(r1).max(r2);
            count += 1;
        }
    }
    verdict(worst < 1e-10, format!("{count} states, worst residual {worst:.3e}"))
}

fn lindblad() -> Verdict {
    let mut worst = f64::INFINITY;
    for i in 0..500u64 {
        let d = DIMS[i as usize % 3];
        let n = d.0 * d.1;
        let mut rng = rng_from_seed(derive_seed(1400, i));
        let sigma = random_density_with(n, n, &mut rng).unwrap();
        let rho = random_density_with(n, n, &mut rng).unwrap();
        // alternate global and subsystem observables
        let (a, b) = if i % 2 == 0 {
            (incomplete(n, &mut rng), incomplete(n, &mut rng))
        } else {
            let a1 = incomplete(d.0, &mut rng);
            let b2 = incomplete(d.1, &mut rng);
            let lift = |o: &Observable, first: bool| {
                let m = if first {
                    o.matrix().kronecker(&ComplexMatrix::identity(d.1, d.1))
                } else {
                    ComplexMatrix::identity(d.0, d.0).kronecker(&o.matrix())
                };
                Observable::from_matrix(&m).unwrap()
            };
            (lift(&a1, true), lift(&b2, false))
        };
        let (m1, m2) = lindblad_margins(&sigma, &rho, &a, &b).unwrap();
        worst = worst.min(m1).min(m2);
    }
    verdict(worst >= -1e-9, format!("500 pairs, one- and two-step, worst margin {worst:.3e}"))
}

fn pure_equalities() -> Verdict {
    let mut worst_entropies = 0.0f64;
    let mut worst_suprema = 0.0f64;
    for i in 0..300u64 {
        let d = DIMS[i as usize % 3];
        let phi = sample_random_pure(dims(d), derive_seed(1500, i));
        let s = BipartiteState::from_pure(&phi, dims(d)).unwrap();
        let (a, b) = construct_pure_twins(&phi, dims(d)).unwrap();
        let jd = joint_distribution(&s, &a, &b).unwrap();
        let h = |p: &[f64]| p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum::<f64>();
        let ha = h(&jd.row_marginals);
        let hb = h(&jd.col_marginals);
        let hab = h(&jd.p.concat());
        let s1 = subsystem_entropy(&s, Subsystem::First).value();
        let s2 = subsystem_entropy(&s, Subsystem::Second).value();
        for x in [ha, hb, hab, s2] {
            worst_entropies = worst_entropies.max((x - s1).abs());
        }
        let jmi = joint_mutual_information(&jd).unwrap().value();
        worst_entropies = worst_entropies.max((jmi - s1).abs());

        let c = cfg(4, i);
        for v in [
            sup_information_gain(&s, Subsystem::First, &c).unwrap().value,
            sup_information_gain(&s, Subsystem::Second, &c).unwrap().value,
            sup_joint_mutual_information(&s, &c).unwrap().value,
        ] {
            worst_suprema = worst_suprema.max((v.value() - s1).abs());
        }
    }
    verdict(
        worst_entropies < 1e-8 && worst_suprema < 1e-6,
        format!("300 pure states, entropy gap {worst_entropies:.3e}, suprema gap {worst_suprema:.3e}"),
    )
}

fn qubit_entropy(m: &ComplexMatrix) -> f64 {
    let (a, d, b) = (m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
    let disc = (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt();
    [(a + d) / 2.0 + disc, (a + d) / 2.0 - disc].iter().filter(|&&x| x > 1e-15).map(|&x| -x * x.log2()).sum()
}

/// Reference information gain for a two-qubit state measured on side 1 along (θ, φ).
fn qubit_gain(rho: &ComplexMatrix, theta: f64, phi: f64) -> f64 {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let up = [Complex64::new(c, 0.0), Complex64::from_polar(s, phi)];
    let down = [Complex64::from_polar(-s, -phi), Complex64::new(c, 0.0)];
    let rho2 = ComplexMatrix::from_fn(2, 2, |i, j| rho[(i, j)] + rho[(2 + i, 2 + j)]);
    let mut avg = 0.0;
    for v in [up, down] {
        let cond = ComplexMatrix::from_fn(2, 2, |i, j| {
            let mut z = Complex64::new(0.0, 0.0);
            for a in 0..2 {
                for b in 0..2 {
                    z += v[a].conj() * rho[(a * 2 + i, b * 2 + j)] * v[b];
                }
            }
            z
        });
        let p = cond[(0, 0)].re + cond[(1, 1)].re;
        if p > 1e-15 {
            avg += p * qubit_entropy(&(cond / Complex64::new(p, 0.0)));
        }
    }
    qubit_entropy(&rho2) - avg
}

fn grid_oracle(rho: &ComplexMatrix) -> f64 {
    use std::f64::consts::PI;
    let coarse = 1e-2;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..=(PI / coarse) as usize {
        for j in 0..(2.0 * PI / coarse) as usize {
            let (t, p) = (i as f64 * coarse, j as f64 * coarse);
            let v = qubit_gain(rho, t, p);
            if v > best.0 {
                best = (v, t, p);
            }
        }
    }
    let (_, t0, p0) = best;
    for i in -20..=20 {
        for j in -20..=20 {
            best.0 = best.0.max(qubit_gain(rho, t0 + i as f64 * 1e-3, p0 + j as f64 * 1e-3));
        }
    }
    best.0
}

fn discord_values() -> Verdict {
    let mut worst_pure = 0.0f64;
    let mut worst_dephased = 0.0f64;
    let mut slowest = 0.0f64;
    for i in 0..30u64 {
        let d = DIMS[i as usize % 3];
        let phi = sample_random_pure(dims(d), derive_seed(1600, i));
        let c = cfg(8, i);
        let s = BipartiteState::from_pure(&phi, dims(d)).unwrap();
        let s1 = subsystem_entropy(&s, Subsystem::First).value();
        let eq18 = dephase_in_schmidt_basis(&phi, dims(d)).unwrap();
        for side in [Subsystem::First, Subsystem::Second] {
            worst_pure = worst_pure.max((quantum_discord(&s, side, &c).unwrap().discord.value() - s1).abs());
            worst_dephased = worst_dephased.max(quantum_discord(&eq18, side, &c).unwrap().discord.value());
        }
    }
    // default configuration timing on two-qubit states
    for i in 0..10u64 {
        let mut rng = rng_from_seed(derive_seed(1601, i));
        let s = random_state((2, 2), 4, &mut rng);
        let t = Instant::now();
        quantum_discord(&s, Subsystem::First, &OptimizationConfig::default()).unwrap();
        slowest = slowest.max(t.elapsed().as_secs_f64());
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bell = StateVector::from_vec(vec![s.into(), 0.0.into(), 0.0.into(), s.into()]);
    let werner = ComplexMatrix::identity(4, 4) * Complex64::new(0.125, 0.0) + outer(&bell) * Complex64::new(0.5, 0.0);
    let werner = BipartiteState::new(&werner, dims((2, 2))).unwrap();
    let found = quantum_discord(&werner, Subsystem::First, &OptimizationConfig::default()).unwrap();
    let oracle = grid_oracle(werner.rho12().matrix());
    let werner_gap = (found.supremum.value.value() - oracle).abs();
    verdict(
        worst_pure < 1e-6 && worst_dephased < 1e-6 && werner_gap < 1e-4 && slowest < 2.0,
        format!(
            "pure gap {worst_pure:.3e}, dephased max {worst_dephased:.3e}, Werner vs grid {werner_gap:.3e} (discord {}), slowest 2x2 run {slowest:.2}s",
            found.discord
        ),
    )
}

fn twin_equivalence() -> Verdict {
    let mut twins = 0;
    let mut non_twins = 0;
    let mut disagreements = 0;
    let mut inconsistent = 0;
    let mut wrong = 0;
    for i in 0..600u64 {
        let d = dims(DIMS[i as usize % 3]);
        for (instance, expect) in [(twin_instance(d, i).unwrap(), true), (non_twin_instance(d, i).unwrap(), false)] {
            match verify_twins(&instance.state, &instance.a1, &instance.b2, 1e-8) {
                Ok(r) => {
                    if r.condition_verdicts.iter().any(|&v| v != r.condition_verdicts[0]) {
                        disagreements += 1;
                    }
                    if r.verdict != expect {
                        wrong += 1;
                    }
                }
                Err(Error::ConditionDisagreement(_)) => inconsistent += 1,
                Err(e) => panic!("{e}"),
            }
            if expect {
                twins += 1;
            } else {
                non_twins += 1;
            }
        }
    }
    verdict(
        disagreements == 0 && inconsistent == 0 && wrong == 0,
        format!(
            "{twins} twin and {non_twins} non-twin instances; {disagreements} split verdicts, {inconsistent} consistency errors, {wrong} misclassified"
        ),
    )
}

fn coherence() -> Verdict {
    let mut worst = 0.0f64;
    let mut rng = rng_from_seed(1700);
    for i in 0..300 {
        let n = 2 + i % 5;
        let rho = validate_density(&random_density_with(n, 1 + i % n, &mut rng).unwrap()).unwrap();
        let complete = Observable::from_basis_default_labels(&random_basis(n, &mut rng)).unwrap();
        // complete observable: E_C = H(A) − S(ρ)
        let dec = coherence_decomposition(&complete, &rho).unwrap();
        let s = qcorr::entropy::von_neumann_entropy(&rho).value();
        let ec = entropy_of_coherence(&complete, &rho).unwrap().value();
        worst = worst.max((ec - (dec.observable_entropy.value() - s)).abs());

        // pure state: E_C = H(A)
        let phi = random_unit_vector(n, &mut rng);
        let pure = validate_density(&outer(&phi)).unwrap();
        let a = incomplete(n, &mut rng);
        let dec = coherence_decomposition(&a, &pure).unwrap();
        worst = worst.max((entropy_of_coherence(&a, &pure).unwrap().value() - dec.observable_entropy.value()).abs());

        // complete observable on a pure state: E_C = H(|f_i|²)
        let basis = random_basis(n, &mut rng);
        let f: Vec<f64> = basis.iter().map(|v| v.dotc(&phi).norm_sqr()).collect();
        let h: f64 = f.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum();
        let c = Observable::from_basis_default_labels(&basis).unwrap();
        worst = worst.max((entropy_of_coherence(&c, &pure).unwrap().value() - h).abs());
    }

    // zero exactly with commutation: commuting constructions versus generic states
    let mut mismatches = 0;
    let mut commuting = 0;
    let mut generic = 0;
    for i in 0..300u64 {
        let n = 2 + (i as usize) % 5;
        let basis = random_basis(n, &mut rng);
        let a = Observable::from_basis_default_labels(&basis).unwrap();
        let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let total: f64 = w.iter().sum();
        let m = basis
            .iter()
            .zip(&w)
            .fold(ComplexMatrix::zeros(n, n), |acc, (v, &x)| acc + outer(v) * Complex64::new(x / total, 0.0));
        let diagonal = validate_density(&m).unwrap();
        let mixed = validate_density(&random_density_with(n, 1 + (i as usize) % n, &mut rng).unwrap()).unwrap();
        for rho in [diagonal, mixed] {
            let comm = commutator_norm(&a, &rho);
            let ec = entropy_of_coherence(&a, &rho).unwrap().value();
            if comm < 1e-12 {
                commuting += 1;
                if ec >= 1e-9 {
                    mismatches += 1;
                }
            } else if comm > 1e-2 * frobenius_norm(rho.matrix()) {
                generic += 1;
                if ec <= 1e-4 {
                    mismatches += 1;
                }
            }
        }
    }
    verdict(
        worst < 1e-9 && mismatches == 0,
        format!(
            "3 x 300 special cases, worst gap {worst:.3e}; {commuting} commuting and {generic} non-commuting cases, {mismatches} mismatches"
        ),
    )
}

fn strong_algebraic() -> Verdict {
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut missing = 0;
    for i in 0..600u64 {
        let d = dims(DIMS[i as usize % 3]);
        let t = twin_instance(d, i).unwrap();
        if !t.equal_labels {
            continue;
        }
        count += 1;
        match verify_twins(&t.state, &t.a1, &t.b2, 1e-8).unwrap().strong_algebraic_residual {
            Some(r) => worst = worst.max(r),
            None => missing += 1,
        }
    }
    verdict(worst < 1e-10 && missing == 0, format!("{count} equal-label twin instances, worst residual {worst:.3e}"))
}

fn lieb(states: &[BipartiteState]) -> Verdict {
    let worst = states.iter().map(|s| lieb_slack(s).unwrap()).fold(f64::INFINITY, f64::min);
    verdict(worst >= -1e-9, format!("{} states, worst slack {worst:.3e}", states.len()))
}

fn cli_determinism() -> Verdict {
    let dir = std::env::temp_dir().join(format!("qcorr-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let run = |args: &[&str]| Command::new(env!("CARGO_BIN_EXE_qcorr")).args(args).current_dir(&dir).output().unwrap();
    let fixed = ["sweep", "--dims", "3x3", "--samples", "50", "--seed", "7"];
    let (a, b) = (run(&fixed), run(&fixed));
    let default = run(&["sweep"]);
    let _ = std::fs::remove_dir_all(&dir);
    verdict(
        a.stdout == b.stdout && a.status.code() == Some(0) && default.status.code() == Some(0),
        format!(
            "identical output: {}; default sweep exit {:?}: {}",
            a.stdout == b.stdout,
            default.status.code(),
            String::from_utf8_lossy(&default.stderr).trim()
        ),
    )
}

fn main() {
    let states = sampled_states();
    let criteria: Vec<(&str, Check<'_>)> = vec![
        ("information chain at fixed bases", Box::new(|| chain(&states))),
        ("zero joint supremum exactly for products", Box::new(uncorrelated_equality)),
        ("relative-entropy form of mutual information", Box::new(|| relative_form(&states))),
        ("partial trace of measured states", Box::new(partial_trace_identities)),
        ("monotonicity under measurement", Box::new(lindblad)),
        ("pure-state equalities", Box::new(pure_equalities)),
        ("discord values", Box::new(discord_values)),
        ("twin condition equivalence", Box::new(twin_equivalence)),
        ("entropy of coherence", Box::new(coherence)),
        ("stronger algebraic relation", Box::new(strong_algebraic)),
        ("Lieb bound", Box::new(|| lieb(&states))),
        ("sweep determinism", Box::new(cli_determinism)),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let v = check();
        if !v.passed {
            failed += 1;
        }
        println!(
            "{} {:>2}. {name}: {} [{:.1}s]",
            if v.passed { "PASS" } else { "FAIL" },
            k + 1,
            v.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
