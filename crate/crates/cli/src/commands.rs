//! Command implementations. Each returns what to print and the exit code, so
//! they can be driven without a process boundary.

use std::path::{Path, PathBuf};

use qcorr::state::{purity_class, pure_vector, schmidt_decompose};
use qcorr::suprema::quantum_discord;
use qcorr::twins::{construct_pure_twins, verify_twins};
use qcorr::{BipartiteState, Dims, Error, OptimizationConfig, Purity, Subsystem, SubsystemObservable};
use serde_json::json;

use crate::report::{Num, OptimizationBlock, Report, SchmidtReport, StateQuantities, PURITY_TOL};
use crate::statefile::{self, FileError, Loaded, StateFile};
use crate::sweep::{self, MAX_SIDE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;
pub const EXIT_NOT_TWINS: i32 = 4;
pub const EXIT_INCONSISTENT: i32 = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn fail(code: i32, message: impl Into<String>) -> Self {
        Outcome { code, stdout: String::new(), stderr: message.into() }
    }
}

impl From<FileError> for Outcome {
    fn from(e: FileError) -> Self {
        match e {
            FileError::Validation(m) => Outcome::fail(EXIT_VALIDATION, format!("validation failed: {m}")),
            other => Outcome::fail(EXIT_USAGE, format!("cannot read input: {other}")),
        }
    }
}

fn library_failure(e: Error) -> Outcome {
    match e {
        Error::ConditionDisagreement(_) => Outcome::fail(EXIT_INCONSISTENT, e.to_string()),
        other => Outcome::fail(EXIT_VALIDATION, format!("validation failed: {other}")),
    }
}

macro_rules! attempt {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return Outcome::from(err),
        }
    };
}

macro_rules! lib {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return library_failure(err),
        }
    };
}

fn load_state(path: &Path) -> Result<(Loaded, BipartiteState), Outcome> {
    let loaded = statefile::read(path).map_err(Outcome::from)?;
    match loaded.state().cloned() {
        Some(s) => Ok((loaded, s)),
        None => Err(Outcome::fail(EXIT_USAGE, format!("{}: expected a density or pure state file", path.display()))),
    }
}

fn load_observable(path: &Path, side: Subsystem, dims: Dims) -> Result<SubsystemObservable, Outcome> {
    match statefile::read(path).map_err(Outcome::from)? {
        Loaded::Observable(obs) if obs.dim() == dims.of(side) => Ok(SubsystemObservable::new(obs, side)),
        Loaded::Observable(obs) => Err(Outcome::fail(
            EXIT_VALIDATION,
            format!(
                "validation failed: {}: observable dimension {} does not match subsystem {} dimension {}",
                path.display(),
                obs.dim(),
                side.index(),
                dims.of(side)
            ),
        )),
        _ => Err(Outcome::fail(EXIT_USAGE, format!("{}: expected an observable file", path.display()))),
    }
}

fn state_summary(q: &StateQuantities) -> String {
    format!(
        "S(1) = {}, S(2) = {}, S(12) = {}, I(1:2) = {} ({})",
        q.s1,
        q.s2,
        q.s12,
        q.mutual_information,
        match q.purity {
            Purity::Pure => "pure",
            Purity::Mixed => "mixed",
        }
    )
}

pub fn report(state_path: &Path, seed: u64) -> Outcome {
    let (_, state) = match load_state(state_path) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let q = lib!(StateQuantities::of(&state));
    let stderr = state_summary(&q);
    let r = Report::new("report", seed, json!({ "state": state_path.display().to_string() }), q);
    Outcome { code: EXIT_OK, stdout: r.to_json(), stderr }
}

pub fn discord(state_path: &Path, measured: Subsystem, restarts: usize, seed: u64) -> Outcome {
    let (_, state) = match load_state(state_path) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let cfg = OptimizationConfig { restarts, seed, ..OptimizationConfig::default() };
    if let Err(e) = cfg.validate() {
        return Outcome::fail(EXIT_USAGE, e.to_string());
    }
    let q = lib!(StateQuantities::of(&state));
    let d = lib!(quantum_discord(&state, measured, &cfg));
    let block = OptimizationBlock::from_discord(&d, restarts);
    let stderr = format!(
        "I(1:2) = {}, sup information gain = {}, discord = {} ({} of {} searches agree)",
        block.mutual_information, block.sup_information_gain, block.discord, block.restarts_agreeing, block.candidates
    );
    let mut r = Report::new(
        "discord",
        seed,
        json!({
            "state": state_path.display().to_string(),
            "direction": block.direction,
            "restarts": restarts,
            "max_iterations": cfg.max_iterations,
            "f_tol": cfg.f_tol,
        }),
        q,
    );
    r.optimization = Some(block);
    Outcome { code: EXIT_OK, stdout: r.to_json(), stderr }
}

pub fn twins(state_path: &Path, obs_a: &Path, obs_b: &Path, tol: f64) -> Outcome {
    if !(tol > 0.0 && tol.is_finite()) {
        return Outcome::fail(EXIT_USAGE, "--tol must be a positive number");
    }
    let (_, state) = match load_state(state_path) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let dims = state.dims();
    let a1 = match load_observable(obs_a, Subsystem::First, dims) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let b2 = match load_observable(obs_b, Subsystem::Second, dims) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let q = lib!(StateQuantities::of(&state));
    let (twin, code) = match verify_twins(&state, &a1, &b2, tol) {
        Ok(t) => {
            let code = if t.verdict { EXIT_OK } else { EXIT_NOT_TWINS };
            (t, code)
        }
        Err(Error::ConditionDisagreement(t)) => (*t, EXIT_INCONSISTENT),
        Err(e) => return library_failure(e),
    };
    let [ra, rb, rc, rd] = twin.residuals();
    let stderr = format!(
        "twins: {} (complete: {}); residuals a = {ra:.3e}, b = {rb:.3e}, c = {rc:.3e}, d = {rd:.3e}{}",
        twin.verdict,
        twin.complete_flag,
        if code == EXIT_INCONSISTENT { "; conditions disagree" } else { "" }
    );
    let mut r = Report::new(
        "twins",
        0,
        json!({
            "state": state_path.display().to_string(),
            "observable_a": obs_a.display().to_string(),
            "observable_b": obs_b.display().to_string(),
            "tol": tol,
        }),
        q,
    );
    r.twins = Some(twin);
    Outcome { code, stdout: r.to_json(), stderr }
}

pub fn schmidt(state_path: &Path) -> Outcome {
    let (loaded, state) = match load_state(state_path) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let phi = match loaded {
        Loaded::Pure(v, _) => v,
        _ => {
            if purity_class(state.rho12(), PURITY_TOL) == Purity::Mixed {
                return Outcome::fail(
                    EXIT_VALIDATION,
                    format!("validation failed: state is mixed (Tr ρ² = {:.12})", state.rho12().purity()),
                );
            }
            pure_vector(state.rho12())
        }
    };
    let dims = state.dims();
    let form = lib!(schmidt_decompose(&phi, dims));
    let r = SchmidtReport::new(&form, &phi, [dims.d1, dims.d2]);
    let stderr = format!("Schmidt rank {}, coefficients {:?}", r.rank, r.coefficients);
    Outcome { code: EXIT_OK, stdout: serde_json::to_string_pretty(&r).expect("serializes"), stderr }
}

/// Writes the Schmidt-basis twin observables of a pure state as two files.
pub fn pure_twins(state_path: &Path, out: &Path) -> Outcome {
    let (loaded, state) = match load_state(state_path) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let phi = match loaded {
        Loaded::Pure(v, _) => v,
        _ if purity_class(state.rho12(), PURITY_TOL) == Purity::Pure => pure_vector(state.rho12()),
        _ => return Outcome::fail(EXIT_VALIDATION, "validation failed: state is mixed"),
    };
    let (a1, b2) = lib!(construct_pure_twins(&phi, state.dims()));
    if let Err(e) = std::fs::create_dir_all(out) {
        return Outcome::fail(EXIT_USAGE, format!("{}: {e}", out.display()));
    }
    let paths = [out.join("observable_a.json"), out.join("observable_b.json")];
    for (obs, path) in [&a1, &b2].into_iter().zip(&paths) {
        attempt!(StateFile::observable(&obs.observable).write(path));
    }
    let stdout = serde_json::to_string_pretty(&json!({
        "tool": crate::report::TOOL,
        "version": crate::report::VERSION,
        "command": "pure-twins",
        "observable_a": paths[0].display().to_string(),
        "observable_b": paths[1].display().to_string(),
    }))
    .expect("serializes");
    Outcome { code: EXIT_OK, stdout, stderr: format!("wrote {} and {}", paths[0].display(), paths[1].display()) }
}

pub struct SweepArgs {
    pub dims: Dims,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub out: PathBuf,
}

pub fn sweep(args: &SweepArgs) -> Outcome {
    let SweepArgs { dims, samples, seed, tol, ref out } = *args;
    if samples == 0 {
        return Outcome::fail(EXIT_USAGE, "--samples must be at least 1");
    }
    if dims.d1 > MAX_SIDE || dims.d2 > MAX_SIDE {
        return Outcome::fail(EXIT_USAGE, format!("--dims: each side must be at most {MAX_SIDE}"));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Outcome::fail(EXIT_USAGE, "--tol must be a positive number");
    }
    let result = lib!(sweep::run_sweep(dims, samples, seed, tol));

    let mut dumped = Vec::new();
    if !result.violations.is_empty() {
        if let Err(e) = std::fs::create_dir_all(out) {
            return Outcome::fail(EXIT_USAGE, format!("{}: {e}", out.display()));
        }
        for v in &result.violations {
            let path = out.join(format!("sample{}_{}.json", v.sample, v.check));
            let s = &result.samples[v.sample].state;
            attempt!(StateFile::density(s.rho12().matrix(), dims).write(&path));
            dumped.push(path.display().to_string());
        }
    }

    let checks: serde_json::Map<String, serde_json::Value> = result
        .checks
        .iter()
        .map(|(name, c)| {
            (
                name.to_string(),
                json!({ "evaluated": c.evaluated, "violations": c.violations, "worst_margin": Num(c.worst_margin) }),
            )
        })
        .collect();
    let violations: Vec<serde_json::Value> = result
        .violations
        .iter()
        .map(|v| json!({ "sample": v.sample, "check": v.check, "amount": Num(v.amount) }))
        .collect();
    let summary = json!({
        "tool": crate::report::TOOL,
        "version": crate::report::VERSION,
        "command": "sweep",
        "seed": seed,
        "config": { "dims": [dims.d1, dims.d2], "samples": samples, "tol": tol },
        "checks": checks,
        "violations": violations,
        "total_violations": result.violations.len(),
        "dumped": dumped,
    });
    let n = result.violations.len();
    let code = if n == 0 { EXIT_OK } else { EXIT_VIOLATION };
    Outcome {
        code,
        stdout: serde_json::to_string_pretty(&summary).expect("serializes"),
        stderr: format!("{samples} samples on {dims}, {n} violations"),
    }
}
