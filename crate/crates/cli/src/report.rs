//! JSON reports. Blocks that do not apply are emitted as `null` so the key set
//! never depends on the input.

use qcorr::entropy::{mutual_information, mutual_information_via_relative, subsystem_entropy, von_neumann_entropy};
use qcorr::state::{purity_class, pure_vector, schmidt_decompose};
use qcorr::suprema::DiscordResult;
use qcorr::{BipartiteState, Bits, Purity, Result, StateVector, Subsystem, TwinReport};
use serde::{Serialize, Serializer};

pub const TOOL: &str = "qcorr";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// `1 − Tr ρ²` below this counts as pure.
pub const PURITY_TOL: f64 = 1e-9;

/// A float that serializes infinities as `"inf"` / `"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StateQuantities {
    pub dims: [usize; 2],
    pub s1: Bits,
    pub s2: Bits,
    pub s12: Bits,
    pub mutual_information: Bits,
    pub mutual_information_relative: Bits,
    /// `2·min(S(1), S(2)) − I(1:2)`.
    pub lieb_slack: Num,
    pub purity: Purity,
    pub schmidt_coefficients: Option<Vec<f64>>,
}

impl StateQuantities {
    pub fn of(state: &BipartiteState) -> Result<Self> {
        let dims = state.dims();
        let s1 = subsystem_entropy(state, Subsystem::First);
        let s2 = subsystem_entropy(state, Subsystem::Second);
        let mi = mutual_information(state)?;
        let purity = purity_class(state.rho12(), PURITY_TOL);
        let schmidt_coefficients = match purity {
            Purity::Pure => Some(schmidt_decompose(&pure_vector(state.rho12()), dims)?.coefficients),
            Purity::Mixed => None,
        };
        Ok(StateQuantities {
            dims: [dims.d1, dims.d2],
            s1,
            s2,
            s12: von_neumann_entropy(state.rho12()),
            mutual_information: mi,
            mutual_information_relative: mutual_information_via_relative(state)?,
            lieb_slack: Num(2.0 * s1.value().min(s2.value()) - mi.value()),
            purity,
            schmidt_coefficients,
        })
    }
}

fn pairs(v: &StateVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizationBlock {
    pub direction: &'static str,
    pub mutual_information: Bits,
    pub sup_information_gain: Bits,
    pub discord: Bits,
    pub restarts: usize,
    pub candidates: usize,
    pub restarts_agreeing: usize,
    pub converged: bool,
    /// Columns of the maximizing basis on the measured side.
    pub argmax_basis: Vec<Vec<[f64; 2]>>,
}

impl OptimizationBlock {
    pub fn from_discord(d: &DiscordResult, restarts: usize) -> Self {
        OptimizationBlock {
            direction: match d.measured {
                Subsystem::First => "1to2",
                Subsystem::Second => "2to1",
            },
            mutual_information: d.mutual_information,
            sup_information_gain: d.supremum.value,
            discord: d.discord,
            restarts,
            candidates: d.supremum.candidates,
            restarts_agreeing: d.supremum.restarts_agreeing,
            converged: d.supremum.converged,
            argmax_basis: d.supremum.argmax_basis.iter().map(pairs).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub config: serde_json::Value,
    pub state: StateQuantities,
    pub optimization: Option<OptimizationBlock>,
    pub twins: Option<TwinReport>,
}

impl Report {
    pub fn new(command: &'static str, seed: u64, config: serde_json::Value, state: StateQuantities) -> Self {
        Report { tool: TOOL, version: VERSION, command, seed, config, state, optimization: None, twins: None }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SchmidtReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub dims: [usize; 2],
    pub coefficients: Vec<f64>,
    pub weights: Vec<f64>,
    pub rank: usize,
    pub basis1: Vec<Vec<[f64; 2]>>,
    pub basis2: Vec<Vec<[f64; 2]>>,
    pub reconstruction_residual: f64,
}

impl SchmidtReport {
    pub fn new(form: &qcorr::SchmidtForm, phi: &StateVector, dims: [usize; 2]) -> Self {
        SchmidtReport {
            tool: TOOL,
            version: VERSION,
            command: "schmidt",
            dims,
            coefficients: form.coefficients.clone(),
            weights: form.weights(),
            rank: form.rank(),
            basis1: form.basis1.iter().map(pairs).collect(),
            basis2: form.basis2.iter().map(pairs).collect(),
            reconstruction_residual: form.reconstruction_residual(phi),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinities_become_strings() {
        assert_eq!(serde_json::to_string(&Num(f64::INFINITY)).unwrap(), "\"inf\"");
        assert_eq!(serde_json::to_string(&Num(0.5)).unwrap(), "0.5");
        assert_eq!(serde_json::to_string(&Bits::INFINITY).unwrap(), "\"inf\"");
    }
}
