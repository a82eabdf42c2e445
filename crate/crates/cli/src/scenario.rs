//! Scenario file schema and validation reporting.
//!
//! A scenario is a JSON document describing one experiment: a Hilbert-space
//! dimension, an initial state, named Kraus channels and POVMs, and an
//! optional `analysis` block naming the operation the file is built for.
//! Subcommand flags can override the analysis block where it names
//! components.

use std::collections::BTreeMap;

use anyhow::{anyhow, Context, Result};
use serde::Deserialize;
use serde_json::{json, Value};

use qpt_core::measurement::{ChannelParts, KrausChannel, Povm, PovmParts};
use qpt_core::operator::Vector;
use qpt_core::state::{DensityOperator, StateParts};

/// Largest supported Hilbert-space dimension.
pub const MAX_DIM: usize = 64;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub dim: usize,
    pub state: StateParts,
    #[serde(default)]
    pub channels: BTreeMap<String, ChannelParts>,
    #[serde(default)]
    pub povms: BTreeMap<String, PovmParts>,
    #[serde(default)]
    pub analysis: Option<AnalysisSpec>,
}

/// The operation a scenario file is built for, with its parameters.
#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AnalysisSpec {
    Probs {
        povm: String,
        #[serde(default)]
        subset: Option<Vec<String>>,
    },
    Sequential {
        first: String,
        second: String,
    },
    Lambda {
        first: String,
        second: String,
    },
    Superpose {
        phi1: Vector,
        phi2: Vector,
        alpha: [f64; 2],
        beta: [f64; 2],
        povm: String,
        subset: Vec<String>,
    },
    FreqSim {
        model: ModelSpec,
    },
}

/// Context model for `freq-sim`; quantum-driven models reference the
/// scenario's state and named channels.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    ClassicalIndependent {
        joint: [[f64; 2]; 2],
    },
    ClassicalPerturbed {
        joint: [[f64; 2]; 2],
        kernels: [[[f64; 2]; 2]; 2],
    },
    QuantumDriven {
        first: String,
        second: String,
    },
}

impl Scenario {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read scenario file {}", path.display()))?;
        let scenario: Scenario = serde_json::from_str(&text)
            .with_context(|| format!("cannot parse scenario file {}", path.display()))?;
        if scenario.dim == 0 || scenario.dim > MAX_DIM {
            return Err(anyhow!(
                "scenario dimension {} outside 1..={MAX_DIM}",
                scenario.dim
            ));
        }
        Ok(scenario)
    }

    pub fn density(&self, tol: f64) -> Result<DensityOperator> {
        let rho = self.state.validate(tol).context("invalid state")?;
        if rho.dim() != self.dim {
            return Err(anyhow!(
                "state dimension {} does not match scenario dimension {}",
                rho.dim(),
                self.dim
            ));
        }
        Ok(rho)
    }

    pub fn channel(&self, name: &str, tol: f64) -> Result<KrausChannel> {
        let parts = self
            .channels
            .get(name)
            .ok_or_else(|| anyhow!("unknown channel `{name}`"))?;
        let ch = parts
            .clone()
            .validate(tol)
            .with_context(|| format!("invalid channel `{name}`"))?;
        if ch.dim() != self.dim {
            return Err(anyhow!(
                "channel `{name}` dimension {} does not match scenario dimension {}",
                ch.dim(),
                self.dim
            ));
        }
        Ok(ch)
    }

    pub fn povm(&self, name: &str, tol: f64) -> Result<Povm> {
        let parts = self
            .povms
            .get(name)
            .ok_or_else(|| anyhow!("unknown POVM `{name}`"))?;
        let povm = parts
            .clone()
            .validate(tol)
            .with_context(|| format!("invalid POVM `{name}`"))?;
        if povm.dim() != self.dim {
            return Err(anyhow!(
                "POVM `{name}` dimension {} does not match scenario dimension {}",
                povm.dim(),
                self.dim
            ));
        }
        Ok(povm)
    }
}

struct Check {
    name: &'static str,
    gap: f64,
    pass: bool,
}

impl Check {
    fn gap(name: &'static str, gap: f64, tol: f64) -> Self {
        Self {
            name,
            gap,
            pass: gap <= tol,
        }
    }
}

fn component_value(name: String, checks: Vec<Check>) -> (Value, bool) {
    let ok = checks.iter().all(|c| c.pass);
    let value = json!({
        "component": name,
        "checks": checks
            .iter()
            .map(|c| json!({"check": c.name, "gap": c.gap, "pass": c.pass}))
            .collect::<Vec<_>>(),
    });
    (value, ok)
}

/// Max over operators of `max(0, -min eigenvalue)`, or the Hermiticity gap
/// when the eigenproblem is not defined.
fn psd_gap(ops: &[qpt_core::Operator], tol: f64) -> f64 {
    ops.iter()
        .map(|op| match op.min_eigenvalue(tol) {
            Ok(min) => (-min).max(0.0),
            Err(_) => op.hermiticity_gap(),
        })
        .fold(0.0, f64::max)
}

/// Per-component invariant report: every check with its numeric gap.
/// The boolean is true iff every check passes within `tol`.
pub fn validate_report(scenario: &Scenario, tol: f64) -> (Value, bool) {
    let mut components = Vec::new();
    let mut all_ok = true;
    let dim = scenario.dim;

    let state_checks = match &scenario.state {
        StateParts::Pure { vec } => vec![
            Check::gap("dimension", vec.dim().abs_diff(dim) as f64, 0.0),
            Check::gap("unit_norm", vec.unit_gap(), tol),
        ],
        StateParts::Density { matrix } => {
            let psd = match matrix.min_eigenvalue(tol) {
                Ok(min) => (-min).max(0.0),
                Err(_) => matrix.hermiticity_gap(),
            };
            vec![
                Check::gap("dimension", matrix.dim().abs_diff(dim) as f64, 0.0),
                Check::gap("hermitian", matrix.hermiticity_gap(), tol),
                Check::gap("psd", psd, tol),
                Check::gap(
                    "unit_trace",
                    {
                        let tr = matrix.trace();
                        ((tr.re - 1.0).powi(2) + tr.im.powi(2)).sqrt()
                    },
                    tol,
                ),
            ]
        }
    };
    let (value, ok) = component_value("state".into(), state_checks);
    components.push(value);
    all_ok &= ok;

    for (name, parts) in &scenario.channels {
        let mut checks = vec![Check::gap(
            "outcome_count",
            parts.outcomes.len().abs_diff(parts.kraus.len()) as f64,
            0.0,
        )];
        if let Some(op) = parts.kraus.first() {
            checks.push(Check::gap("dimension", op.dim().abs_diff(dim) as f64, 0.0));
        }
        match parts.completeness_gap() {
            Ok(gap) => checks.push(Check::gap("completeness", gap, tol)),
            Err(e) => {
                eprintln!("channel `{name}`: {e}");
                checks.push(Check::gap("completeness", f64::INFINITY, tol));
            }
        }
        let (value, ok) = component_value(format!("channel:{name}"), checks);
        components.push(value);
        all_ok &= ok;
    }

    for (name, parts) in &scenario.povms {
        let mut checks = vec![Check::gap(
            "outcome_count",
            parts.outcomes.len().abs_diff(parts.elements.len()) as f64,
            0.0,
        )];
        if let Some(op) = parts.elements.first() {
            checks.push(Check::gap("dimension", op.dim().abs_diff(dim) as f64, 0.0));
        }
        let hermitian = parts
            .elements
            .iter()
            .map(|el| el.hermiticity_gap())
            .fold(0.0, f64::max);
        checks.push(Check::gap("elements_hermitian", hermitian, tol));
        checks.push(Check::gap(
            "elements_psd",
            psd_gap(&parts.elements, tol),
            tol,
        ));
        match parts.normalization_gap() {
            Ok(gap) => checks.push(Check::gap("sums_to_identity", gap, tol)),
            Err(e) => {
                eprintln!("POVM `{name}`: {e}");
                checks.push(Check::gap("sums_to_identity", f64::INFINITY, tol));
            }
        }
        let (value, ok) = component_value(format!("povm:{name}"), checks);
        components.push(value);
        all_ok &= ok;
    }

    let report = json!({
        "ok": all_ok,
        "tol": tol,
        "components": components,
    });
    (report, all_ok)
}
