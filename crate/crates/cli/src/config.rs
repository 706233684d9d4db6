//! JSON scenario configuration.
//!
//! ```json
//! {
//!   "id": "phase-damping",
//!   "kind": "gkls",
//!   "t_end": 3.0,
//!   "dt": 0.001,
//!   "output": { "dir": "out" },
//!   "parameters": {
//!     "model": { "type": "phase-damping", "gamma": 1.0 },
//!     "rho0": [[0.5, 0.5], [0.5, 0.5]]
//!   }
//! }
//! ```
//!
//! Matrix and vector entries are either plain reals or `[re, im]` pairs.
//! Unknown fields are rejected.

use std::path::{Path, PathBuf};

use gkls_contact::{CMatrix, CVector, Complex64, RMatrix, RVector};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Gkls,
    PureState,
    ContactLagrangian,
    Circuit,
    Checks,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    /// File stem for the CSV and report; defaults to the scenario id.
    pub stem: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub id: String,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub parameters: serde_json::Value,
}

/// A matrix or vector entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    pub fn value(self) -> Complex64 {
        match self {
            Entry::Real(x) => Complex64::new(x, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

impl From<Complex64> for Entry {
    fn from(z: Complex64) -> Self {
        if z.im == 0.0 {
            Entry::Real(z.re)
        } else {
            Entry::Complex([z.re, z.im])
        }
    }
}

pub type MatrixSpec = Vec<Vec<Entry>>;

pub fn complex_matrix(name: &str, rows: &MatrixSpec) -> Result<CMatrix, CliError> {
    let n = rows.len();
    if n == 0 {
        return Err(CliError::Usage(format!("{name}: empty matrix")));
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != n) {
        return Err(CliError::Usage(format!("{name}: row {bad} has {} entries, expected {n}", rows[bad].len())));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j].value()))
}

pub fn real_matrix(name: &str, rows: &MatrixSpec) -> Result<RMatrix, CliError> {
    let m = complex_matrix(name, rows)?;
    if m.iter().any(|z| z.im != 0.0) {
        return Err(CliError::Usage(format!("{name}: expected a real matrix")));
    }
    Ok(m.map(|z| z.re))
}

pub fn complex_vector(entries: &[Entry]) -> CVector {
    CVector::from_iterator(entries.len(), entries.iter().map(|e| e.value()))
}

pub fn matrix_spec(m: &CMatrix) -> MatrixSpec {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].into()).collect()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowSpec {
    #[default]
    Full,
    HamiltonianGradient,
    Hamiltonian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GklsModelSpec {
    PhaseDamping { gamma: f64 },
    AmplitudeDamping { gamma: f64 },
    Custom { hamiltonian: MatrixSpec, #[serde(default)] jumps: Vec<MatrixSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GklsParams {
    pub model: GklsModelSpec,
    pub rho0: MatrixSpec,
    #[serde(default)]
    pub flow: FlowSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PureStateParams {
    pub a: MatrixSpec,
    pub b: MatrixSpec,
    pub psi0: Vec<Entry>,
    #[serde(default)]
    pub renormalize: bool,
    /// Require the final state to sit at the dominant eigenvector of `b`.
    #[serde(default)]
    pub expect_convergence: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DissipationSpec {
    None,
    /// `h(S) = h S` with `D = ∂L/∂q̇`.
    CaldirolaKanai { h: f64 },
    /// `h(S) = h S` with `D = ∂F/∂q̇`, `F = ½ q̇ᵀ R q̇`.
    Rayleigh { h: f64, r: MatrixSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SystemSpec {
    Friction { gamma: f64 },
    /// `L = ½ q̇ᵀ M q̇ − ½ qᵀ K q`.
    Quadratic { mass: MatrixSpec, stiffness: MatrixSpec, dissipation: DissipationSpec },
    /// `M q̈ + Γ q̇ + Ω q = 0`, analysed rather than given a Lagrangian.
    LinearSecondOrder { mass: MatrixSpec, damping: MatrixSpec, stiffness: MatrixSpec },
    CoupledDampedOscillators { w1: f64, w2: f64, g1: f64, g2: f64, kappa: f64, delta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LagrangianParams {
    pub system: SystemSpec,
    /// `(q, q̇, S)`, or `(q, q̇)` for linear systems.
    pub state0: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CircuitSpec {
    Single { r: f64, l: f64, c: f64 },
    Coupled { l1: f64, l2: f64, c1: f64, c2: f64, r1: f64, r2: f64, r: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitParams {
    pub circuit: CircuitSpec,
    /// `(I, İ, S)`; defaults to unit current in the first loop.
    #[serde(default)]
    pub state0: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksParams {
    #[serde(default)]
    pub filter: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Parameters {
    Gkls(GklsParams),
    PureState(PureStateParams),
    ContactLagrangian(LagrangianParams),
    Circuit(CircuitParams),
    Checks(ChecksParams),
}

fn typed<T: serde::de::DeserializeOwned>(kind: &str, v: &serde_json::Value) -> Result<T, CliError> {
    let v = if v.is_null() { serde_json::Value::Object(Default::default()) } else { v.clone() };
    serde_json::from_value(v).map_err(|e| CliError::Usage(format!("{kind} parameters: {e}")))
}

impl ScenarioConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks the schema of the kind-specific parameters and the shared
    /// numeric fields.
    pub fn validate(&self) -> Result<Parameters, CliError> {
        if self.id.is_empty() || self.id.contains(['/', '\\']) {
            return Err(CliError::Usage(format!("invalid scenario id {:?}", self.id)));
        }
        for (name, v) in [("t_end", self.t_end), ("dt", self.dt)] {
            if let Some(x) = v {
                if !(x > 0.0) || !x.is_finite() {
                    return Err(CliError::Usage(format!("{name} must be positive, got {x}")));
                }
            }
        }
        let p = &self.parameters;
        Ok(match self.kind {
            Kind::Gkls => Parameters::Gkls(typed("gkls", p)?),
            Kind::PureState => Parameters::PureState(typed("pure-state", p)?),
            Kind::ContactLagrangian => Parameters::ContactLagrangian(typed("contact-lagrangian", p)?),
            Kind::Circuit => Parameters::Circuit(typed("circuit", p)?),
            Kind::Checks => Parameters::Checks(typed("checks", p)?),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

pub fn state_vector(name: &str, v: &[f64], expected: usize) -> Result<RVector, CliError> {
    if v.len() != expected {
        return Err(CliError::Usage(format!("{name}: expected {expected} components, got {}", v.len())));
    }
    Ok(RVector::from_row_slice(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_complex_entries() {
        let cfg = ScenarioConfig::from_json(
            r#"{"id": "x", "kind": "pure-state", "parameters": {
                "a": [[1, [0, -1]], [[0, 1], -1]], "b": [[0, 0], [0, 0]], "psi0": [1, 0]}}"#,
        )
        .unwrap();
        let Parameters::PureState(p) = cfg.validate().unwrap() else { panic!() };
        let a = complex_matrix("a", &p.a).unwrap();
        assert_eq!(a[(0, 1)], Complex64::new(0.0, -1.0));
        assert_eq!(a[(1, 1)], Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn rejects_unknown_fields_and_bad_shapes() {
        assert!(ScenarioConfig::from_json(r#"{"id": "x", "kind": "gkls", "bogus": 1}"#).is_err());
        assert!(ScenarioConfig::from_json(r#"{"id": "x", "kind": "warp"}"#).is_err());
        assert!(ScenarioConfig::from_json(r#"{"id": "x", "kind": "checks", "dt": -1}"#).is_err());
        let ragged = vec![vec![Entry::Real(1.0), Entry::Real(0.0)], vec![Entry::Real(1.0)]];
        assert!(complex_matrix("m", &ragged).is_err());
    }

    #[test]
    fn entry_round_trip() {
        let m = CMatrix::from_fn(2, 2, |i, j| Complex64::new(i as f64, j as f64));
        assert_eq!(complex_matrix("m", &matrix_spec(&m)).unwrap(), m);
    }
}
