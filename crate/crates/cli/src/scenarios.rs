//! Built-in scenarios with default parameters.

use gkls_contact::CMatrix;
use serde_json::json;

use crate::config::{ScenarioConfig, GklsModelSpec};

pub const BUILTINS: &[(&str, &str)] = &[
    ("phase-damping", "qubit phase damping from |+>, checked against the closed-form flow"),
    ("bloch-gradient", "gradient flow of sigma_3 on the qubit sphere, converging to the dominant eigenvector"),
    ("rlc-single", "underdamped series RLC loop as a contact Lagrangian system"),
    ("rlc-coupled", "two RLC loops sharing a resistor, Rayleigh dissipation"),
    ("coupled-damped-oscillators", "Hamiltonianity and bivector-span tests for two damped oscillators"),
    ("friction-lagrangian", "L = v ln v - gamma q: conserved E_L while mechanical energy decays"),
    ("contact-homomorphism", "contact-geometry invariant suite on the standard (q, p, S) chart"),
];

pub fn names() -> Vec<&'static str> {
    BUILTINS.iter().map(|(n, _)| *n).collect()
}

pub fn builtin(name: &str) -> Option<ScenarioConfig> {
    let (kind, t_end, parameters) = match name {
        "phase-damping" => {
            let plus = CMatrix::from_element(2, 2, 0.5.into());
            let model = serde_json::to_value(GklsModelSpec::PhaseDamping { gamma: 1.0 }).expect("serializes");
            ("gkls", Some(3.0), json!({ "model": model, "rho0": crate::config::matrix_spec(&plus) }))
        }
        "bloch-gradient" => (
            "pure-state",
            Some(20.0),
            json!({
                "a": [[0, 0], [0, 0]],
                "b": [[1, 0], [0, -1]],
                "psi0": [0.6, [0, 0.8]],
                "expect_convergence": true,
            }),
        ),
        "rlc-single" => (
            "circuit",
            Some(10.0),
            json!({ "circuit": { "type": "single", "r": 0.2, "l": 1.0, "c": 1.0 }, "state0": [1.0, 0.0, 0.0] }),
        ),
        "rlc-coupled" => (
            "circuit",
            Some(10.0),
            json!({
                "circuit": { "type": "coupled", "l1": 1.0, "l2": 2.0, "c1": 0.5, "c2": 1.5, "r1": 0.2, "r2": 0.3, "r": 0.1 },
                "state0": [1.0, -0.5, 0.2, 0.1, 0.0],
            }),
        ),
        "coupled-damped-oscillators" => (
            "contact-lagrangian",
            Some(10.0),
            json!({
                "system": { "type": "coupled-damped-oscillators", "w1": 1.0, "w2": 2.0, "g1": 0.3, "g2": 0.7, "kappa": 0.1, "delta": 0.2 },
                "state0": [1.0, 0.0, 0.0, 0.5],
            }),
        ),
        "friction-lagrangian" => (
            "contact-lagrangian",
            Some(10.0),
            json!({ "system": { "type": "friction", "gamma": 0.5 }, "state0": [0.0, 1.0, 0.0] }),
        ),
        "contact-homomorphism" => ("checks", None, json!({ "filter": "contact-geometry" })),
        _ => return None,
    };
    let cfg = json!({ "id": name, "kind": kind, "t_end": t_end, "dt": t_end.map(|_| 1e-3), "parameters": parameters });
    Some(serde_json::from_value(cfg).expect("built-in scenarios are well formed"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_validates() {
        assert!(BUILTINS.len() >= 7);
        for name in names() {
            let cfg = builtin(name).unwrap();
            assert_eq!(cfg.id, name);
            cfg.validate().unwrap();
            // survives a trip through the on-disk format
            assert_eq!(ScenarioConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        }
        assert!(builtin("nope").is_none());
    }
}
