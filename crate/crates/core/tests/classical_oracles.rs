use gkls_contact::classical::lagrangian::{ContactLagrangianSystem, Dissipation, DissipationForm, Lagrangian};
use gkls_contact::classical::linear::{bivector_span_dimension, hamiltonianity_criterion, representative_matrix};
use gkls_contact::classical::{HamiltonianityVerdict, LagrangianVerdict, LinearSecondOrderSystem};
use gkls_contact::{RMatrix, RVector};
use proptest::prelude::*;

#[test]
fn caldirola_kanai_oscillator() {
    // m q̈ + c q̇ + k q = 0 from h(S) = (c/m) S
    let (m, k, c) = (2.0, 3.0, 0.4);
    let lag = Lagrangian::quadratic(RMatrix::from_element(1, 1, m), RMatrix::from_element(1, 1, k)).unwrap();
    let sys = ContactLagrangianSystem::new(lag, Dissipation::linear(c / m), DissipationForm::CaldirolaKanai);
    let traj = sys.integrate(&RVector::from_vec(vec![1.0, 0.0, 0.0]), 8.0, 1e-3).unwrap();
    let beta = c / (2.0 * m);
    let wd = (k / m - beta * beta).sqrt();
    for (t, s) in traj.times.iter().zip(&traj.states).step_by(200) {
        let q = (-beta * t).exp() * ((wd * t).cos() + beta / wd * (wd * t).sin());
        assert!((s[0] - q).abs() < 1e-9, "t = {t}");
    }
}

#[test]
fn friction_velocity_decays_exponentially() {
    let gamma = 0.7;
    let sys = ContactLagrangianSystem::friction(gamma);
    let traj = sys.integrate(&RVector::from_vec(vec![0.0, 2.0, 0.0]), 5.0, 1e-3).unwrap();
    for (t, s) in traj.times.iter().zip(&traj.states).step_by(100) {
        let v = 2.0 * (-gamma * t).exp();
        let q = 2.0 / gamma * (1.0 - (-gamma * t).exp());
        assert!((s[1] - v).abs() < 1e-9 && (s[0] - q).abs() < 1e-9);
    }
    assert!(traj.left_domain_at.is_none());
}

#[test]
fn friction_rejects_nonpositive_velocity() {
    let sys = ContactLagrangianSystem::friction(1.0);
    assert!(sys.field(&RVector::from_vec(vec![0.0, -1.0, 0.0])).is_err());
}

#[test]
fn undamped_oscillators_are_hamiltonian_and_may_be_lagrangian() {
    let sys = LinearSecondOrderSystem::coupled_damped_oscillators(1.0, 1.7, 0.0, 0.0, 0.3, 0.0);
    let g = representative_matrix(&sys).unwrap();
    assert_eq!(hamiltonianity_criterion(&g).unwrap().verdict, HamiltonianityVerdict::Admissible);
    let span = bivector_span_dimension(&g).unwrap();
    assert!(span.dim < span.max_dim);
    assert_eq!(span.verdict, LagrangianVerdict::Possible);
}

#[test]
fn singular_mass_is_implicit() {
    let m = RMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
    let sys = LinearSecondOrderSystem::new(m, RMatrix::zeros(2, 2), RMatrix::identity(2, 2)).unwrap();
    assert!(sys.is_implicit());
    assert!(representative_matrix(&sys).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn damping_always_breaks_hamiltonianity(g1 in 0.05f64..2.0, g2 in 0.05f64..2.0, kappa in -0.5f64..0.5) {
        let sys = LinearSecondOrderSystem::coupled_damped_oscillators(1.0, 2.3, g1, g2, kappa, 0.1);
        let g = representative_matrix(&sys).unwrap();
        let report = hamiltonianity_criterion(&g).unwrap();
        prop_assert!((report.odd_traces[0] + g1 + g2).abs() < 1e-12);
        prop_assert_eq!(report.verdict, HamiltonianityVerdict::NotHamiltonian);
    }

    #[test]
    fn energy_rate_matches_contraction(q in -1.0f64..1.0, v in -1.0f64..1.0, s in -1.0f64..1.0, c in 0.0f64..1.0) {
        let lag = Lagrangian::quadratic(RMatrix::identity(1, 1), RMatrix::from_element(1, 1, 2.0)).unwrap();
        let sys = ContactLagrangianSystem::new(lag, Dissipation::linear(c), DissipationForm::CaldirolaKanai);
        let rate = sys.energy_rate(&RVector::from_vec(vec![q, v, s])).unwrap();
        prop_assert!((rate + c * v * v).abs() < 1e-12);
    }
}
