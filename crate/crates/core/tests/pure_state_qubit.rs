use gkls_contact::algebra::{pauli, SuBasis};
use gkls_contact::pure_state::{self as ps, GeneratorPair, HilbertPoint, SpherePoint};
use gkls_contact::{CMatrix, CVector, Complex64};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn phase_rotation_closed_form() {
    // diagonal a: each amplitude picks up e^{i a_k t}
    let a = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.3, 0.0), c(-1.2, 0.0)]));
    let pair = GeneratorPair::new(a, CMatrix::zeros(2, 2)).unwrap();
    let psi0 = CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
    let traj = ps::integrate_sphere_flow(&pair, &SpherePoint::new(psi0.clone()).unwrap(), 3.0, 1e-3, false).unwrap();
    let t = *traj.times.last().unwrap();
    let want = CVector::from_vec(vec![psi0[0] * c(0.0, 0.3 * t).exp(), psi0[1] * c(0.0, -1.2 * t).exp()]);
    assert!((traj.states.last().unwrap() - want).camax() < 1e-10);
}

#[test]
fn sigma3_gradient_population_logistic() {
    // b = σ3: |ψ0|² obeys p' = 4p(1 − p)
    let [_, _, s3] = pauli();
    let pair = GeneratorPair::new(CMatrix::zeros(2, 2), s3).unwrap();
    let p0 = 0.2f64;
    let psi0 = CVector::from_vec(vec![c(p0.sqrt(), 0.0), c((1.0 - p0).sqrt(), 0.0)]);
    let traj = ps::integrate_sphere_flow(&pair, &SpherePoint::new(psi0).unwrap(), 2.0, 1e-3, false).unwrap();
    for (t, psi) in traj.times.iter().zip(&traj.states).step_by(100) {
        let e = (4.0 * t).exp();
        let want = p0 * e / (1.0 - p0 + p0 * e);
        assert!((psi[0].norm_sqr() - want).abs() < 1e-10);
    }
}

#[test]
fn bloch_vector_of_plus_state() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let p = HilbertPoint::new(CVector::from_vec(vec![c(s, 0.0), c(s, 0.0)])).unwrap();
    let x = ps::project_to_bloch(&SuBasis::new(2).unwrap(), &p).unwrap();
    assert!((x[0] - s).abs() < 1e-15 && x[1].abs() < 1e-15 && x[2].abs() < 1e-15);
}

#[test]
fn input_validation() {
    assert!(SpherePoint::new(CVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)])).is_err());
    assert!(HilbertPoint::new(CVector::zeros(2)).is_err());
    let non_hermitian = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    assert!(GeneratorPair::new(non_hermitian, CMatrix::zeros(2, 2)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qubit_contact_equations(ar in proptest::collection::vec(-1.0f64..1.0, 8), z in proptest::collection::vec(-1.0f64..1.0, 4)) {
        let herm = |v: &[f64]| CMatrix::from_row_slice(2, 2, &[c(v[0], 0.0), c(v[1], v[2]), c(v[1], -v[2]), c(v[3], 0.0)]);
        let pair = GeneratorPair::new(herm(&ar[0..4]), herm(&ar[4..8])).unwrap();
        let psi = CVector::from_vec(vec![c(z[0], z[1]), c(z[2], z[3])]);
        prop_assume!(psi.norm() > 1e-3);
        let p = SpherePoint::normalized(psi).unwrap();
        prop_assert!(ps::contact_residuals(&pair, &p).unwrap().max() < 1e-9);
    }
}
