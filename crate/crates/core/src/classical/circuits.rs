//! RLC circuits as contact Lagrangian systems. The state `(I, İ, S)` uses
//! the current as configuration variable.

use super::lagrangian::{ContactLagrangianSystem, Dissipation, DissipationForm, Lagrangian};
use super::linear::LinearSecondOrderSystem;
use crate::{Error, RMatrix, RVector, Result};

fn positive(name: &'static str, value: f64) -> Result<()> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::InvalidParameter { name, value, reason: "must be positive" });
    }
    Ok(())
}

fn non_negative(name: &'static str, value: f64) -> Result<()> {
    if !(value >= 0.0) || !value.is_finite() {
        return Err(Error::InvalidParameter { name, value, reason: "must be non-negative" });
    }
    Ok(())
}

/// Single loop: `L = ½ L_ind İ² − I²/(2C)`, Caldirola–Kanai form with
/// `h(S) = (R/L_ind) S`, giving `L_ind Ï + R İ + I/C = 0`.
pub fn rlc_single(r: f64, l_ind: f64, c: f64) -> Result<ContactLagrangianSystem> {
    non_negative("R", r)?;
    positive("L", l_ind)?;
    positive("C", c)?;
    let m = RMatrix::from_element(1, 1, l_ind);
    let k = RMatrix::from_element(1, 1, 1.0 / c);
    let lag = Lagrangian::quadratic(m, k)?;
    Ok(ContactLagrangianSystem::new(lag, Dissipation::linear(r / l_ind), DissipationForm::CaldirolaKanai)
        .with_mechanical_energy(move |q, v| 0.5 * l_ind * v[0] * v[0] + 0.5 * q[0] * q[0] / c))
}

/// Circuit matrices `(L, C⁻¹, R)` of two loops coupled through a shared
/// resistor.
pub fn rlc_coupled_matrices(l1: f64, l2: f64, c1: f64, c2: f64, r1: f64, r2: f64, r: f64) -> Result<(RMatrix, RMatrix, RMatrix)> {
    positive("L1", l1)?;
    positive("L2", l2)?;
    positive("C1", c1)?;
    positive("C2", c2)?;
    non_negative("R1", r1)?;
    non_negative("R2", r2)?;
    if !r.is_finite() {
        return Err(Error::InvalidParameter { name: "R", value: r, reason: "must be finite" });
    }
    Ok((
        RMatrix::from_diagonal(&RVector::from_vec(vec![l1, l2])),
        RMatrix::from_diagonal(&RVector::from_vec(vec![1.0 / c1, 1.0 / c2])),
        RMatrix::from_row_slice(2, 2, &[r1, r, r, r2]),
    ))
}

/// Two coupled loops: `L = ½ İᵀ L İ − ½ Iᵀ C⁻¹ I`, Rayleigh
/// `F = ½ İᵀ R İ` with `R = [[R₁, R], [R, R₂]]` and `h(S) = S`, giving
/// `L Ï + R İ + C⁻¹ I = 0`.
pub fn rlc_coupled(l1: f64, l2: f64, c1: f64, c2: f64, r1: f64, r2: f64, r: f64) -> Result<ContactLagrangianSystem> {
    let (l, k, rm) = rlc_coupled_matrices(l1, l2, c1, c2, r1, r2, r)?;
    ContactLagrangianSystem::linear_rayleigh(l, k, rm)
}

/// The same coupled circuit as a linear second-order system.
pub fn rlc_coupled_linear(l1: f64, l2: f64, c1: f64, c2: f64, r1: f64, r2: f64, r: f64) -> Result<LinearSecondOrderSystem> {
    let (l, k, rm) = rlc_coupled_matrices(l1, l2, c1, c2, r1, r2, r)?;
    LinearSecondOrderSystem::new(l, rm, k)
}

/// Closed-form current of `L Ï + R İ + I/C = 0` in the underdamped regime,
/// returning `(I, İ)`. `None` when the circuit is not underdamped.
pub fn rlc_underdamped_exact(r: f64, l_ind: f64, c: f64, i0: f64, di0: f64, t: f64) -> Option<(f64, f64)> {
    let beta = r / (2.0 * l_ind);
    let wd2 = 1.0 / (l_ind * c) - beta * beta;
    if wd2 <= 0.0 {
        return None;
    }
    let wd = wd2.sqrt();
    let a = i0;
    let b = (di0 + beta * i0) / wd;
    let (s, co) = (wd * t).sin_cos();
    let decay = (-beta * t).exp();
    let i = decay * (a * co + b * s);
    let di = decay * ((-beta * a + wd * b) * co + (-beta * b - wd * a) * s);
    Some((i, di))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::linear::{linear_flow_exact, representative_matrix};

    #[test]
    fn single_loop_equation() {
        let (r, l, c) = (0.3, 2.0, 0.5);
        let sys = rlc_single(r, l, c).unwrap();
        let x = RVector::from_vec(vec![0.4, -1.1, 0.7]);
        let f = sys.field(&x).unwrap();
        // L Ï + R İ + I/C = 0
        assert!((l * f[1] + r * x[1] + x[0] / c).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(rlc_single(0.1, 0.0, 1.0).is_err());
        assert!(rlc_single(0.1, 1.0, -1.0).is_err());
        assert!(rlc_coupled(1.0, 1.0, 1.0, 0.0, 0.1, 0.1, 0.0).is_err());
    }

    #[test]
    fn single_loop_matches_closed_form() {
        let (r, l, c) = (0.2, 1.0, 1.0);
        let sys = rlc_single(r, l, c).unwrap();
        let traj = sys.integrate(&RVector::from_vec(vec![1.0, 0.0, 0.0]), 10.0, 1e-3).unwrap();
        for (t, s) in traj.times.iter().zip(&traj.states) {
            let (i, di) = rlc_underdamped_exact(r, l, c, 1.0, 0.0, *t).unwrap();
            assert!((s[0] - i).abs() < 1e-9 && (s[1] - di).abs() < 1e-9);
        }
    }

    #[test]
    fn lossless_loop_conserves_energy() {
        let sys = rlc_single(0.0, 1.5, 0.7).unwrap();
        let traj = sys.integrate(&RVector::from_vec(vec![1.0, 0.3, 0.0]), 10.0, 1e-3).unwrap();
        let e0 = traj.mechanical_energy[0];
        assert!(traj.mechanical_energy.iter().all(|e| (e - e0).abs() < 1e-8));
    }

    #[test]
    fn coupled_loops_match_linear_system() {
        let args = (1.0, 2.0, 0.5, 1.5, 0.2, 0.3, 0.1);
        let sys = rlc_coupled(args.0, args.1, args.2, args.3, args.4, args.5, args.6).unwrap();
        let lin = rlc_coupled_linear(args.0, args.1, args.2, args.3, args.4, args.5, args.6).unwrap();
        let g = representative_matrix(&lin).unwrap();
        let x0 = RVector::from_vec(vec![1.0, -0.5, 0.2, 0.1, 0.0]);
        let traj = sys.integrate(&x0, 5.0, 1e-3).unwrap();
        let xi0 = x0.rows(0, 4).into_owned();
        for (t, s) in traj.times.iter().zip(&traj.states).step_by(100) {
            let exact = linear_flow_exact(&g, &xi0, *t);
            assert!((s.rows(0, 4) - exact).amax() < 1e-9);
        }
    }

    #[test]
    fn zero_coupling_decouples() {
        let sys = rlc_coupled(1.0, 2.0, 0.5, 1.5, 0.2, 0.3, 0.0).unwrap();
        let x = RVector::from_vec(vec![0.0, 1.0, 0.0, 0.5, 0.0]);
        let f = sys.field(&x).unwrap();
        // loop 1 carries nothing and is not driven by loop 2
        assert!(f[0].abs() < 1e-12 && f[2].abs() < 1e-12);
    }
}
