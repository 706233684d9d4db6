//! Random operators and states for property checks and demos.
//!
//! Everything takes an explicit generator so that seeded runs are
//! reproducible.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::{CMatrix, CVector, Complex64, RMatrix};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(gaussian(rng), gaussian(rng))
}

/// Matrix with independent complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| complex_gaussian(rng))
}

/// Hermitian matrix `(G + G†)/2` from a Ginibre draw.
pub fn hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(n, rng);
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Hermitian matrix with unit trace.
pub fn trace_one_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let mut h = hermitian(n, rng);
    let shift = (Complex64::new(1.0, 0.0) - h.trace()) / n as f64;
    for j in 0..n {
        h[(j, j)] += shift;
    }
    h
}

/// Full-rank density matrix `G G† / Tr(G G†)`.
pub fn density_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(n, rng);
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

/// Uniformly distributed unit vector in `C^n`.
pub fn unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    loop {
        let v = CVector::from_fn(n, |_, _| complex_gaussian(rng));
        let norm = v.norm();
        if norm > 1e-8 {
            return v / Complex64::new(norm, 0.0);
        }
    }
}

/// Unitary `exp(iH)` for a random Hermitian `H`.
pub fn unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    (hermitian(n, rng) * Complex64::new(0.0, 1.0)).exp()
}

/// Real matrix with independent standard normal entries.
pub fn real_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> RMatrix {
    RMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Real antisymmetric matrix.
pub fn antisymmetric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RMatrix {
    let a = real_gaussian(n, n, rng);
    (&a - a.transpose()) * 0.5
}

/// Real symmetric matrix.
pub fn symmetric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RMatrix {
    let a = real_gaussian(n, n, rng);
    (&a + a.transpose()) * 0.5
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_have_their_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..5 {
            let h = hermitian(n, &mut rng);
            assert!(linalg::hermiticity_residual(&h) < 1e-15);
            let rho = density_matrix(n, &mut rng);
            assert!((rho.trace().re - 1.0).abs() < 1e-12);
            assert!(linalg::hermitian_eigenvalues(&rho)[0] > -1e-12);
            let u = unitary(n, &mut rng);
            assert!((&u * u.adjoint() - CMatrix::identity(n, n)).norm() < 1e-10);
            assert!((unit_vector(n, &mut rng).norm() - 1.0).abs() < 1e-14);
            assert!((trace_one_hermitian(n, &mut rng).trace().re - 1.0).abs() < 1e-12);
        }
    }
}
