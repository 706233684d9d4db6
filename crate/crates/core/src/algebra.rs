//! Orthonormal su(n) bases, structure constants and the coherence-vector
//! chart on trace-one Hermitian matrices.
//!
//! A trace-one Hermitian `ξ` is written `ξ = I/n + x^j τ_j` with
//! `x^j = Tr(ξ τ_j)`. The basis is Hilbert–Schmidt orthonormal, so upper
//! and lower indices coincide numerically.

use crate::linalg::{self, anticommutator, commutator, trace_product};
use crate::{CMatrix, Complex64, Error, RVector, Result};

/// Entrywise Hermiticity tolerance for inputs.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Allowed deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue still accepted as positive.
pub const POSITIVITY_TOL: f64 = 1e-10;
/// Imaginary part above which a structure constant is rejected.
pub const IMAGINARY_RESIDUE_TOL: f64 = 1e-12;

/// Dense rank-3 real tensor indexed `[l][j][k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    m: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    fn zeros(m: usize) -> Self {
        Self { m, data: vec![0.0; m * m * m] }
    }

    pub fn size(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, l: usize, j: usize, k: usize) -> f64 {
        self.data[(l * self.m + j) * self.m + k]
    }

    #[inline]
    fn set(&mut self, l: usize, j: usize, k: usize, v: f64) {
        self.data[(l * self.m + j) * self.m + k] = v;
    }
}

/// Generalized Gell-Mann basis of traceless Hermitian `n×n` matrices with
/// `Tr(τ_j τ_k) = δ_jk`, together with
/// `c[l][j][k] = i Tr([τ_j, τ_k] τ_l)` and `d[l][j][k] = Tr({τ_j, τ_k} τ_l)`.
#[derive(Debug, Clone)]
pub struct SuBasis {
    n: usize,
    tau: Vec<CMatrix>,
    c: Tensor3,
    d: Tensor3,
}

impl SuBasis {
    /// Builds the basis: symmetric pairs, antisymmetric pairs, then diagonal
    /// elements, each in lexicographic order.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension { dim: n, reason: "su(n) basis needs n >= 2" });
        }
        let tau = gell_mann(n);
        let (c, d) = structure_constants(&tau)?;
        Ok(Self { n, tau, c, d })
    }

    /// Hilbert-space dimension `n`.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of basis elements, `n² − 1`.
    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    pub fn tau(&self) -> &[CMatrix] {
        &self.tau
    }

    pub fn c(&self) -> &Tensor3 {
        &self.c
    }

    pub fn d(&self) -> &Tensor3 {
        &self.d
    }

    fn check_square(&self, a: &CMatrix) -> Result<()> {
        if a.nrows() != self.n || a.ncols() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: a.nrows().max(a.ncols()) });
        }
        Ok(())
    }

    fn check_point(&self, x: &RVector) -> Result<()> {
        if x.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: x.len() });
        }
        Ok(())
    }

    /// Components `(Tr(A)/n, Tr(A τ_j))` of an operator.
    pub fn components(&self, a: &CMatrix) -> Result<(f64, RVector)> {
        self.check_square(a)?;
        let a0 = linalg::trace(a).re / self.n as f64;
        let aj = RVector::from_iterator(self.len(), self.tau.iter().map(|t| trace_product(a, t).re));
        Ok((a0, aj))
    }

    /// Coherence vector of a trace-one Hermitian matrix.
    pub fn to_coherence_vector(&self, a: &CMatrix) -> Result<RVector> {
        self.check_square(a)?;
        ensure_hermitian(a)?;
        let tr = linalg::trace(a).re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::TraceMismatch { trace: tr });
        }
        Ok(self.components(a)?.1)
    }

    /// Reconstruction `I/n + x^j τ_j`.
    pub fn from_coherence_vector(&self, x: &RVector) -> Result<CMatrix> {
        self.check_point(x)?;
        let mut xi = CMatrix::identity(self.n, self.n) * Complex64::new(1.0 / self.n as f64, 0.0);
        for (t, &xj) in self.tau.iter().zip(x.iter()) {
            xi += t * Complex64::new(xj, 0.0);
        }
        Ok(xi)
    }

    /// `Tr(A ξ(x))`, evaluated through the affine expansion `a₀ + a_j x^j`.
    pub fn expectation(&self, a: &CMatrix, x: &RVector) -> Result<f64> {
        self.check_point(x)?;
        let (a0, aj) = self.components(a)?;
        Ok(a0 + aj.dot(x))
    }

    /// Largest violation of the Jacobi identity for `c`.
    pub fn jacobi_residual(&self) -> f64 {
        let m = self.len();
        let c = &self.c;
        let mut worst = 0.0f64;
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    for r in 0..m {
                        let mut s = 0.0;
                        for p in 0..m {
                            s += c.get(p, j, k) * c.get(r, p, l)
                                + c.get(p, k, l) * c.get(r, p, j)
                                + c.get(p, l, j) * c.get(r, p, k);
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }
}

fn gell_mann(n: usize) -> Vec<CMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let zero = CMatrix::zeros(n, n);
    let mut out = Vec::with_capacity(n * n - 1);
    for j in 0..n {
        for k in j + 1..n {
            let mut t = zero.clone();
            t[(j, k)] = Complex64::new(s, 0.0);
            t[(k, j)] = Complex64::new(s, 0.0);
            out.push(t);
        }
    }
    for j in 0..n {
        for k in j + 1..n {
            let mut t = zero.clone();
            t[(j, k)] = Complex64::new(0.0, -s);
            t[(k, j)] = Complex64::new(0.0, s);
            out.push(t);
        }
    }
    for l in 1..n {
        let scale = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut t = zero.clone();
        for i in 0..l {
            t[(i, i)] = Complex64::new(scale, 0.0);
        }
        t[(l, l)] = Complex64::new(-(l as f64) * scale, 0.0);
        out.push(t);
    }
    out
}

/// Structure constants `(c, d)` of an orthonormal traceless Hermitian basis.
pub fn structure_constants(tau: &[CMatrix]) -> Result<(Tensor3, Tensor3)> {
    let m = tau.len();
    let mut c = Tensor3::zeros(m);
    let mut d = Tensor3::zeros(m);
    let i = Complex64::new(0.0, 1.0);
    for j in 0..m {
        for k in j..m {
            let comm = commutator(&tau[j], &tau[k]);
            let anti = anticommutator(&tau[j], &tau[k]);
            for l in 0..m {
                let cv = i * trace_product(&comm, &tau[l]);
                let dv = trace_product(&anti, &tau[l]);
                let residue = cv.im.abs().max(dv.im.abs());
                if residue > IMAGINARY_RESIDUE_TOL {
                    return Err(Error::ImaginaryResidue { residue });
                }
                c.set(l, j, k, cv.re);
                c.set(l, k, j, -cv.re);
                d.set(l, j, k, dv.re);
                d.set(l, k, j, dv.re);
            }
        }
    }
    Ok((c, d))
}

/// Rejects matrices that are not Hermitian within [`HERMITIAN_TOL`]
/// (relative to their size).
pub fn ensure_hermitian(a: &CMatrix) -> Result<()> {
    let residual = linalg::hermiticity_residual(a);
    if residual > HERMITIAN_TOL * a.norm().max(1.0) {
        return Err(Error::NotHermitian { residual });
    }
    Ok(())
}

/// Checks that `rho` is a density matrix: Hermitian, unit trace, and
/// positive semidefinite within [`POSITIVITY_TOL`].
pub fn ensure_density(rho: &CMatrix) -> Result<()> {
    ensure_hermitian(rho)?;
    let tr = linalg::trace(rho).re;
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(Error::TraceMismatch { trace: tr });
    }
    let min = linalg::hermitian_eigenvalues(rho)[0];
    if min < -POSITIVITY_TOL {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    Ok(())
}

/// Pauli matrices `σ₁, σ₂, σ₃`.
pub fn pauli() -> [CMatrix; 3] {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        CMatrix::from_row_slice(2, 2, &[o, one, one, o]),
        CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        CMatrix::from_row_slice(2, 2, &[one, o, o, -one]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn qubit_basis_is_pauli_over_root_two() {
        let b = SuBasis::new(2).unwrap();
        for (t, s) in b.tau().iter().zip(pauli().iter()) {
            assert!((t - s * Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn rejects_trivial_dimension() {
        assert!(matches!(SuBasis::new(1), Err(Error::InvalidDimension { dim: 1, .. })));
        assert!(SuBasis::new(0).is_err());
    }

    #[test]
    fn gram_matrix_is_identity() {
        for n in 2..6 {
            let b = SuBasis::new(n).unwrap();
            assert_eq!(b.len(), n * n - 1);
            for (j, tj) in b.tau().iter().enumerate() {
                assert!(linalg::trace(tj).norm() < 1e-12);
                assert!(linalg::hermiticity_residual(tj) < 1e-15);
                for (k, tk) in b.tau().iter().enumerate() {
                    let want = if j == k { 1.0 } else { 0.0 };
                    assert!((trace_product(tj, tk) - Complex64::new(want, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    fn levi_civita(j: usize, k: usize, l: usize) -> f64 {
        match (j, k, l) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
            _ => 0.0,
        }
    }

    #[test]
    fn qubit_structure_constants() {
        let b = SuBasis::new(2).unwrap();
        let root2 = 2f64.sqrt();
        for l in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert!((b.c().get(l, j, k) + root2 * levi_civita(j, k, l)).abs() < 1e-12);
                    assert!(b.d().get(l, j, k).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn structure_constant_symmetries() {
        for n in 2..5 {
            let b = SuBasis::new(n).unwrap();
            let m = b.len();
            for l in 0..m {
                for j in 0..m {
                    assert_eq!(b.c().get(l, j, j), 0.0);
                    for k in 0..m {
                        assert!((b.c().get(l, j, k) + b.c().get(l, k, j)).abs() < 1e-12);
                        assert!((b.c().get(l, j, k) - b.c().get(j, k, l)).abs() < 1e-12);
                        assert!((b.d().get(l, j, k) - b.d().get(l, k, j)).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn jacobi_identity_holds() {
        for n in 2..5 {
            assert!(SuBasis::new(n).unwrap().jacobi_residual() < 1e-10, "n = {n}");
        }
    }

    #[test]
    fn coherence_vector_examples() {
        let b = SuBasis::new(2).unwrap();
        let [s1, _, s3] = pauli();
        let ket1 = CMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0].map(|v| Complex64::new(v, 0.0)));
        let x = b.to_coherence_vector(&ket1).unwrap();
        assert!((x - RVector::from_vec(vec![0.0, 0.0, FRAC_1_SQRT_2])).norm() < 1e-15);

        let plus = (CMatrix::identity(2, 2) + &s1) * Complex64::new(0.5, 0.0);
        let x = b.to_coherence_vector(&plus).unwrap();
        assert!((x - RVector::from_vec(vec![FRAC_1_SQRT_2, 0.0, 0.0])).norm() < 1e-15);

        let mixed = CMatrix::identity(3, 3) / Complex64::new(3.0, 0.0);
        assert!(SuBasis::new(3).unwrap().to_coherence_vector(&mixed).unwrap().norm() < 1e-15);

        let e = b.expectation(&s3, &RVector::from_vec(vec![0.0, 0.0, FRAC_1_SQRT_2])).unwrap();
        assert!((e - 1.0).abs() < 1e-15);
    }

    #[test]
    fn trace_mismatch_reports_trace() {
        let b = SuBasis::new(2).unwrap();
        let two = CMatrix::identity(2, 2);
        assert_eq!(b.to_coherence_vector(&two), Err(Error::TraceMismatch { trace: 2.0 }));
    }

    #[test]
    fn density_validation() {
        let not_pos = CMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, -1.0].map(|v| Complex64::new(v, 0.0)));
        assert!(matches!(ensure_density(&not_pos), Err(Error::NotPositive { .. })));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(ensure_density(&sample::density_matrix(3, &mut rng)).is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn round_trip_is_exact(seed in any::<u64>(), n in 2usize..5) {
            let b = SuBasis::new(n).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = sample::trace_one_hermitian(n, &mut rng);
            let back = b.from_coherence_vector(&b.to_coherence_vector(&a).unwrap()).unwrap();
            prop_assert!(linalg::max_abs((back - &a).iter().map(|z| z.norm())) < 1e-12);
        }

        #[test]
        fn expectation_is_affine(seed in any::<u64>(), n in 2usize..5) {
            let b = SuBasis::new(n).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = sample::hermitian(n, &mut rng);
            let xi = sample::trace_one_hermitian(n, &mut rng);
            let x = b.to_coherence_vector(&xi).unwrap();
            let direct = trace_product(&a, &xi).re;
            prop_assert!((b.expectation(&a, &x).unwrap() - direct).abs() < 1e-12 * (1.0 + direct.abs()));
            // expectation of a basis element is the coordinate
            for k in 0..b.len() {
                prop_assert!((b.expectation(&b.tau()[k], &x).unwrap() - x[k]).abs() < 1e-12);
            }
        }
    }
}
