//! Pure states: Kähler tensors on `ℋ₀ = ℂⁿ∖{0}`, the contact structure of
//! the unit sphere and the nonlinear flows `ℤ = 𝕏_a + 𝕐⁰_b`.
//!
//! Points are handled in the real chart `z = (x, y)`, `ψ = x + i y`.
//! Generators `a`, `b` are Hermitian and `f_a(ψ) = ⟨ψ|a|ψ⟩`. With the
//! conventions below the flow of `ℤ` is
//!
//! ```text
//! ψ̇ = i a ψ + (b − e_b) ψ,     e_b = ⟨ψ|b|ψ⟩ / ⟨ψ|ψ⟩,
//! ```
//!
//! i.e. the normalized flow of `ψ ↦ e^{t(ia + b)} ψ`.

use nalgebra::DMatrix;

use crate::algebra::{self, SuBasis};
use crate::contact::{ContactChart, ScalarField};
use crate::gkls::GklsModel;
use crate::linalg;
use crate::{ode, CMatrix, CVector, Complex64, Error, RMatrix, RVector, Result};

/// Points with `⟨ψ|ψ⟩` below this are treated as the origin.
pub const ZERO_TOL: f64 = 1e-300;
/// Allowed deviation of `⟨ψ|ψ⟩` from one on the sphere.
pub const SPHERE_TOL: f64 = 1e-10;

/// A point of the punctured Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct HilbertPoint {
    psi: CVector,
    z: RVector,
    r2: f64,
}

impl HilbertPoint {
    pub fn new(psi: CVector) -> Result<Self> {
        let z = to_chart(&psi);
        let r2 = z.norm_squared();
        if !(r2 > ZERO_TOL) {
            return Err(Error::ZeroVector);
        }
        Ok(Self { psi, z, r2 })
    }

    /// Point from chart coordinates `(x, y)`.
    pub fn from_chart(z: &RVector) -> Result<Self> {
        if z.len() % 2 != 0 || z.is_empty() {
            return Err(Error::InvalidDimension { dim: z.len(), reason: "chart vectors have even length" });
        }
        Self::new(from_chart(z))
    }

    pub fn n(&self) -> usize {
        self.psi.len()
    }

    pub fn psi(&self) -> &CVector {
        &self.psi
    }

    pub fn chart(&self) -> &RVector {
        &self.z
    }

    /// `⟨ψ|ψ⟩`.
    pub fn r2(&self) -> f64 {
        self.r2
    }
}

/// A point of the unit sphere `S^{2n−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint(HilbertPoint);

impl SpherePoint {
    pub fn new(psi: CVector) -> Result<Self> {
        let p = HilbertPoint::new(psi)?;
        if (p.r2 - 1.0).abs() > SPHERE_TOL {
            return Err(Error::OffSphere { norm_sq: p.r2 });
        }
        Ok(Self(p))
    }

    /// Radial projection of a nonzero vector.
    pub fn normalized(psi: CVector) -> Result<Self> {
        let p = HilbertPoint::new(psi)?;
        let norm = p.r2.sqrt();
        Self::new(p.psi.map(|c| c / norm))
    }

    pub fn point(&self) -> &HilbertPoint {
        &self.0
    }

    pub fn psi(&self) -> &CVector {
        &self.0.psi
    }

    pub fn chart(&self) -> &RVector {
        &self.0.z
    }
}

impl std::ops::Deref for SpherePoint {
    type Target = HilbertPoint;
    fn deref(&self) -> &HilbertPoint {
        &self.0
    }
}

/// The pair of Hermitian generators `(a, b)` of `a − i b ∈ 𝔤𝔩(ℋ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorPair {
    pub a: CMatrix,
    pub b: CMatrix,
}

impl GeneratorPair {
    pub fn new(a: CMatrix, b: CMatrix) -> Result<Self> {
        if a.shape() != b.shape() || a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch { expected: a.nrows(), found: b.nrows() });
        }
        algebra::ensure_hermitian(&a)?;
        algebra::ensure_hermitian(&b)?;
        Ok(Self { a, b })
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }
}

pub fn to_chart(psi: &CVector) -> RVector {
    let n = psi.len();
    RVector::from_fn(2 * n, |i, _| if i < n { psi[i].re } else { psi[i - n].im })
}

pub fn from_chart(z: &RVector) -> CVector {
    let n = z.len() / 2;
    CVector::from_fn(n, |i, _| Complex64::new(z[i], z[n + i]))
}

/// Real `2n×2n` matrix of `ψ ↦ a ψ`.
pub fn real_rep(a: &CMatrix) -> RMatrix {
    let n = a.nrows();
    RMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let c = a[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => c.re,
            (true, false) => -c.im,
            (false, true) => c.im,
        }
    })
}

/// `[[0, I], [−I, 0]]`.
fn w_matrix(n: usize) -> RMatrix {
    let mut w = RMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        w[(i, n + i)] = 1.0;
        w[(n + i, i)] = -1.0;
    }
    w
}

/// Constant Kähler tensors on `ℋ` in the `(x, y)` chart.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientTensors {
    /// `ω_ℋ` with `ω(∂x_j, ∂y_k) = δ_jk`.
    pub omega: RMatrix,
    /// `g_ℋ`, the identity.
    pub g: RMatrix,
    /// Complex structure, `J ∂x_j = −∂y_j`, `J ∂y_j = ∂x_j`.
    pub j: RMatrix,
    /// Poisson tensor `Λ_ℋ = ω⁻¹`.
    pub lambda: RMatrix,
    /// `G_ℋ = g⁻¹`.
    pub g_inv: RMatrix,
}

impl AmbientTensors {
    pub fn new(n: usize) -> Self {
        let w = w_matrix(n);
        Self {
            omega: w.clone(),
            g: RMatrix::identity(2 * n, 2 * n),
            j: w.clone(),
            lambda: -w,
            g_inv: RMatrix::identity(2 * n, 2 * n),
        }
    }

    /// `max|Jᵀ ω − g|`, i.e. `g(u, v) = ω(Ju, v)`.
    pub fn compatibility_residual(&self) -> f64 {
        (self.j.transpose() * &self.omega - &self.g).amax()
    }
}

pub fn ambient_tensors(p: &HilbertPoint) -> AmbientTensors {
    AmbientTensors::new(p.n())
}

/// Phase field `Γ = x ∂y − y ∂x`, the generator of `ψ ↦ e^{iθ}ψ`.
pub fn phase_field(p: &HilbertPoint) -> RVector {
    let n = p.n();
    let z = p.chart();
    RVector::from_fn(2 * n, |i, _| if i < n { -z[n + i] } else { z[i - n] })
}

/// Dilation field `Δ = x ∂x + y ∂y`.
pub fn dilation_field(p: &HilbertPoint) -> RVector {
    p.chart().clone()
}

/// `(Λ⁰, G⁰)`: `r² Λ_ℋ − Γ∧Δ` and `r² G_ℋ − Γ⊗Γ − Δ⊗Δ`.
pub fn projected_tensors(p: &HilbertPoint) -> (RMatrix, RMatrix) {
    let amb = ambient_tensors(p);
    let gamma = phase_field(p);
    let delta = dilation_field(p);
    let lambda0 = &amb.lambda * p.r2() - (&gamma * delta.transpose() - &delta * gamma.transpose());
    let g0 = &amb.g_inv * p.r2() - &gamma * gamma.transpose() - &delta * delta.transpose();
    (lambda0, g0)
}

/// `f_a = ⟨ψ|a|ψ⟩`.
pub fn f(a: &CMatrix, p: &HilbertPoint) -> f64 {
    p.psi().dotc(&(a * p.psi())).re
}

/// `e_a = f_a / r²`.
pub fn expectation(a: &CMatrix, p: &HilbertPoint) -> f64 {
    f(a, p) / p.r2()
}

/// `df_a = 2 M_a z`.
pub fn df(a: &CMatrix, p: &HilbertPoint) -> RVector {
    real_rep(a) * p.chart() * 2.0
}

/// `de_a = df_a / r² − 2 f_a z / r⁴`.
pub fn de(a: &CMatrix, p: &HilbertPoint) -> RVector {
    let r2 = p.r2();
    df(a, p) / r2 - p.chart() * (2.0 * f(a, p) / (r2 * r2))
}

/// `𝕏_a = ½ Λ_ℋ df_a`, the real form of `ψ̇ = i a ψ`.
pub fn hamiltonian_field(a: &CMatrix, p: &HilbertPoint) -> RVector {
    ambient_tensors(p).lambda * df(a, p) * 0.5
}

/// `𝕐⁰_b = ½ G_ℋ df_b − e_b Δ`, the real form of `ψ̇ = (b − e_b) ψ`.
pub fn gradient_field(b: &CMatrix, p: &HilbertPoint) -> RVector {
    ambient_tensors(p).g_inv * df(b, p) * 0.5 - dilation_field(p) * expectation(b, p)
}

/// `ℤ = 𝕏_a + 𝕐⁰_b`.
pub fn contact_field(pair: &GeneratorPair, p: &HilbertPoint) -> RVector {
    hamiltonian_field(&pair.a, p) + gradient_field(&pair.b, p)
}

/// `η₀ = (x dy − y dx)/r²` and the Reeb field `Γ`.
pub fn contact_form(p: &HilbertPoint) -> (RVector, RVector) {
    let gamma = phase_field(p);
    (&gamma / p.r2(), gamma)
}

/// Matrix of `ω₀ = −dη₀`, the pullback of the Fubini–Study form.
pub fn pullback_omega0(p: &HilbertPoint) -> RMatrix {
    let n = p.n();
    let r2 = p.r2();
    let z = p.chart();
    let eta = phase_field(p);
    // multiplication by i in the chart
    let i_mat = -w_matrix(n);
    i_mat * (2.0 / r2) + (z * eta.transpose() - &eta * z.transpose()) * (2.0 / (r2 * r2))
}

/// `F̃_a = f_a / r²`.
pub fn contact_hamiltonian(a: &CMatrix, p: &HilbertPoint) -> f64 {
    expectation(a, p)
}

/// `α̃_b = Jᵀ de_b`.
pub fn alpha(b: &CMatrix, p: &HilbertPoint) -> RVector {
    ambient_tensors(p).j.transpose() * de(b, p)
}

/// Residuals of the three defining equations of `ℤ` on the sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactResiduals {
    /// `|dr(ℤ)|`.
    pub radial: f64,
    /// `|η₀(ℤ) − F̃_a|`.
    pub eta: f64,
    /// `max|i_ℤ ω₀ − (dF̃_a − α̃_b)|`.
    pub omega: f64,
}

impl ContactResiduals {
    pub fn max(&self) -> f64 {
        self.radial.max(self.eta).max(self.omega)
    }
}

pub fn contact_residuals(pair: &GeneratorPair, p: &SpherePoint) -> Result<ContactResiduals> {
    if pair.n() != p.n() {
        return Err(Error::DimensionMismatch { expected: p.n(), found: pair.n() });
    }
    let z = p.chart();
    let zf = contact_field(pair, p);
    let (eta0, _) = contact_form(p);
    let dr = z / p.r2().sqrt();
    let contraction = pullback_omega0(p).transpose() * &zf;
    let target = de(&pair.a, p) - alpha(&pair.b, p);
    Ok(ContactResiduals {
        radial: dr.dot(&zf).abs(),
        eta: (eta0.dot(&zf) - contact_hamiltonian(&pair.a, p)).abs(),
        omega: (contraction - target).amax(),
    })
}

/// Residuals of the Reeb identities `(|η₀(Γ) − 1|, max|i_Γ ω₀|)`.
pub fn reeb_residuals(p: &HilbertPoint) -> (f64, f64) {
    let (eta0, gamma) = contact_form(p);
    ((eta0.dot(&gamma) - 1.0).abs(), (pullback_omega0(p).transpose() * gamma).amax())
}

/// Residuals of the bracket identities
/// `½ Λ⁰(de_a, de_b) = e_{i[a,b]}` and
/// `¼ G⁰(de_a, de_b) = e_{½{a,b}} − e_a e_b`.
pub fn bracket_residuals(a: &CMatrix, b: &CMatrix, p: &HilbertPoint) -> (f64, f64) {
    let (l0, g0) = projected_tensors(p);
    let (da, db) = (de(a, p), de(b, p));
    let i = Complex64::new(0.0, 1.0);
    let comm = linalg::commutator(a, b) * i;
    let anti = linalg::anticommutator(a, b) * Complex64::new(0.5, 0.0);
    let poisson = 0.5 * da.dot(&(&l0 * &db)) - expectation(&comm, p);
    let symmetric = 0.25 * da.dot(&(&g0 * &db)) - (expectation(&anti, p) - expectation(a, p) * expectation(b, p));
    (poisson.abs(), symmetric.abs())
}

/// `max|[Γ, 𝕐⁰_b]|` by central differences with step `1e-5`.
pub fn projectability_residual(b: &CMatrix, p: &HilbertPoint) -> Result<f64> {
    let h = 1e-5;
    let z = p.chart();
    let gamma = phase_field(p);
    let y = gradient_field(b, p);
    let field_at = |q: RVector| -> Result<RVector> { Ok(gradient_field(b, &HilbertPoint::from_chart(&q)?)) };
    let dy_gamma = (field_at(z + &gamma * h)? - field_at(z - &gamma * h)?) / (2.0 * h);
    // Γ is linear: DΓ · Y = i Y
    let dgamma_y = -w_matrix(p.n()) * y;
    Ok((dy_gamma - dgamma_y).amax())
}

/// Numerical rank of `ω₀ + η₀∧dr`, which is `2n` where `η₀ ∧ ω₀^{n−1}`
/// is a volume on the sphere.
pub fn contact_volume_rank(p: &HilbertPoint) -> usize {
    let (eta0, _) = contact_form(p);
    let dr = p.chart() / p.r2().sqrt();
    let m = pullback_omega0(p) + (&eta0 * dr.transpose() - &dr * eta0.transpose());
    linalg::real_rank(&m, 1e-10)
}

/// Coherence vector of `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`.
pub fn project_to_bloch(basis: &SuBasis, p: &HilbertPoint) -> Result<RVector> {
    if basis.dim() != p.n() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), found: p.n() });
    }
    let rho = p.psi() * p.psi().adjoint() / Complex64::new(p.r2(), 0.0);
    basis.to_coherence_vector(&rho)
}

/// Trajectory on the sphere.
#[derive(Debug, Clone, Default)]
pub struct SphereTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<CVector>,
}

/// RK4 integration of `ℤ`. With `renormalize` off the norm is only kept by
/// tangency of the field.
pub fn integrate_sphere_flow(
    pair: &GeneratorPair,
    psi0: &SpherePoint,
    t_end: f64,
    dt: f64,
    renormalize: bool,
) -> Result<SphereTrajectory> {
    let mut traj = SphereTrajectory::default();
    integrate_sphere_flow_observed(pair, psi0, t_end, dt, renormalize, |t, psi| {
        traj.times.push(t);
        traj.states.push(psi.clone());
        Ok(())
    })?;
    Ok(traj)
}

/// Streaming form of [`integrate_sphere_flow`].
pub fn integrate_sphere_flow_observed<O>(
    pair: &GeneratorPair,
    psi0: &SpherePoint,
    t_end: f64,
    dt: f64,
    renormalize: bool,
    mut observe: O,
) -> Result<()>
where
    O: FnMut(f64, &CVector) -> Result<()>,
{
    if pair.n() != psi0.n() {
        return Err(Error::DimensionMismatch { expected: psi0.n(), found: pair.n() });
    }
    let ma = real_rep(&pair.a);
    let mb = real_rep(&pair.b);
    let i_mat = -w_matrix(pair.n());
    let mut field = |z: &RVector| -> Result<RVector> {
        let r2 = z.norm_squared();
        if !(r2 > ZERO_TOL) {
            return Err(Error::ZeroVector);
        }
        let bz = &mb * z;
        let eb = z.dot(&bz) / r2;
        Ok(&i_mat * (&ma * z) + bz - z * eb)
    };
    let grid = ode::time_grid(t_end, dt)?;
    let mut z = psi0.chart().clone();
    observe(grid[0], &from_chart(&z))?;
    for w in grid.windows(2) {
        let mut next = ode::rk4_step(&mut field, &z, w[1] - w[0])?;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { last_valid_time: w[0] });
        }
        if renormalize {
            next /= next.norm();
        }
        z = next;
        observe(w[1], &from_chart(&z))?;
    }
    Ok(())
}

/// Closed form `e^{t(ia + b)} ψ₀ / ‖e^{t(ia + b)} ψ₀‖`.
pub fn sphere_flow_exact(pair: &GeneratorPair, psi0: &CVector, t: f64) -> CVector {
    let m = (&pair.a * Complex64::new(0.0, 1.0) + &pair.b) * Complex64::new(t, 0.0);
    let v = m.exp() * psi0;
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

/// GKLS model whose `X_H − Y_V` flow is the projection of `ℤ`:
/// `H = −a`, `V = 2(λ_max(b) I − b)`, realized by the single jump `√V`.
pub fn matched_gkls(pair: &GeneratorPair) -> Result<GklsModel> {
    let n = pair.n();
    let top = *linalg::hermitian_eigenvalues(&pair.b).last().expect("n >= 1");
    let v = (CMatrix::identity(n, n) * Complex64::new(top, 0.0) - &pair.b) * Complex64::new(2.0, 0.0);
    GklsModel::new(-pair.a.clone(), vec![linalg::psd_sqrt(&v)])
}

/// A local contact chart of `S^{2n−1}` around a base point `p`:
/// `φ(u) = (p + E u)/|p + E u|` with `E` an orthonormal frame of `T_p S`.
#[derive(Debug, Clone)]
pub struct SphereChart {
    pub chart: ContactChart,
    /// The frame `E` (`2n × (2n−1)`), also `Dφ(0)`.
    pub frame: RMatrix,
    base: RVector,
}

impl SphereChart {
    pub fn new(p: &SpherePoint) -> Result<Self> {
        let z = p.chart().clone();
        let d = z.len();
        // eigenvectors of the tangential projector I − z zᵀ with eigenvalue 1
        let proj = RMatrix::identity(d, d) - &z * z.transpose();
        let eig = nalgebra::SymmetricEigen::new(proj);
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let frame = RMatrix::from_columns(&order[..d - 1].iter().map(|&i| eig.eigenvectors.column(i)).collect::<Vec<_>>());
        let (f1, f2, base1, base2) = (frame.clone(), frame.clone(), z.clone(), z.clone());
        let eta = move |u: &RVector| {
            let (point, jac) = embed(&base1, &f1, u);
            jac.transpose() * contact_form(&point).0
        };
        let omega = move |u: &RVector| {
            let (point, jac) = embed(&base2, &f2, u);
            -(jac.transpose() * pullback_omega0(&point) * jac)
        };
        let chart = ContactChart::new(d - 1, eta, omega)?;
        Ok(Self { chart, frame, base: z })
    }

    /// Point and Jacobian `Dφ(u)`.
    pub fn embed(&self, u: &RVector) -> (HilbertPoint, RMatrix) {
        embed(&self.base, &self.frame, u)
    }

    /// `F̃_a ∘ φ` with gradient `Dφᵀ dF̃_a`.
    pub fn hamiltonian(&self, a: &CMatrix) -> ScalarField {
        let (a1, a2) = (a.clone(), a.clone());
        let (s1, s2) = (self.clone(), self.clone());
        ScalarField::with_gradient(
            move |u| contact_hamiltonian(&a1, &s1.embed(u).0),
            move |u| {
                let (p, jac) = s2.embed(u);
                jac.transpose() * de(&a2, &p)
            },
        )
    }

    /// `φ*α̃_b` at `u`.
    pub fn alpha(&self, b: &CMatrix, u: &RVector) -> RVector {
        let (p, jac) = self.embed(u);
        jac.transpose() * alpha(b, &p)
    }
}

fn embed(base: &RVector, frame: &RMatrix, u: &RVector) -> (HilbertPoint, RMatrix) {
    let w = base + frame * u;
    let norm = w.norm();
    let phi = &w / norm;
    let proj = RMatrix::identity(w.len(), w.len()) - &phi * phi.transpose();
    let jac = proj * frame / norm;
    (HilbertPoint::from_chart(&phi).expect("chart point is nonzero"), jac)
}

/// Bloch-sphere direction `(x, y, z)` of a qubit state, unnormalized
/// coherence vector times `√2`.
pub fn bloch_direction(p: &HilbertPoint) -> Result<RVector> {
    let basis = SuBasis::new(2)?;
    Ok(project_to_bloch(&basis, p)? * 2f64.sqrt())
}

/// Dense real matrix helper for tests and callers that build `a`, `b`
/// from real symmetric data.
pub fn hermitian_from_real(m: &DMatrix<f64>) -> CMatrix {
    linalg::real_to_complex(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_pair(n: usize, rng: &mut ChaCha8Rng) -> GeneratorPair {
        GeneratorPair::new(sample::hermitian(n, rng), sample::hermitian(n, rng)).unwrap()
    }

    fn random_sphere(n: usize, rng: &mut ChaCha8Rng) -> SpherePoint {
        SpherePoint::new(sample::unit_vector(n, rng)).unwrap()
    }

    #[test]
    fn point_validation() {
        assert_eq!(HilbertPoint::new(CVector::zeros(2)), Err(Error::ZeroVector));
        let v = CVector::from_vec(vec![c(2.0), c(0.0)]);
        assert!(matches!(SpherePoint::new(v.clone()), Err(Error::OffSphere { .. })));
        assert!(SpherePoint::normalized(v).is_ok());
    }

    #[test]
    fn kahler_tensors() {
        let amb = AmbientTensors::new(3);
        let id = RMatrix::identity(6, 6);
        assert_eq!(&amb.j * &amb.j, -&id);
        assert_eq!(amb.omega.transpose(), -&amb.omega);
        assert_eq!(amb.compatibility_residual(), 0.0);
        assert_eq!(&amb.lambda * &amb.omega, id);
        let one = AmbientTensors::new(1);
        assert_eq!(one.omega[(0, 1)], 1.0);
        // J ∂x = −∂y
        assert_eq!(one.j.column(0).into_owned(), RVector::from_vec(vec![0.0, -1.0]));
    }

    #[test]
    fn projected_tensors_on_a_line_vanish() {
        let p = HilbertPoint::new(CVector::from_vec(vec![c(1.0)])).unwrap();
        assert_eq!(phase_field(&p), RVector::from_vec(vec![0.0, 1.0]));
        assert_eq!(dilation_field(&p), RVector::from_vec(vec![1.0, 0.0]));
        let (l0, g0) = projected_tensors(&p);
        assert!(l0.amax() < 1e-15 && g0.amax() < 1e-15);
        assert!(pullback_omega0(&p).amax() < 1e-15);
        let (eta0, _) = contact_form(&p);
        assert_eq!(eta0, RVector::from_vec(vec![0.0, 1.0]));
    }

    #[test]
    fn hamiltonian_field_is_schroedinger() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = sample::hermitian(3, &mut rng);
        let psi = sample::unit_vector(3, &mut rng);
        let p = HilbertPoint::new(psi.clone()).unwrap();
        let want = to_chart(&(&a * &psi * Complex64::new(0.0, 1.0)));
        assert!((hamiltonian_field(&a, &p) - want).amax() < 1e-14);
    }

    #[test]
    fn identity_gradient_field_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = HilbertPoint::new(sample::unit_vector(3, &mut rng) * c(1.7)).unwrap();
        let id = CMatrix::identity(3, 3);
        // ½ G df_I = Δ and e_I = 1
        assert!((df(&id, &p) * 0.5 - dilation_field(&p)).amax() < 1e-14);
        assert!(gradient_field(&id, &p).amax() < 1e-14);
    }

    #[test]
    fn qubit_critical_points() {
        let [_, _, s3] = algebra::pauli();
        let up = SpherePoint::new(CVector::from_vec(vec![c(1.0), c(0.0)])).unwrap();
        assert!(gradient_field(&s3, &up).amax() < 1e-15);
        // a = σ₃ on the equator moves along a parallel: the σ₃ component of
        // the Bloch vector is constant
        let eq = SpherePoint::new(CVector::from_vec(vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)])).unwrap();
        let v = hamiltonian_field(&s3, &eq);
        assert!(de(&s3, &eq).dot(&v).abs() < 1e-15);
        assert!(v.amax() > 0.1);
    }

    #[test]
    fn bloch_projection_examples() {
        let basis = SuBasis::new(2).unwrap();
        let up = HilbertPoint::new(CVector::from_vec(vec![c(1.0), c(0.0)])).unwrap();
        let x = project_to_bloch(&basis, &up).unwrap();
        assert!((x - RVector::from_vec(vec![0.0, 0.0, FRAC_1_SQRT_2])).amax() < 1e-15);
        let plus = HilbertPoint::new(CVector::from_vec(vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)])).unwrap();
        let x = project_to_bloch(&basis, &plus).unwrap();
        assert!((x - RVector::from_vec(vec![FRAC_1_SQRT_2, 0.0, 0.0])).amax() < 1e-15);
    }

    #[test]
    fn omega0_is_minus_d_eta0() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = HilbertPoint::new(sample::unit_vector(2, &mut rng) * c(1.3)).unwrap();
        let eta = |z: &RVector| contact_form(&HilbertPoint::from_chart(z).unwrap()).0;
        let d = p.chart().len();
        let mut jac = RMatrix::zeros(d, d);
        for i in 0..d {
            let mut e = RVector::zeros(d);
            e[i] = 1e-6;
            let row = (eta(&(p.chart() + &e)) - eta(&(p.chart() - &e))) / 2e-6;
            jac.set_row(i, &row.transpose());
        }
        let d_eta = &jac - jac.transpose();
        assert!((pullback_omega0(&p) + d_eta).amax() < 1e-8);
    }

    #[test]
    fn omega0_is_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let psi = sample::unit_vector(3, &mut rng);
        let p = HilbertPoint::new(psi.clone()).unwrap();
        let q = HilbertPoint::new(psi * c(2.5)).unwrap();
        // invariance of the form under ψ ↦ λψ: λ² ω₀(λψ) = ω₀(ψ)
        assert!((pullback_omega0(&p) - pullback_omega0(&q) * 6.25).amax() < 1e-12);
    }

    #[test]
    fn trivial_generator_pair_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let pair = GeneratorPair::new(CMatrix::zeros(3, 3), CMatrix::identity(3, 3)).unwrap();
        let p = random_sphere(3, &mut rng);
        assert!(contact_field(&pair, &p).amax() < 1e-14);
        assert!(contact_residuals(&pair, &p).unwrap().max() < 1e-14);
    }

    #[test]
    fn off_sphere_points_are_rejected_by_type() {
        let v = CVector::from_vec(vec![c(0.5), c(0.5)]);
        assert!(SpherePoint::new(v).is_err());
    }

    #[test]
    fn sphere_flow_matches_exponential() {
        let [_, _, s3] = algebra::pauli();
        let pair = GeneratorPair::new(s3.clone(), s3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let p0 = random_sphere(2, &mut rng);
        let traj = integrate_sphere_flow(&pair, &p0, 3.0, 1e-3, false).unwrap();
        for (t, psi) in traj.times.iter().zip(&traj.states) {
            assert!((psi - sphere_flow_exact(&pair, p0.psi(), *t)).camax() < 1e-7);
            assert!((psi.norm_squared() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn gradient_flow_reaches_top_eigenvector() {
        let [_, _, s3] = algebra::pauli();
        let pair = GeneratorPair::new(CMatrix::zeros(2, 2), s3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let p0 = random_sphere(2, &mut rng);
        let traj = integrate_sphere_flow(&pair, &p0, 20.0, 1e-3, false).unwrap();
        let end = HilbertPoint::new(traj.states.last().unwrap().clone()).unwrap();
        let x = project_to_bloch(&SuBasis::new(2).unwrap(), &end).unwrap();
        assert!((x - RVector::from_vec(vec![0.0, 0.0, FRAC_1_SQRT_2])).norm() < 1e-6);
    }

    #[test]
    fn sphere_chart_reproduces_contact_field() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let pair = random_pair(2, &mut rng);
        let p = random_sphere(2, &mut rng);
        let sc = SphereChart::new(&p).unwrap();
        let u0 = RVector::zeros(3);
        let xi = sc.chart.reeb_field(&u0).unwrap();
        assert!((&sc.frame * xi - phase_field(&p)).amax() < 1e-12);
        let v = sc
            .chart
            .generalized_contact_field(&sc.hamiltonian(&pair.a), &sc.alpha(&pair.b, &u0), &u0)
            .unwrap();
        assert!((&sc.frame * v - contact_field(&pair, &p)).amax() < 1e-9);
        // ω on the chart is dη
        assert!((sc.chart.numerical_d_eta(&u0) - sc.chart.omega(&u0)).amax() < 1e-8);
    }

    #[test]
    fn hamiltonian_gradient_projection_matches_gkls() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let pair = random_pair(3, &mut rng);
        let model = matched_gkls(&pair).unwrap();
        let p0 = random_sphere(3, &mut rng);
        let rho0 = p0.psi() * p0.psi().adjoint();
        let q = integrate_sphere_flow(&pair, &p0, 1.0, 1e-3, false).unwrap();
        let g = model.integrate_flow(crate::gkls::Flow::HamiltonianGradient, &rho0, 1.0, 1e-3).unwrap();
        let basis = model.basis();
        for (psi, x) in q.states.iter().zip(&g.points).step_by(50) {
            let y = project_to_bloch(basis, &HilbertPoint::new(psi.clone()).unwrap()).unwrap();
            assert!((y - x).amax() < 1e-8);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn contact_equations_hold(seed in any::<u64>(), n in 2usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pair = random_pair(n, &mut rng);
            let p = random_sphere(n, &mut rng);
            let res = contact_residuals(&pair, &p).unwrap();
            prop_assert!(res.max() < 1e-9, "{res:?}");
            let (r1, r2) = reeb_residuals(&p);
            prop_assert!(r1 < 1e-12 && r2 < 1e-12);
        }

        #[test]
        fn tangency_and_degeneracy(seed in any::<u64>(), n in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pair = random_pair(n, &mut rng);
            let p = random_sphere(n, &mut rng);
            let z = p.chart();
            for v in [hamiltonian_field(&pair.a, &p), gradient_field(&pair.b, &p), phase_field(&p)] {
                prop_assert!(z.dot(&v).abs() < 1e-12);
            }
            let w = pullback_omega0(&p);
            prop_assert!((w.transpose() * dilation_field(&p)).amax() < 1e-12);
            prop_assert!((w.transpose() * phase_field(&p)).amax() < 1e-12);
            prop_assert!(contact_form(&p).0.dot(&dilation_field(&p)).abs() < 1e-12);
            let (l0, g0) = projected_tensors(&p);
            prop_assert!((&l0 + l0.transpose()).amax() < 1e-14);
            prop_assert!((&g0 - g0.transpose()).amax() < 1e-14);
            prop_assert!((&g0 * dilation_field(&p)).amax() < 1e-12);
            prop_assert_eq!(contact_volume_rank(&p), 2 * n);
        }

        #[test]
        fn brackets_and_projectability(seed in any::<u64>(), n in 2usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pair = random_pair(n, &mut rng);
            let scale = 1.0 + rng.random_range(0.0..2.0);
            let p = HilbertPoint::new(sample::unit_vector(n, &mut rng) * c(scale)).unwrap();
            let (pb, sb) = bracket_residuals(&pair.a, &pair.b, &p);
            prop_assert!(pb < 1e-12 && sb < 1e-12, "{pb} {sb}");
            prop_assert!(projectability_residual(&pair.b, &p).unwrap() < 1e-9);
        }

        #[test]
        fn bloch_projection_is_phase_and_scale_invariant(seed in any::<u64>(), theta in 0.0..6.3f64, s in 0.1..5.0f64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let basis = SuBasis::new(3).unwrap();
            let psi = sample::unit_vector(3, &mut rng);
            let p = HilbertPoint::new(psi.clone()).unwrap();
            let q = HilbertPoint::new(psi * Complex64::from_polar(s, theta)).unwrap();
            let d = project_to_bloch(&basis, &p).unwrap() - project_to_bloch(&basis, &q).unwrap();
            prop_assert!(d.amax() < 1e-14);
        }
    }

    use rand::Rng;
}
