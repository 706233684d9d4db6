//! GKLS generators as affine vector fields on the coherence-vector chart.
//!
//! The generator is taken in the standard form
//!
//! ```text
//! L(ρ) = i[ρ, H] + Σ_j (v_j ρ v_j† − ½{v_j† v_j, ρ})
//! ```
//!
//! which is the unique normalization of the anticommutator term that keeps
//! `Tr L(ρ) = 0`. In coordinates `ẋ = A x + B`, and the field splits as
//! `X_H − Y_V + Z_K` (Hamiltonian, gradient and jump parts).

use std::sync::Arc;

use log::warn;

use crate::algebra::{self, SuBasis};
use crate::linalg::{self, anticommutator, commutator, trace_product};
use crate::{ode, CMatrix, Complex64, Error, RMatrix, RVector, Result};

/// Eigenvalues below this count as zero when reporting the numerical rank.
pub const RANK_THRESHOLD: f64 = 1e-9;
/// `B` entries below this are treated as zero (linear flow).
pub const LINEAR_TOL: f64 = 1e-12;

/// A GKLS model with its affine field `ẋ = A x + B`.
#[derive(Debug, Clone)]
pub struct GklsModel {
    basis: Arc<SuBasis>,
    h: CMatrix,
    jumps: Vec<CMatrix>,
    v: CMatrix,
    a: RMatrix,
    b: RVector,
}

/// The three-part splitting of the affine field.
#[derive(Debug, Clone)]
pub struct FieldDecomposition {
    /// ℋ: generator of the Hamiltonian part.
    pub h_mat: RMatrix,
    /// 𝒱: linear part of the gradient field.
    pub v_mat: RMatrix,
    /// 𝒦: linear part of the jump field.
    pub k_mat: RMatrix,
    /// ℬ = (calV − V)/n.
    pub b: RVector,
    /// Components `V^j = Tr(V τ_j)`.
    pub v_vec: RVector,
    /// Components `Tr(Σ v v† τ_j)`.
    pub cal_v: RVector,
    /// `Tr(V)/n`.
    pub v0: f64,
    /// Hilbert-space dimension.
    pub n: usize,
}

/// Component fields evaluated at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentFields {
    pub xh: RVector,
    pub yv: RVector,
    pub zk: RVector,
}

impl ComponentFields {
    /// `X_H − Y_V + Z_K`.
    pub fn total(&self) -> RVector {
        &self.xh - &self.yv + &self.zk
    }
}

impl FieldDecomposition {
    /// `e_V(x) = Tr(V)/n + V_j x^j`.
    pub fn expectation_v(&self, x: &RVector) -> f64 {
        self.v0 + self.v_vec.dot(x)
    }

    pub fn components(&self, x: &RVector) -> ComponentFields {
        let n = self.n as f64;
        let ev = self.expectation_v(x);
        ComponentFields {
            xh: &self.h_mat * x,
            yv: &self.v_mat * x + &self.v_vec / n - x * ev,
            zk: &self.k_mat * x + &self.cal_v / n - x * ev,
        }
    }
}

/// Which part of the field to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    /// `A x + B`.
    Full,
    /// `X_H − Y_V`: the jump field is dropped.
    HamiltonianGradient,
    /// `X_H` only.
    Hamiltonian,
}

/// Per-point diagnostics of a density-matrix trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub trace: f64,
    pub min_eigenvalue: f64,
    /// Ascending spectrum of the reconstructed matrix.
    pub spectrum: Vec<f64>,
    pub rank: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<RVector>,
    pub diagnostics: Vec<Diagnostics>,
}

/// Qualitative behaviour of a transported bracket as `τ → ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Asymptotic {
    Vanishing,
    Finite(f64),
    Divergent,
}

impl GklsModel {
    /// Builds a model on `n = h.nrows()` levels.
    pub fn new(h: CMatrix, jumps: Vec<CMatrix>) -> Result<Self> {
        let basis = Arc::new(SuBasis::new(h.nrows())?);
        Self::with_basis(basis, h, jumps)
    }

    /// Builds a model sharing an existing basis.
    pub fn with_basis(basis: Arc<SuBasis>, h: CMatrix, jumps: Vec<CMatrix>) -> Result<Self> {
        let n = basis.dim();
        if h.nrows() != n || h.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: h.nrows() });
        }
        algebra::ensure_hermitian(&h)?;
        let mut v = CMatrix::zeros(n, n);
        for j in &jumps {
            if j.nrows() != n || j.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: j.nrows() });
            }
            v += j.adjoint() * j;
        }
        if jumps.len() > n * n - 1 {
            warn!("{} jump operators exceed n^2 - 1 = {}", jumps.len(), n * n - 1);
        }
        let mut model = Self { basis, h, jumps, v, a: RMatrix::zeros(0, 0), b: RVector::zeros(0) };
        model.build_affine_field();
        Ok(model)
    }

    /// Qubit phase damping: `H = 0`, single jump `√γ σ₃`.
    pub fn phase_damping(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::InvalidParameter { name: "gamma", value: gamma, reason: "must be positive" });
        }
        let [_, _, s3] = algebra::pauli();
        Self::new(CMatrix::zeros(2, 2), vec![s3 * Complex64::new(gamma.sqrt(), 0.0)])
    }

    /// Qubit decay: `H = 0`, single jump `√γ |0⟩⟨1|`.
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::InvalidParameter { name: "gamma", value: gamma, reason: "must be positive" });
        }
        let mut lower = CMatrix::zeros(2, 2);
        lower[(0, 1)] = Complex64::new(gamma.sqrt(), 0.0);
        Self::new(CMatrix::zeros(2, 2), vec![lower])
    }

    pub fn basis(&self) -> &SuBasis {
        &self.basis
    }

    pub fn shared_basis(&self) -> Arc<SuBasis> {
        Arc::clone(&self.basis)
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn hamiltonian(&self) -> &CMatrix {
        &self.h
    }

    pub fn jumps(&self) -> &[CMatrix] {
        &self.jumps
    }

    /// `V = Σ v_j† v_j`.
    pub fn v(&self) -> &CMatrix {
        &self.v
    }

    pub fn a(&self) -> &RMatrix {
        &self.a
    }

    pub fn b(&self) -> &RVector {
        &self.b
    }

    fn generator_unchecked(&self, rho: &CMatrix) -> CMatrix {
        let i = Complex64::new(0.0, 1.0);
        let mut out = commutator(rho, &self.h) * i - anticommutator(&self.v, rho) * Complex64::new(0.5, 0.0);
        for v in &self.jumps {
            out += v * rho * v.adjoint();
        }
        out
    }

    /// `L(ρ)` for any square `ρ` of the right size.
    pub fn apply_generator(&self, rho: &CMatrix) -> Result<CMatrix> {
        let n = self.dim();
        if rho.nrows() != n || rho.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: rho.nrows() });
        }
        Ok(self.generator_unchecked(rho))
    }

    /// Recomputes `A^j_l = Tr(L(τ_l) τ_j)` and `B^j = Tr(L(I) τ_j)/n`.
    pub fn build_affine_field(&mut self) {
        let n = self.dim();
        let tau = self.basis.tau();
        let m = tau.len();
        let images: Vec<CMatrix> = tau.iter().map(|t| self.generator_unchecked(t)).collect();
        self.a = RMatrix::from_fn(m, m, |j, l| trace_product(&images[l], &tau[j]).re);
        let li = self.generator_unchecked(&CMatrix::identity(n, n));
        self.b = RVector::from_iterator(m, tau.iter().map(|t| trace_product(&li, t).re / n as f64));
    }

    /// `A x + B`.
    pub fn field(&self, x: &RVector) -> RVector {
        &self.a * x + &self.b
    }

    /// Splits the field into ℋ, 𝒱, 𝒦 and ℬ through the structure constants.
    pub fn decompose(&self) -> FieldDecomposition {
        let basis = &*self.basis;
        let n = self.dim();
        let m = basis.len();
        let tau = basis.tau();
        let (_, hk) = basis.components(&self.h).expect("dimension checked at construction");
        let (v0, v_vec) = basis.components(&self.v).expect("dimension checked at construction");
        let c = basis.c();
        let d = basis.d();
        let h_mat = RMatrix::from_fn(m, m, |j, l| (0..m).map(|k| c.get(j, l, k) * hk[k]).sum());
        let v_mat = RMatrix::from_fn(m, m, |j, l| {
            let s: f64 = (0..m).map(|k| d.get(j, k, l) * v_vec[k]).sum();
            0.5 * s + if j == l { v0 } else { 0.0 }
        });
        let k_mat = RMatrix::from_fn(m, m, |j, l| {
            self.jumps.iter().map(|v| trace_product(&(v * &tau[l] * v.adjoint()), &tau[j]).re).sum()
        });
        let mut vv = CMatrix::zeros(n, n);
        for v in &self.jumps {
            vv += v * v.adjoint();
        }
        let cal_v = RVector::from_iterator(m, tau.iter().map(|t| trace_product(&vv, t).re));
        let b = (&cal_v - &v_vec) / n as f64;
        FieldDecomposition { h_mat, v_mat, k_mat, b, v_vec, cal_v, v0, n }
    }

    fn diagnostics(&self, x: &RVector) -> Result<Diagnostics> {
        let rho = self.basis.from_coherence_vector(x)?;
        let spectrum = linalg::hermitian_eigenvalues(&rho);
        Ok(Diagnostics {
            trace: linalg::trace(&rho).re,
            min_eigenvalue: spectrum[0],
            rank: linalg::spectral_rank(&spectrum, RANK_THRESHOLD),
            spectrum,
        })
    }

    /// Integrates the full affine field from a density matrix.
    pub fn integrate(&self, rho0: &CMatrix, t_end: f64, dt: f64) -> Result<Trajectory> {
        self.integrate_flow(Flow::Full, rho0, t_end, dt)
    }

    /// Integrates one of the partial flows with RK4.
    pub fn integrate_flow(&self, flow: Flow, rho0: &CMatrix, t_end: f64, dt: f64) -> Result<Trajectory> {
        let mut traj = Trajectory::default();
        self.integrate_flow_observed(flow, rho0, t_end, dt, |t, x, d| {
            traj.times.push(t);
            traj.points.push(x.clone());
            traj.diagnostics.push(d.clone());
            Ok(())
        })?;
        Ok(traj)
    }

    /// Like [`integrate_flow`](Self::integrate_flow) but hands every accepted
    /// point to `observe` instead of collecting them.
    pub fn integrate_flow_observed<O>(&self, flow: Flow, rho0: &CMatrix, t_end: f64, dt: f64, mut observe: O) -> Result<()>
    where
        O: FnMut(f64, &RVector, &Diagnostics) -> Result<()>,
    {
        algebra::ensure_density(rho0)?;
        let x0 = self.basis.to_coherence_vector(rho0)?;
        let dec = (flow != Flow::Full).then(|| self.decompose());
        let field = |x: &RVector| -> Result<RVector> {
            Ok(match (&dec, flow) {
                (None, _) => self.field(x),
                (Some(d), Flow::HamiltonianGradient) => {
                    let c = d.components(x);
                    c.xh - c.yv
                }
                (Some(d), _) => &d.h_mat * x,
            })
        };
        ode::integrate(field, x0, t_end, dt, |t, x| observe(t, x, &self.diagnostics(x)?))
    }

    fn require_linear(&self) -> Result<()> {
        if linalg::max_abs(self.b.iter().copied()) > LINEAR_TOL {
            return Err(Error::UnsupportedModel(
                "closed-form bracket transport needs a linear field (B = 0)".into(),
            ));
        }
        Ok(())
    }

    /// `Λ^{jk}(y) = c^{jk}_l y^l`, the Lie–Poisson bivector.
    pub fn lie_poisson(&self, y: &RVector) -> RMatrix {
        let m = self.basis.len();
        let c = self.basis.c();
        RMatrix::from_fn(m, m, |j, k| (0..m).map(|l| c.get(l, j, k) * y[l]).sum())
    }

    /// `(Φ_τ* Λ)(dx^j, dx^k)` at `x` for the linear flow `Φ_τ = e^{Aτ}`:
    /// `[e^{−Aτ}]^j_p [e^{−Aτ}]^k_q c^{pq}_l [e^{Aτ} x]^l`.
    pub fn pulled_back_bracket(&self, j: usize, k: usize, tau: f64, x: &RVector) -> Result<f64> {
        self.require_linear()?;
        let fwd = (&self.a * tau).exp();
        let back = (&self.a * -tau).exp();
        let lam = self.lie_poisson(&(&fwd * x));
        Ok((&back * lam * back.transpose())[(j, k)])
    }

    /// `(Φ_τ_* Λ)(dx^j, dx^k)` at `x`:
    /// `[e^{Aτ}]^j_p [e^{Aτ}]^k_q c^{pq}_l [e^{−Aτ} x]^l`.
    pub fn pushed_forward_bracket(&self, j: usize, k: usize, tau: f64, x: &RVector) -> Result<f64> {
        self.require_linear()?;
        let fwd = (&self.a * tau).exp();
        let back = (&self.a * -tau).exp();
        let lam = self.lie_poisson(&(&back * x));
        Ok((&fwd * lam * fwd.transpose())[(j, k)])
    }

    /// Probes a transported bracket at two large times. `pushforward`
    /// selects [`Self::pushed_forward_bracket`] over the pullback.
    pub fn bracket_asymptotics(&self, j: usize, k: usize, x: &RVector, pushforward: bool) -> Result<Asymptotic> {
        self.require_linear()?;
        let rate = linalg::max_abs(self.a.complex_eigenvalues().iter().map(|z| z.re));
        let eval = |tau: f64| {
            if pushforward {
                self.pushed_forward_bracket(j, k, tau, x)
            } else {
                self.pulled_back_bracket(j, k, tau, x)
            }
        };
        if rate < 1e-12 {
            return Ok(Asymptotic::Finite(eval(0.0)?));
        }
        let scale = 1.0 + eval(0.0)?.abs();
        let v1 = eval(10.0 / rate)?;
        let v2 = eval(20.0 / rate)?;
        Ok(if v2.abs() < 1e-8 * scale {
            Asymptotic::Vanishing
        } else if v2.abs() > 1e3 * (v1.abs() + 1e-300) || !v2.is_finite() {
            Asymptotic::Divergent
        } else {
            Asymptotic::Finite(v2)
        })
    }
}

/// Phase-damping flow in closed form: the first two coherence components
/// decay as `e^{−2γτ}`, the third is fixed.
pub fn phase_damping_exact(gamma: f64, x0: &RVector, tau: f64) -> RVector {
    let f = (-2.0 * gamma * tau).exp();
    RVector::from_vec(vec![x0[0] * f, x0[1] * f, x0[2]])
}

/// Closed-form affine flow `e^{Aτ}x₀ + (∫₀^τ e^{As} ds) B`, evaluated via
/// the exponential of the augmented matrix `[[A, B], [0, 0]]`.
pub fn affine_flow_exact(a: &RMatrix, b: &RVector, x0: &RVector, tau: f64) -> RVector {
    let m = a.nrows();
    let mut aug = RMatrix::zeros(m + 1, m + 1);
    aug.view_mut((0, 0), (m, m)).copy_from(a);
    aug.view_mut((0, m), (m, 1)).copy_from(b);
    let e = (aug * tau).exp();
    let mut y = x0.clone().push(1.0);
    y = e * y;
    y.rows(0, m).into_owned()
}
