//! Contact structures on coordinate charts.
//!
//! A chart of dimension `2m+1` carries a one-form `η` and a two-form `ω`
//! (as an antisymmetric matrix, `ω_ij = ω(∂_i, ∂_j)`), with `η ∧ ωᵐ ≠ 0`.
//! Contractions follow `(i_X ω)_j = X^i ω_ij`.
//!
//! Contact Hamiltonian fields are computed with the convention
//! `i_Γ η = F`, `i_Γ ω = (ξF) η − dF`. Systems written with `i_Γ η = −E`
//! are handled by passing `−E` as `F`.
//!
//! Every field is obtained from one bordered linear solve
//!
//! ```text
//! [ −ω  η ] [X]   [rhs]
//! [ ηᵀ  0 ] [λ] = [ F ]
//! ```
//!
//! where `λ` is a slack that vanishes for consistent right-hand sides.

use std::sync::Arc;

use rand::Rng;

use crate::{Error, RMatrix, RVector, Result};

/// Smallest accepted `|det|` of the bordered matrix.
pub const NONDEGENERACY_TOL: f64 = 1e-12;
/// Step for central-difference gradients of scalar fields.
pub const GRADIENT_STEP: f64 = 1e-5;
/// Base step of the Richardson-extrapolated Lie-bracket differences.
pub const LIE_STEP: f64 = 1e-4;

type CovectorFn = Arc<dyn Fn(&RVector) -> RVector + Send + Sync>;
type FormFn = Arc<dyn Fn(&RVector) -> RMatrix + Send + Sync>;
type ValueFn = Arc<dyn Fn(&RVector) -> f64 + Send + Sync>;

/// Central difference `(f(h) − f(−h))/2h` improved by one Richardson step.
pub fn richardson<F>(f: F, h: f64) -> RVector
where
    F: Fn(f64) -> RVector,
{
    let d = |s: f64| (f(s) - f(-s)) / (2.0 * s);
    (d(h / 2.0) * 4.0 - d(h)) / 3.0
}

/// Fallible variant of [`richardson`].
pub fn try_richardson<F>(f: F, h: f64) -> Result<RVector>
where
    F: Fn(f64) -> Result<RVector>,
{
    let d = |s: f64| -> Result<RVector> { Ok((f(s)? - f(-s)?) / (2.0 * s)) };
    Ok((d(h / 2.0)? * 4.0 - d(h)?) / 3.0)
}

/// A real function on a chart, with an optional analytic gradient.
#[derive(Clone)]
pub struct ScalarField {
    value: ValueFn,
    gradient: Option<CovectorFn>,
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField").field("analytic_gradient", &self.gradient.is_some()).finish()
    }
}

impl ScalarField {
    /// Field whose gradient falls back to central differences.
    pub fn new(value: impl Fn(&RVector) -> f64 + Send + Sync + 'static) -> Self {
        Self { value: Arc::new(value), gradient: None }
    }

    pub fn with_gradient(
        value: impl Fn(&RVector) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&RVector) -> RVector + Send + Sync + 'static,
    ) -> Self {
        Self { value: Arc::new(value), gradient: Some(Arc::new(gradient)) }
    }

    pub fn constant(c: f64) -> Self {
        Self::with_gradient(move |_| c, |x| RVector::zeros(x.len()))
    }

    /// The coordinate function `x ↦ x_i`.
    pub fn coordinate(i: usize) -> Self {
        Self::with_gradient(move |x| x[i], move |x| {
            let mut g = RVector::zeros(x.len());
            g[i] = 1.0;
            g
        })
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    pub fn value(&self, x: &RVector) -> f64 {
        (self.value)(x)
    }

    pub fn gradient(&self, x: &RVector) -> RVector {
        match &self.gradient {
            Some(g) => g(x),
            None => self.numerical_gradient(x),
        }
    }

    /// Central-difference gradient with step [`GRADIENT_STEP`].
    pub fn numerical_gradient(&self, x: &RVector) -> RVector {
        let h = GRADIENT_STEP;
        RVector::from_fn(x.len(), |i, _| {
            let mut up = x.clone();
            let mut down = x.clone();
            up[i] += h;
            down[i] -= h;
            (self.value(&up) - self.value(&down)) / (2.0 * h)
        })
    }

    /// Max deviation between the analytic and numerical gradient
    /// (zero when there is no analytic gradient).
    pub fn gradient_residual(&self, x: &RVector) -> f64 {
        match &self.gradient {
            Some(g) => (g(x) - self.numerical_gradient(x)).amax(),
            None => 0.0,
        }
    }
}

/// Sparse multivariate polynomial, used for test functions on charts.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub terms: Vec<(f64, Vec<u32>)>,
}

impl Polynomial {
    /// Random polynomial with `terms` monomials of total degree at most
    /// `degree` in `vars` variables.
    pub fn random<R: Rng + ?Sized>(vars: usize, degree: u32, terms: usize, rng: &mut R) -> Self {
        let terms = (0..terms)
            .map(|_| {
                let mut exps = vec![0u32; vars];
                let total = rng.random_range(0..=degree);
                for _ in 0..total {
                    exps[rng.random_range(0..vars)] += 1;
                }
                (rng.random_range(-1.0..1.0), exps)
            })
            .collect();
        Self { terms }
    }

    pub fn eval(&self, x: &RVector) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| c * e.iter().zip(x.iter()).map(|(&k, &v)| v.powi(k as i32)).product::<f64>())
            .sum()
    }

    pub fn gradient(&self, x: &RVector) -> RVector {
        let mut g = RVector::zeros(x.len());
        for (c, e) in &self.terms {
            for i in 0..e.len() {
                if e[i] == 0 {
                    continue;
                }
                let mut term = c * e[i] as f64;
                for (j, (&k, &v)) in e.iter().zip(x.iter()).enumerate() {
                    let k = if j == i { k - 1 } else { k };
                    term *= v.powi(k as i32);
                }
                g[i] += term;
            }
        }
        g
    }

    pub fn to_field(&self) -> ScalarField {
        let a = self.clone();
        let b = self.clone();
        ScalarField::with_gradient(move |x| a.eval(x), move |x| b.gradient(x))
    }
}

/// A contact structure on a coordinate patch of dimension `2m+1`.
#[derive(Clone)]
pub struct ContactChart {
    dim: usize,
    eta: CovectorFn,
    omega: FormFn,
    d_eta: Option<FormFn>,
}

impl std::fmt::Debug for ContactChart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ContactChart").field("dim", &self.dim).field("exact", &self.is_exact()).finish()
    }
}

impl ContactChart {
    pub fn new(
        dim: usize,
        eta: impl Fn(&RVector) -> RVector + Send + Sync + 'static,
        omega: impl Fn(&RVector) -> RMatrix + Send + Sync + 'static,
    ) -> Result<Self> {
        if dim % 2 == 0 {
            return Err(Error::InvalidDimension { dim, reason: "contact charts have odd dimension" });
        }
        Ok(Self { dim, eta: Arc::new(eta), omega: Arc::new(omega), d_eta: None })
    }

    /// Marks the chart exact, with an analytic `dη`.
    pub fn with_exterior_derivative(mut self, d_eta: impl Fn(&RVector) -> RMatrix + Send + Sync + 'static) -> Self {
        self.d_eta = Some(Arc::new(d_eta));
        self
    }

    /// Canonical chart `(q_1..q_m, p_1..p_m, S)` with `η = dS − p dq` and
    /// `ω = dη = Σ dq∧dp`.
    pub fn standard(m: usize) -> Self {
        let dim = 2 * m + 1;
        let omega = move |_: &RVector| {
            let mut w = RMatrix::zeros(dim, dim);
            for i in 0..m {
                w[(i, m + i)] = 1.0;
                w[(m + i, i)] = -1.0;
            }
            w
        };
        let eta = move |x: &RVector| {
            let mut e = RVector::zeros(dim);
            for i in 0..m {
                e[i] = -x[m + i];
            }
            e[2 * m] = 1.0;
            e
        };
        Self { dim, eta: Arc::new(eta), omega: Arc::new(omega), d_eta: None }.with_exterior_derivative(omega)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_exact(&self) -> bool {
        self.d_eta.is_some()
    }

    pub fn eta(&self, x: &RVector) -> RVector {
        (self.eta)(x)
    }

    pub fn omega(&self, x: &RVector) -> RMatrix {
        (self.omega)(x)
    }

    fn check_point(&self, x: &RVector) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        Ok(())
    }

    fn bordered(&self, x: &RVector) -> RMatrix {
        let d = self.dim;
        let eta = self.eta(x);
        let mut m = RMatrix::zeros(d + 1, d + 1);
        m.view_mut((0, 0), (d, d)).copy_from(&(-self.omega(x)));
        m.view_mut((0, d), (d, 1)).copy_from(&eta);
        m.view_mut((d, 0), (1, d)).copy_from(&eta.transpose());
        m
    }

    /// `|det|` of the bordered matrix; zero iff `η ∧ ωᵐ` vanishes.
    pub fn nondegeneracy(&self, x: &RVector) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.bordered(x).determinant().abs())
    }

    fn solve(&self, x: &RVector, rhs: &RVector, f: f64) -> Result<RVector> {
        self.check_point(x)?;
        let m = self.bordered(x);
        let det = m.determinant().abs();
        if !(det > NONDEGENERACY_TOL) {
            return Err(Error::DegenerateContact { det });
        }
        let b = rhs.clone().push(f);
        let sol = m.lu().solve(&b).ok_or(Error::DegenerateContact { det })?;
        Ok(sol.rows(0, self.dim).into_owned())
    }

    /// The Reeb field: `η(ξ) = 1`, `i_ξ ω = 0`.
    pub fn reeb_field(&self, x: &RVector) -> Result<RVector> {
        self.solve(x, &RVector::zeros(self.dim), 1.0)
    }

    /// Contact field for a value and differential given at `x`.
    pub fn field_from_differential(&self, x: &RVector, f: f64, df: &RVector) -> Result<RVector> {
        let xi = self.reeb_field(x)?;
        let rhs = self.eta(x) * xi.dot(df) - df;
        self.solve(x, &rhs, f)
    }

    /// `i_Γ η = F`, `i_Γ ω = (ξF) η − dF`.
    pub fn contact_hamiltonian_field(&self, f: &ScalarField, x: &RVector) -> Result<RVector> {
        self.field_from_differential(x, f.value(x), &f.gradient(x))
    }

    /// `i_Γ η = F`, `i_Γ ω = (ξF − α(ξ)) η − dF + α`.
    pub fn generalized_contact_field(&self, f: &ScalarField, alpha: &RVector, x: &RVector) -> Result<RVector> {
        let xi = self.reeb_field(x)?;
        let df = f.gradient(x);
        let rhs = self.eta(x) * (xi.dot(&df) - xi.dot(alpha)) - &df + alpha;
        self.solve(x, &rhs, f.value(x))
    }

    /// Residuals `(|i_Γ η − F|, max|i_Γ ω − rhs|)` of a claimed generalized
    /// contact field.
    pub fn field_residuals(&self, f: &ScalarField, alpha: &RVector, x: &RVector, field: &RVector) -> Result<(f64, f64)> {
        let xi = self.reeb_field(x)?;
        let df = f.gradient(x);
        let rhs = self.eta(x) * (xi.dot(&df) - xi.dot(alpha)) - &df + alpha;
        let contraction = self.omega(x).transpose() * field;
        Ok(((self.eta(x).dot(field) - f.value(x)).abs(), (contraction - rhs).amax()))
    }

    /// `Λ(dF, dG) = dG(Γ_F − F ξ)`: the bivector of `ω` on `ker η`.
    pub fn lambda(&self, x: &RVector, f: f64, df: &RVector, dg: &RVector) -> Result<f64> {
        let gamma_f = self.field_from_differential(x, f, df)?;
        let xi = self.reeb_field(x)?;
        Ok(dg.dot(&(gamma_f - xi * f)))
    }

    /// Jacobi bracket `[F, G] = F ξ(G) − G ξ(F) + Λ(dF, dG)`.
    pub fn jacobi_bracket(&self, f: &ScalarField, g: &ScalarField, x: &RVector) -> Result<f64> {
        let (fv, gv) = (f.value(x), g.value(x));
        let (df, dg) = (f.gradient(x), g.gradient(x));
        let xi = self.reeb_field(x)?;
        Ok(fv * xi.dot(&dg) - gv * xi.dot(&df) + self.lambda(x, fv, &df, &dg)?)
    }

    /// Jacobi bracket from the volume-form identity
    /// `[F,G] η∧ω = dF∧dG∧η + (F dG − G dF)∧ω`, available in dimension 3.
    pub fn jacobi_bracket_volume_form(&self, f: &ScalarField, g: &ScalarField, x: &RVector) -> Result<f64> {
        if self.dim != 3 {
            return Err(Error::InvalidDimension { dim: self.dim, reason: "volume-form bracket is implemented in dimension 3" });
        }
        let eta = self.eta(x);
        let w = self.omega(x);
        // a ∧ ω = (a · w*) vol with w* the dual vector of ω
        let dual = RVector::from_vec(vec![w[(1, 2)], -w[(0, 2)], w[(0, 1)]]);
        let (df, dg) = (f.gradient(x), g.gradient(x));
        let triple = RMatrix::from_rows(&[df.transpose(), dg.transpose(), eta.transpose()]).determinant();
        let mixed = (dg * f.value(x) - df * g.value(x)).dot(&dual);
        let vol = eta.dot(&dual);
        if vol.abs() <= NONDEGENERACY_TOL {
            return Err(Error::DegenerateContact { det: vol.abs() });
        }
        Ok((triple + mixed) / vol)
    }

    /// Lie bracket `[X, Y] = DY·X − DX·Y` of two vector fields, by
    /// Richardson-extrapolated central differences along each field.
    pub fn lie_bracket<X, Y>(&self, x: &RVector, fx: X, fy: Y) -> Result<RVector>
    where
        X: Fn(&RVector) -> Result<RVector>,
        Y: Fn(&RVector) -> Result<RVector>,
    {
        let vx = fx(x)?;
        let vy = fy(x)?;
        let dy_x = try_richardson(|s| fy(&(x + &vx * s)), LIE_STEP)?;
        let dx_y = try_richardson(|s| fx(&(x + &vy * s)), LIE_STEP)?;
        Ok(dy_x - dx_y)
    }

    /// `max|[Γ_F, Γ_G] − Γ_[F,G]|` at `x`.
    pub fn homomorphism_residual(&self, f: &ScalarField, g: &ScalarField, x: &RVector) -> Result<f64> {
        let lhs = self.lie_bracket(
            x,
            |p| self.contact_hamiltonian_field(f, p),
            |p| self.contact_hamiltonian_field(g, p),
        )?;
        let chart = self.clone();
        let (f2, g2) = (f.clone(), g.clone());
        let bracket = move |p: &RVector| chart.jacobi_bracket(&f2, &g2, p).unwrap_or(f64::NAN);
        let value = bracket(x);
        let grad = RVector::from_fn(self.dim, |i, _| {
            let e = RVector::from_fn(self.dim, |j, _| if i == j { 1.0 } else { 0.0 });
            richardson(|s| RVector::from_element(1, bracket(&(x + &e * s))), LIE_STEP)[0]
        });
        let rhs = self.field_from_differential(x, value, &grad)?;
        Ok((lhs - rhs).amax())
    }

    /// Max deviation between `ω` and `dη`: the analytic `dη` when the chart
    /// carries one, central differences of `η` otherwise.
    pub fn exactness_residual(&self, x: &RVector) -> Result<f64> {
        self.check_point(x)?;
        let d_eta = match &self.d_eta {
            Some(d) => d(x),
            None => self.numerical_d_eta(x),
        };
        Ok((d_eta - self.omega(x)).amax())
    }

    /// `(dη)_ij = ∂_i η_j − ∂_j η_i` by Richardson central differences.
    pub fn numerical_d_eta(&self, x: &RVector) -> RMatrix {
        let d = self.dim;
        let mut jac = RMatrix::zeros(d, d);
        for i in 0..d {
            let e = RVector::from_fn(d, |j, _| if i == j { 1.0 } else { 0.0 });
            let row = richardson(|s| self.eta(&(x + &e * s)), LIE_STEP);
            jac.set_row(i, &row.transpose());
        }
        &jac - jac.transpose()
    }
}
