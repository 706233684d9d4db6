//! Contact Euler–Lagrange dynamics on `TQ × ℝ` with coordinates
//! `(q, q̇, S)`.
//!
//! The equations integrated are
//!
//! ```text
//! ∂²L/∂q̇∂q̇ · q̈ = ∂L/∂q − (∂²L/∂q̇∂q) q̇ − h'(S) D
//! Ṡ            = q̇·D − E_L − h(S)
//! ```
//!
//! with `E_L = q̇·∂L/∂q̇ − L` and `D = ∂L/∂q̇` (Caldirola–Kanai form, where
//! `Ṡ = L − h`), `D = ∂F/∂q̇` (Rayleigh form) or `D = 0`. Along solutions
//! `dE_L/dt = −h'(S) q̇·D`.

use std::sync::Arc;

use crate::{ode, Error, RMatrix, RVector, Result};

/// Smallest accepted `|det|` of the velocity Hessian.
pub const HESSIAN_DET_TOL: f64 = 1e-10;

type ScalarQv = Arc<dyn Fn(&RVector, &RVector) -> f64 + Send + Sync>;
type VectorQv = Arc<dyn Fn(&RVector, &RVector) -> RVector + Send + Sync>;
type MatrixQv = Arc<dyn Fn(&RVector, &RVector) -> RMatrix + Send + Sync>;
type Scalar1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A Lagrangian `L(q, q̇)` with analytic first derivatives and the
/// second derivatives the Euler–Lagrange equations need.
#[derive(Clone)]
pub struct Lagrangian {
    n: usize,
    value: ScalarQv,
    dq: VectorQv,
    dv: VectorQv,
    hess_vv: MatrixQv,
    /// `[i][j] = ∂²L/∂q̇_i∂q_j`.
    hess_vq: MatrixQv,
}

impl std::fmt::Debug for Lagrangian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Lagrangian").field("n", &self.n).finish()
    }
}

impl Lagrangian {
    pub fn new(
        n: usize,
        value: impl Fn(&RVector, &RVector) -> f64 + Send + Sync + 'static,
        dq: impl Fn(&RVector, &RVector) -> RVector + Send + Sync + 'static,
        dv: impl Fn(&RVector, &RVector) -> RVector + Send + Sync + 'static,
        hess_vv: impl Fn(&RVector, &RVector) -> RMatrix + Send + Sync + 'static,
        hess_vq: impl Fn(&RVector, &RVector) -> RMatrix + Send + Sync + 'static,
    ) -> Self {
        Self {
            n,
            value: Arc::new(value),
            dq: Arc::new(dq),
            dv: Arc::new(dv),
            hess_vv: Arc::new(hess_vv),
            hess_vq: Arc::new(hess_vq),
        }
    }

    /// `L = ½ q̇ᵀ M q̇ − ½ qᵀ K q` for symmetric `M`, `K`.
    pub fn quadratic(m: RMatrix, k: RMatrix) -> Result<Self> {
        let n = m.nrows();
        if m.shape() != (n, n) || k.shape() != (n, n) {
            return Err(Error::DimensionMismatch { expected: n, found: k.nrows() });
        }
        let (m1, m2, m3) = (m.clone(), m.clone(), m);
        let (k1, k2) = (k.clone(), k);
        Ok(Self::new(
            n,
            move |q, v| 0.5 * v.dot(&(&m1 * v)) - 0.5 * q.dot(&(&k1 * q)),
            move |q, _| -(&k2 * q),
            move |_, v| &m2 * v,
            move |_, _| m3.clone(),
            move |_, _| RMatrix::zeros(n, n),
        ))
    }

    /// `L = q̇ ln q̇ − γ q`, defined for `q̇ > 0`.
    pub fn friction(gamma: f64) -> Self {
        Self::new(
            1,
            move |q, v| v[0] * v[0].ln() - gamma * q[0],
            move |_, _| RVector::from_element(1, -gamma),
            |_, v| RVector::from_element(1, v[0].ln() + 1.0),
            |_, v| RMatrix::from_element(1, 1, 1.0 / v[0]),
            |_, _| RMatrix::zeros(1, 1),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, q: &RVector, v: &RVector) -> f64 {
        (self.value)(q, v)
    }

    pub fn dq(&self, q: &RVector, v: &RVector) -> RVector {
        (self.dq)(q, v)
    }

    pub fn dv(&self, q: &RVector, v: &RVector) -> RVector {
        (self.dv)(q, v)
    }

    pub fn hess_vv(&self, q: &RVector, v: &RVector) -> RMatrix {
        (self.hess_vv)(q, v)
    }

    pub fn hess_vq(&self, q: &RVector, v: &RVector) -> RMatrix {
        (self.hess_vq)(q, v)
    }

    /// `E_L = q̇·∂L/∂q̇ − L`.
    pub fn energy(&self, q: &RVector, v: &RVector) -> f64 {
        v.dot(&self.dv(q, v)) - self.value(q, v)
    }
}

/// The dissipation function `h(S)`.
#[derive(Clone)]
pub struct Dissipation {
    value: Scalar1,
    derivative: Scalar1,
}

impl std::fmt::Debug for Dissipation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Dissipation")
    }
}

impl Dissipation {
    pub fn new(value: impl Fn(f64) -> f64 + Send + Sync + 'static, derivative: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { value: Arc::new(value), derivative: Arc::new(derivative) }
    }

    /// `h(S) = c S`.
    pub fn linear(c: f64) -> Self {
        Self::new(move |s| c * s, move |_| c)
    }

    pub fn zero() -> Self {
        Self::linear(0.0)
    }

    pub fn value(&self, s: f64) -> f64 {
        (self.value)(s)
    }

    pub fn derivative(&self, s: f64) -> f64 {
        (self.derivative)(s)
    }

    /// `max|h''(S)|` by central differences of `h'` at ten points of
    /// `[−5, 5]`.
    pub fn max_second_derivative(&self) -> f64 {
        let step = 1e-3;
        (0..10)
            .map(|k| {
                let s = -5.0 + k as f64 * 10.0 / 9.0;
                ((self.derivative(s + step) - self.derivative(s - step)) / (2.0 * step)).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// A Rayleigh function `F(q, q̇)` with its velocity gradient.
#[derive(Clone)]
pub struct RayleighFunction {
    value: ScalarQv,
    dv: VectorQv,
}

impl std::fmt::Debug for RayleighFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("RayleighFunction")
    }
}

impl RayleighFunction {
    pub fn new(
        value: impl Fn(&RVector, &RVector) -> f64 + Send + Sync + 'static,
        dv: impl Fn(&RVector, &RVector) -> RVector + Send + Sync + 'static,
    ) -> Self {
        Self { value: Arc::new(value), dv: Arc::new(dv) }
    }

    /// `F = ½ q̇ᵀ R q̇`.
    pub fn quadratic(r: RMatrix) -> Self {
        let r2 = r.clone();
        Self::new(move |_, v| 0.5 * v.dot(&(&r * v)), move |_, v| &r2 * v)
    }

    pub fn value(&self, q: &RVector, v: &RVector) -> f64 {
        (self.value)(q, v)
    }

    pub fn dv(&self, q: &RVector, v: &RVector) -> RVector {
        (self.dv)(q, v)
    }
}

/// Which one-form carries the dissipation.
#[derive(Debug, Clone)]
pub enum DissipationForm {
    /// No force term: `D = 0`.
    None,
    /// `α = θ_L`, `D = ∂L/∂q̇`.
    CaldirolaKanai,
    /// Semi-basic `α = d_S F`, `D = ∂F/∂q̇`.
    Rayleigh(RayleighFunction),
}

type EnergyFn = Arc<dyn Fn(&RVector, &RVector) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct ContactLagrangianSystem {
    pub lagrangian: Lagrangian,
    pub h: Dissipation,
    pub form: DissipationForm,
    mechanical_energy: Option<EnergyFn>,
    min_velocity: Option<f64>,
}

impl std::fmt::Debug for ContactLagrangianSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ContactLagrangianSystem")
            .field("n", &self.n())
            .field("form", &self.form)
            .field("min_velocity", &self.min_velocity)
            .finish()
    }
}

/// Result of [`ContactLagrangianSystem::projectability`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projectability {
    pub max_h_second_derivative: f64,
    pub alpha_s_dependence: f64,
    pub projectable: bool,
}

/// Trajectory of the contact Euler–Lagrange flow.
#[derive(Debug, Clone, Default)]
pub struct ContactTrajectory {
    pub times: Vec<f64>,
    /// States `(q, q̇, S)`.
    pub states: Vec<RVector>,
    /// `E_L` at each state.
    pub lagrangian_energy: Vec<f64>,
    /// `−h'(S) q̇·D` at each state.
    pub energy_rate: Vec<f64>,
    /// Mechanical energy, when the system defines one.
    pub mechanical_energy: Vec<f64>,
    /// Time at which the state left the domain, if it did.
    pub left_domain_at: Option<f64>,
}

impl ContactTrajectory {
    /// Five-point central-difference derivative of a uniformly sampled
    /// series, at the interior indices `2..len−2`.
    pub fn stencil_rate(values: &[f64], dt: f64) -> Vec<(usize, f64)> {
        if values.len() < 5 {
            return Vec::new();
        }
        (2..values.len() - 2)
            .map(|i| {
                let d = (values[i - 2] - 8.0 * values[i - 1] + 8.0 * values[i + 1] - values[i + 2]) / (12.0 * dt);
                (i, d)
            })
            .collect()
    }
}

impl ContactLagrangianSystem {
    pub fn new(lagrangian: Lagrangian, h: Dissipation, form: DissipationForm) -> Self {
        Self { lagrangian, h, form, mechanical_energy: None, min_velocity: None }
    }

    /// Records a mechanical energy to report alongside `E_L`.
    pub fn with_mechanical_energy(mut self, e: impl Fn(&RVector, &RVector) -> f64 + Send + Sync + 'static) -> Self {
        self.mechanical_energy = Some(Arc::new(e));
        self
    }

    /// Restricts the chart to `q̇_i > threshold`.
    pub fn with_min_velocity(mut self, threshold: f64) -> Self {
        self.min_velocity = Some(threshold);
        self
    }

    /// The friction system `L = q̇ ln q̇ − γ q`, `h = 0`, with
    /// `E_mech = ½ q̇²`.
    pub fn friction(gamma: f64) -> Self {
        Self::new(Lagrangian::friction(gamma), Dissipation::zero(), DissipationForm::None)
            .with_mechanical_energy(|_, v| 0.5 * v[0] * v[0])
            .with_min_velocity(1e-10)
    }

    /// `L = ½ q̇ᵀ M q̇ − ½ qᵀ K q` with Rayleigh `F = ½ q̇ᵀ R q̇` and `h = S`:
    /// reproduces `M q̈ + R q̇ + K q = 0`.
    pub fn linear_rayleigh(m: RMatrix, k: RMatrix, r: RMatrix) -> Result<Self> {
        let (m2, k2) = (m.clone(), k.clone());
        Ok(Self::new(Lagrangian::quadratic(m, k)?, Dissipation::linear(1.0), DissipationForm::Rayleigh(RayleighFunction::quadratic(r)))
            .with_mechanical_energy(move |q, v| 0.5 * v.dot(&(&m2 * v)) + 0.5 * q.dot(&(&k2 * q))))
    }

    pub fn n(&self) -> usize {
        self.lagrangian.n()
    }

    fn split(&self, state: &RVector) -> Result<(RVector, RVector, f64)> {
        let n = self.n();
        if state.len() != 2 * n + 1 {
            return Err(Error::DimensionMismatch { expected: 2 * n + 1, found: state.len() });
        }
        Ok((state.rows(0, n).into_owned(), state.rows(n, n).into_owned(), state[2 * n]))
    }

    fn in_domain(&self, v: &RVector) -> bool {
        match self.min_velocity {
            Some(min) => v.iter().all(|&x| x > min),
            None => true,
        }
    }

    fn force_direction(&self, q: &RVector, v: &RVector) -> RVector {
        match &self.form {
            DissipationForm::None => RVector::zeros(self.n()),
            DissipationForm::CaldirolaKanai => self.lagrangian.dv(q, v),
            DissipationForm::Rayleigh(f) => f.dv(q, v),
        }
    }

    /// `(q̇, q̈, Ṡ)` at `state = (q, q̇, S)`.
    pub fn field(&self, state: &RVector) -> Result<RVector> {
        let (q, v, s) = self.split(state)?;
        if !self.in_domain(&v) {
            return Err(Error::OutsideDomain("velocity below the chart threshold"));
        }
        let l = &self.lagrangian;
        let hess = l.hess_vv(&q, &v);
        let det = hess.determinant();
        if !(det.abs() > HESSIAN_DET_TOL) {
            return Err(Error::ImplicitSystem { what: "velocity Hessian", det: det.abs(), state: state.iter().copied().collect() });
        }
        let d = self.force_direction(&q, &v);
        let rhs = l.dq(&q, &v) - l.hess_vq(&q, &v) * &v - &d * self.h.derivative(s);
        let acc = hess.lu().solve(&rhs).ok_or_else(|| Error::ImplicitSystem {
            what: "velocity Hessian",
            det: det.abs(),
            state: state.iter().copied().collect(),
        })?;
        let s_dot = v.dot(&d) - l.energy(&q, &v) - self.h.value(s);
        let n = self.n();
        let mut out = RVector::zeros(2 * n + 1);
        out.rows_mut(0, n).copy_from(&v);
        out.rows_mut(n, n).copy_from(&acc);
        out[2 * n] = s_dot;
        Ok(out)
    }

    /// `E_L` at a state.
    pub fn lagrangian_energy(&self, state: &RVector) -> Result<f64> {
        let (q, v, _) = self.split(state)?;
        Ok(self.lagrangian.energy(&q, &v))
    }

    /// `dE_L/dt = −h'(S) q̇·D`.
    pub fn energy_rate(&self, state: &RVector) -> Result<f64> {
        let (q, v, s) = self.split(state)?;
        Ok(-self.h.derivative(s) * v.dot(&self.force_direction(&q, &v)))
    }

    pub fn mechanical_energy(&self, state: &RVector) -> Result<Option<f64>> {
        let (q, v, _) = self.split(state)?;
        Ok(self.mechanical_energy.as_ref().map(|e| e(&q, &v)))
    }

    /// Second-order projectability: `h` linear in `S` and `α` independent
    /// of `S`. The dissipation one-forms available here are built from
    /// functions of `(q, q̇)` only, so the second probe is structurally zero.
    pub fn projectability(&self) -> Projectability {
        let h2 = self.h.max_second_derivative();
        let alpha_s = 0.0;
        Projectability { max_h_second_derivative: h2, alpha_s_dependence: alpha_s, projectable: h2 < 1e-10 && alpha_s < 1e-10 }
    }

    /// RK4 integration from `(q, q̇, S)`. Leaving the velocity domain ends
    /// the trajectory early without an error.
    pub fn integrate(&self, state0: &RVector, t_end: f64, dt: f64) -> Result<ContactTrajectory> {
        let mut traj = ContactTrajectory::default();
        traj.left_domain_at = self.integrate_observed(state0, t_end, dt, |t, y| self.record(&mut traj, t, y))?;
        Ok(traj)
    }

    /// Streaming form of [`integrate`](Self::integrate). Returns the time at
    /// which the state left the domain, if it did.
    pub fn integrate_observed<O>(&self, state0: &RVector, t_end: f64, dt: f64, mut observe: O) -> Result<Option<f64>>
    where
        O: FnMut(f64, &RVector) -> Result<()>,
    {
        let grid = ode::time_grid(t_end, dt)?;
        let mut y = state0.clone();
        self.field(&y)?;
        observe(grid[0], &y)?;
        let mut field = |s: &RVector| self.field(s);
        for w in grid.windows(2) {
            let next = match ode::rk4_step(&mut field, &y, w[1] - w[0]) {
                Ok(next) => next,
                Err(Error::OutsideDomain(_)) => return Ok(Some(w[0])),
                Err(e) => return Err(e),
            };
            if next.iter().any(|v| !v.is_finite()) {
                return Err(Error::Divergence { last_valid_time: w[0] });
            }
            let (_, v, _) = self.split(&next)?;
            if !self.in_domain(&v) {
                return Ok(Some(w[0]));
            }
            y = next;
            observe(w[1], &y)?;
        }
        Ok(None)
    }

    fn record(&self, traj: &mut ContactTrajectory, t: f64, y: &RVector) -> Result<()> {
        traj.times.push(t);
        traj.lagrangian_energy.push(self.lagrangian_energy(y)?);
        traj.energy_rate.push(self.energy_rate(y)?);
        if let Some(e) = self.mechanical_energy(y)? {
            traj.mechanical_energy.push(e);
        }
        traj.states.push(y.clone());
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(v: &[f64]) -> RVector {
        RVector::from_row_slice(v)
    }

    /// `L = ½ q̇² − V(q)` with `V = q⁴/4 − q²/2`.
    fn newton() -> Lagrangian {
        Lagrangian::new(
            1,
            |q, v| 0.5 * v[0] * v[0] - (q[0].powi(4) / 4.0 - q[0] * q[0] / 2.0),
            |q, _| RVector::from_element(1, -(q[0].powi(3) - q[0])),
            |_, v| v.clone(),
            |_, _| RMatrix::identity(1, 1),
            |_, _| RMatrix::zeros(1, 1),
        )
    }

    #[test]
    fn damped_newton() {
        let gamma = 0.4;
        let sys = ContactLagrangianSystem::new(newton(), Dissipation::linear(gamma), DissipationForm::CaldirolaKanai);
        let x = state(&[0.7, -0.3, 1.2]);
        let f = sys.field(&x).unwrap();
        let (q, v) = (0.7f64, -0.3f64);
        assert!((f[1] - (-(q.powi(3) - q) - gamma * v)).abs() < 1e-15);
        // Ṡ = L − h
        let l = 0.5 * v * v - (q.powi(4) / 4.0 - q * q / 2.0);
        assert!((f[2] - (l - gamma * 1.2)).abs() < 1e-15);
    }

    #[test]
    fn singular_hessian_reports_state() {
        let l = Lagrangian::quadratic(RMatrix::zeros(1, 1), RMatrix::identity(1, 1)).unwrap();
        let sys = ContactLagrangianSystem::new(l, Dissipation::zero(), DissipationForm::None);
        match sys.field(&state(&[1.0, 2.0, 3.0])) {
            Err(Error::ImplicitSystem { state, .. }) => assert_eq!(state, vec![1.0, 2.0, 3.0]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn projectability_of_h() {
        let mk = |h| ContactLagrangianSystem::new(newton(), h, DissipationForm::CaldirolaKanai).projectability().projectable;
        assert!(mk(Dissipation::linear(0.3)));
        assert!(mk(Dissipation::zero()));
        assert!(!mk(Dissipation::new(|s| s * s, |s| 2.0 * s)));
    }

    #[test]
    fn conservative_energy_is_constant() {
        let sys = ContactLagrangianSystem::new(newton(), Dissipation::zero(), DissipationForm::Rayleigh(RayleighFunction::quadratic(RMatrix::zeros(1, 1))));
        let traj = sys.integrate(&state(&[0.2, 0.5, 0.0]), 10.0, 1e-3).unwrap();
        let e0 = traj.lagrangian_energy[0];
        assert!(traj.lagrangian_energy.iter().all(|e| (e - e0).abs() < 1e-10));
    }

    #[test]
    fn energy_rate_matches_stencil() {
        let sys = ContactLagrangianSystem::new(newton(), Dissipation::linear(0.3), DissipationForm::CaldirolaKanai);
        let dt = 1e-3;
        let traj = sys.integrate(&state(&[0.2, 0.5, 0.0]), 3.0, dt).unwrap();
        for (i, d) in ContactTrajectory::stencil_rate(&traj.lagrangian_energy, dt) {
            assert!((d - traj.energy_rate[i]).abs() < 1e-6 * (1.0 + d.abs()));
        }
    }

    #[test]
    fn friction_chart_exit_is_clean() {
        // q̈ = −γ q̇ never reaches zero velocity, but a strongly negative
        // initial condition is refused at the first step
        let sys = ContactLagrangianSystem::friction(1.0);
        assert!(matches!(sys.field(&state(&[0.0, -1.0, 0.0])), Err(Error::OutsideDomain(_))));
        // the guard ends a trajectory whose velocity is driven to zero:
        // L = ½ q̇² − q gives q̈ = −1
        let fall = Lagrangian::new(
            1,
            |q, v| 0.5 * v[0] * v[0] - q[0],
            |_, _| RVector::from_element(1, -1.0),
            |_, v| v.clone(),
            |_, _| RMatrix::identity(1, 1),
            |_, _| RMatrix::zeros(1, 1),
        );
        let sys = ContactLagrangianSystem::new(fall, Dissipation::zero(), DissipationForm::None).with_min_velocity(1e-10);
        let traj = sys.integrate(&state(&[0.0, 0.5, 0.0]), 5.0, 1e-3).unwrap();
        let exit = traj.left_domain_at.unwrap();
        assert!((exit - 0.5).abs() < 2e-3, "exit at {exit}");
        assert!(traj.states.iter().all(|s| s[1] > 1e-10));
    }

    #[test]
    fn friction_energies() {
        let gamma = 0.5;
        let sys = ContactLagrangianSystem::friction(gamma);
        let traj = sys.integrate(&state(&[0.0, 1.0, 0.0]), 10.0, 1e-3).unwrap();
        assert!(traj.left_domain_at.is_none());
        let e0 = traj.lagrangian_energy[0];
        assert!(traj.lagrangian_energy.iter().all(|e| (e - e0).abs() < 1e-8));
        for (i, d) in ContactTrajectory::stencil_rate(&traj.mechanical_energy, 1e-3) {
            let v = traj.states[i][1];
            assert!((d + gamma * v * v).abs() < 1e-6);
        }
    }
}
