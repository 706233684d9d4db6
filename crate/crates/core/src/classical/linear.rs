//! Linear second-order systems `m q̈ + γ q̇ + ω q = 0`, their representative
//! matrix, the odd-trace Hamiltonianity test and the bivector span test for
//! the existence of a Lagrangian.

use crate::{linalg, Error, RMatrix, RVector, Result};

/// Smallest accepted `|det m|`.
pub const MASS_DET_TOL: f64 = 1e-12;
/// Relative tolerance of the odd traces, per power of `‖G‖_F`.
pub const ODD_TRACE_TOL: f64 = 1e-9;
/// Relative threshold for new directions in the bivector span.
pub const SPAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSecondOrderSystem {
    pub m: RMatrix,
    pub gamma: RMatrix,
    pub omega: RMatrix,
}

impl LinearSecondOrderSystem {
    pub fn new(m: RMatrix, gamma: RMatrix, omega: RMatrix) -> Result<Self> {
        let n = m.nrows();
        for mat in [&m, &gamma, &omega] {
            if mat.nrows() != n || mat.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: mat.nrows().max(mat.ncols()) });
            }
        }
        if n == 0 {
            return Err(Error::InvalidDimension { dim: 0, reason: "need at least one degree of freedom" });
        }
        Ok(Self { m, gamma, omega })
    }

    /// Two oscillators with stiffness `[[ω₁², κ], [κ, ω₂²]]` and damping
    /// `[[γ₁, δ], [δ, γ₂]]`, unit masses.
    pub fn coupled_damped_oscillators(w1: f64, w2: f64, g1: f64, g2: f64, kappa: f64, delta: f64) -> Self {
        Self {
            m: RMatrix::identity(2, 2),
            gamma: RMatrix::from_row_slice(2, 2, &[g1, delta, delta, g2]),
            omega: RMatrix::from_row_slice(2, 2, &[w1 * w1, kappa, kappa, w2 * w2]),
        }
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    /// Whether `m` is too close to singular for the explicit form.
    pub fn is_implicit(&self) -> bool {
        self.m.determinant().abs() <= MASS_DET_TOL
    }
}

/// `G = [[0, I], [−m⁻¹ω, −m⁻¹γ]]`, acting on `ξ = (q, q̇)`.
pub fn representative_matrix(sys: &LinearSecondOrderSystem) -> Result<RMatrix> {
    let n = sys.n();
    let det = sys.m.determinant();
    if det.abs() <= MASS_DET_TOL {
        return Err(Error::ImplicitSystem { what: "mass matrix", det: det.abs(), state: vec![] });
    }
    let lu = sys.m.clone().lu();
    let singular = || Error::ImplicitSystem { what: "mass matrix", det: det.abs(), state: vec![] };
    let k = lu.solve(&sys.omega).ok_or_else(singular)?;
    let c = lu.solve(&sys.gamma).ok_or_else(singular)?;
    let mut g = RMatrix::zeros(2 * n, 2 * n);
    g.view_mut((0, n), (n, n)).copy_from(&RMatrix::identity(n, n));
    g.view_mut((n, 0), (n, n)).copy_from(&(-k));
    g.view_mut((n, n), (n, n)).copy_from(&(-c));
    Ok(g)
}

/// `e^{Gt} ξ₀`.
pub fn linear_flow_exact(g: &RMatrix, x0: &RVector, t: f64) -> RVector {
    (g * t).exp() * x0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamiltonianityVerdict {
    /// All odd traces vanish and the spectrum is simple.
    Admissible,
    /// Some odd trace is nonzero: `G` is not a product of an antisymmetric
    /// and a symmetric matrix.
    NotHamiltonian,
    /// Odd traces vanish but the spectrum is degenerate.
    InconclusiveNonGeneric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianityReport {
    pub verdict: HamiltonianityVerdict,
    /// `Tr(G^{2k+1})` for `k = 0..dim`.
    pub odd_traces: Vec<f64>,
    /// `‖G‖_F`, the scale of the tolerances.
    pub scale: f64,
    /// Smallest distance between two eigenvalues.
    pub min_eigenvalue_gap: f64,
}

impl HamiltonianityReport {
    /// Largest `|Tr(G^{2k+1})| / ‖G‖_F^{2k+1}`.
    pub fn max_relative_trace(&self) -> f64 {
        self.odd_traces
            .iter()
            .enumerate()
            .map(|(k, t)| if self.scale > 0.0 { t.abs() / self.scale.powi(2 * k as i32 + 1) } else { t.abs() })
            .fold(0.0, f64::max)
    }
}

/// Odd-power trace test: `G` can be written as (antisymmetric)·(symmetric)
/// for generic `G` iff every `Tr(G^{2k+1})` vanishes.
pub fn hamiltonianity_criterion(g: &RMatrix) -> Result<HamiltonianityReport> {
    let d = g.nrows();
    if g.ncols() != d || d == 0 || d % 2 != 0 {
        return Err(Error::InvalidDimension { dim: d, reason: "expected a square matrix of even size" });
    }
    let scale = g.norm();
    let g2 = g * g;
    let mut power = g.clone();
    let mut odd_traces = Vec::with_capacity(d);
    for _ in 0..d {
        odd_traces.push(power.trace());
        power = &power * &g2;
    }
    let eig = g.complex_eigenvalues();
    let mut gap = f64::INFINITY;
    for i in 0..d {
        for j in i + 1..d {
            gap = gap.min((eig[i] - eig[j]).norm());
        }
    }
    let mut report = HamiltonianityReport {
        verdict: HamiltonianityVerdict::Admissible,
        odd_traces,
        scale,
        min_eigenvalue_gap: gap,
    };
    report.verdict = if report.max_relative_trace() >= ODD_TRACE_TOL {
        HamiltonianityVerdict::NotHamiltonian
    } else if gap <= 1e-8 * scale.max(1.0) {
        HamiltonianityVerdict::InconclusiveNonGeneric
    } else {
        HamiltonianityVerdict::Admissible
    };
    Ok(report)
}

/// Splits `G = A + D` with `D = (Tr G / dim) I`, so that `A` is traceless.
/// Any other scalar or non-scalar remainder would do as well.
pub fn traceless_decomposition(g: &RMatrix) -> (RMatrix, RMatrix) {
    let d = g.nrows();
    let dmat = RMatrix::identity(d, d) * (g.trace() / d as f64);
    (g - &dmat, dmat)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LagrangianVerdict {
    /// The span is maximal: no Lagrangian exists.
    NoLagrangian,
    /// The span is not maximal: the test does not rule a Lagrangian out.
    Possible,
    /// One degree of freedom: the maximality argument does not apply.
    TestInapplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BivectorSpan {
    pub dim: usize,
    /// `n(2n − 1)`.
    pub max_dim: usize,
    pub verdict: LagrangianVerdict,
}

impl BivectorSpan {
    pub fn lagrangian_possible(&self) -> bool {
        self.verdict != LagrangianVerdict::NoLagrangian
    }
}

fn check_second_order(g: &RMatrix) -> Result<usize> {
    let d = g.nrows();
    if g.ncols() != d || d == 0 || d % 2 != 0 {
        return Err(Error::WrongBlockStructure("expected a square matrix of even size"));
    }
    let n = d / 2;
    let upper_left = g.view((0, 0), (n, n)).amax();
    let upper_right = (g.view((0, n), (n, n)) - RMatrix::identity(n, n)).amax();
    if upper_left > 1e-12 || upper_right > 1e-12 {
        return Err(Error::WrongBlockStructure("upper blocks must be [0, I]"));
    }
    Ok(n)
}

/// Dimension of the smallest space of constant bivectors that contains
/// `∂q̇_i ∧ ∂q̇_j` and is closed under `B ↦ G B + B Gᵀ`.
pub fn bivector_span_dimension(g: &RMatrix) -> Result<BivectorSpan> {
    let n = check_second_order(g)?;
    let d = 2 * n;
    let max_dim = n * (2 * n - 1);
    let wedge = |i: usize, j: usize| {
        let mut b = RMatrix::zeros(d, d);
        b[(i, j)] = 1.0;
        b[(j, i)] = -1.0;
        b
    };
    let mut queue: Vec<RMatrix> = if n == 1 {
        vec![wedge(0, 1)]
    } else {
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| wedge(n + i, n + j)).collect()
    };
    let mut span: Vec<RMatrix> = Vec::new();
    while let Some(candidate) = queue.pop() {
        if span.len() == max_dim {
            break;
        }
        let size = candidate.norm();
        let mut residual = candidate;
        // two passes of Gram–Schmidt for stability
        for _ in 0..2 {
            for basis in &span {
                let overlap = residual.dot(basis);
                residual -= basis * overlap;
            }
        }
        let r = residual.norm();
        if r <= SPAN_TOL * size.max(1.0) {
            continue;
        }
        let unit = residual / r;
        queue.push(g * &unit + &unit * g.transpose());
        span.push(unit);
    }
    let dim = span.len();
    let verdict = if n == 1 {
        LagrangianVerdict::TestInapplicable
    } else if dim == max_dim {
        LagrangianVerdict::NoLagrangian
    } else {
        LagrangianVerdict::Possible
    };
    Ok(BivectorSpan { dim, max_dim, verdict })
}

/// Largest `|Tr(G^{2k+1})|` relative to `‖G‖_F^{2k+1}`.
pub fn max_relative_odd_trace(g: &RMatrix) -> Result<f64> {
    Ok(hamiltonianity_criterion(g)?.max_relative_trace())
}

/// `max|G − G_expected|` helper for block-structure checks.
pub fn block_residual(g: &RMatrix, expected: &RMatrix) -> f64 {
    linalg::max_abs((g - expected).iter().copied())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn coupled_oscillator_matrix() {
        let sys = LinearSecondOrderSystem::coupled_damped_oscillators(1.0, 2.0, 0.3, 0.7, 0.1, 0.2);
        let g = representative_matrix(&sys).unwrap();
        let want = RMatrix::from_row_slice(
            4,
            4,
            &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, -1.0, -0.1, -0.3, -0.2, -0.1, -4.0, -0.2, -0.7],
        );
        assert!(block_residual(&g, &want) < 1e-12);
        let report = hamiltonianity_criterion(&g).unwrap();
        assert_eq!(report.verdict, HamiltonianityVerdict::NotHamiltonian);
        assert!((report.odd_traces[0] + 1.0).abs() < 1e-12);
        let span = bivector_span_dimension(&g).unwrap();
        assert_eq!((span.dim, span.max_dim, span.verdict), (6, 6, LagrangianVerdict::NoLagrangian));
    }

    #[test]
    fn undamped_uncoupled_oscillators() {
        let sys = LinearSecondOrderSystem::coupled_damped_oscillators(1.0, 2.0, 0.0, 0.0, 0.0, 0.0);
        let g = representative_matrix(&sys).unwrap();
        let report = hamiltonianity_criterion(&g).unwrap();
        assert_eq!(report.verdict, HamiltonianityVerdict::Admissible);
        let span = bivector_span_dimension(&g).unwrap();
        assert!(span.dim < 6);
        assert!(span.lagrangian_possible());
    }

    #[test]
    fn harmonic_oscillator() {
        let sys = LinearSecondOrderSystem::new(RMatrix::identity(1, 1), RMatrix::zeros(1, 1), RMatrix::identity(1, 1)).unwrap();
        let g = representative_matrix(&sys).unwrap();
        assert_eq!(g, RMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        assert_eq!(hamiltonianity_criterion(&g).unwrap().verdict, HamiltonianityVerdict::Admissible);
        let span = bivector_span_dimension(&g).unwrap();
        assert_eq!((span.dim, span.verdict), (1, LagrangianVerdict::TestInapplicable));
    }

    #[test]
    fn heavy_mass_scales_stiffness() {
        let sys = LinearSecondOrderSystem::new(RMatrix::identity(2, 2) * 2.0, RMatrix::zeros(2, 2), RMatrix::identity(2, 2))
            .unwrap();
        let g = representative_matrix(&sys).unwrap();
        assert!(block_residual(&g.view((2, 0), (2, 2)).into_owned(), &(RMatrix::identity(2, 2) * -0.5)) < 1e-15);
    }

    #[test]
    fn singular_mass_is_implicit() {
        let sys = LinearSecondOrderSystem::new(RMatrix::zeros(2, 2), RMatrix::zeros(2, 2), RMatrix::identity(2, 2)).unwrap();
        assert!(sys.is_implicit());
        assert!(matches!(representative_matrix(&sys), Err(Error::ImplicitSystem { .. })));
    }

    #[test]
    fn degenerate_spectrum_is_inconclusive() {
        let g = RMatrix::from_row_slice(4, 4, &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0]);
        assert_eq!(hamiltonianity_criterion(&g).unwrap().verdict, HamiltonianityVerdict::InconclusiveNonGeneric);
    }

    #[test]
    fn wrong_blocks_rejected() {
        let g = RMatrix::identity(4, 4);
        assert!(matches!(bivector_span_dimension(&g), Err(Error::WrongBlockStructure(_))));
        assert!(hamiltonianity_criterion(&RMatrix::identity(3, 3)).is_err());
    }

    #[test]
    fn traceless_split() {
        let g = RMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 5.0]);
        let (a, d) = traceless_decomposition(&g);
        assert!(a.trace().abs() < 1e-15);
        assert_eq!(&a + &d, g);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn products_have_vanishing_odd_traces(seed in any::<u64>(), n in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let lam = sample::antisymmetric(2 * n, &mut rng);
            let h = sample::symmetric(2 * n, &mut rng);
            let g = lam * h;
            let report = hamiltonianity_criterion(&g).unwrap();
            prop_assert!(report.max_relative_trace() < 1e-10);
            prop_assert!(report.verdict != HamiltonianityVerdict::NotHamiltonian);
        }
    }
}
