//! Seeded invariant suites, one per module.
//!
//! Each suite samples its inputs from a ChaCha generator seeded by the
//! caller, so a run is reproducible bit for bit.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{self, SuBasis};
use crate::classical::circuits::{rlc_coupled, rlc_coupled_linear, rlc_single, rlc_underdamped_exact};
use crate::classical::lagrangian::{ContactLagrangianSystem, ContactTrajectory, Dissipation, DissipationForm, Lagrangian};
use crate::classical::linear::{
    bivector_span_dimension, hamiltonianity_criterion, linear_flow_exact, representative_matrix, HamiltonianityVerdict,
    LagrangianVerdict, LinearSecondOrderSystem,
};
use crate::contact::{ContactChart, Polynomial, ScalarField};
use crate::gkls::{self, Flow, GklsModel};
use crate::linalg::{self, trace_product};
use crate::pure_state::{self as ps, GeneratorPair, HilbertPoint, SphereChart, SpherePoint};
use crate::{sample, CMatrix, Complex64, RMatrix, RVector, Result};

/// Outcome of one invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub detail: Option<String>,
}

impl Check {
    /// Passes when `residual ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self { name: name.into(), passed: residual <= tolerance, residual, tolerance, detail: None }
    }

    /// A yes/no property, with residual 0 or 1.
    pub fn holds(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: ok,
            residual: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            detail: Some(detail.into()),
        }
    }

    fn from_result(name: &str, tolerance: f64, r: Result<f64>) -> Self {
        match r {
            Ok(v) => Self::at_most(name, v, tolerance),
            Err(e) => Self {
                name: name.into(),
                passed: false,
                residual: f64::NAN,
                tolerance,
                detail: Some(e.to_string()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

type SuiteFn = fn(u64) -> SuiteReport;

/// All suites, sorted by name.
pub const SUITES: &[(&str, SuiteFn)] = &[
    ("algebra-core", algebra_suite),
    ("classical-contact", classical_suite),
    ("contact-geometry", contact_suite),
    ("gkls-dynamics", gkls_suite),
    ("pure-state-contact", pure_state_suite),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(n, _)| *n).collect()
}

pub fn run_suite(name: &str, seed: u64) -> Option<SuiteReport> {
    SUITES.iter().find(|(n, _)| *n == name).map(|(_, f)| f(seed))
}

fn worst<I: IntoIterator<Item = Result<f64>>>(it: I) -> Result<f64> {
    let mut w = 0.0f64;
    for r in it {
        let v = r?;
        if v.is_nan() {
            return Ok(f64::NAN);
        }
        w = w.max(v);
    }
    Ok(w)
}

fn algebra_suite(seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let bases: Vec<SuBasis> = (2..5).map(|n| SuBasis::new(n).expect("n >= 2")).collect();

    let mut ortho = 0.0f64;
    let mut traceless = 0.0f64;
    let mut sym = 0.0f64;
    for b in &bases {
        for (j, tj) in b.tau().iter().enumerate() {
            traceless = traceless.max(linalg::trace(tj).norm());
            for (k, tk) in b.tau().iter().enumerate() {
                let want = if j == k { 1.0 } else { 0.0 };
                ortho = ortho.max((trace_product(tj, tk) - Complex64::new(want, 0.0)).norm());
            }
        }
        let m = b.len();
        for l in 0..m {
            for j in 0..m {
                for k in 0..m {
                    sym = sym.max((b.c().get(l, j, k) + b.c().get(l, k, j)).abs());
                    sym = sym.max((b.d().get(l, j, k) - b.d().get(l, k, j)).abs());
                }
            }
        }
    }
    checks.push(Check::at_most("basis orthonormality", ortho, 1e-12));
    checks.push(Check::at_most("basis tracelessness", traceless, 1e-12));
    checks.push(Check::at_most("c antisymmetric, d symmetric", sym, 1e-12));
    let jac = bases.iter().map(|b| b.jacobi_residual()).fold(0.0, f64::max);
    checks.push(Check::at_most("Jacobi identity for c (n = 2, 3, 4)", jac, 1e-10));

    let q = &bases[0];
    let root2 = 2f64.sqrt();
    let eps = |j: usize, k: usize, l: usize| -> f64 {
        match (j, k, l) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
            _ => 0.0,
        }
    };
    let mut qubit = 0.0f64;
    for l in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                qubit = qubit.max((q.c().get(l, j, k) + root2 * eps(j, k, l)).abs());
                qubit = qubit.max(q.d().get(l, j, k).abs());
            }
        }
    }
    checks.push(Check::at_most("qubit constants c = -sqrt2 eps, d = 0", qubit, 1e-12));

    let mut round = 0.0f64;
    let mut affine = 0.0f64;
    for b in &bases {
        let n = b.dim();
        for _ in 0..100 {
            let a = sample::trace_one_hermitian(n, &mut rng);
            let x = b.to_coherence_vector(&a).expect("trace one");
            let back = b.from_coherence_vector(&x).expect("length matches");
            round = round.max(linalg::max_abs((back - &a).iter().map(|z| z.norm())));
            let op = sample::hermitian(n, &mut rng);
            let e = b.expectation(&op, &x).expect("dimensions match");
            affine = affine.max((e - trace_product(&op, &a).re).abs());
        }
    }
    checks.push(Check::at_most("coherence-vector round trip", round, 1e-12));
    checks.push(Check::at_most("expectation is affine in x", affine, 1e-12));
    SuiteReport { suite: "algebra-core", checks }
}

fn random_model(basis: &Arc<SuBasis>, jumps: usize, rng: &mut ChaCha8Rng) -> GklsModel {
    let n = basis.dim();
    let h = sample::hermitian(n, rng);
    let js = (0..jumps).map(|_| sample::ginibre(n, rng) * Complex64::new(0.5, 0.0)).collect();
    GklsModel::with_basis(Arc::clone(basis), h, js).expect("valid model")
}

fn gkls_suite(seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let bases: Vec<Arc<SuBasis>> = (2..4).map(|n| Arc::new(SuBasis::new(n).expect("n >= 2"))).collect();

    let (mut tr, mut fit, mut dec, mut sum, mut tangent) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for basis in &bases {
        let n = basis.dim();
        for k in 0..100 {
            let m = random_model(basis, k % 4, &mut rng);
            let rho = sample::density_matrix(n, &mut rng);
            tr = tr.max(linalg::trace(&m.apply_generator(&rho).expect("dims")).norm());
            let xi = sample::trace_one_hermitian(n, &mut rng);
            let x = basis.to_coherence_vector(&xi).expect("trace one");
            let direct = basis.components(&m.apply_generator(&xi).expect("dims")).expect("dims").1;
            fit = fit.max((m.field(&x) - direct).amax());
            let d = m.decompose();
            dec = dec.max((&d.h_mat - &d.v_mat + &d.k_mat - m.a()).amax()).max((&d.b - m.b()).amax());
            sum = sum.max((d.components(&x).total() - m.field(&x)).amax());
            if k < 10 {
                let xr = basis.to_coherence_vector(&rho).expect("trace one");
                let before = linalg::hermitian_eigenvalues(&rho);
                let moved = basis.from_coherence_vector(&(&xr + &d.h_mat * &xr * 1e-5)).expect("dims");
                let after = linalg::hermitian_eigenvalues(&moved);
                tangent = tangent.max(linalg::max_abs(before.iter().zip(&after).map(|(a, b)| a - b)));
            }
        }
    }
    checks.push(Check::at_most("generator is trace preserving", tr, 1e-10));
    checks.push(Check::at_most("affine field reproduces generator", fit, 1e-10));
    checks.push(Check::at_most("A = H - V + K and B decomposition", dec, 1e-12));
    checks.push(Check::at_most("X_H - Y_V + Z_K = Ax + B", sum, 1e-12));
    checks.push(Check::at_most("H x tangent to isospectral orbit (eps = 1e-5)", tangent, 1e-8));

    let basis3 = &bases[1];
    let unitary = random_model(basis3, 0, &mut rng);
    let rho0 = sample::density_matrix(3, &mut rng);
    let spec = unitary.integrate(&rho0, 10.0, 1e-3).map(|t| {
        let s0 = &t.diagnostics[0].spectrum;
        t.diagnostics
            .iter()
            .map(|d| linalg::max_abs(d.spectrum.iter().zip(s0).map(|(a, b)| a - b)))
            .fold(0.0, f64::max)
    });
    checks.push(Check::from_result("spectrum invariance without jumps (t = 10)", 1e-8, spec));

    let open = random_model(basis3, 2, &mut rng);
    let psi = sample::unit_vector(3, &mut rng);
    let pure = &psi * psi.adjoint();
    let rank = open.integrate_flow(Flow::HamiltonianGradient, &pure, 5.0, 1e-3).map(|t| {
        t.diagnostics.iter().filter(|d| d.rank != 1).count() as f64
    });
    checks.push(Check::from_result("X_H - Y_V flow keeps rank of pure states", 0.0, rank));
    let positivity = open.integrate(&rho0, 5.0, 1e-3).map(|t| {
        t.diagnostics.iter().map(|d| (-d.min_eigenvalue).max(0.0)).fold(0.0, f64::max)
    });
    checks.push(Check::from_result("full flow keeps min eigenvalue >= -1e-8", 1e-8, positivity));
    let x0 = basis3.to_coherence_vector(&rho0).expect("trace one");
    let oracle = open.integrate(&rho0, 2.0, 1e-3).map(|t| {
        t.times
            .iter()
            .zip(&t.points)
            .map(|(s, x)| (x - gkls::affine_flow_exact(open.a(), open.b(), &x0, *s)).amax())
            .fold(0.0, f64::max)
    });
    checks.push(Check::from_result("RK4 vs matrix-exponential affine flow", 1e-8, oracle));

    let [s1, _, _] = algebra::pauli();
    let plus = (CMatrix::identity(2, 2) + &s1) * Complex64::new(0.5, 0.0);
    let phase = worst([0.5, 1.0, 2.0].map(|gamma| -> Result<f64> {
        let m = GklsModel::phase_damping(gamma)?;
        let x0 = m.basis().to_coherence_vector(&plus)?;
        let t = m.integrate(&plus, 5.0, 1e-3)?;
        Ok(t.times
            .iter()
            .zip(&t.points)
            .map(|(s, x)| (x - gkls::phase_damping_exact(gamma, &x0, *s)).amax())
            .fold(0.0, f64::max))
    }));
    checks.push(Check::from_result("phase damping matches closed form", 1e-6, phase));

    let bracket = (|| -> Result<f64> {
        let m = GklsModel::phase_damping(1.0)?;
        let x = RVector::from_vec(vec![0.1, -0.2, 0.3]);
        let lam = m.lie_poisson(&x);
        let mut w = 0.0f64;
        for j in 0..3 {
            for k in 0..3 {
                w = w.max((m.pulled_back_bracket(j, k, 0.0, &x)? - lam[(j, k)]).abs());
            }
        }
        Ok(w)
    })();
    checks.push(Check::from_result("transported bracket at tau = 0 is c x", 1e-15, bracket));
    let contraction = GklsModel::phase_damping(1.0).and_then(|m| {
        m.bracket_asymptotics(0, 1, &RVector::from_vec(vec![0.0, 0.0, 0.3]), true)
    });
    checks.push(match contraction {
        Ok(a) => Check::holds("phase damping contracts the (1,2) bracket", a == gkls::Asymptotic::Vanishing, format!("{a:?}")),
        Err(e) => Check::holds("phase damping contracts the (1,2) bracket", false, e.to_string()),
    });
    SuiteReport { suite: "gkls-dynamics", checks }
}

fn random_pair(n: usize, rng: &mut ChaCha8Rng) -> GeneratorPair {
    GeneratorPair::new(sample::hermitian(n, rng), sample::hermitian(n, rng)).expect("Hermitian")
}

fn pure_state_suite(seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let amb = ps::AmbientTensors::new(3);
    checks.push(Check::at_most("Kahler compatibility g = J^T omega", amb.compatibility_residual(), 1e-14));

    let (mut res, mut reeb, mut tangency, mut degeneracy, mut rank_fail) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0usize);
    let (mut brackets, mut proj) = (0.0f64, 0.0f64);
    for n in [2usize, 3] {
        for k in 0..200 {
            let pair = random_pair(n, &mut rng);
            let p = SpherePoint::new(sample::unit_vector(n, &mut rng)).expect("unit");
            match ps::contact_residuals(&pair, &p) {
                Ok(r) => res = res.max(r.max()),
                Err(_) => res = f64::NAN,
            }
            let (r1, r2) = ps::reeb_residuals(&p);
            reeb = reeb.max(r1).max(r2);
            let z = p.chart();
            for v in [ps::hamiltonian_field(&pair.a, &p), ps::gradient_field(&pair.b, &p), ps::phase_field(&p)] {
                tangency = tangency.max(z.dot(&v).abs());
            }
            let w = ps::pullback_omega0(&p);
            degeneracy = degeneracy
                .max((w.transpose() * ps::dilation_field(&p)).amax())
                .max((w.transpose() * ps::phase_field(&p)).amax());
            if ps::contact_volume_rank(&p) != 2 * n {
                rank_fail += 1;
            }
            if k < 20 {
                let scaled = HilbertPoint::new(p.psi() * Complex64::new(1.7, 0.0)).expect("nonzero");
                let (b1, b2) = ps::bracket_residuals(&pair.a, &pair.b, &scaled);
                brackets = brackets.max(b1).max(b2);
                proj = proj.max(ps::projectability_residual(&pair.b, &scaled).unwrap_or(f64::NAN));
            }
        }
    }
    checks.push(Check::at_most("contact equations for Z = X_a + Y0_b", res, 1e-9));
    checks.push(Check::at_most("Reeb identities eta0(Gamma) = 1, omega0 Gamma = 0", reeb, 1e-12));
    checks.push(Check::at_most("tangency dr(X_a), dr(Y0_b), dr(Gamma)", tangency, 1e-12));
    checks.push(Check::at_most("omega0 annihilates Delta and Gamma", degeneracy, 1e-12));
    checks.push(Check::holds("contact volume rank 2n", rank_fail == 0, format!("{rank_fail} failing points")));
    checks.push(Check::at_most("Poisson and symmetric bracket identities", brackets, 1e-12));
    checks.push(Check::at_most("[Gamma, Y0_b] = 0", proj, 1e-9));

    let flow = worst((0..4).map(|k| -> Result<f64> {
        let n = 2 + k % 2;
        let pair = random_pair(n, &mut rng);
        let p0 = SpherePoint::new(sample::unit_vector(n, &mut rng))?;
        let traj = ps::integrate_sphere_flow(&pair, &p0, 5.0, 1e-3, false)?;
        Ok(traj
            .times
            .iter()
            .zip(&traj.states)
            .map(|(t, psi)| (psi - ps::sphere_flow_exact(&pair, p0.psi(), *t)).camax())
            .fold(0.0, f64::max))
    }));
    checks.push(Check::from_result("sphere flow vs normalized exponential", 1e-7, flow));

    let cross = (|| -> Result<f64> {
        let pair = random_pair(3, &mut rng);
        let model = ps::matched_gkls(&pair)?;
        let p0 = SpherePoint::new(sample::unit_vector(3, &mut rng))?;
        let rho0 = p0.psi() * p0.psi().adjoint();
        let q = ps::integrate_sphere_flow(&pair, &p0, 5.0, 1e-3, false)?;
        let g = model.integrate_flow(Flow::HamiltonianGradient, &rho0, 5.0, 1e-3)?;
        worst(q.states.iter().zip(&g.points).map(|(psi, x)| {
            Ok((ps::project_to_bloch(model.basis(), &HilbertPoint::new(psi.clone())?)? - x).amax())
        }))
    })();
    checks.push(Check::from_result("Bloch projection of sphere flow = GKLS X_H - Y_V flow", 1e-6, cross));

    let converge = (|| -> Result<f64> {
        let [_, _, s3] = algebra::pauli();
        let pair = GeneratorPair::new(CMatrix::zeros(2, 2), s3)?;
        let p0 = SpherePoint::new(sample::unit_vector(2, &mut rng))?;
        let traj = ps::integrate_sphere_flow(&pair, &p0, 20.0, 1e-3, false)?;
        let end = HilbertPoint::new(traj.states.last().expect("nonempty").clone())?;
        let x = ps::project_to_bloch(&SuBasis::new(2)?, &end)?;
        Ok((x - RVector::from_vec(vec![0.0, 0.0, FRAC_1_SQRT_2])).norm())
    })();
    checks.push(Check::from_result("gradient flow reaches dominant eigenvector", 1e-6, converge));
    SuiteReport { suite: "pure-state-contact", checks }
}

fn contact_suite(seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let chart = ContactChart::standard(1);
    let point = |rng: &mut ChaCha8Rng| RVector::from_fn(3, |_, _| rng.random_range(-1.0..1.0));

    let reeb = chart.reeb_field(&point(&mut rng)).map(|xi| (xi - RVector::from_vec(vec![0.0, 0.0, 1.0])).amax());
    checks.push(Check::from_result("standard chart Reeb field is d/dS", 1e-14, reeb));

    let (mut eta, mut anti, mut hom, mut alpha, mut vol, mut one) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut failures = Vec::new();
    for k in 0..100 {
        let f = Polynomial::random(3, 3, 4, &mut rng).to_field();
        let g = Polynomial::random(3, 3, 4, &mut rng).to_field();
        let x = point(&mut rng);
        let r = (|| -> Result<()> {
            let gamma = chart.contact_hamiltonian_field(&f, &x)?;
            eta = eta.max((chart.eta(&x).dot(&gamma) - f.value(&x)).abs());
            let fg = chart.jacobi_bracket(&f, &g, &x)?;
            anti = anti.max((fg + chart.jacobi_bracket(&g, &f, &x)?).abs());
            vol = vol.max((chart.jacobi_bracket_volume_form(&f, &g, &x)? - fg).abs() / (1.0 + fg.abs()));
            let v = chart.generalized_contact_field(&f, &f.gradient(&x), &x)?;
            alpha = alpha.max((v - chart.reeb_field(&x)? * f.value(&x)).amax());
            let r1 = chart.contact_hamiltonian_field(&ScalarField::constant(1.0), &x)?;
            one = one.max((r1 - chart.reeb_field(&x)?).amax());
            if k < 50 {
                hom = hom.max(chart.homomorphism_residual(&f, &g, &x)?);
            }
            Ok(())
        })();
        if let Err(e) = r {
            failures.push(e.to_string());
        }
    }
    checks.push(Check::holds("all solves non-degenerate", failures.is_empty(), failures.join("; ")));
    checks.push(Check::at_most("eta(Gamma_F) = F", eta, 1e-10));
    checks.push(Check::at_most("Jacobi bracket antisymmetry", anti, 1e-10));
    checks.push(Check::at_most("volume-form bracket agrees (dim 3)", vol, 1e-8));
    checks.push(Check::at_most("alpha = dF gives F xi", alpha, 1e-12));
    checks.push(Check::at_most("F = 1 gives the Reeb field", one, 1e-10));
    checks.push(Check::at_most("homomorphism [Gamma_F, Gamma_G] = Gamma_[F,G]", hom, 1e-5));

    let exact = ContactChart::standard(2).exactness_residual(&RVector::from_fn(5, |_, _| rng.random_range(-1.0..1.0)));
    checks.push(Check::from_result("exact chart omega = d eta", 1e-12, exact));

    let cond = (|| -> Result<f64> {
        let x = point(&mut rng);
        let xi = chart.reeb_field(&x)?;
        let perturbed = ContactChart::new(
            3,
            {
                let c = chart.clone();
                move |y| c.eta(y)
            },
            {
                let c = chart.clone();
                move |y| c.omega(y)
            },
        )?;
        let moved = perturbed.field_from_differential(&x, 1.0 + 1e-12, &RVector::zeros(3))?;
        Ok((moved - xi).amax())
    })();
    checks.push(Check::from_result("Reeb solve conditioning (1e-12 perturbation)", 1e-8, cond));

    let sphere = (|| -> Result<f64> {
        let pair = random_pair(2, &mut rng);
        let p = SpherePoint::new(sample::unit_vector(2, &mut rng))?;
        let sc = SphereChart::new(&p)?;
        let u0 = RVector::zeros(3);
        let xi = sc.chart.reeb_field(&u0)?;
        let v = sc.chart.generalized_contact_field(&sc.hamiltonian(&pair.a), &sc.alpha(&pair.b, &u0), &u0)?;
        Ok((&sc.frame * xi - ps::phase_field(&p)).amax().max((&sc.frame * v - ps::contact_field(&pair, &p)).amax()))
    })();
    checks.push(Check::from_result("sphere chart: Reeb = Gamma, generalized field = Z", 1e-9, sphere));
    SuiteReport { suite: "contact-geometry", checks }
}

fn classical_suite(seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let sys = LinearSecondOrderSystem::coupled_damped_oscillators(1.0, 2.0, 0.3, 0.7, 0.1, 0.2);
    let g = representative_matrix(&sys).expect("unit mass");
    let want = RMatrix::from_row_slice(4, 4, &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, -1.0, -0.1, -0.3, -0.2, -0.1, -4.0, -0.2, -0.7]);
    checks.push(Check::at_most("representative matrix block form", (&g - want).amax(), 1e-12));
    let report = hamiltonianity_criterion(&g).expect("even size");
    checks.push(Check::holds(
        "damped oscillators rejected by Tr G = -(g1 + g2)",
        report.verdict == HamiltonianityVerdict::NotHamiltonian && (report.odd_traces[0] + 1.0).abs() < 1e-12,
        format!("Tr G = {}", report.odd_traces[0]),
    ));
    let products = (0..50)
        .map(|k| {
            let d = 2 * (1 + k % 3);
            let gm = sample::antisymmetric(d, &mut rng) * sample::symmetric(d, &mut rng);
            hamiltonianity_criterion(&gm).map(|r| r.max_relative_trace()).unwrap_or(f64::NAN)
        })
        .fold(0.0, f64::max);
    checks.push(Check::at_most("odd traces of antisymmetric x symmetric", products, 1e-10));
    let span = bivector_span_dimension(&g).expect("second order");
    checks.push(Check::holds(
        "bivector span maximal (6) for damped oscillators",
        span.dim == 6 && span.verdict == LagrangianVerdict::NoLagrangian,
        format!("dim {}", span.dim),
    ));
    let free = representative_matrix(&LinearSecondOrderSystem::coupled_damped_oscillators(1.0, 2.0, 0.0, 0.0, 0.0, 0.0))
        .expect("unit mass");
    let free_span = bivector_span_dimension(&free).expect("second order");
    checks.push(Check::holds(
        "bivector span below 6 for free oscillators",
        free_span.dim < 6 && free_span.lagrangian_possible(),
        format!("dim {}", free_span.dim),
    ));

    let single = (|| -> Result<f64> {
        let (r, l, c) = (0.2, 1.0, 1.0);
        let t = rlc_single(r, l, c)?.integrate(&RVector::from_vec(vec![1.0, 0.0, 0.0]), 10.0, 1e-3)?;
        Ok(t.times
            .iter()
            .zip(&t.states)
            .map(|(s, y)| {
                let (i, di) = rlc_underdamped_exact(r, l, c, 1.0, 0.0, *s).expect("underdamped");
                (y[0] - i).abs().max((y[1] - di).abs())
            })
            .fold(0.0, f64::max))
    })();
    checks.push(Check::from_result("single RLC vs closed form", 1e-6, single));

    let coupled = (|| -> Result<f64> {
        let args = (1.0, 2.0, 0.5, 1.5, 0.2, 0.3, 0.1);
        let sys = rlc_coupled(args.0, args.1, args.2, args.3, args.4, args.5, args.6)?;
        let gl = representative_matrix(&rlc_coupled_linear(args.0, args.1, args.2, args.3, args.4, args.5, args.6)?)?;
        let x0 = RVector::from_vec(vec![1.0, -0.5, 0.2, 0.1, 0.0]);
        let t = sys.integrate(&x0, 5.0, 1e-3)?;
        let xi0 = x0.rows(0, 4).into_owned();
        Ok(t.times
            .iter()
            .zip(&t.states)
            .map(|(s, y)| (y.rows(0, 4) - linear_flow_exact(&gl, &xi0, *s)).amax())
            .fold(0.0, f64::max))
    })();
    checks.push(Check::from_result("coupled RLC contact flow vs linear flow", 1e-6, coupled));

    let decouple = (|| -> Result<f64> {
        let sys = rlc_coupled(1.0, 2.0, 0.5, 1.5, 0.2, 0.3, 0.0)?;
        let f1 = sys.field(&RVector::from_vec(vec![0.0, 1.0, 0.0, 0.5, 0.0]))?;
        let f2 = sys.field(&RVector::from_vec(vec![1.0, 0.0, 0.5, 0.0, 0.0]))?;
        Ok(f1[2].abs().max(f2[3].abs()))
    })();
    checks.push(Check::from_result("R -> 0 decouples the loops", 1e-12, decouple));

    let friction = (|| -> Result<(f64, f64)> {
        let gamma = 0.5;
        let t = ContactLagrangianSystem::friction(gamma).integrate(&RVector::from_vec(vec![0.0, 1.0, 0.0]), 10.0, 1e-3)?;
        let e0 = t.lagrangian_energy[0];
        let drift = t.lagrangian_energy.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max);
        let rate = ContactTrajectory::stencil_rate(&t.mechanical_energy, 1e-3)
            .into_iter()
            .map(|(i, d)| (d + gamma * t.states[i][1].powi(2)).abs())
            .fold(0.0, f64::max);
        Ok((drift, rate))
    })();
    match friction {
        Ok((drift, rate)) => {
            checks.push(Check::at_most("friction Lagrangian energy conserved", drift, 1e-8));
            checks.push(Check::at_most("friction dE_mech/dt = -gamma v^2", rate, 1e-6));
        }
        Err(e) => checks.push(Check::holds("friction system", false, e.to_string())),
    }

    let energy = (|| -> Result<f64> {
        let newton = Lagrangian::new(
            1,
            |q, v| 0.5 * v[0] * v[0] - 0.25 * q[0].powi(4),
            |q, _| RVector::from_element(1, -q[0].powi(3)),
            |_, v| v.clone(),
            |_, _| RMatrix::identity(1, 1),
            |_, _| RMatrix::zeros(1, 1),
        );
        let sys = ContactLagrangianSystem::new(newton, Dissipation::linear(0.3), DissipationForm::CaldirolaKanai);
        let t = sys.integrate(&RVector::from_vec(vec![0.5, 0.2, 0.0]), 5.0, 1e-3)?;
        Ok(ContactTrajectory::stencil_rate(&t.lagrangian_energy, 1e-3)
            .into_iter()
            .map(|(i, d)| (d - t.energy_rate[i]).abs() / (1.0 + d.abs()))
            .fold(0.0, f64::max))
    })();
    checks.push(Check::from_result("energy-rate identity", 1e-6, energy));

    let proj_lin = rlc_single(0.2, 1.0, 1.0).map(|s| s.projectability().projectable).unwrap_or(false);
    let proj_sq = ContactLagrangianSystem::new(
        Lagrangian::friction(1.0),
        Dissipation::new(|s| s * s, |s| 2.0 * s),
        DissipationForm::None,
    )
    .projectability()
    .projectable;
    checks.push(Check::holds("projectability: h = RS yes, h = S^2 no", proj_lin && !proj_sq, format!("{proj_lin} {proj_sq}")));
    SuiteReport { suite: "classical-contact", checks }
}
