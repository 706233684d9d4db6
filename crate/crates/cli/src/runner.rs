//! Executes a scenario, streaming its trajectory to CSV and collecting
//! invariant checks into a [`RunReport`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use gkls_contact::algebra::ensure_density;
use gkls_contact::certify::{self, SuiteReport};
use gkls_contact::classical::circuits::{rlc_coupled, rlc_coupled_linear, rlc_single, rlc_underdamped_exact};
use gkls_contact::classical::lagrangian::{ContactTrajectory, RayleighFunction};
use gkls_contact::classical::linear::{linear_flow_exact, representative_matrix};
use gkls_contact::classical::{
    bivector_span_dimension, hamiltonianity_criterion, ContactLagrangianSystem, Dissipation, DissipationForm, Lagrangian,
    LinearSecondOrderSystem,
};
use gkls_contact::gkls::{self, Flow, GklsModel};
use gkls_contact::pure_state::{self as ps, GeneratorPair, HilbertPoint, SpherePoint};
use gkls_contact::{ode, CMatrix, CVector, RVector};
use log::{info, warn};
use serde::Serialize;
use serde_json::json;

use crate::config::{
    self, CircuitParams, CircuitSpec, ChecksParams, DissipationSpec, FlowSpec, GklsModelSpec, GklsParams,
    LagrangianParams, Parameters, PureStateParams, ScenarioConfig, SystemSpec,
};
use crate::CliError;

pub const DEFAULT_T_END: f64 = 5.0;
pub const DEFAULT_SEED: u64 = 2024;

const CLOSED_FORM_TOL: f64 = 1e-6;
const TRACE_TOL: f64 = 1e-12;
const POSITIVITY_TOL: f64 = 1e-8;
const SPECTRUM_TOL: f64 = 1e-8;
const SPHERE_ORACLE_TOL: f64 = 1e-7;
const NORM_TOL: f64 = 1e-9;
const CONTACT_TOL: f64 = 1e-9;
const PROJECTION_TOL: f64 = 1e-6;
const CONVERGENCE_TOL: f64 = 1e-6;
const ENERGY_RATE_TOL: f64 = 1e-6;
const CONSERVATION_TOL: f64 = 1e-8;
const DECOUPLING_TOL: f64 = 1e-12;
const TRACE_IDENTITY_TOL: f64 = 1e-12;
/// Contact residuals are sampled every this many steps.
const CONTACT_STRIDE: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Invariant {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Invariant {
    fn at_most(name: &str, residual: f64, tolerance: f64) -> Self {
        Self { name: name.into(), passed: residual <= tolerance, residual, tolerance, detail: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    InvariantFailure,
    NumericalFailure,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub id: String,
    pub kind: config::Kind,
    pub status: Status,
    pub wall_time_s: f64,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub invariants: Vec<Invariant>,
    pub findings: BTreeMap<String, serde_json::Value>,
    pub outputs: Vec<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::InvariantFailure => 1,
            Status::NumericalFailure => 3,
        }
    }
}

/// Command-line overrides.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
}

/// CSV accumulated in memory and written once, so a failed run still leaves
/// every row produced before the failure.
struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    fn new() -> Self {
        Self { text: String::new(), columns: 0 }
    }

    fn header<S: AsRef<str>>(&mut self, cols: &[S]) {
        self.columns = cols.len();
        let line: Vec<&str> = cols.iter().map(|c| c.as_ref()).collect();
        self.text.push_str(&line.join(","));
        self.text.push('\n');
    }

    fn row(&mut self, values: &[f64]) {
        debug_assert_eq!(values.len(), self.columns);
        for (k, v) in values.iter().enumerate() {
            if k > 0 {
                self.text.push(',');
            }
            // 17 significant digits
            write!(self.text, "{v:.16e}").expect("writing to a String");
        }
        self.text.push('\n');
    }

    fn text_row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }
}

struct Outcome {
    csv: Csv,
    invariants: Vec<Invariant>,
    findings: BTreeMap<String, serde_json::Value>,
}

impl Outcome {
    fn check(&mut self, name: &str, residual: f64, tolerance: f64) {
        self.invariants.push(Invariant::at_most(name, residual, tolerance));
    }

    fn note(&mut self, key: &str, value: serde_json::Value) {
        self.findings.insert(key.into(), value);
    }
}

#[derive(Debug, Clone, Copy)]
struct Timing {
    t_end: f64,
    dt: f64,
}

fn usage(e: gkls_contact::Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn numerical(e: gkls_contact::Error) -> CliError {
    CliError::Numerical(e.to_string())
}

fn max_of<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    // NaN propagates so that it fails a tolerance check
    it.into_iter().fold(0.0, |m: f64, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
}

/// Runs `cfg`, writing `<stem>.csv` and `<stem>.report.json` into the output
/// directory. Usage errors are returned before anything is written;
/// numerical failures produce a report with [`Status::NumericalFailure`].
pub fn run(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunReport, CliError> {
    let params = cfg.validate()?;
    for (name, v) in [("--dt", opts.dt), ("--t-end", opts.t_end)] {
        if let Some(x) = v {
            if !(x > 0.0) || !x.is_finite() {
                return Err(CliError::Usage(format!("{name} must be positive, got {x}")));
            }
        }
    }
    let timing = Timing {
        t_end: opts.t_end.or(cfg.t_end).unwrap_or(DEFAULT_T_END),
        dt: opts.dt.or(cfg.dt).unwrap_or(ode::DEFAULT_DT),
    };
    let dir = opts.out_dir.clone().or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    let stem = cfg.output.stem.clone().unwrap_or_else(|| cfg.id.clone());
    info!("running {} ({:?}) with dt = {}, t_end = {}", cfg.id, cfg.kind, timing.dt, timing.t_end);

    let start = Instant::now();
    let mut out = Outcome { csv: Csv::new(), invariants: Vec::new(), findings: BTreeMap::new() };
    let result = match &params {
        Parameters::Gkls(p) => exec_gkls(p, timing, &mut out),
        Parameters::PureState(p) => exec_pure_state(p, timing, &mut out),
        Parameters::ContactLagrangian(p) => exec_lagrangian(p, timing, &mut out),
        Parameters::Circuit(p) => exec_circuit(p, timing, &mut out),
        Parameters::Checks(p) => exec_checks(p, &mut out),
    };
    let error = match result {
        Ok(()) => None,
        Err(CliError::Numerical(msg)) => {
            warn!("{}: numerical failure: {msg}", cfg.id);
            Some(msg)
        }
        Err(e) => return Err(e),
    };
    let wall = start.elapsed().as_secs_f64();

    std::fs::create_dir_all(&dir)?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let report_path = dir.join(format!("{stem}.report.json"));
    std::fs::write(&csv_path, &out.csv.text)?;

    let status = if error.is_some() {
        Status::NumericalFailure
    } else if out.invariants.iter().all(|i| i.passed) {
        Status::Pass
    } else {
        Status::InvariantFailure
    };
    let checks_kind = matches!(params, Parameters::Checks(_));
    let report = RunReport {
        id: cfg.id.clone(),
        kind: cfg.kind,
        status,
        wall_time_s: wall,
        dt: (!checks_kind).then_some(timing.dt),
        t_end: (!checks_kind).then_some(timing.t_end),
        invariants: out.invariants,
        findings: out.findings,
        outputs: vec![csv_path, report_path.clone()],
        error,
    };
    write_report(&report, &report_path)?;
    info!("{} finished in {wall:.3} s: {:?}", cfg.id, report.status);
    Ok(report)
}

fn write_report(report: &RunReport, path: &Path) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn exec_gkls(p: &GklsParams, t: Timing, out: &mut Outcome) -> Result<(), CliError> {
    let model = match &p.model {
        GklsModelSpec::PhaseDamping { gamma } => GklsModel::phase_damping(*gamma),
        GklsModelSpec::AmplitudeDamping { gamma } => GklsModel::amplitude_damping(*gamma),
        GklsModelSpec::Custom { hamiltonian, jumps } => {
            let h = config::complex_matrix("hamiltonian", hamiltonian)?;
            let js = jumps
                .iter()
                .enumerate()
                .map(|(k, j)| config::complex_matrix(&format!("jumps[{k}]"), j))
                .collect::<Result<Vec<_>, _>>()?;
            GklsModel::new(h, js)
        }
    }
    .map_err(usage)?;
    let rho0 = config::complex_matrix("rho0", &p.rho0)?;
    if rho0.nrows() != model.dim() {
        return Err(CliError::Usage(format!("rho0 is {0}x{0}, model has n = {1}", rho0.nrows(), model.dim())));
    }
    ensure_density(&rho0).map_err(usage)?;
    let flow = match p.flow {
        FlowSpec::Full => Flow::Full,
        FlowSpec::HamiltonianGradient => Flow::HamiltonianGradient,
        FlowSpec::Hamiltonian => Flow::Hamiltonian,
    };

    let m = model.basis().len();
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=m).map(|k| format!("x{k}")));
    cols.extend(["trace", "min_eigenvalue", "rank"].map(String::from));
    out.csv.header(&cols);

    let (mut times, mut points, mut diags) = (Vec::new(), Vec::new(), Vec::new());
    let csv = &mut out.csv;
    let r = model.integrate_flow_observed(flow, &rho0, t.t_end, t.dt, |s, x, d| {
        let mut row = Vec::with_capacity(m + 4);
        row.push(s);
        row.extend(x.iter().copied());
        row.extend([d.trace, d.min_eigenvalue, d.rank as f64]);
        csv.row(&row);
        times.push(s);
        points.push(x.clone());
        diags.push(d.clone());
        Ok(())
    });
    r.map_err(numerical)?;

    out.check("trace", max_of(diags.iter().map(|d| (d.trace - 1.0).abs())), TRACE_TOL);
    out.check("positivity", max_of(diags.iter().map(|d| (-d.min_eigenvalue).max(0.0))), POSITIVITY_TOL);
    let x0 = &points[0];
    let linear = match flow {
        Flow::Full => Some((model.a().clone(), model.b().clone())),
        Flow::Hamiltonian => Some((model.decompose().h_mat, RVector::zeros(m))),
        Flow::HamiltonianGradient => None,
    };
    if let Some((a, b)) = linear {
        let err = max_of(times.iter().zip(&points).map(|(s, x)| (x - gkls::affine_flow_exact(&a, &b, x0, *s)).amax()));
        out.check("affine-flow-oracle", err, CLOSED_FORM_TOL);
    }
    if let (GklsModelSpec::PhaseDamping { gamma }, Flow::Full) = (&p.model, flow) {
        let err = max_of(times.iter().zip(&points).map(|(s, x)| (x - gkls::phase_damping_exact(*gamma, x0, *s)).amax()));
        out.check("phase-damping-closed-form", err, CLOSED_FORM_TOL);
    }
    if model.jumps().is_empty() || flow == Flow::Hamiltonian {
        let s0 = &diags[0].spectrum;
        let err = max_of(diags.iter().flat_map(|d| d.spectrum.iter().zip(s0).map(|(a, b)| (a - b).abs())));
        out.check("spectrum-invariance", err, SPECTRUM_TOL);
    }
    if flow == Flow::HamiltonianGradient && diags[0].rank == 1 {
        let changed = diags.iter().filter(|d| d.rank != 1).count();
        out.check("pure-state-rank", changed as f64, 0.0);
    }
    out.note("n", json!(model.dim()));
    out.note("steps", json!(times.len() - 1));
    out.note("final_coherence_vector", json!(points.last().map(|x| x.as_slice().to_vec())));
    Ok(())
}

fn dominant_eigenvector(b: &CMatrix) -> Result<CVector, CliError> {
    let eig = b.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    if order.len() > 1 && eig.eigenvalues[order[0]] - eig.eigenvalues[order[1]] < 1e-9 {
        return Err(CliError::Usage("expect_convergence needs a simple top eigenvalue of b".into()));
    }
    Ok(eig.eigenvectors.column(order[0]).into_owned())
}

fn exec_pure_state(p: &PureStateParams, t: Timing, out: &mut Outcome) -> Result<(), CliError> {
    let a = config::complex_matrix("a", &p.a)?;
    let b = config::complex_matrix("b", &p.b)?;
    if a.nrows() != b.nrows() {
        return Err(CliError::Usage(format!("a is {0}x{0} but b is {1}x{1}", a.nrows(), b.nrows())));
    }
    let n = a.nrows();
    let psi = config::complex_vector(&p.psi0);
    if psi.len() != n {
        return Err(CliError::Usage(format!("psi0 has {} components, expected {n}", psi.len())));
    }
    let pair = GeneratorPair::new(a, b).map_err(usage)?;
    let p0 = SpherePoint::normalized(psi).map_err(usage)?;
    let model = ps::matched_gkls(&pair).map_err(usage)?;
    let target = if p.expect_convergence { Some(dominant_eigenvector(&pair.b)?) } else { None };

    let mut cols = vec!["t".to_string()];
    for k in 1..=n {
        cols.push(format!("re_psi{k}"));
        cols.push(format!("im_psi{k}"));
    }
    cols.extend(["norm", "expect_a", "expect_b"].map(String::from));
    out.csv.header(&cols);

    let (mut times, mut states) = (Vec::new(), Vec::new());
    let csv = &mut out.csv;
    let r = ps::integrate_sphere_flow_observed(&pair, &p0, t.t_end, t.dt, p.renormalize, |s, psi| {
        let point = HilbertPoint::new(psi.clone())?;
        let mut row = vec![s];
        row.extend(psi.iter().flat_map(|z| [z.re, z.im]));
        row.extend([psi.norm(), ps::expectation(&pair.a, &point), ps::expectation(&pair.b, &point)]);
        csv.row(&row);
        times.push(s);
        states.push(psi.clone());
        Ok(())
    });
    r.map_err(numerical)?;

    let oracle = max_of(times.iter().zip(&states).map(|(s, psi)| (psi - ps::sphere_flow_exact(&pair, p0.psi(), *s)).camax()));
    out.check("sphere-flow-oracle", oracle, SPHERE_ORACLE_TOL);
    out.check("norm", max_of(states.iter().map(|psi| (psi.norm() - 1.0).abs())), NORM_TOL);
    let mut contact = 0.0f64;
    for psi in states.iter().step_by(CONTACT_STRIDE) {
        let sp = SpherePoint::normalized(psi.clone()).map_err(numerical)?;
        contact = max_of([contact, ps::contact_residuals(&pair, &sp).map_err(numerical)?.max()]);
    }
    out.check("contact-equations", contact, CONTACT_TOL);

    let rho0 = p0.psi() * p0.psi().adjoint();
    let gk = model.integrate_flow(Flow::HamiltonianGradient, &rho0, t.t_end, t.dt).map_err(numerical)?;
    let mut projection = 0.0f64;
    for (psi, x) in states.iter().zip(&gk.points) {
        let y = ps::project_to_bloch(model.basis(), &HilbertPoint::new(psi.clone()).map_err(numerical)?).map_err(numerical)?;
        projection = max_of([projection, (y - x).amax()]);
    }
    out.check("bloch-projection-consistency", projection, PROJECTION_TOL);

    let last = HilbertPoint::new(states.last().expect("grid is nonempty").clone()).map_err(numerical)?;
    let final_bloch = ps::project_to_bloch(model.basis(), &last).map_err(numerical)?;
    if let Some(v) = target {
        let want = ps::project_to_bloch(model.basis(), &HilbertPoint::new(v).map_err(numerical)?).map_err(numerical)?;
        out.check("dominant-eigenvector", (&final_bloch - want).norm(), CONVERGENCE_TOL);
    }
    out.note("n", json!(n));
    out.note("steps", json!(times.len() - 1));
    out.note("final_bloch_vector", json!(final_bloch.as_slice().to_vec()));
    Ok(())
}

struct ContactRun {
    times: Vec<f64>,
    states: Vec<RVector>,
    lagrangian_energy: Vec<f64>,
    energy_rate: Vec<f64>,
    mechanical_energy: Vec<f64>,
}

fn stream_contact(sys: &ContactLagrangianSystem, state0: &RVector, t: Timing, out: &mut Outcome, labels: (&str, &str)) -> Result<ContactRun, CliError> {
    let n = sys.n();
    let has_mech = sys.mechanical_energy(state0).map_err(usage)?.is_some();
    sys.field(state0).map_err(usage)?;
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=n).map(|k| format!("{}{k}", labels.0)));
    cols.extend((1..=n).map(|k| format!("{}{k}", labels.1)));
    cols.extend(["S", "lagrangian_energy", "energy_rate"].map(String::from));
    if has_mech {
        cols.push("mechanical_energy".into());
    }
    out.csv.header(&cols);

    let mut run = ContactRun {
        times: Vec::new(),
        states: Vec::new(),
        lagrangian_energy: Vec::new(),
        energy_rate: Vec::new(),
        mechanical_energy: Vec::new(),
    };
    let csv = &mut out.csv;
    let left = sys
        .integrate_observed(state0, t.t_end, t.dt, |s, y| {
            let el = sys.lagrangian_energy(y)?;
            let rate = sys.energy_rate(y)?;
            let mut row = vec![s];
            row.extend(y.iter().copied());
            row.extend([el, rate]);
            if let Some(e) = sys.mechanical_energy(y)? {
                row.push(e);
                run.mechanical_energy.push(e);
            }
            csv.row(&row);
            run.times.push(s);
            run.states.push(y.clone());
            run.lagrangian_energy.push(el);
            run.energy_rate.push(rate);
            Ok(())
        })
        .map_err(numerical)?;
    out.note("left_domain_at", json!(left));
    out.note("steps", json!(run.times.len() - 1));
    let proj = sys.projectability();
    out.note("projectable", json!(proj.projectable));
    out.check("energy-rate-identity", energy_rate_residual(&run, t.dt), ENERGY_RATE_TOL);
    Ok(run)
}

fn energy_rate_residual(run: &ContactRun, dt: f64) -> f64 {
    // the stencil needs a uniform grid; drop a shortened final step
    let uniform = run.times.len() - usize::from(shortened(&run.times, dt));
    max_of(
        ContactTrajectory::stencil_rate(&run.lagrangian_energy[..uniform], dt)
            .into_iter()
            .map(|(i, d)| (d - run.energy_rate[i]).abs() / (1.0 + d.abs())),
    )
}

fn exec_lagrangian(p: &LagrangianParams, t: Timing, out: &mut Outcome) -> Result<(), CliError> {
    let finite = |name: &str, v: f64| {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(CliError::Usage(format!("{name} must be finite")))
        }
    };
    match &p.system {
        SystemSpec::Friction { gamma } => {
            let gamma = finite("gamma", *gamma)?;
            let sys = ContactLagrangianSystem::friction(gamma);
            let state0 = config::state_vector("state0", &p.state0, 3)?;
            let run = stream_contact(&sys, &state0, t, out, ("q", "v"))?;
            let e0 = run.lagrangian_energy[0];
            out.check("lagrangian-energy-conservation", max_of(run.lagrangian_energy.iter().map(|e| (e - e0).abs())), CONSERVATION_TOL);
            let uniform = run.mechanical_energy.len().min(run.times.len() - usize::from(shortened(&run.times, t.dt)));
            let rate = max_of(
                ContactTrajectory::stencil_rate(&run.mechanical_energy[..uniform], t.dt)
                    .into_iter()
                    .map(|(i, d)| (d + gamma * run.states[i][1].powi(2)).abs()),
            );
            out.check("mechanical-energy-rate", rate, ENERGY_RATE_TOL);
        }
        SystemSpec::Quadratic { mass, stiffness, dissipation } => {
            let m = config::real_matrix("mass", mass)?;
            let k = config::real_matrix("stiffness", stiffness)?;
            if m.nrows() != k.nrows() {
                return Err(CliError::Usage("mass and stiffness sizes differ".into()));
            }
            let n = m.nrows();
            let (m2, k2) = (m.clone(), k.clone());
            let lag = Lagrangian::quadratic(m, k).map_err(usage)?;
            let (h, form) = match dissipation {
                DissipationSpec::None => (Dissipation::zero(), DissipationForm::None),
                DissipationSpec::CaldirolaKanai { h } => (Dissipation::linear(*h), DissipationForm::CaldirolaKanai),
                DissipationSpec::Rayleigh { h, r } => {
                    let r = config::real_matrix("r", r)?;
                    if r.nrows() != n {
                        return Err(CliError::Usage(format!("r must be {n}x{n}")));
                    }
                    (Dissipation::linear(*h), DissipationForm::Rayleigh(RayleighFunction::quadratic(r)))
                }
            };
            let sys = ContactLagrangianSystem::new(lag, h, form)
                .with_mechanical_energy(move |q, v| 0.5 * v.dot(&(&m2 * v)) + 0.5 * q.dot(&(&k2 * q)));
            let state0 = config::state_vector("state0", &p.state0, 2 * n + 1)?;
            stream_contact(&sys, &state0, t, out, ("q", "v"))?;
        }
        SystemSpec::LinearSecondOrder { mass, damping, stiffness } => {
            let sys = LinearSecondOrderSystem::new(
                config::real_matrix("mass", mass)?,
                config::real_matrix("damping", damping)?,
                config::real_matrix("stiffness", stiffness)?,
            )
            .map_err(usage)?;
            exec_linear(&sys, &p.state0, t, out)?;
        }
        SystemSpec::CoupledDampedOscillators { w1, w2, g1, g2, kappa, delta } => {
            for (name, v) in [("w1", w1), ("w2", w2), ("g1", g1), ("g2", g2), ("kappa", kappa), ("delta", delta)] {
                finite(name, *v)?;
            }
            let sys = LinearSecondOrderSystem::coupled_damped_oscillators(*w1, *w2, *g1, *g2, *kappa, *delta);
            exec_linear(&sys, &p.state0, t, out)?;
        }
    }
    Ok(())
}

fn shortened(times: &[f64], dt: f64) -> bool {
    times.len() > 1 && ((times[times.len() - 1] - times[times.len() - 2]) - dt).abs() > 1e-12
}

fn exec_linear(sys: &LinearSecondOrderSystem, state0: &[f64], t: Timing, out: &mut Outcome) -> Result<(), CliError> {
    let n = sys.n();
    let g = representative_matrix(sys).map_err(usage)?;
    let x0 = config::state_vector("state0", state0, 2 * n)?;

    let report = hamiltonianity_criterion(&g).map_err(usage)?;
    let span = bivector_span_dimension(&g).map_err(usage)?;
    out.note("hamiltonianity", json!(format!("{:?}", report.verdict)));
    out.note("odd_traces", json!(report.odd_traces));
    out.note("bivector_span_dim", json!(span.dim));
    out.note("bivector_span_max_dim", json!(span.max_dim));
    out.note("lagrangian", json!(format!("{:?}", span.verdict)));
    let minv = sys.m.clone().try_inverse().expect("explicit system has an invertible mass matrix");
    let tr = (&minv * &sys.gamma).trace();
    out.check("trace-identity", (g.trace() + tr).abs(), TRACE_IDENTITY_TOL * report.scale.max(1.0));

    let mut cols = vec!["t".to_string()];
    cols.extend((1..=n).map(|k| format!("q{k}")));
    cols.extend((1..=n).map(|k| format!("v{k}")));
    cols.push("mechanical_energy".into());
    out.csv.header(&cols);
    let sym_k = (&sys.omega + sys.omega.transpose()) * 0.5;
    let (mut times, mut points) = (Vec::new(), Vec::new());
    let csv = &mut out.csv;
    ode::integrate(
        |x: &RVector| Ok(&g * x),
        x0.clone(),
        t.t_end,
        t.dt,
        |s, x| {
            let q = x.rows(0, n);
            let v = x.rows(n, n);
            let e = 0.5 * v.dot(&(&sys.m * v)) + 0.5 * q.dot(&(&sym_k * q));
            let mut row = vec![s];
            row.extend(x.iter().copied());
            row.push(e);
            csv.row(&row);
            times.push(s);
            points.push(x.clone());
            Ok(())
        },
    )
    .map_err(numerical)?;
    let err = max_of(times.iter().zip(&points).map(|(s, x)| (x - linear_flow_exact(&g, &x0, *s)).amax()));
    out.check("linear-flow-oracle", err, CLOSED_FORM_TOL);
    out.note("steps", json!(times.len() - 1));
    Ok(())
}

fn exec_circuit(p: &CircuitParams, t: Timing, out: &mut Outcome) -> Result<(), CliError> {
    match &p.circuit {
        CircuitSpec::Single { r, l, c } => {
            let sys = rlc_single(*r, *l, *c).map_err(usage)?;
            let state0 = config::state_vector("state0", p.state0.as_deref().unwrap_or(&[1.0, 0.0, 0.0]), 3)?;
            let run = stream_contact(&sys, &state0, t, out, ("I", "dI"))?;
            let (i0, di0) = (state0[0], state0[1]);
            if rlc_underdamped_exact(*r, *l, *c, i0, di0, 0.0).is_some() {
                let err = max_of(run.times.iter().zip(&run.states).map(|(s, y)| {
                    let (i, di) = rlc_underdamped_exact(*r, *l, *c, i0, di0, *s).expect("underdamped");
                    (y[0] - i).abs().max((y[1] - di).abs())
                }));
                out.check("closed-form", err, CLOSED_FORM_TOL);
            } else {
                out.note("closed_form", json!("not underdamped; no closed form compared"));
            }
            if *r == 0.0 {
                let e0 = run.mechanical_energy[0];
                out.check("lossless-energy", max_of(run.mechanical_energy.iter().map(|e| (e - e0).abs())), CONSERVATION_TOL);
            }
        }
        CircuitSpec::Coupled { l1, l2, c1, c2, r1, r2, r } => {
            let sys = rlc_coupled(*l1, *l2, *c1, *c2, *r1, *r2, *r).map_err(usage)?;
            let lin = rlc_coupled_linear(*l1, *l2, *c1, *c2, *r1, *r2, *r).map_err(usage)?;
            let g = representative_matrix(&lin).map_err(usage)?;
            let state0 = config::state_vector("state0", p.state0.as_deref().unwrap_or(&[1.0, 0.0, 0.0, 0.0, 0.0]), 5)?;
            let run = stream_contact(&sys, &state0, t, out, ("I", "dI"))?;
            let xi0 = state0.rows(0, 4).into_owned();
            let err = max_of(run.times.iter().zip(&run.states).map(|(s, y)| (y.rows(0, 4) - linear_flow_exact(&g, &xi0, *s)).amax()));
            out.check("linear-flow-oracle", err, CLOSED_FORM_TOL);
            let open = rlc_coupled(*l1, *l2, *c1, *c2, *r1, *r2, 0.0).map_err(usage)?;
            let f1 = open.field(&RVector::from_vec(vec![0.0, 1.0, 0.0, 0.5, 0.0])).map_err(numerical)?;
            let f2 = open.field(&RVector::from_vec(vec![1.0, 0.0, 0.5, 0.0, 0.0])).map_err(numerical)?;
            out.check("decoupling", f1[2].abs().max(f2[3].abs()), DECOUPLING_TOL);
        }
    }
    Ok(())
}

/// Runs the certification suites matching `filter` (all when `None`)
/// concurrently, returning the reports sorted by suite name.
pub fn run_checks(filter: Option<&str>, seed: u64) -> Result<Vec<SuiteReport>, CliError> {
    let names: Vec<&str> = certify::suite_names().into_iter().filter(|n| filter.is_none_or(|f| *n == f)).collect();
    if names.is_empty() {
        return Err(CliError::Usage(format!(
            "no suite named {:?}; available: {}",
            filter.unwrap_or_default(),
            certify::suite_names().join(", ")
        )));
    }
    let mut reports: Vec<SuiteReport> = std::thread::scope(|s| {
        let handles: Vec<_> = names
            .iter()
            .map(|name| s.spawn(move || certify::run_suite(name, seed).expect("name comes from the registry")))
            .collect();
        handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
    });
    reports.sort_by_key(|r| r.suite);
    Ok(reports)
}

fn exec_checks(p: &ChecksParams, out: &mut Outcome) -> Result<(), CliError> {
    let seed = p.seed.unwrap_or(DEFAULT_SEED);
    let reports = run_checks(p.filter.as_deref(), seed)?;
    out.csv.header(&["suite", "check", "passed", "residual", "tolerance"]);
    for r in &reports {
        for c in &r.checks {
            out.csv.text_row(&[
                r.suite.to_string(),
                format!("\"{}\"", c.name.replace('"', "\"\"")),
                c.passed.to_string(),
                format!("{:.16e}", c.residual),
                format!("{:.16e}", c.tolerance),
            ]);
            out.invariants.push(Invariant {
                name: format!("{}: {}", r.suite, c.name),
                passed: c.passed,
                residual: c.residual,
                tolerance: c.tolerance,
                detail: c.detail.clone().filter(|d| !d.is_empty()),
            });
        }
    }
    out.note("seed", json!(seed));
    out.note("suites", json!(reports.iter().map(|r| r.suite).collect::<Vec<_>>()));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_seventeen_digits() {
        let mut csv = Csv::new();
        csv.header(&["t", "x"]);
        csv.row(&[0.1, -2.5]);
        assert_eq!(csv.text, "t,x\n1.0000000000000001e-1,-2.5000000000000000e0\n");
    }

    #[test]
    fn nan_fails_tolerance() {
        assert!(max_of([0.0, f64::NAN, 1.0]).is_nan());
        assert!(!Invariant::at_most("x", f64::NAN, 1.0).passed);
    }

    #[test]
    fn checks_filter_unknown_is_usage_error() {
        assert!(matches!(run_checks(Some("nope"), 0), Err(CliError::Usage(_))));
    }

    #[test]
    fn checks_are_sorted() {
        let reports = run_checks(None, 7).unwrap();
        let names: Vec<_> = reports.iter().map(|r| r.suite).collect();
        assert_eq!(names, certify::suite_names());
    }
}
