//! Verification suites: exact algebraic identities on random inputs,
//! statistical checks of the integrator, and the closed-form audit.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Vector2};
use rand_chacha::ChaCha8Rng;

use crate::algebra::random::{random_model, random_plain_model, random_polynomial, random_vector_field};
use crate::algebra::{
    dissipation, hamiltonian_vector_field, liouville_rate, poisson_bracket, rat, Polynomial, VectorField,
};
use crate::catalog::{
    build_dho_model, build_example1_model, build_linear_model, quantum_comparison, LinearDriftDiffusion,
    LinearModelParams, QuantumComparisonParams,
};
use crate::sde::{
    det_j_order_study, exact_linear_moments, path_end, path_rng, simulate_ensemble, strong_order_study,
    IntegratorConfig, SdeError, SdeSystem,
};
use crate::steady::{
    audit_paper_formulas, covariance_at, find_zero_cross_z, zero_z_grid_check, AuditStatus, AuditValue, AuditVerdict,
    SteadyError, AUDIT_TOLERANCE,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Core,
    Theorem1,
    Theorem2,
    Integrator,
    PaperFormulas,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Core => "core",
            Suite::Theorem1 => "theorem1",
            Suite::Theorem2 => "theorem2",
            Suite::Integrator => "integrator",
            Suite::PaperFormulas => "paper-formulas",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "core" => Suite::Core,
            "theorem1" => Suite::Theorem1,
            "theorem2" => Suite::Theorem2,
            "integrator" => Suite::Integrator,
            "paper-formulas" => Suite::PaperFormulas,
            "all" => Suite::All,
            other => return Err(format!("unknown suite `{other}`")),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub trials: usize,
    pub degree: u32,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            trials: 100,
            degree: 4,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Exact,
    Statistical,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub kind: CheckKind,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub audits: Vec<AuditVerdict>,
}

impl VerifyReport {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn discrepancies(&self) -> usize {
        self.audits
            .iter()
            .filter(|a| a.status == AuditStatus::Discrepant)
            .count()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<15} {:<52} {:<6} detail", "suite", "check", "result")?;
        for c in &self.checks {
            let result = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{:<15} {:<52} {:<6} {}", c.suite, c.name, result, c.detail)?;
        }
        if !self.audits.is_empty() {
            writeln!(f)?;
            writeln!(
                f,
                "{:<46} {:<11} {:>12}  printed / oracle",
                "audit item", "status", "max |diff|"
            )?;
            for a in &self.audits {
                writeln!(
                    f,
                    "{:<46} {:<11} {:>12.3e}  {} / {}",
                    a.item, a.status, a.difference, a.paper_value, a.oracle_value
                )?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Sde(#[from] SdeError),
    #[error(transparent)]
    Steady(#[from] SteadyError),
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<VerifyReport, VerifyError> {
    let mut report = VerifyReport::default();
    let all = suite == Suite::All;
    if all || suite == Suite::Core {
        core_suite(opts, &mut report);
    }
    if all || suite == Suite::Theorem1 {
        theorem1_suite(opts, &mut report);
    }
    if all || suite == Suite::Theorem2 {
        theorem2_suite(opts, &mut report);
    }
    if all || suite == Suite::Integrator {
        integrator_suite(opts, &mut report)?;
    }
    if all || suite == Suite::PaperFormulas {
        paper_formula_suite(&mut report)?;
    }
    Ok(report)
}

/// Counts the trials on which `identity` holds.
fn exact_check<F>(report: &mut VerifyReport, suite: &'static str, name: &str, trials: usize, mut identity: F)
where
    F: FnMut(usize) -> bool,
{
    let passes = (0..trials).filter(|&i| identity(i)).count();
    report.checks.push(Check {
        suite,
        name: name.into(),
        kind: CheckKind::Exact,
        passed: passes == trials,
        detail: format!("{passes}/{trials} exact"),
    });
}

fn stat_check(report: &mut VerifyReport, suite: &'static str, name: &str, passed: bool, detail: String) {
    report.checks.push(Check {
        suite,
        name: name.into(),
        kind: CheckKind::Statistical,
        passed,
        detail,
    });
}

fn stream(opts: &VerifyOptions, id: u64) -> ChaCha8Rng {
    path_rng(opts.seed, id)
}

/// Bracket identities on `trials` random triples of degree at most `degree`,
/// and the dissipation law of vector fields.
pub fn core_suite(opts: &VerifyOptions, report: &mut VerifyReport) {
    let (n, d) = (opts.trials, opts.degree);
    let s = "core";
    let mut rng = stream(opts, 1);
    exact_check(report, s, "antisymmetry {f,g} = -{g,f}", n, |_| {
        let (f, g) = (random_polynomial(&mut rng, d), random_polynomial(&mut rng, d));
        poisson_bracket(&f, &g) == -poisson_bracket(&g, &f)
    });
    let mut rng = stream(opts, 2);
    exact_check(report, s, "Leibniz {f,gh} = {f,g}h + g{f,h}", n, |_| {
        let f = random_polynomial(&mut rng, d);
        let g = random_polynomial(&mut rng, d);
        let h = random_polynomial(&mut rng, d);
        poisson_bracket(&f, &(&g * &h)) == &(&poisson_bracket(&f, &g) * &h) + &(&g * &poisson_bracket(&f, &h))
    });
    let mut rng = stream(opts, 3);
    exact_check(report, s, "Jacobi identity", n, |_| {
        let f = random_polynomial(&mut rng, d);
        let g = random_polynomial(&mut rng, d);
        let h = random_polynomial(&mut rng, d);
        let a = poisson_bracket(&poisson_bracket(&f, &g), &h);
        let b = poisson_bracket(&poisson_bracket(&g, &h), &f);
        let c = poisson_bracket(&poisson_bracket(&h, &f), &g);
        (&(&a + &b) + &c).is_zero()
    });
    let mut rng = stream(opts, 4);
    exact_check(report, s, "vector-field dissipation = -(div v){f,g}", n, |_| {
        let v = random_vector_field(&mut rng, d);
        let f = random_polynomial(&mut rng, d);
        let g = random_polynomial(&mut rng, d);
        dissipation(&v, &f, &g) == -(&v.divergence() * &poisson_bracket(&f, &g))
    });
    let mut rng = stream(opts, 5);
    exact_check(report, s, "Hamiltonian fields have zero dissipation", n, |_| {
        let v = hamiltonian_vector_field(&random_polynomial(&mut rng, d + 1));
        let f = random_polynomial(&mut rng, d);
        let g = random_polynomial(&mut rng, d);
        dissipation(&v, &f, &g).is_zero()
    });
    let mut rng = stream(opts, 6);
    exact_check(report, s, "zero dissipation iff Hamiltonian field", n, |i| {
        // Alternate generic fields with Hamiltonian ones so both sides of
        // the equivalence are exercised.
        let v = if i % 2 == 0 {
            random_vector_field(&mut rng, d)
        } else {
            hamiltonian_vector_field(&random_polynomial(&mut rng, d + 1))
        };
        let zero_dissipation = dissipation(&v, &Polynomial::q(), &Polynomial::p()).is_zero();
        match v.hamiltonian() {
            Some(h) => zero_dissipation && hamiltonian_vector_field(&h) == v,
            None => !zero_dissipation,
        }
    });
}

fn example_checks(report: &mut VerifyReport) {
    let s = "theorem1";
    let poly = |t: &str| t.parse::<Polynomial>().expect("literal");
    let dho = build_dho_model(&rat(1, 1), &rat(1, 1), &rat(9, 16), &rat(2, 1)).expect("valid");
    let drift_ok = dho.drift_field() == VectorField::new(poly("p"), poly("-q - 9/16*p"));
    let div_ok = dho.theorem1_divergence() == Ok(Polynomial::constant(rat(-9, 16)));
    report.checks.push(Check {
        suite: s,
        name: "quadratic-noise dilation gives damped oscillator".into(),
        kind: CheckKind::Exact,
        passed: drift_ok && div_ok,
        detail: format!("v = ({}, {}), div = -9/16", dho.drift_field().vq, dho.drift_field().vp),
    });
    let h = poly("1/2*p^2 + 1/2*q^2 + 1/3*q^3");
    let ex1 = build_example1_model(
        h.clone(),
        &[rat(1, 1), rat(0, 1), rat(2, 3)],
        &[rat(2, 1), rat(1, 1), rat(-5, 4)],
    )
    .expect("equal lengths");
    report.checks.push(Check {
        suite: s,
        name: "linear generating functions leave drift Hamiltonian".into(),
        kind: CheckKind::Exact,
        passed: ex1.drift_field() == hamiltonian_vector_field(&h),
        detail: "3 channels".into(),
    });
}

/// Plain-noise models: divergence formula, the dissipation identity, and
/// preservation of the coordinate bracket in the mean.
pub fn theorem1_suite(opts: &VerifyOptions, report: &mut VerifyReport) {
    let (n, d) = (opts.trials, opts.degree);
    let s = "theorem1";
    let mut rng = stream(opts, 11);
    exact_check(report, s, "div v = -sum(F_qq F_pp - F_qp^2)", n, |_| {
        let m = random_plain_model(&mut rng, d);
        m.theorem1_divergence()
            .is_ok_and(|div| div == m.drift_field().divergence())
    });
    let mut rng = stream(opts, 12);
    exact_check(report, s, "dissipation = sum {{f,F},{g,F}}", n, |_| {
        let m = random_plain_model(&mut rng, d);
        let f = random_polynomial(&mut rng, 3);
        let g = random_polynomial(&mut rng, 3);
        dissipation(&m, &f, &g) == m.dissipation_rhs(&f, &g)
    });
    let mut rng = stream(opts, 13);
    exact_check(report, s, "Liouville rate of det J vanishes", n, |_| {
        liouville_rate(&random_plain_model(&mut rng, d)).is_zero()
    });
    example_checks(report);
}

/// Models with conjugate pairs: the general dissipation identity and the
/// gauge field's divergence.
pub fn theorem2_suite(opts: &VerifyOptions, report: &mut VerifyReport) {
    let (n, d) = (opts.trials, opts.degree);
    let s = "theorem2";
    let mut rng = stream(opts, 21);
    exact_check(report, s, "dissipation identity with conjugate pairs", n, |_| {
        let m = random_model(&mut rng, d);
        let f = random_polynomial(&mut rng, 3);
        let g = random_polynomial(&mut rng, 3);
        dissipation(&m, &f, &g) == m.dissipation_rhs(&f, &g)
    });
    let mut rng = stream(opts, 22);
    exact_check(report, s, "div u = -(1/s) sum {F,G}", n, |_| {
        let m = random_model(&mut rng, d);
        m.gauge_field().divergence() == m.pair_bracket_sum().scale(&(-m.action_scale().recip()))
    });
}

/// Statistical checks of the Euler–Maruyama engine against exact oracles.
pub fn integrator_suite(opts: &VerifyOptions, report: &mut VerifyReport) -> Result<(), VerifyError> {
    let s = "integrator";
    let seed = opts.seed;
    let params = LinearModelParams::unit(rat(1, 2));
    let linear = build_linear_model(&params).expect("valid");
    let lin = LinearDriftDiffusion::from_model(&linear).expect("linear");

    let dts = [1e-2, 5e-3, 2.5e-3, 1.25e-3];
    let r = strong_order_study(&linear, [1.0, 0.0], 1.0, &dts, 2000, seed)?;
    stat_check(
        report,
        s,
        "strong order on linear model in [0.8, 1.2]",
        (0.8..=1.2).contains(&r.order),
        format!(
            "order {:.3}, errors {:?}",
            r.order,
            r.errors.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>()
        ),
    );

    let x0 = [1.0, 0.0];
    let cfg = IntegratorConfig::new(1e-3, 1.0, seed.wrapping_add(1));
    let ens = simulate_ensemble(&linear, x0, &cfg, 10_000)?;
    let (mean, cov) = exact_linear_moments(&lin.a, &lin.g, &Vector2::new(x0[0], x0[1]), &Matrix2::zeros(), 1.0);
    let zm = (0..2)
        .map(|i| (ens.mean_state[i] - mean[i]).abs() / ens.mean_standard_errors[i])
        .fold(0.0, f64::max);
    let zc = ens.covariance_z_score(&cov);
    stat_check(
        report,
        s,
        "weak moments at T=1 within 3 SE of exact",
        zm <= 3.0 && zc <= 3.0,
        format!("mean z {zm:.2}, covariance z {zc:.2}"),
    );

    let cfg = IntegratorConfig::new(1e-3, 40.0, seed.wrapping_add(2));
    let ens = simulate_ensemble(&linear, [0.0, 0.0], &cfg, 10_000)?;
    let sigma = covariance_at(&params, 0.0)?;
    let z = ens.covariance_z_score(&sigma);
    stat_check(
        report,
        s,
        "Monte Carlo covariance within 3 SE of Lyapunov",
        z <= 3.0,
        format!("max z {z:.2}"),
    );

    for c in det_j_checks(seed)? {
        report.checks.push(c);
    }
    Ok(())
}

/// The three pathwise canonicality checks on `det J_T`.
pub fn det_j_checks(seed: u64) -> Result<Vec<Check>, VerifyError> {
    let s = "integrator";
    let mut out = Vec::new();
    let gamma: f64 = 0.5;
    let dho = build_dho_model(&rat(1, 1), &rat(1, 1), &rat(1, 2), &rat(2, 1)).expect("valid");
    let sys = SdeSystem::from_model(&dho).without_noise();
    let cfg = IntegratorConfig::new(1e-5, 1.0, seed).with_jacobian(true);
    let det = path_end(&sys, [1.0, 0.0], &cfg, 0)?
        .jacobian
        .expect("tracked")
        .determinant();
    let err = (det - (-gamma).exp()).abs();
    out.push(Check {
        suite: s,
        name: "deterministic damped det J_T = exp(-gamma T)".into(),
        kind: CheckKind::Statistical,
        passed: err <= 1e-4,
        detail: format!("det J_T = {det:.10}, |error| = {err:.2e}"),
    });

    let ex2 = build_dho_model(&rat(1, 1), &rat(1, 1), &rat(9, 16), &rat(2, 1)).expect("valid");
    let dts = [1e-2, 5e-3, 2.5e-3, 1.25e-3, 6.25e-4];
    let r = det_j_order_study(&SdeSystem::from_model(&ex2), [1.0, 0.0], 1.0, 1.0, &dts, 400, seed)?;
    let decreasing = r.medians.windows(2).all(|w| w[1] < w[0]);
    out.push(Check {
        suite: s,
        name: "plain-noise median |det J_T - 1| order >= 0.4".into(),
        kind: CheckKind::Statistical,
        passed: r.order >= 0.4 && decreasing,
        detail: format!(
            "order {:.3}, medians {:?}",
            r.order,
            r.medians.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>()
        ),
    });

    let linear = build_linear_model(&LinearModelParams::unit(rat(1, 2))).expect("valid");
    let cfg = IntegratorConfig::new(1e-4, 1.0, seed).with_jacobian(true);
    let det = path_end(&SdeSystem::from_model(&linear), [1.0, 0.0], &cfg, 0)?
        .jacobian
        .expect("tracked")
        .determinant();
    let err = (det - (-gamma).exp()).abs();
    out.push(Check {
        suite: s,
        name: "conjugate-pair det J_T = exp(-gamma T)".into(),
        kind: CheckKind::Statistical,
        passed: err <= 1e-3,
        detail: format!("det J_T = {det:.10}, |error| = {err:.2e}"),
    });
    Ok(out)
}

/// Quantum/classical identification at the reference point used in the
/// report: `ħ = 2, m = ω = 1, γ = 1/2, n = 0, μ = 1/4`.
pub fn quantum_reference() -> QuantumComparisonParams {
    QuantumComparisonParams {
        hbar: 2.0,
        m: 1.0,
        omega: 1.0,
        gamma: 0.5,
        n: 0.0,
        mu: 0.25,
    }
}

/// Audit of the printed closed forms, plus the quantum comparison.
pub fn paper_formula_suite(report: &mut VerifyReport) -> Result<(), VerifyError> {
    let s = "paper-formulas";
    let params = LinearModelParams::unit(rat(1, 2));
    report.audits.extend(audit_paper_formulas(&params)?);

    let values = [rat(1, 2), rat(1, 1), rat(2, 1)];
    let grid = zero_z_grid_check(&values)?;
    let agree = grid.iter().filter(|g| g.difference <= AUDIT_TOLERANCE).count();
    let worst = grid.iter().map(|g| g.difference).fold(0.0, f64::max);
    report.audits.push(AuditVerdict {
        item: format!("boxed z = 0 covariance on grid ({agree}/{} agree)", grid.len()),
        paper_value: AuditValue::Scalar(agree as f64),
        oracle_value: AuditValue::Scalar(grid.len() as f64),
        difference: worst,
        status: if agree == grid.len() {
            AuditStatus::Match
        } else {
            AuditStatus::Discrepant
        },
        tolerance: AUDIT_TOLERANCE,
    });

    let zc = find_zero_cross_z(&params)?;
    let ok = (zc.z_star + 0.25).abs() <= 1e-9
        && (zc.sigma - Matrix2::identity()).abs().max() <= 1e-10
        && (zc.kbt - 1.0).abs() <= 1e-9;
    report.checks.push(Check {
        suite: s,
        name: "zero-correlation z* by bisection".into(),
        kind: CheckKind::Exact,
        passed: ok,
        detail: format!("z* = {:.12}, k_B T = {:.12}", zc.z_star, zc.kbt),
    });

    let qc = quantum_comparison(&quantum_reference()).map_err(SteadyError::from)?;
    let classical = build_linear_model(&LinearModelParams::unit(rat(1, 2))).expect("valid");
    let cl = LinearDriftDiffusion::from_model(&classical).expect("linear");
    let drift = (qc.dynamics.a - cl.a).abs().max();
    let diff = (qc.dynamics.g - cl.g).abs().max();
    report.checks.push(Check {
        suite: s,
        name: "quantum coefficients match classical at n = 0".into(),
        kind: CheckKind::Exact,
        passed: drift <= 1e-12 && diff <= 1e-12,
        detail: format!(
            "max |dA| = {drift:.1e}, max |dg| = {diff:.1e}, matching mu = {}",
            qc.matching_mu
        ),
    });
    report.audits.push(AuditVerdict::new(
        "mu reproducing the classical drift",
        AuditValue::Scalar(qc.params.gamma),
        AuditValue::Scalar(qc.matching_mu),
        AUDIT_TOLERANCE,
    ));
    Ok(())
}
