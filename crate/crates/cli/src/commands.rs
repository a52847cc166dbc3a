use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;

use canonflow::catalog::{quantum_comparison, QuantumComparisonParams};
use canonflow::config::{parse_model_config, ModelConfig};
use canonflow::sde::{
    expected_det_j, simulate_ensemble, simulate_paths, write_csv_header, write_trajectory_rows, EnsembleSummary,
    IntegratorConfig, PathEnd, SdeError, SdeSystem,
};
use canonflow::steady::{audit_paper_formulas, find_zero_cross_z, AuditStatus, SteadyError, SteadyStateReport};
use canonflow::verify::{run_suite, VerifyError, VerifyOptions};

use crate::manifest::{InputDigest, RunManifest};
use crate::report::{fmt_matrix, Cell, Report};
use crate::{CliError, QuantumArgs, SimulateArgs, SteadyArgs, VerifyArgs, DEFAULT_DT, DEFAULT_SEED, DEFAULT_T_FINAL};

/// Paths simulated per parallel batch before their rows are written.
const CSV_BATCH: usize = 256;

fn load_model(path: &Path) -> Result<(ModelConfig, InputDigest), CliError> {
    let bytes =
        fs::read(path).map_err(|e| CliError::Input(format!("cannot read model file `{}`: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::Input(format!("model file `{}` is not UTF-8", path.display())))?;
    let cfg =
        parse_model_config(&text).map_err(|e| CliError::Input(format!("model file `{}`: {e}", path.display())))?;
    Ok((cfg, InputDigest::of(path, &bytes)))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Input(format!("cannot write `{}`: {e}", path.display())))
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    out.with_extension(suffix)
}

fn sde_err(e: SdeError) -> CliError {
    match e {
        SdeError::InvalidConfig(m) => CliError::Usage(m),
        other => CliError::Numeric(other.to_string()),
    }
}

fn steady_err(e: SteadyError) -> CliError {
    match e {
        SteadyError::Nonlinear(_) | SteadyError::Parameters(_) | SteadyError::RequiresZeroZ(_) => {
            CliError::Input(e.to_string())
        }
        other => CliError::Numeric(other.to_string()),
    }
}

fn emit(report: &Report, out: Option<&Path>) -> Result<(), CliError> {
    let text = report.to_string();
    print!("{text}");
    if let Some(path) = out {
        write_file(path, text.as_bytes())?;
    }
    Ok(())
}

fn write_manifest(out: &Path, manifest: &RunManifest) -> Result<(), CliError> {
    write_file(&sibling(out, "manifest.json"), manifest.to_json().as_bytes())
}

pub fn verify(a: &VerifyArgs) -> Result<i32, CliError> {
    let opts = VerifyOptions {
        trials: a.trials,
        degree: a.degree,
        seed: a.seed,
    };
    let result = run_suite(a.suite, &opts).map_err(|e| match e {
        VerifyError::Sde(e) => sde_err(e),
        VerifyError::Steady(e) => steady_err(e),
    })?;
    let failures = result.failures();
    let discrepancies = result.discrepancies();
    let mut r = Report::new(format!("verify --suite {}", a.suite.name()));
    for l in result.to_string().lines() {
        r.line(l);
    }
    r.line("");
    r.row("checks", result.checks.len());
    r.row("failures", failures);
    r.row("audit discrepancies", discrepancies);
    let failed = failures > 0 || (a.strict && discrepancies > 0);
    r.value("suite", a.suite.name());
    r.value("trials", a.trials);
    r.value("degree", a.degree);
    r.value("seed", a.seed);
    r.value("strict", a.strict);
    r.value("checks", result.checks.len());
    r.value("failures", failures);
    r.value("discrepancies", discrepancies);
    r.value("result", if failed { "fail" } else { "pass" });
    emit(&r, None)?;
    Ok(if failed { 1 } else { 0 })
}

pub fn simulate(a: &SimulateArgs) -> Result<i32, CliError> {
    let start = Instant::now();
    let (model_cfg, digest) = load_model(&a.model)?;
    if a.paths == 0 {
        return Err(CliError::Usage("--paths must be at least 1".into()));
    }
    let cfg = IntegratorConfig {
        dt: a.dt,
        t_final: a.t_final,
        seed: a.seed,
        with_jacobian: a.jacobian,
        record_stride: a.record_stride,
    };
    cfg.validate().map_err(sde_err)?;
    let system = SdeSystem::from_model(&model_cfg.model);
    let x0 = model_cfg.x0;

    let file =
        fs::File::create(&a.out).map_err(|e| CliError::Input(format!("cannot write `{}`: {e}", a.out.display())))?;
    let mut csv = BufWriter::new(file);
    let io_err = |e: std::io::Error| CliError::Input(format!("cannot write `{}`: {e}", a.out.display()));
    write_csv_header(&mut csv, a.jacobian).map_err(io_err)?;
    let mut ends = Vec::with_capacity(a.paths);
    let mut first = 0usize;
    while first < a.paths {
        let count = CSV_BATCH.min(a.paths - first);
        let batch = simulate_paths(&system, x0, &cfg, first as u64, count).map_err(sde_err)?;
        for (i, traj) in batch.iter().enumerate() {
            write_trajectory_rows(&mut csv, (first + i) as u64, traj).map_err(io_err)?;
            ends.push(PathEnd {
                state: *traj.states.last().expect("initial state recorded"),
                jacobian: traj.jacobians.as_ref().and_then(|js| js.last().copied()),
            });
        }
        first += count;
    }
    csv.flush().map_err(io_err)?;

    let mut r = Report::new("simulate");
    r.row("model", model_cfg.kind.name());
    r.row("x0", format!("({}, {})", x0[0].cell(), x0[1].cell()));
    r.row("steps per path", cfg.step_count());
    r.row("paths", a.paths);
    r.row("trajectories", a.out.display().to_string());
    r.value("model", model_cfg.kind.name());
    r.value("paths", a.paths);
    r.value("dt", a.dt);
    r.value("t_final", a.t_final);
    r.value("seed", a.seed);
    r.value("jacobian", a.jacobian);
    r.value("record_stride", a.record_stride);
    r.value("steps", cfg.step_count());
    if a.paths >= 2 {
        let expected = if a.jacobian {
            expected_det_j(&model_cfg.model, a.t_final)
        } else {
            None
        };
        summary_lines(&mut r, &EnsembleSummary::from_ends(&ends, expected));
    } else {
        r.line("single path: no ensemble statistics");
    }
    let report_path = sibling(&a.out, "report.txt");
    emit(&r, Some(&report_path))?;
    let params = json!({
        "model": a.model.display().to_string(),
        "t_final": a.t_final,
        "dt": a.dt,
        "paths": a.paths,
        "seed": a.seed,
        "jacobian": a.jacobian,
        "record_stride": a.record_stride,
        "out": a.out.display().to_string(),
    });
    write_manifest(
        &a.out,
        &RunManifest::new("simulate", params, a.seed, vec![digest], start.elapsed().as_secs_f64()),
    )?;
    Ok(0)
}

fn summary_lines(r: &mut Report, s: &EnsembleSummary) {
    r.row(
        "terminal mean",
        format!(
            "q = {} +- {}, p = {} +- {}",
            s.mean_state[0], s.mean_standard_errors[0], s.mean_state[1], s.mean_standard_errors[1]
        ),
    );
    r.row("sample covariance", fmt_matrix(&s.sample_covariance));
    r.row("standard errors", fmt_matrix(&s.standard_errors));
    r.value("mean_q", s.mean_state[0]);
    r.value("mean_p", s.mean_state[1]);
    r.value("mean_se_q", s.mean_standard_errors[0]);
    r.value("mean_se_p", s.mean_standard_errors[1]);
    r.matrix_values("cov", &s.sample_covariance);
    r.matrix_values("cov_se", &s.standard_errors);
    if let Some(d) = s.det_j_stats {
        r.row("det J expected", d.expected);
        r.row("|det J - expected| median", d.median);
        r.row("|det J - expected| p95", d.p95);
        r.value("detj_expected", d.expected);
        r.value("detj_dev_median", d.median);
        r.value("detj_dev_p95", d.p95);
    }
}

pub fn steady(a: &SteadyArgs) -> Result<i32, CliError> {
    let start = Instant::now();
    let (model_cfg, digest) = load_model(&a.model)?;
    let st = SteadyStateReport::analyze(&model_cfg.model).map_err(steady_err)?;
    let mut r = Report::new("steady");
    r.row("model", model_cfg.kind.name());
    r.row("drift A", fmt_matrix(&st.a));
    r.row("diffusion g", fmt_matrix(&st.g));
    r.row("hurwitz", st.hurwitz);
    r.row("sigma", fmt_matrix(&st.sigma));
    r.row("positive definite", st.positive_definite);
    r.row("Lyapunov residual", st.residual_norm);
    r.row(
        "stationarity residuals",
        format!(
            "E[L q^2] = {}, E[L qp] = {}, E[L p^2] = {}",
            st.stationarity_residuals[0].cell(),
            st.stationarity_residuals[1].cell(),
            st.stationarity_residuals[2].cell()
        ),
    );
    match st.temperature {
        Some(t) => r.row("k_B T (Gibbs form)", t),
        None => r.row("k_B T (Gibbs form)", "none: sigma is not of Gibbs form"),
    }
    r.value("model", model_cfg.kind.name());
    r.matrix_values("a", &st.a);
    r.matrix_values("g", &st.g);
    r.matrix_values("sigma", &st.sigma);
    r.value("hurwitz", st.hurwitz);
    r.value("positive_definite", st.positive_definite);
    r.value("lyapunov_residual", st.residual_norm);
    if let Some(t) = st.temperature {
        r.value("kbt", t);
    }

    if a.find_z {
        let params = model_cfg
            .linear_params
            .as_ref()
            .ok_or_else(|| CliError::Usage("--find-z needs a model of type `linear`".into()))?;
        let zc = find_zero_cross_z(params).map_err(steady_err)?;
        r.line("");
        r.row("zero-correlation z*", zc.z_star);
        r.row("sigma at z*", fmt_matrix(&zc.sigma));
        r.row("k_B T at z*", zc.kbt);
        r.row(
            "bisection bracket",
            format!("[{}, {}], {} iterations", zc.bracket.0, zc.bracket.1, zc.iterations),
        );
        r.value("z_star", zc.z_star);
        r.matrix_values("sigma_zstar", &zc.sigma);
        r.value("kbt_zstar", zc.kbt);
        r.line("");
        match audit_paper_formulas(params) {
            Ok(verdicts) => {
                r.line(format!(
                    "{:<40} {:<11} {:>12}",
                    "closed-form audit", "status", "max |diff|"
                ));
                for v in &verdicts {
                    r.line(format!("{:<40} {:<11} {:>12.3e}", v.item, v.status, v.difference));
                }
                let n = verdicts.iter().filter(|v| v.status == AuditStatus::Discrepant).count();
                r.value("audit_discrepancies", n);
            }
            Err(e) => r.line(format!("closed-form audit unavailable: {e}")),
        }
    }

    let mut code = 0;
    if let Some(n) = a.mc_check {
        let cfg = IntegratorConfig::new(DEFAULT_DT, DEFAULT_T_FINAL, DEFAULT_SEED);
        let s = simulate_ensemble(&model_cfg.model, model_cfg.x0, &cfg, n).map_err(sde_err)?;
        let z = s.covariance_z_score(&st.sigma);
        let pass = z <= 3.0;
        r.line("");
        r.row("Monte Carlo paths", n);
        r.row("Monte Carlo covariance", fmt_matrix(&s.sample_covariance));
        r.row("standard errors", fmt_matrix(&s.standard_errors));
        r.row(
            "max |z|",
            format!("{} ({})", z.cell(), if pass { "within 3 SE" } else { "outside 3 SE" }),
        );
        r.value("mc_paths", n);
        r.value("mc_dt", DEFAULT_DT);
        r.value("mc_t_final", DEFAULT_T_FINAL);
        r.value("mc_seed", DEFAULT_SEED);
        r.matrix_values("mc_cov", &s.sample_covariance);
        r.value("mc_max_z", z);
        r.value("mc_check", if pass { "pass" } else { "fail" });
        if !pass {
            code = 1;
        }
    }

    emit(&r, a.out.as_deref())?;
    if let Some(out) = &a.out {
        let params = json!({
            "model": a.model.display().to_string(),
            "find_z": a.find_z,
            "mc_check": a.mc_check,
            "mc_dt": DEFAULT_DT,
            "mc_t_final": DEFAULT_T_FINAL,
            "out": out.display().to_string(),
        });
        write_manifest(
            out,
            &RunManifest::new(
                "steady",
                params,
                DEFAULT_SEED,
                vec![digest],
                start.elapsed().as_secs_f64(),
            ),
        )?;
    }
    Ok(code)
}

pub fn compare_quantum(a: &QuantumArgs) -> Result<i32, CliError> {
    let start = Instant::now();
    let params = QuantumComparisonParams {
        hbar: a.hbar,
        m: a.m,
        omega: a.omega,
        gamma: a.gamma,
        n: a.n,
        mu: a.mu,
    };
    let qc = quantum_comparison(&params).map_err(|e| CliError::Input(e.to_string()))?;
    let mismatch = qc.classical_mismatch().map_err(|e| CliError::Input(e.to_string()))?;
    let a_mat = qc.dynamics.a;
    let mut r = Report::new("compare-quantum");
    r.row("drift A", fmt_matrix(&a_mat));
    r.row("diffusion g", fmt_matrix(&qc.dynamics.g));
    for nc in &qc.dynamics.noise {
        r.row(
            &format!("noise {}", nc.label),
            format!("({}, {})", nc.vector[0].cell(), nc.vector[1].cell()),
        );
    }
    r.row(
        "hurwitz",
        format!(
            "{} (trace = {}, det = {})",
            qc.hurwitz,
            a_mat.trace().cell(),
            a_mat.determinant().cell()
        ),
    );
    r.row("classical s = hbar/2", qc.s);
    r.row("classical epsilon = 1/(m omega)", qc.epsilon);
    r.row(
        "relative mismatch vs classical",
        format!(
            "drift {}, diffusion {}",
            mismatch.drift.cell(),
            mismatch.diffusion.cell()
        ),
    );
    r.row(
        "mu matching classical drift",
        format!(
            "{} (gamma/2 = {})",
            qc.matching_mu.cell(),
            (qc.params.gamma / 2.0).cell()
        ),
    );
    let claimed = if qc.mu_equals_gamma_residual <= 1e-12 {
        "Match"
    } else {
        "Discrepant"
    };
    r.row(
        "claimed mu = gamma",
        format!(
            "{claimed}: drift mismatch {} at mu = {}",
            qc.mu_equals_gamma_residual.cell(),
            qc.params.gamma.cell()
        ),
    );
    match qc.temperature {
        Some(t) => r.row("k_B T = hbar omega / ln(1 + 1/n)", t),
        None => r.row("k_B T = hbar omega / ln(1 + 1/n)", "none (n = 0)"),
    }
    r.value("hbar", a.hbar);
    r.value("m", a.m);
    r.value("omega", a.omega);
    r.value("gamma", a.gamma);
    r.value("n", a.n);
    r.value("mu", a.mu);
    r.matrix_values("a", &a_mat);
    r.matrix_values("g", &qc.dynamics.g);
    r.value("hurwitz", qc.hurwitz);
    r.value("s", qc.s);
    r.value("epsilon", qc.epsilon);
    r.value("drift_mismatch", mismatch.drift);
    r.value("diffusion_mismatch", mismatch.diffusion);
    r.value("matching_mu", qc.matching_mu);
    r.value("matching_mu_over_gamma", qc.matching_mu / qc.params.gamma);
    r.value("mu_equals_gamma", claimed);
    r.value("mu_equals_gamma_residual", qc.mu_equals_gamma_residual);
    if let Some(t) = qc.temperature {
        r.value("kbt", t);
    }
    emit(&r, a.out.as_deref())?;
    if let Some(out) = &a.out {
        let p = json!({
            "hbar": a.hbar, "m": a.m, "omega": a.omega, "gamma": a.gamma, "n": a.n, "mu": a.mu,
            "out": out.display().to_string(),
        });
        write_manifest(
            out,
            &RunManifest::new("compare-quantum", p, 0, vec![], start.elapsed().as_secs_f64()),
        )?;
    }
    Ok(0)
}
