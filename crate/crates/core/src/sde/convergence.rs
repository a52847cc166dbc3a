//! Convergence studies: strong error against the exact transition, and the
//! shrinkage of `det J_T` deviations with the step.

use rand::Rng;
use rand_distr::StandardNormal;

use super::ensemble::simulate_system_ensemble;
use super::integrator::IntegratorConfig;
use super::linear::LinearTransition;
use super::rng::path_rng;
use super::system::SdeSystem;
use super::SdeError;
use crate::algebra::ModelSpec;
use crate::catalog::LinearDriftDiffusion;

/// Least-squares slope of `ln err` against `ln dt`.
pub fn empirical_order(dts: &[f64], errors: &[f64]) -> f64 {
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrongOrderReport {
    pub dts: Vec<f64>,
    /// Mean Euclidean distance at `T` between Euler–Maruyama and exact paths.
    pub errors: Vec<f64>,
    pub order: f64,
}

/// Strong error of Euler–Maruyama at `t_final` on a linear model, against
/// exact paths driven by the same Wiener increments.
pub fn strong_order_study(
    model: &ModelSpec,
    x0: [f64; 2],
    t_final: f64,
    dts: &[f64],
    paths: usize,
    seed: u64,
) -> Result<StrongOrderReport, SdeError> {
    let lin = LinearDriftDiffusion::from_model(model).map_err(|e| SdeError::InvalidConfig(e.to_string()))?;
    let system = SdeSystem::from_model(model);
    let b: Vec<[f64; 2]> = lin.noise.iter().map(|n| n.vector).collect();
    let width = b.len();
    let mut errors = Vec::with_capacity(dts.len());
    for &dt in dts {
        let cfg = IntegratorConfig::new(dt, t_final, seed);
        cfg.validate()?;
        let n = cfg.step_count();
        let full = LinearTransition::new(&lin.a, &b, dt);
        let last = LinearTransition::new(&lin.a, &b, cfg.step_length(n - 1, n));
        let mut pw = system.powers();
        let mut dw = vec![0.0; width];
        let mut total = 0.0;
        for i in 0..paths as u64 {
            let mut rng = path_rng(seed, i);
            let mut em = x0;
            let mut ex = x0;
            for k in 0..n {
                let tr = if k + 1 == n { &last } else { &full };
                let sd = tr.h.sqrt();
                for w in dw.iter_mut() {
                    let z: f64 = rng.sample(StandardNormal);
                    *w = sd * z;
                }
                let zeta = [rng.sample(StandardNormal), rng.sample(StandardNormal)];
                em = system.step(em, tr.h, &dw, None, &mut pw);
                ex = tr.apply(ex, &dw, zeta);
            }
            total += ((em[0] - ex[0]).powi(2) + (em[1] - ex[1]).powi(2)).sqrt();
        }
        errors.push(total / paths as f64);
    }
    Ok(StrongOrderReport {
        order: empirical_order(dts, &errors),
        dts: dts.to_vec(),
        errors,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalityReport {
    pub dts: Vec<f64>,
    pub expected: f64,
    /// Median over paths of `|det J_T − expected|`, per step size.
    pub medians: Vec<f64>,
    pub order: f64,
}

/// How fast the median `|det J_T − expected|` shrinks with the step.
pub fn det_j_order_study(
    system: &SdeSystem,
    x0: [f64; 2],
    t_final: f64,
    expected: f64,
    dts: &[f64],
    paths: usize,
    seed: u64,
) -> Result<CanonicalityReport, SdeError> {
    let mut medians = Vec::with_capacity(dts.len());
    for &dt in dts {
        let cfg = IntegratorConfig::new(dt, t_final, seed).with_jacobian(true);
        let s = simulate_system_ensemble(system, x0, &cfg, paths, Some(expected))?;
        medians.push(s.det_j_stats.map_or(f64::NAN, |d| d.median));
    }
    Ok(CanonicalityReport {
        order: empirical_order(dts, &medians),
        dts: dts.to_vec(),
        expected,
        medians,
    })
}
