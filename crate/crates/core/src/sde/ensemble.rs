use nalgebra::Matrix2;
use rayon::prelude::*;

use super::integrator::{path_end, simulate_system_path, IntegratorConfig, PathEnd, Trajectory};
use super::system::SdeSystem;
use super::SdeError;
use crate::algebra::{liouville_rate, rational_to_f64, ModelSpec};

/// Spread of `|det J_T − expected|` over the paths.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetJStats {
    pub expected: f64,
    pub median: f64,
    pub p95: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSummary {
    pub path_count: usize,
    pub mean_state: [f64; 2],
    pub mean_standard_errors: [f64; 2],
    /// Unbiased sample covariance of the terminal states.
    pub sample_covariance: Matrix2<f64>,
    /// Monte Carlo standard error of each covariance entry.
    pub standard_errors: Matrix2<f64>,
    pub det_j_stats: Option<DetJStats>,
}

impl EnsembleSummary {
    /// Builds the summary from terminal states listed in path order.
    pub fn from_ends(ends: &[PathEnd], expected_det: Option<f64>) -> Self {
        let n = ends.len();
        let nf = n as f64;
        // Moments are accumulated about the first path's state, so
        // identical paths give exactly zero spread.
        let origin = ends.first().map_or([0.0; 2], |e| e.state);
        let mut shift = [0.0; 2];
        for e in ends {
            shift[0] += e.state[0] - origin[0];
            shift[1] += e.state[1] - origin[1];
        }
        shift = shift.map(|m| m / nf);
        let mean = [origin[0] + shift[0], origin[1] + shift[1]];
        let mut c = Matrix2::zeros();
        let mut c4 = Matrix2::zeros();
        for e in ends {
            let d = [e.state[0] - origin[0] - shift[0], e.state[1] - origin[1] - shift[1]];
            for i in 0..2 {
                for j in 0..2 {
                    let prod = d[i] * d[j];
                    c[(i, j)] += prod;
                    c4[(i, j)] += prod * prod;
                }
            }
        }
        let biased = c / nf;
        let sample_covariance = c / (nf - 1.0);
        let standard_errors = (c4 / nf - biased.component_mul(&biased)).map(|v| (v.max(0.0) / nf).sqrt());
        let mean_standard_errors = [
            (sample_covariance[(0, 0)] / nf).sqrt(),
            (sample_covariance[(1, 1)] / nf).sqrt(),
        ];
        let det_j_stats = expected_det.and_then(|expected| {
            let mut dev: Vec<f64> = ends
                .iter()
                .map(|e| e.jacobian.map(|j| (j.determinant() - expected).abs()))
                .collect::<Option<_>>()?;
            dev.sort_by(f64::total_cmp);
            Some(DetJStats {
                expected,
                median: quantile(&dev, 0.5),
                p95: quantile(&dev, 0.95),
            })
        });
        EnsembleSummary {
            path_count: n,
            mean_state: mean,
            mean_standard_errors,
            sample_covariance,
            standard_errors,
            det_j_stats,
        }
    }

    /// Largest `|Σ̂_ij − σ_ij| / SE_ij`; entries with zero standard error
    /// must agree exactly.
    pub fn covariance_z_score(&self, sigma: &Matrix2<f64>) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let diff = (self.sample_covariance[(i, j)] - sigma[(i, j)]).abs();
                let se = self.standard_errors[(i, j)];
                let z = if se > 0.0 {
                    diff / se
                } else if diff == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                };
                worst = worst.max(z);
            }
        }
        worst
    }
}

/// Linear-interpolated quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// `exp(rate·T)` when the Liouville rate of `model` is constant.
pub fn expected_det_j(model: &ModelSpec, t: f64) -> Option<f64> {
    liouville_rate(model)
        .as_constant()
        .map(|r| (rational_to_f64(&r) * t).exp())
}

/// Runs `path_count` paths of `system` and summarizes the terminal states.
/// Paths are spread over the current rayon pool; the result depends only
/// on `(cfg.seed, path_count)`.
pub fn simulate_system_ensemble(
    system: &SdeSystem,
    x0: [f64; 2],
    cfg: &IntegratorConfig,
    path_count: usize,
    expected_det: Option<f64>,
) -> Result<EnsembleSummary, SdeError> {
    cfg.validate()?;
    if path_count < 2 {
        return Err(SdeError::InvalidConfig(format!(
            "pathCount must be at least 2, got {path_count}"
        )));
    }
    let ends: Vec<PathEnd> = (0..path_count as u64)
        .into_par_iter()
        .map(|i| {
            path_end(system, x0, cfg, i).map_err(|e| SdeError::PathFailed {
                path: i,
                source: Box::new(e),
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<_, _>>()?;
    Ok(EnsembleSummary::from_ends(
        &ends,
        expected_det.filter(|_| cfg.with_jacobian),
    ))
}

/// Recorded trajectories of paths `first..first + count`, in path order.
pub fn simulate_paths(
    system: &SdeSystem,
    x0: [f64; 2],
    cfg: &IntegratorConfig,
    first: u64,
    count: usize,
) -> Result<Vec<Trajectory>, SdeError> {
    (first..first + count as u64)
        .into_par_iter()
        .map(|i| {
            simulate_system_path(system, x0, cfg, i).map_err(|e| SdeError::PathFailed {
                path: i,
                source: Box::new(e),
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

pub fn simulate_ensemble(
    model: &ModelSpec,
    x0: [f64; 2],
    cfg: &IntegratorConfig,
    path_count: usize,
) -> Result<EnsembleSummary, SdeError> {
    let expected = expected_det_j(model, cfg.t_final);
    simulate_system_ensemble(&SdeSystem::from_model(model), x0, cfg, path_count, expected)
}

/// As [`simulate_ensemble`] on a dedicated pool of `threads` workers.
pub fn simulate_ensemble_with_threads(
    model: &ModelSpec,
    x0: [f64; 2],
    cfg: &IntegratorConfig,
    path_count: usize,
    threads: usize,
) -> Result<EnsembleSummary, SdeError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| SdeError::InvalidConfig(e.to_string()))?;
    pool.install(|| simulate_ensemble(model, x0, cfg, path_count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::catalog::{build_dho_model, build_linear_model, LinearModelParams};

    #[test]
    fn two_one_step_paths() {
        let model = build_linear_model(&LinearModelParams::unit(rat(1, 2))).unwrap();
        let cfg = IntegratorConfig::new(0.1, 0.1, 3);
        let s = simulate_ensemble(&model, [0.0, 0.0], &cfg, 2).unwrap();
        assert_eq!(s.path_count, 2);
        assert!(s.standard_errors.iter().all(|v| v.is_finite() && *v >= 0.0));
        assert_eq!(s.sample_covariance, s.sample_covariance.transpose());
        assert!(s.sample_covariance[(0, 0)] > 0.0);
    }

    #[test]
    fn noiseless_ensemble_has_zero_spread() {
        let model = ModelSpec::hamiltonian_only("1/2*p^2 + 1/2*q^2".parse().unwrap());
        let cfg = IntegratorConfig::new(0.01, 1.0, 0).with_jacobian(true);
        let s = simulate_ensemble(&model, [1.0, 0.0], &cfg, 10).unwrap();
        assert_eq!(s.sample_covariance, Matrix2::zeros());
        let dj = s.det_j_stats.unwrap();
        assert_eq!(dj.expected, 1.0);
    }

    #[test]
    fn rejects_single_path() {
        let model = ModelSpec::hamiltonian_only("p^2".parse().unwrap());
        let cfg = IntegratorConfig::new(0.1, 1.0, 0);
        assert!(matches!(
            simulate_ensemble(&model, [0.0, 0.0], &cfg, 1),
            Err(SdeError::InvalidConfig(_))
        ));
    }

    #[test]
    fn independent_of_worker_count() {
        let model = build_dho_model(&rat(1, 1), &rat(1, 1), &rat(9, 16), &rat(2, 1)).unwrap();
        let cfg = IntegratorConfig::new(1e-2, 1.0, 11).with_jacobian(true);
        let one = simulate_ensemble_with_threads(&model, [1.0, 0.0], &cfg, 64, 1).unwrap();
        let four = simulate_ensemble_with_threads(&model, [1.0, 0.0], &cfg, 64, 4).unwrap();
        assert_eq!(one, four);
        assert_eq!(one.det_j_stats.unwrap().expected, 1.0);
    }

    #[test]
    fn failed_path_is_named() {
        let model = ModelSpec::new(
            "-1/3*p^3".parse().unwrap(),
            vec![crate::algebra::NoiseChannel::plain("q^2".parse().unwrap())],
            rat(1, 1),
        )
        .unwrap();
        let cfg = IntegratorConfig::new(0.5, 200.0, 0);
        match simulate_ensemble(&model, [1.0, 3.0], &cfg, 4) {
            Err(SdeError::PathFailed { path, .. }) => assert!(path < 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn quantiles() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&v, 0.5), 3.0);
        assert_eq!(quantile(&v, 0.95), 4.8);
    }
}
