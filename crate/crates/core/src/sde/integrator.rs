use nalgebra::Matrix2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::rng::path_rng;
use super::system::SdeSystem;
use super::SdeError;
use crate::algebra::ModelSpec;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_final: f64,
    pub seed: u64,
    pub with_jacobian: bool,
    /// Record every k-th step; the final state is always recorded.
    pub record_stride: usize,
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_final: f64, seed: u64) -> Self {
        IntegratorConfig {
            dt,
            t_final,
            seed,
            with_jacobian: false,
            record_stride: 1,
        }
    }

    pub fn with_jacobian(mut self, on: bool) -> Self {
        self.with_jacobian = on;
        self
    }

    pub fn with_record_stride(mut self, k: usize) -> Self {
        self.record_stride = k;
        self
    }

    pub fn validate(&self) -> Result<(), SdeError> {
        let bad = |msg: String| Err(SdeError::InvalidConfig(msg));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive and finite, got {}", self.dt));
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return bad(format!("tFinal must be positive and finite, got {}", self.t_final));
        }
        if self.dt > self.t_final {
            return bad(format!("dt = {} exceeds tFinal = {}", self.dt, self.t_final));
        }
        if self.record_stride == 0 {
            return bad("recordStride must be at least 1".into());
        }
        Ok(())
    }

    /// `ceil(tFinal/dt)`, ignoring a ratio that overshoots an integer by
    /// rounding error only.
    pub fn step_count(&self) -> usize {
        let r = self.t_final / self.dt;
        let n = r.round();
        if (r - n).abs() <= 1e-9 * r {
            n as usize
        } else {
            r.ceil() as usize
        }
    }

    /// Length of step `k` (0-based); the last one is `tFinal − (n−1)dt`.
    pub fn step_length(&self, k: usize, n: usize) -> f64 {
        if k + 1 == n {
            self.t_final - (n - 1) as f64 * self.dt
        } else {
            self.dt
        }
    }

    fn time_at(&self, k: usize, n: usize) -> f64 {
        if k == n {
            self.t_final
        } else {
            k as f64 * self.dt
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<[f64; 2]>,
    pub jacobians: Option<Vec<Matrix2<f64>>>,
}

/// Terminal state of one path and, if requested, its Jacobian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathEnd {
    pub state: [f64; 2],
    pub jacobian: Option<Matrix2<f64>>,
}

/// Drives `system` from `x0` with increments drawn from `rng`, calling
/// `record(step, state, jacobian)` after the initial point and every step.
pub(crate) fn integrate<F>(
    system: &SdeSystem,
    x0: [f64; 2],
    cfg: &IntegratorConfig,
    rng: &mut ChaCha8Rng,
    mut record: F,
) -> Result<PathEnd, SdeError>
where
    F: FnMut(usize, [f64; 2], Option<&Matrix2<f64>>),
{
    cfg.validate()?;
    if !x0.iter().all(|x| x.is_finite()) {
        return Err(SdeError::NonFiniteInput);
    }
    let n = cfg.step_count();
    let width = system.noise_width();
    let mut pw = system.powers();
    let mut dw = vec![0.0; width];
    let mut x = x0;
    let mut jac = cfg.with_jacobian.then(Matrix2::identity);
    record(0, x, jac.as_ref());
    for k in 0..n {
        let h = cfg.step_length(k, n);
        let sd = h.sqrt();
        for w in dw.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *w = sd * z;
        }
        x = system.step(x, h, &dw, jac.as_mut(), &mut pw);
        let finite = x[0].is_finite() && x[1].is_finite() && jac.is_none_or(|j| j.iter().all(|v| v.is_finite()));
        if !finite {
            return Err(SdeError::BlowUp {
                step: k + 1,
                time: cfg.time_at(k + 1, n),
            });
        }
        record(k + 1, x, jac.as_ref());
    }
    Ok(PathEnd {
        state: x,
        jacobian: jac,
    })
}

/// Euler–Maruyama path of `model`. The increments come from stream 0 of
/// `cfg.seed`, so this is also path 0 of an ensemble with the same seed.
pub fn simulate_path(model: &ModelSpec, x0: [f64; 2], cfg: &IntegratorConfig) -> Result<Trajectory, SdeError> {
    simulate_system_path(&SdeSystem::from_model(model), x0, cfg, 0)
}

pub fn simulate_system_path(
    system: &SdeSystem,
    x0: [f64; 2],
    cfg: &IntegratorConfig,
    path_index: u64,
) -> Result<Trajectory, SdeError> {
    cfg.validate()?;
    let n = cfg.step_count();
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        jacobians: cfg.with_jacobian.then(Vec::new),
    };
    let mut rng = path_rng(cfg.seed, path_index);
    integrate(system, x0, cfg, &mut rng, |k, x, j| {
        if k % cfg.record_stride == 0 || k == n {
            traj.times.push(cfg.time_at(k, n));
            traj.states.push(x);
            if let (Some(js), Some(j)) = (traj.jacobians.as_mut(), j) {
                js.push(*j);
            }
        }
    })?;
    Ok(traj)
}

/// Terminal state of path `path_index` without storing the trajectory.
pub fn path_end(
    system: &SdeSystem,
    x0: [f64; 2],
    cfg: &IntegratorConfig,
    path_index: u64,
) -> Result<PathEnd, SdeError> {
    let mut rng = path_rng(cfg.seed, path_index);
    integrate(system, x0, cfg, &mut rng, |_, _, _| {})
}
