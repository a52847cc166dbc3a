//! Closed forms printed for the linear symplectic oscillator, evaluated
//! verbatim so they can be audited, plus the root of `σ_qp(z) = 0`
//! obtained from the Lyapunov equation itself.

use nalgebra::Matrix2;

use num_traits::Zero;

use super::lyapunov::lyapunov_solve;
use super::SteadyError;
use crate::algebra::{rat, rational_to_f64};
use crate::catalog::LinearModelParams;

/// The boxed stationary covariance at `z = 0`:
/// `½s [[(1+ε²m²(ω²+γ²))/(ε²m²ω²), −εmγ], [−εmγ, (1+ε²m²ω²)/ε]]`.
pub fn paper_covariance_z0(params: &LinearModelParams) -> Result<Matrix2<f64>, SteadyError> {
    let p = params.to_f64();
    if p.z != 0.0 {
        return Err(SteadyError::RequiresZeroZ(p.z));
    }
    let (m, w, g, e, s) = (p.m, p.omega, p.gamma, p.epsilon, p.s);
    let emw2 = e * e * m * m * w * w;
    let qq = (1.0 + e * e * m * m * (w * w + g * g)) / emw2;
    let qp = -e * m * g;
    let pp = (1.0 + emw2) / e;
    Ok(0.5 * s * Matrix2::new(qq, qp, qp, pp))
}

/// The printed general-`z` moments and their common denominator `Y(z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneralZMoments {
    pub q2: f64,
    pub p2: f64,
    pub qp: f64,
    pub y: f64,
}

impl GeneralZMoments {
    pub fn as_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.q2, self.qp, self.qp, self.p2)
    }
}

pub fn paper_covariance_generalz(params: &LinearModelParams) -> Result<GeneralZMoments, SteadyError> {
    let p = params.to_f64();
    let (m, w, g, e, z) = (p.m, p.omega, p.gamma, p.epsilon, p.z);
    // Y is evaluated exactly so that a vanishing denominator is detected
    // without rounding noise.
    let y_exact = {
        let (m, w, g, s, z) = (&params.m, &params.omega, &params.gamma, &params.s, &params.z);
        let two = rat(2, 1);
        &two * m * m / (g * s) * (z * w * w - z * z * z - &two * z * z * g - z * g * g + &two * w * w * g)
    };
    let y = rational_to_f64(&y_exact);
    if y_exact.is_zero() {
        return Err(SteadyError::SingularFormula { z, y });
    }
    let e2m2 = e * e * m * m;
    let q2 = (2.0 * e2m2 * w * w + 2.0 * e2m2 * z * z + 4.0 * e2m2 * g * z + 2.0 * e2m2 * g * g + 2.0) / y;
    let p2 = (2.0 * m.powi(4) * w.powi(4) * e * e - m * m * z * z - m * m * g * z + 2.0 * m * m * w * w) / y;
    let qp = -(2.0 * m.powi(3) * e * e * w * w * z + 2.0 * m.powi(3) * e * e * w * w * g + m * z) / y;
    Ok(GeneralZMoments { q2, p2, qp, y })
}

/// Printed cross-term coefficient claimed to cancel `⟨qp⟩`:
/// `−2ε²m²ω²γ / (2ε²m²ω² + 1)`.
pub fn paper_zero_cross_z(params: &LinearModelParams) -> f64 {
    let p = params.to_f64();
    let k = p.epsilon * p.epsilon * p.m * p.m * p.omega * p.omega;
    -2.0 * k * p.gamma / (2.0 * k + 1.0)
}

/// Printed temperature at that coefficient: `½s(2ε²m²ω² + 1)/(εm)`.
pub fn paper_temperature(params: &LinearModelParams) -> f64 {
    let p = params.to_f64();
    let k = p.epsilon * p.epsilon * p.m * p.m * p.omega * p.omega;
    0.5 * p.s * (2.0 * k + 1.0) / (p.epsilon * p.m)
}

/// Root of `σ_qp(z) = 0` read off the numerator of the Lyapunov solution:
/// `−ε²m²ω²γ / (1 + ε²m²ω²)`.
pub fn zero_cross_z_closed_form(params: &LinearModelParams) -> f64 {
    let p = params.to_f64();
    let k = p.epsilon * p.epsilon * p.m * p.m * p.omega * p.omega;
    -k * p.gamma / (1.0 + k)
}

/// The cross-term coefficient with `⟨qp⟩ = 0`, its covariance, and the
/// temperature `k_B T = mω² σ_qq`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroCross {
    pub z_star: f64,
    pub sigma: Matrix2<f64>,
    pub kbt: f64,
    /// Interval that was bisected.
    pub bracket: (f64, f64),
    pub iterations: u32,
}

/// Covariance of the linear model at cross-term `z`, by Lyapunov solve.
pub fn covariance_at(params: &LinearModelParams, z: f64) -> Result<Matrix2<f64>, SteadyError> {
    let mut a = params.drift_matrix();
    a[(0, 0)] = z;
    a[(1, 1)] = -z - params.to_f64().gamma;
    lyapunov_solve(&a, &params.diffusion_matrix())
}

/// Bisection for `σ_qp(z) = 0` on `(z_b, 0)`, `z_b` the lower edge of the
/// stable region `ω² − z² − γz > 0`. `σ_qp(0) < 0` and `σ_qp → +∞` at
/// `z_b`, so a sign change is expected; its absence is reported.
pub fn find_zero_cross_z(params: &LinearModelParams) -> Result<ZeroCross, SteadyError> {
    params.validate().map_err(|e| SteadyError::Parameters(e.to_string()))?;
    let p = params.to_f64();
    let z_b = 0.5 * (-p.gamma - (p.gamma * p.gamma + 4.0 * p.omega * p.omega).sqrt());
    let mut lo = z_b + 1e-9 * z_b.abs().max(1.0);
    let mut hi = 0.0;
    let cross = |z: f64| covariance_at(params, z).map(|s| s[(0, 1)]);
    let f_lo = cross(lo)?;
    let f_hi = cross(hi)?;
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(SteadyError::NoSignChange { lo, hi, f_lo, f_hi });
    }
    let bracket = (lo, hi);
    let mut iterations = 0;
    while hi - lo > 1e-13 && iterations < 200 {
        let mid = 0.5 * (lo + hi);
        if cross(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let z_star = 0.5 * (lo + hi);
    let sigma = covariance_at(params, z_star)?;
    Ok(ZeroCross {
        z_star,
        sigma,
        kbt: p.m * p.omega * p.omega * sigma[(0, 0)],
        bracket,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_half() -> LinearModelParams {
        LinearModelParams::unit(rat(1, 2))
    }

    #[test]
    fn boxed_matrix_examples() {
        let s = paper_covariance_z0(&unit_half()).unwrap();
        assert_relative_eq!(s, Matrix2::new(1.125, -0.25, -0.25, 1.0), epsilon = 1e-15);
        let mut small = LinearModelParams::unit(rat(1, 100));
        assert_relative_eq!(paper_covariance_z0(&small).unwrap()[(0, 1)], -0.005, epsilon = 1e-15);
        small.m = rat(2, 1);
        small.gamma = rat(1, 2);
        let s = paper_covariance_z0(&small).unwrap();
        assert_relative_eq!(s, Matrix2::new(0.75, -0.5, -0.5, 2.5), epsilon = 1e-15);
        assert_relative_eq!(s, covariance_at(&small, 0.0).unwrap(), epsilon = 1e-12);
        assert!(matches!(
            paper_covariance_z0(&unit_half().with_z(rat(1, 8))),
            Err(SteadyError::RequiresZeroZ(_))
        ));
    }

    #[test]
    fn general_z_examples() {
        let m = paper_covariance_generalz(&unit_half()).unwrap();
        assert_relative_eq!(m.q2, 1.125, epsilon = 1e-15);
        assert_relative_eq!(m.p2, 1.0, epsilon = 1e-15);
        assert_relative_eq!(m.qp, -0.25, epsilon = 1e-15);
        let m = paper_covariance_generalz(&unit_half().with_z(rat(-1, 3))).unwrap();
        assert!(m.qp.abs() < 1e-15);
        // With ω = 1, Y(z) ∝ z − z³ − 2γz² − γ²z + 2γ vanishes at z = 3/5, γ = 12/5.
        let singular = LinearModelParams::unit(rat(12, 5)).with_z(rat(3, 5));
        assert!(matches!(
            paper_covariance_generalz(&singular),
            Err(SteadyError::SingularFormula { .. })
        ));
    }

    #[test]
    fn zero_cross_unit_parameters() {
        let zc = find_zero_cross_z(&unit_half()).unwrap();
        assert!((zc.z_star + 0.25).abs() <= 1e-10);
        assert_relative_eq!(zc.sigma, Matrix2::identity(), epsilon = 1e-10);
        assert!((zc.kbt - 1.0).abs() <= 1e-9);
        assert!((zero_cross_z_closed_form(&unit_half()) + 0.25).abs() < 1e-15);
    }

    #[test]
    fn zero_cross_stiffer_oscillator() {
        let params = LinearModelParams::new(rat(1, 1), rat(2, 1), rat(1, 2), rat(1, 1), rat(1, 1), rat(0, 1));
        let zc = find_zero_cross_z(&params).unwrap();
        assert!((zc.z_star + 0.4).abs() <= 1e-9);
        assert!((zero_cross_z_closed_form(&params) + 0.4).abs() <= 1e-15);
        assert!(zc.sigma[(0, 1)].abs() <= 1e-10);
        let (qq, pp) = (zc.sigma[(0, 0)], zc.sigma[(1, 1)]);
        assert!((pp - 4.0 * qq).abs() <= 1e-8 * pp);
    }

    #[test]
    fn printed_zero_cross_does_not_cancel_correlation() {
        let z = paper_zero_cross_z(&unit_half());
        assert_relative_eq!(z, -1.0 / 3.0, epsilon = 1e-15);
        let s = covariance_at(&unit_half(), z).unwrap();
        assert_relative_eq!(s[(0, 1)], 3.0 / 38.0, epsilon = 1e-14);
        assert_relative_eq!(paper_temperature(&unit_half()), 1.5, epsilon = 1e-15);
    }
}
