//! Stationary covariance of linear models and the audit of the printed
//! closed forms against the Lyapunov equation.

mod audit;
mod formulas;
mod lyapunov;

use nalgebra::Matrix2;
use thiserror::Error;

use crate::algebra::{rational_to_f64, Generator, ModelSpec, Polynomial};
use crate::catalog::{CatalogError, LinearDriftDiffusion};

pub use audit::{audit_paper_formulas, zero_z_grid_check, AuditStatus, AuditValue, AuditVerdict, AUDIT_TOLERANCE};
pub use formulas::{
    covariance_at, find_zero_cross_z, paper_covariance_generalz, paper_covariance_z0, paper_temperature,
    paper_zero_cross_z, zero_cross_z_closed_form, GeneralZMoments, ZeroCross,
};
pub use lyapunov::{is_hurwitz, is_positive_definite, lyapunov_residual, lyapunov_solve};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SteadyError {
    #[error("drift matrix is not Hurwitz: {condition} violated (trace = {trace}, det = {det})")]
    NotHurwitz {
        condition: &'static str,
        trace: f64,
        det: f64,
    },
    #[error("Lyapunov system is singular")]
    Singular,
    #[error("closed form requires z = 0, got z = {0}")]
    RequiresZeroZ(f64),
    #[error("closed form is singular at z = {z}: Y(z) = {y}")]
    SingularFormula { z: f64, y: f64 },
    #[error("no sign change of <qp> on [{lo}, {hi}] (values {f_lo}, {f_hi})")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("moment equations do not close for a nonlinear model: {0}")]
    Nonlinear(String),
    #[error("invalid parameters: {0}")]
    Parameters(String),
}

impl From<CatalogError> for SteadyError {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::Nonlinear(msg) => SteadyError::Nonlinear(msg),
            other => SteadyError::Parameters(other.to_string()),
        }
    }
}

/// `E[q^i p^j]` under the centred Gaussian with covariance `sigma`
/// (Isserlis recursion).
pub fn gaussian_moment(i: u32, j: u32, sigma: &Matrix2<f64>) -> f64 {
    if (i + j) % 2 == 1 {
        return 0.0;
    }
    match (i, j) {
        (0, 0) => 1.0,
        (0, _) => (j - 1) as f64 * sigma[(1, 1)] * gaussian_moment(0, j - 2, sigma),
        _ => {
            let mut acc = 0.0;
            if i >= 2 {
                acc += (i - 1) as f64 * sigma[(0, 0)] * gaussian_moment(i - 2, j, sigma);
            }
            if j >= 1 {
                acc += j as f64 * sigma[(0, 1)] * gaussian_moment(i - 1, j - 1, sigma);
            }
            acc
        }
    }
}

/// Expectation of a polynomial under the centred Gaussian with covariance `sigma`.
pub fn gaussian_expectation(f: &Polynomial, sigma: &Matrix2<f64>) -> f64 {
    f.terms()
        .map(|(m, c)| rational_to_f64(c) * gaussian_moment(m.q, m.p, sigma))
        .sum()
}

/// `(E[L q²], E[L qp], E[L p²])` under the centred Gaussian with covariance
/// `sigma`; all three vanish exactly when `sigma` is stationary.
pub fn stationarity_residuals(model: &ModelSpec, sigma: &Matrix2<f64>) -> Result<[f64; 3], SteadyError> {
    if !model.is_linear() {
        return Err(SteadyError::Nonlinear(
            "drift must be affine and noise fields constant".into(),
        ));
    }
    let q = Polynomial::q();
    let p = Polynomial::p();
    let observables = [&q * &q, &q * &p, &p * &p];
    Ok(observables.map(|m| gaussian_expectation(&model.apply(&m), sigma)))
}

/// Temperature `k_B T` if `sigma` is the Gibbs covariance of the quadratic
/// oscillator part `p²/2m + ½mω²q²` of `h`.
pub fn gibbs_temperature(h: &Polynomial, sigma: &Matrix2<f64>) -> Option<f64> {
    let c_pp = rational_to_f64(&h.coeff(0, 2));
    let c_qq = rational_to_f64(&h.coeff(2, 0));
    if !(c_pp > 0.0 && c_qq > 0.0) || h.degree() != 2 {
        return None;
    }
    let (qq, qp, pp) = (sigma[(0, 0)], sigma[(0, 1)], sigma[(1, 1)]);
    // m²ω² = c_qq / c_pp
    let ratio = c_qq / c_pp;
    let diagonal = qp.abs() <= 1e-8 * (qq * pp).abs().sqrt();
    let equipartition = (pp - ratio * qq).abs() <= 1e-8 * pp.abs();
    (diagonal && equipartition).then_some(2.0 * c_qq * qq)
}

/// Stationary state of a linear model.
#[derive(Clone, Debug, PartialEq)]
pub struct SteadyStateReport {
    pub a: Matrix2<f64>,
    pub g: Matrix2<f64>,
    pub sigma: Matrix2<f64>,
    /// Max-abs entry of `Aσ + σAᵀ + g`.
    pub residual_norm: f64,
    pub hurwitz: bool,
    pub positive_definite: bool,
    pub temperature: Option<f64>,
    pub stationarity_residuals: [f64; 3],
}

impl SteadyStateReport {
    pub fn analyze(model: &ModelSpec) -> Result<Self, SteadyError> {
        let lin = LinearDriftDiffusion::from_model(model)?;
        let sigma = lyapunov_solve(&lin.a, &lin.g)?;
        Ok(SteadyStateReport {
            residual_norm: lyapunov_residual(&lin.a, &lin.g, &sigma),
            hurwitz: is_hurwitz(&lin.a),
            positive_definite: is_positive_definite(&sigma),
            temperature: gibbs_temperature(model.hamiltonian(), &sigma),
            stationarity_residuals: stationarity_residuals(model, &sigma)?,
            a: lin.a,
            g: lin.g,
            sigma,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::catalog::{build_dho_model, build_linear_model, LinearModelParams};
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_moments_match_isserlis() {
        let s = Matrix2::new(2.0, 0.5, 0.5, 3.0);
        assert_eq!(gaussian_moment(2, 0, &s), 2.0);
        assert_eq!(gaussian_moment(1, 1, &s), 0.5);
        assert_eq!(gaussian_moment(0, 4, &s), 27.0);
        // E[q²p²] = σqq σpp + 2σqp²
        assert_relative_eq!(gaussian_moment(2, 2, &s), 6.0 + 0.5, epsilon = 1e-14);
        assert_eq!(gaussian_moment(3, 0, &s), 0.0);
    }

    #[test]
    fn residuals_vanish_at_lyapunov_solution() {
        let model = build_linear_model(&LinearModelParams::unit(rat(1, 2))).unwrap();
        let report = SteadyStateReport::analyze(&model).unwrap();
        for r in report.stationarity_residuals {
            assert!(r.abs() <= 1e-12, "{r}");
        }
        assert!(report.residual_norm <= 1e-12);
        assert!(report.hurwitz && report.positive_definite);
        assert_eq!(report.temperature, None);
    }

    #[test]
    fn residual_with_identity_covariance() {
        let model = build_linear_model(&LinearModelParams::unit(rat(1, 2))).unwrap();
        let r = stationarity_residuals(&model, &Matrix2::identity()).unwrap();
        assert_relative_eq!(r[0], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn harmonic_flow_preserves_isotropic_gaussian() {
        let model = ModelSpec::hamiltonian_only("1/2*p^2 + 1/2*q^2".parse().unwrap());
        let r = stationarity_residuals(&model, &Matrix2::identity()).unwrap();
        assert_eq!(r, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn nonlinear_model_is_rejected() {
        let model = ModelSpec::hamiltonian_only("q^4 + p^2".parse().unwrap());
        assert!(matches!(
            stationarity_residuals(&model, &Matrix2::identity()),
            Err(SteadyError::Nonlinear(_))
        ));
        // Quadratic noise generators give state-dependent noise.
        let dho = build_dho_model(&rat(1, 1), &rat(1, 1), &rat(9, 16), &rat(2, 1)).unwrap();
        assert!(stationarity_residuals(&dho, &Matrix2::identity()).is_err());
    }

    #[test]
    fn temperature_reported_at_zero_cross() {
        let model = build_linear_model(&LinearModelParams::unit(rat(1, 2)).with_z(rat(-1, 4))).unwrap();
        let report = SteadyStateReport::analyze(&model).unwrap();
        assert_relative_eq!(report.sigma, Matrix2::identity(), epsilon = 1e-14);
        assert_relative_eq!(report.temperature.unwrap(), 1.0, epsilon = 1e-14);
    }
}
