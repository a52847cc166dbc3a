use nalgebra::{Matrix2, Matrix3, Vector3};

use super::SteadyError;

/// Stability test for a 2×2 drift matrix: `tr A < 0` and `det A > 0`.
pub fn is_hurwitz(a: &Matrix2<f64>) -> bool {
    a.trace() < 0.0 && a.determinant() > 0.0
}

/// Solves `Aσ + σAᵀ = −g` for symmetric `σ` through the 3×3 linear system
/// in `(σ_qq, σ_qp, σ_pp)`.
pub fn lyapunov_solve(a: &Matrix2<f64>, g: &Matrix2<f64>) -> Result<Matrix2<f64>, SteadyError> {
    let tr = a.trace();
    let det = a.determinant();
    if !(tr < 0.0) {
        return Err(SteadyError::NotHurwitz {
            condition: "trace < 0",
            trace: tr,
            det,
        });
    }
    if !(det > 0.0) {
        return Err(SteadyError::NotHurwitz {
            condition: "det > 0",
            trace: tr,
            det,
        });
    }
    let (a11, a12, a21, a22) = (a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
    let system = Matrix3::new(
        2.0 * a11,
        2.0 * a12,
        0.0,
        a21,
        a11 + a22,
        a12,
        0.0,
        2.0 * a21,
        2.0 * a22,
    );
    let g12 = 0.5 * (g[(0, 1)] + g[(1, 0)]);
    let rhs = -Vector3::new(g[(0, 0)], g12, g[(1, 1)]);
    let x = system.lu().solve(&rhs).ok_or(SteadyError::Singular)?;
    Ok(Matrix2::new(x[0], x[1], x[1], x[2]))
}

/// Max-abs entry of `Aσ + σAᵀ + g`.
pub fn lyapunov_residual(a: &Matrix2<f64>, g: &Matrix2<f64>, sigma: &Matrix2<f64>) -> f64 {
    (a * sigma + sigma * a.transpose() + g).abs().max()
}

/// Positive definiteness of a symmetric 2×2 matrix by leading minors.
pub fn is_positive_definite(m: &Matrix2<f64>) -> bool {
    m[(0, 0)] > 0.0 && m.determinant() > 0.0
}
