//! Exact moments and exact one-step transitions of linear additive-noise
//! systems `dx = A x dt + B dW`.

use nalgebra::{DMatrix, Matrix2, Matrix4, SymmetricEigen, Vector2};

/// `(e^{At} m₀, e^{At} Σ₀ e^{Aᵀt} + ∫₀ᵗ e^{As} g e^{Aᵀs} ds)`.
///
/// The pair `(e^{Aτ}, Q(τ))` is taken from the Van Loan block exponential
/// on a short interval and then doubled, `Q(2τ) = e^{Aτ} Q(τ) e^{Aᵀτ} +
/// Q(τ)`, which keeps every intermediate bounded for stable `A`.
pub fn exact_linear_moments(
    a: &Matrix2<f64>,
    g: &Matrix2<f64>,
    mean0: &Vector2<f64>,
    cov0: &Matrix2<f64>,
    t: f64,
) -> (Vector2<f64>, Matrix2<f64>) {
    let (phi, q) = propagator(a, g, t);
    (phi * mean0, phi * cov0 * phi.transpose() + q)
}

/// `(e^{At}, ∫₀ᵗ e^{As} g e^{Aᵀs} ds)`.
pub fn propagator(a: &Matrix2<f64>, g: &Matrix2<f64>, t: f64) -> (Matrix2<f64>, Matrix2<f64>) {
    if t == 0.0 {
        return (Matrix2::identity(), Matrix2::zeros());
    }
    let norm = a.abs().column_sum().max();
    let mut halvings = 0;
    while norm * t / f64::powi(2.0, halvings) > 0.25 {
        halvings += 1;
    }
    let tau = t / f64::powi(2.0, halvings);
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&(-a * tau));
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&(g * tau));
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&(a.transpose() * tau));
    let e = m.exp();
    let mut phi: Matrix2<f64> = e.fixed_view::<2, 2>(2, 2).transpose();
    let mut q: Matrix2<f64> = phi * e.fixed_view::<2, 2>(0, 2);
    for _ in 0..halvings {
        q = phi * q * phi.transpose() + q;
        phi *= phi;
    }
    (phi, 0.5 * (q + q.transpose()))
}

/// `∫₀ʰ e^{Au} du` from the block exponential of `[[A, I], [0, 0]]`.
fn integrated_exponential(a: &Matrix2<f64>, h: f64) -> Matrix2<f64> {
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&(a * h));
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&(Matrix2::identity() * h));
    m.exp().fixed_view::<2, 2>(0, 2).into()
}

/// Exact transition over one step of length `h`, sampled jointly with the
/// Wiener increments that an Euler–Maruyama step would see.
///
/// With `ΔW = √h z` and `X = ∫ e^{A(h−s)} B dW(s)`, the pair is Gaussian
/// with `Cov(X, ΔW) = (∫₀ʰ e^{Au} du) B`. Then
/// `X = K ΔW + S^{1/2} ζ`, `K = Cov(X, ΔW)/h`, `S` the conditional
/// covariance and `ζ` two further standard normals.
#[derive(Clone, Debug)]
pub struct LinearTransition {
    pub h: f64,
    pub phi: Matrix2<f64>,
    gain: DMatrix<f64>,
    residual_sqrt: Matrix2<f64>,
}

impl LinearTransition {
    /// `b` holds one column per Wiener increment.
    pub fn new(a: &Matrix2<f64>, b: &[[f64; 2]], h: f64) -> Self {
        let bm = DMatrix::from_fn(2, b.len(), |i, k| b[k][i]);
        let bbt = &bm * bm.transpose();
        let g = Matrix2::new(bbt[(0, 0)], bbt[(0, 1)], bbt[(1, 0)], bbt[(1, 1)]);
        let (phi, q) = propagator(a, &g, h);
        let ih = integrated_exponential(a, h);
        let ih_d = DMatrix::from_fn(2, 2, |i, j| ih[(i, j)]);
        let cross = ih_d * bm;
        let cc = &cross * cross.transpose() / h;
        let s = q - Matrix2::new(cc[(0, 0)], cc[(0, 1)], cc[(1, 0)], cc[(1, 1)]);
        let s = 0.5 * (s + s.transpose());
        let eig = SymmetricEigen::new(s);
        let root = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
        let residual_sqrt = eig.eigenvectors * Matrix2::from_diagonal(&root) * eig.eigenvectors.transpose();
        LinearTransition {
            h,
            phi,
            gain: cross / h,
            residual_sqrt,
        }
    }

    /// Next state given the increments `dw` and two extra normals `zeta`.
    pub fn apply(&self, x: [f64; 2], dw: &[f64], zeta: [f64; 2]) -> [f64; 2] {
        let mut out = self.phi * Vector2::new(x[0], x[1]) + self.residual_sqrt * Vector2::new(zeta[0], zeta[1]);
        for (k, &w) in dw.iter().enumerate() {
            out[0] += self.gain[(0, k)] * w;
            out[1] += self.gain[(1, k)] * w;
        }
        [out[0], out[1]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn damped() -> Matrix2<f64> {
        Matrix2::new(0.0, 1.0, -1.0, -0.5)
    }

    #[test]
    fn zero_time_is_identity() {
        let m0 = Vector2::new(0.3, -1.0);
        let c0 = Matrix2::new(2.0, 0.1, 0.1, 1.0);
        let (m, c) = exact_linear_moments(&damped(), &Matrix2::identity(), &m0, &c0, 0.0);
        assert_eq!((m, c), (m0, c0));
    }

    #[test]
    fn long_time_limit_is_lyapunov_solution() {
        let g = Matrix2::new(0.5, 0.0, 0.0, 0.5);
        let (m, c) = exact_linear_moments(&damped(), &g, &Vector2::new(1.0, 1.0), &Matrix2::zeros(), 100.0);
        assert_relative_eq!(c, Matrix2::new(1.125, -0.25, -0.25, 1.0), epsilon = 1e-8);
        assert!(m.norm() < 1e-9);
    }

    #[test]
    fn rotation_preserves_identity() {
        let a = Matrix2::new(0.0, 1.0, -1.0, 0.0);
        for t in [0.3, 2.0, 17.5] {
            let (_, c) = exact_linear_moments(&a, &Matrix2::zeros(), &Vector2::zeros(), &Matrix2::identity(), t);
            assert_relative_eq!(c, Matrix2::identity(), epsilon = 1e-12);
        }
    }

    #[test]
    fn scalar_ou_closed_form() {
        // dx = −x dt + √2 dW (in both coordinates): Var = 1 − e^{−2t}.
        let a = -Matrix2::identity();
        let g = 2.0 * Matrix2::identity();
        let (_, c) = exact_linear_moments(&a, &g, &Vector2::zeros(), &Matrix2::zeros(), 0.7);
        assert_relative_eq!(c[(0, 0)], 1.0 - (-1.4f64).exp(), epsilon = 1e-14);
        assert_relative_eq!(c[(0, 1)], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn transition_reproduces_step_covariance() {
        // Joint covariance implied by (ΔW, X) must reproduce Q(h).
        let a = damped();
        let b = [[-0.5, 0.0], [0.0, -0.5]];
        let h = 0.05;
        let tr = LinearTransition::new(&a, &b, h);
        let k = Matrix2::new(tr.gain[(0, 0)], tr.gain[(0, 1)], tr.gain[(1, 0)], tr.gain[(1, 1)]);
        let implied = k * k.transpose() * h + tr.residual_sqrt * tr.residual_sqrt;
        let (_, q) = propagator(&a, &Matrix2::new(0.25, 0.0, 0.0, 0.25), h);
        assert_relative_eq!(implied, q, epsilon = 1e-15);
        // Conditional variance is O(h³).
        assert!(tr.residual_sqrt.norm_squared() < h.powi(3));
    }
}
