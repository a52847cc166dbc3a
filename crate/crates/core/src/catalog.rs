//! Constructors for the named models: the Hamiltonian-plus-linear-noise
//! family, the quadratic-noise dilation of the damped oscillator, the
//! linear symplectic-noise oscillator, and the quantum Langevin coefficient
//! family it is compared against.

use nalgebra::Matrix2;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::algebra::{
    hamiltonian_vector_field, rat, rational_from_f64, rational_to_f64, ModelSpec, NoiseChannel, Polynomial, Rational,
};
use crate::steady::is_hurwitz;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("parameter {name} = {value} is outside its domain ({rule})")]
    Domain {
        name: &'static str,
        value: String,
        rule: &'static str,
    },
    #[error("alphas and betas must have equal length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("model is not linear: {0}")]
    Nonlinear(String),
}

fn positive(name: &'static str, x: &Rational) -> Result<(), CatalogError> {
    if x.is_positive() {
        Ok(())
    } else {
        Err(CatalogError::Domain {
            name,
            value: x.to_string(),
            rule: "must be > 0",
        })
    }
}

fn positive_f64(name: &'static str, x: f64) -> Result<(), CatalogError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CatalogError::Domain {
            name,
            value: x.to_string(),
            rule: "must be finite and > 0",
        })
    }
}

/// Square root of a non-negative rational. Exact when numerator and
/// denominator are perfect squares (second component `true`); otherwise a
/// Newton-refined approximation with relative error below 1e-30.
pub fn sqrt_rational(x: &Rational) -> (Rational, bool) {
    assert!(!x.is_negative(), "square root of a negative rational");
    if x.is_zero() {
        return (Rational::zero(), true);
    }
    let (n, d) = (x.numer(), x.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        return (Rational::new(rn, rd), true);
    }
    let seed = rational_from_f64(rational_to_f64(x).sqrt()).expect("finite square root");
    let two = Rational::from_integer(BigInt::from(2));
    let refined = (&seed + x / &seed) / two;
    (refined, false)
}

/// Parameters of the linear symplectic-noise oscillator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearModelParams {
    pub m: Rational,
    pub omega: Rational,
    pub gamma: Rational,
    pub epsilon: Rational,
    pub s: Rational,
    pub z: Rational,
}

impl LinearModelParams {
    pub fn new(m: Rational, omega: Rational, gamma: Rational, epsilon: Rational, s: Rational, z: Rational) -> Self {
        LinearModelParams {
            m,
            omega,
            gamma,
            epsilon,
            s,
            z,
        }
    }

    /// Exact conversion from binary floating point.
    pub fn from_f64(m: f64, omega: f64, gamma: f64, epsilon: f64, s: f64, z: f64) -> Result<Self, CatalogError> {
        let conv = |name: &'static str, x: f64| {
            rational_from_f64(x).ok_or(CatalogError::Domain {
                name,
                value: x.to_string(),
                rule: "must be finite",
            })
        };
        let p = LinearModelParams {
            m: conv("m", m)?,
            omega: conv("omega", omega)?,
            gamma: conv("gamma", gamma)?,
            epsilon: conv("epsilon", epsilon)?,
            s: conv("s", s)?,
            z: conv("z", z)?,
        };
        p.validate()?;
        Ok(p)
    }

    /// `m = ω = ε = s = 1`, `z = 0`, damping `gamma`.
    pub fn unit(gamma: Rational) -> Self {
        let one = rat(1, 1);
        LinearModelParams::new(one.clone(), one.clone(), gamma, one.clone(), one, rat(0, 1))
    }

    pub fn with_z(&self, z: Rational) -> Self {
        LinearModelParams { z, ..self.clone() }
    }

    pub fn validate(&self) -> Result<(), CatalogError> {
        positive("m", &self.m)?;
        positive("omega", &self.omega)?;
        positive("gamma", &self.gamma)?;
        positive("epsilon", &self.epsilon)?;
        positive("s", &self.s)
    }

    pub fn to_f64(&self) -> LinearParamsF64 {
        LinearParamsF64 {
            m: rational_to_f64(&self.m),
            omega: rational_to_f64(&self.omega),
            gamma: rational_to_f64(&self.gamma),
            epsilon: rational_to_f64(&self.epsilon),
            s: rational_to_f64(&self.s),
            z: rational_to_f64(&self.z),
        }
    }

    /// Drift matrix `[[z, 1/m], [−mω², −z−γ]]`.
    pub fn drift_matrix(&self) -> Matrix2<f64> {
        let p = self.to_f64();
        Matrix2::new(p.z, 1.0 / p.m, -p.m * p.omega * p.omega, -p.z - p.gamma)
    }

    /// Diffusion tensor `diag(γsε, γs/ε)`.
    pub fn diffusion_matrix(&self) -> Matrix2<f64> {
        let p = self.to_f64();
        Matrix2::new(p.gamma * p.s * p.epsilon, 0.0, 0.0, p.gamma * p.s / p.epsilon)
    }
}

/// Floating-point view of [`LinearModelParams`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearParamsF64 {
    pub m: f64,
    pub omega: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub s: f64,
    pub z: f64,
}

fn oscillator_hamiltonian(m: &Rational, omega: &Rational) -> Polynomial {
    let half = rat(1, 2);
    let kinetic = Polynomial::monomial(&half / m, 0, 2);
    let potential = Polynomial::monomial(&half * m * omega * omega, 2, 0);
    &kinetic + &potential
}

/// `H = p²/2m + ½mω²q² + zqp` with one conjugate pair
/// `F = −√(γsε) p`, `G = √(γs/ε) q`.
///
/// `G`'s coefficient is taken as `γs / √(γsε)` so that `s⁻¹{F, G} = γ` holds
/// exactly even when the square root is irrational.
pub fn build_linear_model(params: &LinearModelParams) -> Result<ModelSpec, CatalogError> {
    params.validate()?;
    let gs = &params.gamma * &params.s;
    let (a, _) = sqrt_rational(&(&gs * &params.epsilon));
    let b = &gs / &a;
    let h = &oscillator_hamiltonian(&params.m, &params.omega) + &Polynomial::monomial(params.z.clone(), 1, 1);
    let f = Polynomial::monomial(-a, 0, 1);
    let g = Polynomial::monomial(b, 1, 0);
    Ok(ModelSpec::new(h, vec![NoiseChannel::pair(f, g)], params.s.clone()).expect("validated s"))
}

/// Single plain-channel dilation of the damped oscillator:
/// `H = p²/2m + ½mω²q² + ½γqp`, `F = √γ (p²/2ζ + ζq²/2)` with `ζ = zScale`.
pub fn build_dho_model(
    m: &Rational,
    omega: &Rational,
    gamma: &Rational,
    z_scale: &Rational,
) -> Result<ModelSpec, CatalogError> {
    positive("m", m)?;
    positive("omega", omega)?;
    positive("gamma", gamma)?;
    positive("zScale", z_scale)?;
    let half = rat(1, 2);
    let h = &oscillator_hamiltonian(m, omega) + &Polynomial::monomial(&half * gamma, 1, 1);
    let (root, _) = sqrt_rational(gamma);
    let f = Polynomial::from_terms([
        (crate::algebra::Monomial::new(0, 2), &root * &half / z_scale),
        (crate::algebra::Monomial::new(2, 0), &root * &half * z_scale),
    ]);
    Ok(ModelSpec::new(h, vec![NoiseChannel::plain(f)], Rational::one()).expect("s = 1"))
}

/// Plain channels `F_k = α_k p + β_k q` on top of an arbitrary Hamiltonian.
pub fn build_example1_model(h: Polynomial, alphas: &[Rational], betas: &[Rational]) -> Result<ModelSpec, CatalogError> {
    if alphas.len() != betas.len() {
        return Err(CatalogError::LengthMismatch(alphas.len(), betas.len()));
    }
    let channels = alphas
        .iter()
        .zip(betas)
        .map(|(a, b)| {
            NoiseChannel::plain(&Polynomial::monomial(a.clone(), 0, 1) + &Polynomial::monomial(b.clone(), 1, 0))
        })
        .collect();
    Ok(ModelSpec::new(h, channels, Rational::one()).expect("s = 1"))
}

/// Constant noise coefficient vector of one Wiener source.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseCoefficient {
    /// `dQ1`, `dP1`, `dQ2`, ...
    pub label: String,
    pub vector: [f64; 2],
}

/// Drift matrix, diffusion tensor and per-source noise vectors of a linear
/// additive-noise model `dx = A x dt + Σ b_k dW_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearDriftDiffusion {
    pub a: Matrix2<f64>,
    pub g: Matrix2<f64>,
    pub noise: Vec<NoiseCoefficient>,
}

impl LinearDriftDiffusion {
    /// Assembles `g = Σ b_k b_kᵀ` from the noise vectors.
    pub fn from_noise(a: Matrix2<f64>, noise: Vec<NoiseCoefficient>) -> Self {
        let mut g = Matrix2::zeros();
        for n in &noise {
            let [x, y] = n.vector;
            g += Matrix2::new(x * x, x * y, y * x, y * y);
        }
        LinearDriftDiffusion { a, g, noise }
    }

    /// Reads off `A`, the noise vectors and `g` from a model whose drift is
    /// homogeneous linear and whose noise fields are constant.
    pub fn from_model(model: &ModelSpec) -> Result<Self, CatalogError> {
        let v = model.drift_field();
        for (name, comp) in [("v^q", &v.vq), ("v^p", &v.vp)] {
            if comp.degree() > 1 {
                return Err(CatalogError::Nonlinear(format!(
                    "{name} = {comp} has degree {}",
                    comp.degree()
                )));
            }
            if !comp.coeff(0, 0).is_zero() {
                return Err(CatalogError::Nonlinear(format!(
                    "{name} = {comp} has a constant offset"
                )));
            }
        }
        let c = |p: &Polynomial, i, j| rational_to_f64(&p.coeff(i, j));
        let a = Matrix2::new(c(&v.vq, 1, 0), c(&v.vq, 0, 1), c(&v.vp, 1, 0), c(&v.vp, 0, 1));
        let mut noise = Vec::new();
        for (k, ch) in model.channels().iter().enumerate() {
            let labels: &[&str] = if ch.is_pair() { &["dQ", "dP"] } else { &["dQ"] };
            for (label, f) in labels.iter().zip(ch.generators()) {
                if f.degree() > 1 {
                    return Err(CatalogError::Nonlinear(format!(
                        "generating function {f} is not affine"
                    )));
                }
                let sigma = hamiltonian_vector_field(f);
                noise.push(NoiseCoefficient {
                    label: format!("{label}{}", k + 1),
                    vector: [c(&sigma.vq, 0, 0), c(&sigma.vp, 0, 0)],
                });
            }
        }
        Ok(LinearDriftDiffusion::from_noise(a, noise))
    }
}

/// Parameters of the quantum Langevin coefficient family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantumComparisonParams {
    pub hbar: f64,
    pub m: f64,
    pub omega: f64,
    pub gamma: f64,
    /// Thermal occupation.
    pub n: f64,
    pub mu: f64,
}

impl QuantumComparisonParams {
    pub fn validate(&self) -> Result<(), CatalogError> {
        positive_f64("hbar", self.hbar)?;
        positive_f64("m", self.m)?;
        positive_f64("omega", self.omega)?;
        positive_f64("gamma", self.gamma)?;
        if !(self.n >= 0.0 && self.n.is_finite()) {
            return Err(CatalogError::Domain {
                name: "n",
                value: self.n.to_string(),
                rule: "must be finite and >= 0",
            });
        }
        if !self.mu.is_finite() {
            return Err(CatalogError::Domain {
                name: "mu",
                value: self.mu.to_string(),
                rule: "must be finite",
            });
        }
        Ok(())
    }

    /// Drift matrix `[[½γ − μ, 1/m], [−mω², −(½γ + μ)]]`.
    pub fn drift_matrix(&self) -> Matrix2<f64> {
        let h = 0.5 * self.gamma;
        Matrix2::new(
            h - self.mu,
            1.0 / self.m,
            -self.m * self.omega * self.omega,
            -(h + self.mu),
        )
    }
}

/// Outcome of comparing the quantum Langevin family with the classical
/// linear symplectic model.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumComparison {
    pub params: QuantumComparisonParams,
    pub dynamics: LinearDriftDiffusion,
    pub hurwitz: bool,
    /// Classical action scale `s = ħ/2`.
    pub s: f64,
    /// Classical `ε = 1/mω`.
    pub epsilon: f64,
    /// Least-squares `μ` making the quantum drift equal the classical
    /// `z = 0` drift with the same `m, ω, γ`.
    pub matching_mu: f64,
    /// Max-abs drift mismatch at `matching_mu`.
    pub matching_residual: f64,
    /// Max-abs drift mismatch at `μ = γ`.
    pub mu_equals_gamma_residual: f64,
    /// `k_B T = ħω / ln(1 + 1/n)`; absent for `n = 0`.
    pub temperature: Option<f64>,
}

pub fn quantum_comparison(params: &QuantumComparisonParams) -> Result<QuantumComparison, CatalogError> {
    params.validate()?;
    let QuantumComparisonParams {
        hbar,
        m,
        omega,
        gamma,
        n,
        ..
    } = *params;
    let q_coeff = |occ: f64| (gamma * occ * hbar / (2.0 * m * omega)).sqrt();
    let p_coeff = |occ: f64| (gamma * occ * hbar * m * omega / 2.0).sqrt();
    let noise = vec![
        NoiseCoefficient {
            label: "dQ1".into(),
            vector: [-q_coeff(n + 1.0), 0.0],
        },
        NoiseCoefficient {
            label: "dP1".into(),
            vector: [0.0, -p_coeff(n + 1.0)],
        },
        NoiseCoefficient {
            label: "dQ2".into(),
            vector: [-q_coeff(n), 0.0],
        },
        NoiseCoefficient {
            label: "dP2".into(),
            vector: [0.0, p_coeff(n)],
        },
    ];
    let a = params.drift_matrix();
    let dynamics = LinearDriftDiffusion::from_noise(a, noise);

    // A(μ) = A0 + μ·D with D = −I; solve min_μ ‖A(μ) − A_cl‖_F.
    let classical = Matrix2::new(0.0, 1.0 / m, -m * omega * omega, -gamma);
    let at = |mu: f64| QuantumComparisonParams { mu, ..*params }.drift_matrix();
    let a0 = at(0.0);
    let dir = at(1.0) - a0;
    let matching_mu = -dir.dot(&(a0 - classical)) / dir.dot(&dir);
    let residual = |mu: f64| (at(mu) - classical).abs().max();

    let temperature = (n > 0.0).then(|| hbar * omega / (1.0 + 1.0 / n).ln());

    Ok(QuantumComparison {
        params: *params,
        hurwitz: is_hurwitz(&a),
        dynamics,
        s: hbar / 2.0,
        epsilon: 1.0 / (m * omega),
        matching_mu,
        matching_residual: residual(matching_mu),
        mu_equals_gamma_residual: residual(gamma),
        temperature,
    })
}

/// Max-abs coefficient mismatch between two linear dynamics, relative to
/// the larger entry of the reference.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoefficientMismatch {
    pub drift: f64,
    pub diffusion: f64,
}

impl QuantumComparison {
    /// Classical parameters under `s = ħ/2`, `ε = 1/mω`, `z = 0`.
    pub fn classical_params(&self) -> Result<LinearModelParams, CatalogError> {
        let p = &self.params;
        LinearModelParams::from_f64(p.m, p.omega, p.gamma, self.epsilon, self.s, 0.0)
    }

    /// Relative mismatch of `A` and `g` against the classical linear model.
    pub fn classical_mismatch(&self) -> Result<CoefficientMismatch, CatalogError> {
        let classical = LinearDriftDiffusion::from_model(&build_linear_model(&self.classical_params()?)?)?;
        let rel = |x: Matrix2<f64>, r: Matrix2<f64>| (x - r).abs().max() / r.abs().max();
        Ok(CoefficientMismatch {
            drift: rel(self.dynamics.a, classical.a),
            diffusion: rel(self.dynamics.g, classical.g),
        })
    }
}
