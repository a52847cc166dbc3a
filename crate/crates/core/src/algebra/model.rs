//! Stochastic phase-space models built from generating functions, and the
//! second-order generators, dissipations and drift fields they induce.

use num_traits::Signed;
use thiserror::Error;

use super::field::{hamiltonian_vector_field, poisson_bracket, VectorField};
use super::polynomial::{rat, Polynomial, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("action scale s must be strictly positive, got {0}")]
    NonPositiveActionScale(Rational),
    #[error("divergence law for plain-noise models does not apply: model has {0} conjugate pair channel(s)")]
    ConjugatePairsPresent(usize),
}

/// One source of noise. A plain channel is driven by a single Wiener
/// process `Q_k` coupled through `F_k`; a conjugate pair is driven by
/// `(Q_k, P_k)` with `{Q_k, P_k} = 1/s`, coupled through `(F_k, G_k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NoiseChannel {
    Plain { f: Polynomial },
    ConjugatePair { f: Polynomial, g: Polynomial },
}

impl NoiseChannel {
    pub fn plain(f: Polynomial) -> Self {
        NoiseChannel::Plain { f }
    }

    pub fn pair(f: Polynomial, g: Polynomial) -> Self {
        NoiseChannel::ConjugatePair { f, g }
    }

    /// Generating functions in increment order: `F` then (for pairs) `G`.
    pub fn generators(&self) -> impl Iterator<Item = &Polynomial> {
        let (f, g) = match self {
            NoiseChannel::Plain { f } => (f, None),
            NoiseChannel::ConjugatePair { f, g } => (f, Some(g)),
        };
        std::iter::once(f).chain(g)
    }

    pub fn is_pair(&self) -> bool {
        matches!(self, NoiseChannel::ConjugatePair { .. })
    }

    /// Number of Wiener increments this channel consumes per step.
    pub fn width(&self) -> usize {
        if self.is_pair() {
            2
        } else {
            1
        }
    }
}

/// Choice of particular solution `u` of `∇·u = −s⁻¹ Σ {F_k, G_k}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Gauge {
    /// `u = (0, Φ)` with `Φ` the antiderivative in `p` vanishing at `p = 0`.
    #[default]
    PAntiderivative,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSpec {
    hamiltonian: Polynomial,
    channels: Vec<NoiseChannel>,
    action_scale: Rational,
    gauge: Gauge,
}

impl ModelSpec {
    pub fn new(
        hamiltonian: Polynomial,
        channels: Vec<NoiseChannel>,
        action_scale: Rational,
    ) -> Result<Self, ModelError> {
        if !action_scale.is_positive() {
            return Err(ModelError::NonPositiveActionScale(action_scale));
        }
        Ok(ModelSpec {
            hamiltonian,
            channels,
            action_scale,
            gauge: Gauge::PAntiderivative,
        })
    }

    /// A noiseless model; the flow is the Hamiltonian flow of `h`.
    pub fn hamiltonian_only(h: Polynomial) -> Self {
        ModelSpec {
            hamiltonian: h,
            channels: Vec::new(),
            action_scale: rat(1, 1),
            gauge: Gauge::PAntiderivative,
        }
    }

    pub fn hamiltonian(&self) -> &Polynomial {
        &self.hamiltonian
    }

    pub fn channels(&self) -> &[NoiseChannel] {
        &self.channels
    }

    pub fn action_scale(&self) -> &Rational {
        &self.action_scale
    }

    pub fn gauge(&self) -> Gauge {
        self.gauge
    }

    pub fn pair_count(&self) -> usize {
        self.channels.iter().filter(|c| c.is_pair()).count()
    }

    /// Total number of Wiener increments per step.
    pub fn noise_width(&self) -> usize {
        self.channels.iter().map(NoiseChannel::width).sum()
    }

    /// Every `F_k` and `G_k` in increment order.
    pub fn generating_functions(&self) -> impl Iterator<Item = &Polynomial> {
        self.channels.iter().flat_map(NoiseChannel::generators)
    }

    /// Noise vector fields `σ_k = X_{F_k}`, `ς_k = X_{G_k}` in increment order.
    pub fn noise_fields(&self) -> Vec<VectorField> {
        self.generating_functions().map(hamiltonian_vector_field).collect()
    }

    /// `Σ_pairs {F_k, G_k}`.
    pub fn pair_bracket_sum(&self) -> Polynomial {
        let mut acc = Polynomial::zero();
        for ch in &self.channels {
            if let NoiseChannel::ConjugatePair { f, g } = ch {
                acc += &poisson_bracket(f, g);
            }
        }
        acc
    }

    /// The gauge field `u` with `∇·u = −s⁻¹ Σ_pairs {F_k, G_k}`; zero when
    /// the model has no conjugate pairs.
    pub fn gauge_field(&self) -> VectorField {
        if self.pair_count() == 0 {
            return VectorField::zero();
        }
        let phi = self.pair_bracket_sum().scale(&(-self.action_scale.recip()));
        match self.gauge {
            Gauge::PAntiderivative => VectorField::new(Polynomial::zero(), phi.antiderivative_p()),
        }
    }

    /// Itô drift: the Hamiltonian field of `H`, plus
    /// `½({∂F/∂p, F}, −{∂F/∂q, F})` for every generating function, plus the
    /// gauge field.
    pub fn drift_field(&self) -> VectorField {
        let half = rat(1, 2);
        let mut v = hamiltonian_vector_field(&self.hamiltonian);
        for f in self.generating_functions() {
            let cq = poisson_bracket(&f.d_dp(), f).scale(&half);
            let cp = poisson_bracket(&f.d_dq(), f).scale(&(-&half));
            v += &VectorField::new(cq, cp);
        }
        v += &self.gauge_field();
        v
    }

    /// Drift divergence predicted for plain-noise models:
    /// `−Σ_k (F_qq F_pp − F_qp²)`.
    pub fn theorem1_divergence(&self) -> Result<Polynomial, ModelError> {
        let pairs = self.pair_count();
        if pairs > 0 {
            return Err(ModelError::ConjugatePairsPresent(pairs));
        }
        let mut acc = Polynomial::zero();
        for f in self.generating_functions() {
            let fq = f.d_dq();
            let fp = f.d_dp();
            let fqq = fq.d_dq();
            let fpp = fp.d_dp();
            let fqp = fq.d_dp();
            acc -= &(&(&fqq * &fpp) - &(&fqp * &fqp));
        }
        Ok(acc)
    }

    /// Right-hand side of the general dissipation law:
    /// `Σ_k {{f,F_k},{g,F_k}} + Σ_pairs {{f,G_k},{g,G_k}} + s⁻¹ Σ_pairs {F_k,G_k} {f,g}`.
    pub fn dissipation_rhs(&self, f: &Polynomial, g: &Polynomial) -> Polynomial {
        let mut acc = Polynomial::zero();
        for h in self.generating_functions() {
            acc += &poisson_bracket(&poisson_bracket(f, h), &poisson_bracket(g, h));
        }
        if self.pair_count() > 0 {
            let k = self.pair_bracket_sum().scale(&self.action_scale.recip());
            acc += &(&k * &poisson_bracket(f, g));
        }
        acc
    }

    /// True when the drift is affine and every noise field is constant.
    pub fn is_linear(&self) -> bool {
        self.drift_field().degree() <= 1 && self.generating_functions().all(|f| f.degree() <= 1)
    }
}

/// A linear differential operator acting on polynomial observables.
pub trait Generator {
    fn apply(&self, f: &Polynomial) -> Polynomial;
}

impl Generator for VectorField {
    fn apply(&self, f: &Polynomial) -> Polynomial {
        VectorField::apply(self, f)
    }
}

impl Generator for ModelSpec {
    /// `{f,H} + ½ Σ {{f,F_k},F_k} (+ {{f,G_k},G_k}) + u·∇f`.
    fn apply(&self, f: &Polynomial) -> Polynomial {
        let mut acc = poisson_bracket(f, &self.hamiltonian);
        let mut second = Polynomial::zero();
        for h in self.generating_functions() {
            second += &poisson_bracket(&poisson_bracket(f, h), h);
        }
        acc += &second.scale(&rat(1, 2));
        let u = self.gauge_field();
        if !u.is_zero() {
            acc += &u.apply(f);
        }
        acc
    }
}

/// `𝒟_L(f, g) = L{f,g} − {Lf, g} − {f, Lg}`.
pub fn dissipation<L: Generator + ?Sized>(l: &L, f: &Polynomial, g: &Polynomial) -> Polynomial {
    let lfg = l.apply(&poisson_bracket(f, g));
    let a = poisson_bracket(&l.apply(f), g);
    let b = poisson_bracket(f, &l.apply(g));
    &(&lfg - &a) - &b
}

/// `Γ_L(f, g) = L(fg) − L(f) g − f L(g)`.
pub fn squared_field<L: Generator + ?Sized>(l: &L, f: &Polynomial, g: &Polynomial) -> Polynomial {
    let lfg = l.apply(&(f * g));
    let a = &l.apply(f) * g;
    let b = f * &l.apply(g);
    &(&lfg - &a) - &b
}

/// Exponential growth rate of `det J` along the flow:
/// `∇·v + Σ_k det(∂σ_k/∂x)`. For models whose flow preserves the system
/// bracket this vanishes identically.
pub fn liouville_rate(model: &ModelSpec) -> Polynomial {
    let mut acc = model.drift_field().divergence();
    for sigma in model.noise_fields() {
        let [[a, b], [c, d]] = sigma.jacobian();
        acc += &(&(&a * &d) - &(&b * &c));
    }
    acc
}

impl ModelSpec {
    /// The same Hamiltonian with every channel removed.
    pub fn without_channels(&self) -> ModelSpec {
        ModelSpec::hamiltonian_only(self.hamiltonian.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    /// Example-2 instance m = ω = 1, γ = 9/16, zScale = 2.
    fn example2() -> ModelSpec {
        ModelSpec::new(
            poly("1/2*p^2 + 1/2*q^2 + 9/32*q*p"),
            vec![NoiseChannel::plain(poly("3/16*p^2 + 3/4*q^2"))],
            rat(1, 1),
        )
        .unwrap()
    }

    /// Linear symplectic instance m = ω = ε = s = 1, γ = 1/4, z = 0.
    fn linear_quarter() -> ModelSpec {
        ModelSpec::new(
            poly("1/2*p^2 + 1/2*q^2"),
            vec![NoiseChannel::pair(poly("-1/2*p"), poly("1/2*q"))],
            rat(1, 1),
        )
        .unwrap()
    }

    #[test]
    fn rejects_nonpositive_action_scale() {
        assert!(ModelSpec::new(Polynomial::zero(), vec![], rat(0, 1)).is_err());
        assert!(ModelSpec::new(Polynomial::zero(), vec![], rat(-1, 2)).is_err());
    }

    #[test]
    fn drift_examples() {
        assert_eq!(
            example2().drift_field(),
            VectorField::new(poly("p"), poly("-q - 9/16*p"))
        );
        assert_eq!(
            linear_quarter().drift_field(),
            VectorField::new(poly("p"), poly("-q - 1/4*p"))
        );
        let h = poly("q^4 + q*p^2");
        let ex1 = ModelSpec::new(h.clone(), vec![NoiseChannel::plain(poly("p + 2*q"))], rat(1, 1)).unwrap();
        assert_eq!(ex1.drift_field(), hamiltonian_vector_field(&h));
    }

    #[test]
    fn gauge_examples() {
        assert_eq!(
            linear_quarter().gauge_field(),
            VectorField::new(Polynomial::zero(), poly("-1/4*p"))
        );
        assert!(example2().gauge_field().is_zero());
        let m = ModelSpec::new(
            Polynomial::zero(),
            vec![NoiseChannel::pair(poly("q^2"), poly("p^2"))],
            rat(1, 1),
        )
        .unwrap();
        let u = m.gauge_field();
        assert_eq!(u, VectorField::new(Polynomial::zero(), poly("-2*q*p^2")));
        assert_eq!(u.divergence(), poly("-4*q*p"));
    }

    #[test]
    fn generator_examples() {
        assert_eq!(example2().apply(&poly("q")), poly("p"));
        assert!(example2().apply(&poly("7/3")).is_zero());
        assert_eq!(linear_quarter().apply(&poly("q^2")), poly("2*q*p + 1/4"));
    }

    #[test]
    fn dissipation_examples() {
        let dho = VectorField::new(poly("p"), poly("-q - 1/2*p"));
        assert_eq!(dissipation(&dho, &poly("q"), &poly("p")), poly("1/2"));
        let ham = hamiltonian_vector_field(&poly("q^3 - q*p + p^2"));
        assert!(dissipation(&ham, &poly("q^2*p"), &poly("p^3 + q")).is_zero());
        assert_eq!(dissipation(&linear_quarter(), &poly("q"), &poly("p")), poly("1/4"));
    }

    #[test]
    fn squared_field_examples() {
        let pure = ModelSpec::hamiltonian_only(poly("p^2 + q^3"));
        assert!(squared_field(&pure, &poly("q*p"), &poly("p^2")).is_zero());
        assert_eq!(squared_field(&linear_quarter(), &poly("q"), &poly("q")), poly("1/4"));
        assert!(squared_field(&example2(), &Polynomial::one(), &poly("q^2*p")).is_zero());
    }

    #[test]
    fn dissipation_rhs_examples() {
        assert_eq!(linear_quarter().dissipation_rhs(&poly("q"), &poly("p")), poly("1/4"));
        assert_eq!(example2().dissipation_rhs(&poly("q"), &poly("p")), poly("9/16"));
        let f = poly("q^2 + p");
        assert_eq!(
            linear_quarter().dissipation_rhs(&f, &f),
            dissipation(&linear_quarter(), &f, &f)
        );
    }

    #[test]
    fn plain_divergence_examples() {
        assert_eq!(example2().theorem1_divergence().unwrap(), poly("-9/16"));
        let lin = ModelSpec::new(poly("q*p"), vec![NoiseChannel::plain(poly("3*p - q"))], rat(1, 1)).unwrap();
        assert!(lin.theorem1_divergence().unwrap().is_zero());
        let quartic = ModelSpec::new(
            Polynomial::zero(),
            vec![NoiseChannel::plain(poly("q^2*p^2"))],
            rat(1, 1),
        )
        .unwrap();
        assert_eq!(quartic.theorem1_divergence().unwrap(), poly("12*q^2*p^2"));
        assert_eq!(
            linear_quarter().theorem1_divergence(),
            Err(ModelError::ConjugatePairsPresent(1))
        );
    }

    #[test]
    fn liouville_rate_vanishes_for_plain_noise() {
        assert!(liouville_rate(&example2()).is_zero());
        assert_eq!(liouville_rate(&linear_quarter()), poly("-1/4"));
    }
}
