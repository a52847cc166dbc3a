//! Random polynomials and models with small rational coefficients, used by
//! the exact identity suites.

use rand::Rng;

use super::field::VectorField;
use super::model::{ModelSpec, NoiseChannel};
use super::polynomial::{rat, Monomial, Polynomial};

/// Each monomial of degree `<= max_degree` is kept with probability 1/2 and
/// gets a coefficient `a/b` with `a ∈ [-6, 6]`, `b ∈ [1, 4]`.
pub fn random_polynomial<R: Rng + ?Sized>(rng: &mut R, max_degree: u32) -> Polynomial {
    let mut out = Polynomial::zero();
    for d in 0..=max_degree {
        for i in 0..=d {
            if rng.random_bool(0.5) {
                let num = rng.random_range(-6i64..=6);
                let den = rng.random_range(1i64..=4);
                out.add_term(Monomial::new(i, d - i), rat(num, den));
            }
        }
    }
    out
}

pub fn random_vector_field<R: Rng + ?Sized>(rng: &mut R, max_degree: u32) -> VectorField {
    VectorField::new(random_polynomial(rng, max_degree), random_polynomial(rng, max_degree))
}

/// A model with one or two channels, each plain or a conjugate pair with
/// equal odds, and action scale drawn from `{1/2, 1, 3/2, 2}`.
pub fn random_model<R: Rng + ?Sized>(rng: &mut R, max_degree: u32) -> ModelSpec {
    let h = random_polynomial(rng, max_degree);
    let n = rng.random_range(1..=2);
    let channels = (0..n)
        .map(|_| {
            let f = random_polynomial(rng, max_degree);
            if rng.random_bool(0.5) {
                NoiseChannel::pair(f, random_polynomial(rng, max_degree))
            } else {
                NoiseChannel::plain(f)
            }
        })
        .collect();
    let s = rat(rng.random_range(1i64..=4), 2);
    ModelSpec::new(h, channels, s).expect("positive action scale")
}

/// A model whose channels are all plain.
pub fn random_plain_model<R: Rng + ?Sized>(rng: &mut R, max_degree: u32) -> ModelSpec {
    let h = random_polynomial(rng, max_degree);
    let n = rng.random_range(1..=2);
    let channels = (0..n)
        .map(|_| NoiseChannel::plain(random_polynomial(rng, max_degree)))
        .collect();
    ModelSpec::new(h, channels, rat(1, 1)).expect("positive action scale")
}
