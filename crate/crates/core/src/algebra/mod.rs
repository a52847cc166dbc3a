//! Exact symbolic core: polynomial observables over the rationals, Poisson
//! brackets, first- and second-order generators and their dissipations.
//!
//! Every identity here is checked by comparing canonical forms, so a
//! passing check is an exact algebraic statement, not a tolerance.

mod field;
mod model;
mod parse;
mod polynomial;
pub mod random;

pub use field::{hamiltonian_vector_field, poisson_bracket, VectorField};
pub use model::{dissipation, liouville_rate, squared_field, Gauge, Generator, ModelError, ModelSpec, NoiseChannel};
pub use parse::{parse_rational, PolyParseError};
pub use polynomial::{rat, rational_from_f64, rational_to_f64, Monomial, Polynomial, Rational};

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn arb_poly(max_degree: u32) -> impl Strategy<Value = Polynomial> {
        let n_monos = ((max_degree + 1) * (max_degree + 2) / 2) as usize;
        proptest::collection::vec(proptest::option::weighted(0.5, (-6i64..=6, 1i64..=4)), n_monos).prop_map(
            move |coeffs| {
                let mut out = Polynomial::zero();
                let mut k = 0;
                for d in 0..=max_degree {
                    for i in 0..=d {
                        if let Some((a, b)) = coeffs[k] {
                            out.add_term(Monomial::new(i, d - i), rat(a, b));
                        }
                        k += 1;
                    }
                }
                out
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn bracket_is_antisymmetric(f in arb_poly(5), g in arb_poly(5)) {
            prop_assert_eq!(poisson_bracket(&f, &g), -poisson_bracket(&g, &f));
        }

        #[test]
        fn bracket_obeys_leibniz(f in arb_poly(4), g in arb_poly(4), h in arb_poly(4)) {
            let lhs = poisson_bracket(&f, &(&g * &h));
            let rhs = &(&poisson_bracket(&f, &g) * &h) + &(&g * &poisson_bracket(&f, &h));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn bracket_obeys_jacobi(f in arb_poly(4), g in arb_poly(4), h in arb_poly(4)) {
            let a = poisson_bracket(&poisson_bracket(&f, &g), &h);
            let b = poisson_bracket(&poisson_bracket(&g, &h), &f);
            let c = poisson_bracket(&poisson_bracket(&h, &f), &g);
            prop_assert!((&(&a + &b) + &c).is_zero());
        }

        #[test]
        fn vector_field_dissipation_is_minus_divergence_times_bracket(
            vq in arb_poly(3), vp in arb_poly(3), f in arb_poly(3), g in arb_poly(3)
        ) {
            let v = VectorField::new(vq, vp);
            let lhs = dissipation(&v, &f, &g);
            let rhs = -(&v.divergence() * &poisson_bracket(&f, &g));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn divergence_free_fields_are_hamiltonian(h in arb_poly(5)) {
            let v = hamiltonian_vector_field(&h);
            let recovered = v.hamiltonian().expect("divergence-free");
            prop_assert_eq!(hamiltonian_vector_field(&recovered), v);
            prop_assert!(recovered.coeff(0, 0) == rat(0, 1));
        }

        #[test]
        fn printer_round_trips(f in arb_poly(6)) {
            let back: Polynomial = f.to_string().parse().unwrap();
            prop_assert_eq!(back, f);
        }
    }
}
