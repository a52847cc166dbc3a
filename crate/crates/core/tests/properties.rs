//! Property tests for invariants that span modules.

use nalgebra::Matrix2;
use proptest::prelude::*;

use canonflow::algebra::random::{random_model, random_polynomial};
use canonflow::algebra::{
    dissipation, hamiltonian_vector_field, poisson_bracket, rat, Generator, Polynomial, Rational, VectorField,
};
use canonflow::catalog::{
    build_dho_model, build_example1_model, build_linear_model, quantum_comparison, LinearDriftDiffusion,
    LinearModelParams, QuantumComparisonParams,
};
use canonflow::config::{model_to_config_json, parse_model_config};
use canonflow::sde::{path_rng, simulate_ensemble_with_threads, simulate_path, IntegratorConfig};
use canonflow::steady::{
    find_zero_cross_z, is_positive_definite, lyapunov_residual, lyapunov_solve, stationarity_residuals,
    zero_cross_z_closed_form,
};

fn positive_rat() -> impl Strategy<Value = Rational> {
    (1i64..=8, 1i64..=4).prop_map(|(a, b)| rat(a, b))
}

fn square_rat() -> impl Strategy<Value = Rational> {
    (1i64..=4, 1i64..=4).prop_map(|(a, b)| rat(a * a, b * b))
}

fn linear_params() -> impl Strategy<Value = LinearModelParams> {
    (
        positive_rat(),
        positive_rat(),
        positive_rat(),
        positive_rat(),
        positive_rat(),
        -4i64..=4,
    )
        .prop_map(|(m, w, g, e, s, z)| LinearModelParams::new(m, w, g, e, s, rat(z, 8)))
}

fn hurwitz_params() -> impl Strategy<Value = LinearModelParams> {
    linear_params().prop_filter("Hurwitz drift", |p| {
        let a = p.drift_matrix();
        a.trace() < 0.0 && a.determinant() > 0.0
    })
}

fn model_from_seed(seed: u64, degree: u32) -> canonflow::algebra::ModelSpec {
    random_model(&mut path_rng(seed, 0), degree)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pair_dissipation_identity_holds(seed in any::<u64>()) {
        let mut rng = path_rng(seed, 1);
        let m = random_model(&mut rng, 4);
        let f = random_polynomial(&mut rng, 3);
        let g = random_polynomial(&mut rng, 3);
        prop_assert_eq!(dissipation(&m, &f, &g), m.dissipation_rhs(&f, &g));
    }

    #[test]
    fn drift_is_generator_on_coordinates(seed in any::<u64>()) {
        let m = model_from_seed(seed, 4);
        let v = m.drift_field();
        prop_assert_eq!(m.apply(&Polynomial::q()), v.vq);
        prop_assert_eq!(m.apply(&Polynomial::p()), v.vp);
    }

    #[test]
    fn gauge_divergence_law(seed in any::<u64>()) {
        let m = model_from_seed(seed, 4);
        let expected = m.pair_bracket_sum().scale(&(-m.action_scale().recip()));
        prop_assert_eq!(m.gauge_field().divergence(), expected);
    }

    #[test]
    fn linear_generating_functions_keep_drift_hamiltonian(
        seed in any::<u64>(),
        coeffs in proptest::collection::vec((-6i64..=6, 1i64..=4, -6i64..=6, 1i64..=4), 1..4),
    ) {
        let h = random_polynomial(&mut path_rng(seed, 2), 4);
        let alphas: Vec<Rational> = coeffs.iter().map(|c| rat(c.0, c.1)).collect();
        let betas: Vec<Rational> = coeffs.iter().map(|c| rat(c.2, c.3)).collect();
        let m = build_example1_model(h.clone(), &alphas, &betas).unwrap();
        let v = m.drift_field();
        prop_assert_eq!(v.hamiltonian().map(|k| hamiltonian_vector_field(&k)), Some(v.clone()));
        prop_assert_eq!(v, hamiltonian_vector_field(&h));
        prop_assert!(m.theorem1_divergence().unwrap().is_zero());
    }

    #[test]
    fn linear_model_drift_and_pair_bracket(p in linear_params()) {
        let model = build_linear_model(&p).unwrap();
        let v = model.drift_field();
        let (m, w, g, z) = (&p.m, &p.omega, &p.gamma, &p.z);
        let vq = &Polynomial::monomial(z.clone(), 1, 0) + &Polynomial::monomial(m.recip(), 0, 1);
        let vp = &Polynomial::monomial(-(m * w * w), 1, 0) + &Polynomial::monomial(-(z + g), 0, 1);
        prop_assert_eq!(v, VectorField::new(vq, vp));
        let ch = &model.channels()[0];
        let gens: Vec<&Polynomial> = ch.generators().collect();
        let k = poisson_bracket(gens[0], gens[1]).scale(&p.s.recip());
        prop_assert_eq!(k, Polynomial::constant(p.gamma.clone()));
    }

    #[test]
    fn dho_drift_is_damped_oscillator(m in positive_rat(), w in positive_rat(), g in square_rat(), zs in positive_rat()) {
        let model = build_dho_model(&m, &w, &g, &zs).unwrap();
        let vq = Polynomial::monomial(m.recip(), 0, 1);
        let vp = &Polynomial::monomial(-(&m * &w * &w), 1, 0) + &Polynomial::monomial(-g.clone(), 0, 1);
        prop_assert_eq!(model.drift_field(), VectorField::new(vq, vp));
    }

    #[test]
    fn config_printer_round_trips(seed in any::<u64>()) {
        let m = model_from_seed(seed, 3);
        let back = parse_model_config(&model_to_config_json(&m)).unwrap();
        prop_assert_eq!(back.model, m);
    }

    #[test]
    fn lyapunov_solution_is_stationary(p in hurwitz_params()) {
        let model = build_linear_model(&p).unwrap();
        let lin = LinearDriftDiffusion::from_model(&model).unwrap();
        let sigma = lyapunov_solve(&lin.a, &lin.g).unwrap();
        let scale = sigma.abs().max().max(lin.g.abs().max()).max(1.0);
        prop_assert!(lyapunov_residual(&lin.a, &lin.g, &sigma) <= 1e-12 * scale);
        prop_assert!(is_positive_definite(&sigma));
        let r = stationarity_residuals(&model, &sigma).unwrap();
        prop_assert!(r.iter().all(|x| x.abs() <= 1e-12 * scale), "{:?}", r);
    }

    #[test]
    fn zero_cross_is_gibbs_and_matches_closed_form(p in hurwitz_params()) {
        let p = p.with_z(rat(0, 1));
        let zc = find_zero_cross_z(&p).unwrap();
        let f = p.to_f64();
        prop_assert!((zc.z_star - zero_cross_z_closed_form(&p)).abs() <= 1e-9);
        let (qq, qp, pp) = (zc.sigma[(0, 0)], zc.sigma[(0, 1)], zc.sigma[(1, 1)]);
        prop_assert!(qp.abs() <= 1e-8 * (qq * pp).sqrt());
        let ratio = f.m * f.m * f.omega * f.omega;
        prop_assert!((pp - ratio * qq).abs() <= 1e-8 * pp);
        prop_assert!((zc.kbt - f.m * f.omega * f.omega * qq).abs() <= 1e-8 * zc.kbt);
    }

    #[test]
    fn quantum_diffusion_is_sum_of_outer_products(
        hbar in 0.1f64..4.0, m in 0.2f64..3.0, w in 0.2f64..3.0, g in 0.1f64..2.0, n in 0.0f64..5.0,
    ) {
        let qc = quantum_comparison(&QuantumComparisonParams { hbar, m, omega: w, gamma: g, n, mu: g / 2.0 }).unwrap();
        let mut sum = Matrix2::zeros();
        for c in &qc.dynamics.noise {
            let v = nalgebra::Vector2::new(c.vector[0], c.vector[1]);
            sum += v * v.transpose();
        }
        prop_assert!((sum - qc.dynamics.g).abs().max() <= 1e-14 * sum.abs().max().max(1.0));
    }

    #[test]
    fn quantum_matches_classical_at_zero_occupation(
        hbar in 0.1f64..4.0, m in 0.2f64..3.0, w in 0.2f64..3.0, g in 0.1f64..2.0,
    ) {
        let qc = quantum_comparison(&QuantumComparisonParams { hbar, m, omega: w, gamma: g, n: 0.0, mu: g / 2.0 }).unwrap();
        let mm = qc.classical_mismatch().unwrap();
        prop_assert!(mm.drift <= 1e-12 && mm.diffusion <= 1e-12, "{:?}", mm);
        prop_assert!((qc.matching_mu - g / 2.0).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn trajectories_are_deterministic(seed in any::<u64>(), x0 in (-2.0f64..2.0, -2.0f64..2.0)) {
        let model = build_linear_model(&LinearModelParams::unit(rat(1, 2))).unwrap();
        let cfg = IntegratorConfig::new(1e-2, 1.0, seed).with_jacobian(true);
        let a = simulate_path(&model, [x0.0, x0.1], &cfg).unwrap();
        let b = simulate_path(&model, [x0.0, x0.1], &cfg).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn ensemble_is_independent_of_worker_count(seed in any::<u64>(), threads in 2usize..6) {
        let model = build_linear_model(&LinearModelParams::unit(rat(1, 2))).unwrap();
        let cfg = IntegratorConfig::new(1e-2, 1.0, seed);
        let one = simulate_ensemble_with_threads(&model, [1.0, 0.0], &cfg, 64, 1).unwrap();
        let many = simulate_ensemble_with_threads(&model, [1.0, 0.0], &cfg, 64, threads).unwrap();
        prop_assert_eq!(one, many);
    }
}

#[test]
fn exact_algebra_at_degree_six() {
    let mut rng = path_rng(6, 0);
    for _ in 0..20 {
        let f = random_polynomial(&mut rng, 6);
        let g = random_polynomial(&mut rng, 6);
        let h = random_polynomial(&mut rng, 6);
        let jacobi = &(&poisson_bracket(&poisson_bracket(&f, &g), &h) + &poisson_bracket(&poisson_bracket(&g, &h), &f))
            + &poisson_bracket(&poisson_bracket(&h, &f), &g);
        assert!(jacobi.is_zero());
    }
}
