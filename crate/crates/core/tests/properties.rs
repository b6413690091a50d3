use boundent::linalg::{eigh, frobenius_norm, partial_transpose, trace_norm, HermitianOperator};
use boundent::pauli::{PauliBasis, SignVector};
use boundent::protocol::{
    be_strategy, expectation, sample_triples, sep_upper_bound, witness_brute_force, witness_closed_form,
    witness_factored, witness_factored_total, SamplingPlan, TaskSpec,
};
use boundent::random;
use boundent::states::{
    ccnr_dense, coefficients_from_bell, mix_with_white_noise, rho_be, tensor_power, BlochDiagonalState,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_bloch_state(qubits: usize, rng: &mut impl Rng) -> BlochDiagonalState {
    let d = 1usize << (2 * qubits);
    let mut mu: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..1.0f64).powi(3)).collect();
    let total: f64 = mu.iter().sum();
    mu.iter_mut().for_each(|m| *m /= total);
    BlochDiagonalState::new(qubits, coefficients_from_bell(&mu, qubits)).expect("PSD by construction")
}

fn matched_task(state: &BlochDiagonalState) -> TaskSpec {
    let signs = SignVector::from_coefficients(state.lambdas(), 1).unwrap();
    TaskSpec::new(1, 4, signs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn trace_norm_is_bounded_by_frobenius(seed in any::<u64>(), d in 1usize..=16) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random::gue(d, &mut rng);
        let lhs = trace_norm(a.matrix());
        let rhs = (d as f64).sqrt() * frobenius_norm(a.matrix());
        prop_assert!(lhs <= rhs * (1.0 + 1e-10), "{lhs} > {rhs}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigh_round_trip(seed in any::<u64>(), d in 1usize..=64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random::gue(d, &mut rng);
        let spec = eigh(&a);
        let err = spec.reconstruct().max_abs_diff(a.matrix());
        let scale = spec.min().abs().max(spec.max().abs()).max(1.0);
        prop_assert!(err <= 1e-10 * scale);
    }

    #[test]
    fn partial_transpose_preserves_trace_and_norm(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random::gue(16, &mut rng);
        let pt = partial_transpose(&a, 4, 4).unwrap();
        prop_assert_eq!(pt.trace(), a.trace());
        let (f_pt, f_a) = (frobenius_norm(pt.matrix()), frobenius_norm(a.matrix()));
        prop_assert!((f_pt - f_a).abs() <= 1e-14 * f_a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ccnr_fast_path_matches_realignment(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = random_bloch_state(2, &mut rng);
        let dense = ccnr_dense(&state.densify().unwrap(), &PauliBasis::new(2).unwrap()).unwrap();
        prop_assert!((state.ccnr() - dense).abs() <= 1e-10);
    }

    #[test]
    fn ccnr_is_multiplicative_under_tensor_power(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = random_bloch_state(2, &mut rng);
        let two = tensor_power(&state, 2).unwrap();
        prop_assert!((two.ccnr() - state.ccnr().powi(2)).abs() <= 1e-10);
    }

    #[test]
    fn witness_paths_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = random_bloch_state(2, &mut rng);
        let task = matched_task(&state);
        let brute = witness_brute_force(&be_strategy(&state).unwrap(), &task, &SamplingPlan::Full).unwrap().value;
        let factored = witness_factored_total(&state, &task).unwrap().value;
        let closed = witness_closed_form(&state, &task).unwrap().value;
        prop_assert!((brute - closed).abs() <= 1e-10, "brute {brute} closed {closed}");
        prop_assert!((factored - closed).abs() <= 1e-10, "factored {factored} closed {closed}");
    }

    #[test]
    fn witness_is_affine_in_visibility(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = random_bloch_state(2, &mut rng);
        let task = matched_task(&state);
        let vs = [0.0, 0.25, 0.5, 0.75, 1.0];
        let ws: Vec<f64> = vs
            .iter()
            .map(|&v| {
                let mixed = mix_with_white_noise(&state, v).unwrap();
                let strategy = be_strategy(&mixed).unwrap();
                witness_brute_force(&strategy, &task, &SamplingPlan::Full).unwrap().value
            })
            .collect();
        let n = vs.len() as f64;
        let mv = vs.iter().sum::<f64>() / n;
        let mw = ws.iter().sum::<f64>() / n;
        let slope = vs.iter().zip(&ws).map(|(v, w)| (v - mv) * (w - mw)).sum::<f64>()
            / vs.iter().map(|v| (v - mv).powi(2)).sum::<f64>();
        let worst = vs
            .iter()
            .zip(&ws)
            .map(|(v, w)| (w - (mw + slope * (v - mv))).abs())
            .fold(0.0, f64::max);
        prop_assert!(worst <= 1e-12, "residual {worst}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn separable_states_satisfy_ccnr(seed in any::<u64>(), terms in 1usize..=16) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = random::separable_state(4, terms, &mut rng);
        let c = ccnr_dense(&sigma, &PauliBasis::new(2).unwrap()).unwrap();
        prop_assert!(c <= 1.0 + 1e-9, "ccnr {c}");
    }

    #[test]
    fn separable_strategies_respect_bound(seed in any::<u64>(), optimal in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let task = TaskSpec::rho_be(1).unwrap();
        let strategy = if optimal {
            random::product_strategy_optimal(4, task.signs(), &mut rng)
        } else {
            random::product_strategy(4, &mut rng)
        };
        let w = witness_brute_force(&strategy, &task, &SamplingPlan::Full).unwrap().value;
        prop_assert!(w <= 0.25 + 1e-9, "W {w}");
    }
}

#[test]
fn two_copy_factorization_on_sampled_triples() {
    let copy = rho_be();
    let two = tensor_power(&copy, 2).unwrap();
    let strategy = be_strategy(&two).unwrap();
    let task = TaskSpec::rho_be(2).unwrap();
    let triples = sample_triples(2, 1000, 7);
    let factored = witness_factored(&copy, &task, &triples).unwrap();
    for (t, f) in triples.iter().zip(&factored) {
        let dense = expectation(&strategy, t).unwrap();
        assert!((dense - f).abs() <= 1e-10, "{t:?}: {dense} vs {f}");
    }
}

#[test]
fn be_value_beats_five_dimensional_bound() {
    let w_be = BigRational::new(BigInt::from(3), BigInt::from(8));
    assert!(w_be > sep_upper_bound(5, 1));
    assert_eq!(sep_upper_bound(5, 1), BigRational::new(BigInt::from(5), BigInt::from(16)));
}

#[test]
fn pure_product_states_are_rank_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p: HermitianOperator = random::pure_state(4, &mut rng);
    let spec = eigh(&p);
    assert!((spec.max() - 1.0).abs() < 1e-12);
    assert!((p.trace() - 1.0).abs() < 1e-12);
}
