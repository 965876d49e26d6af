//! Property tests over seeded random instances.

use oentropy::bounds::{
    certify_oe_continuity, certify_shannon_continuity, certify_von_neumann_continuity, concavity_gap, conditional_oe, omega_delta,
    omega_delta_residuals, shannon_concavity_gap,
};
use oentropy::distance::{diamond_distance, seesaw_lower_bound, sim_distance, sum_upper_bound};
use oentropy::entropy::{binary_h, g_func, measured_relative_entropy, observational_entropy, relative_entropy_quantum};
use oentropy::povm::{convex_combine, measure_distribution, partial_measure, postprocess, refine_split, StochasticMap};
use oentropy::qmat::random::{random_density, random_hermitian, random_povm, random_probability, rng_from_seed, QRng};
use oentropy::qmat::{trace_distance, trace_norm, DensityMatrix, Povm, ProbabilityVector};
use proptest::prelude::*;
use rand::Rng;

fn state(d: usize, rng: &mut QRng) -> DensityMatrix {
    let rank = rng.random_range(1..=d);
    random_density(d, rank, rng).unwrap()
}

fn random_stochastic(rows: usize, cols: usize, rng: &mut QRng) -> StochasticMap {
    let columns: Vec<Vec<f64>> = (0..cols).map(|_| random_probability(rows, rng).as_slice().to_vec()).collect();
    StochasticMap::from_columns(&columns).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn trace_norm_dominates_trace(seed in any::<u64>(), d in 2usize..=8) {
        let m = random_hermitian(d, &mut rng_from_seed(seed));
        prop_assert!(trace_norm(&m).unwrap() >= m.trace().abs() - 1e-12);
    }

    #[test]
    fn eig_round_trip(seed in any::<u64>(), d in 2usize..=8) {
        let m = random_hermitian(d, &mut rng_from_seed(seed));
        let e = m.eig().unwrap();
        prop_assert!(e.rebuild(|x| x).max_abs_diff(&m) <= 1e-9);
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn trace_distance_is_a_metric(seed in any::<u64>(), d in 2usize..=6) {
        let mut rng = rng_from_seed(seed);
        let (a, b, c) = (state(d, &mut rng), state(d, &mut rng), state(d, &mut rng));
        let ab = trace_distance(&a, &b).unwrap();
        prop_assert_eq!(ab, trace_distance(&b, &a).unwrap());
        prop_assert!(ab <= trace_distance(&a, &c).unwrap() + trace_distance(&c, &b).unwrap() + 1e-9);
        prop_assert!(trace_distance(&a, &a).unwrap() <= 1e-12);
    }

    #[test]
    fn random_povms_are_valid(seed in any::<u64>(), d in 2usize..=6, k in 1usize..=8) {
        let m = random_povm(d, k, &mut rng_from_seed(seed)).unwrap();
        prop_assert_eq!(m.len(), k);
        prop_assert!(Povm::new(m.elements().to_vec()).is_ok());
    }

    #[test]
    fn measured_identity_with_maximally_mixed(seed in any::<u64>(), d in 2usize..=6, k in 1usize..=8) {
        let mut rng = rng_from_seed(seed);
        let m = random_povm(d, k, &mut rng).unwrap();
        let rho = state(d, &mut rng);
        let lhs = measured_relative_entropy(&m, &rho, &DensityMatrix::maximally_mixed(d)).unwrap().to_f64();
        let rhs = (d as f64).ln() - observational_entropy(&m, &rho).unwrap().total;
        prop_assert!((lhs - rhs).abs() <= 1e-9);
    }

    #[test]
    fn shannon_concavity_sandwich(seed in any::<u64>(), n in 1usize..=6, k in 1usize..=4) {
        let mut rng = rng_from_seed(seed);
        let dists: Vec<_> = (0..k).map(|_| random_probability(n, &mut rng)).collect();
        let r = shannon_concavity_gap(&dists, &random_probability(k, &mut rng)).unwrap();
        prop_assert!(r.quantity_lhs >= -1e-9 && r.slack >= -1e-9, "{:?}", r);
    }

    #[test]
    fn oe_concavity_sandwich(seed in any::<u64>(), d in 2usize..=5, n in 1usize..=6, k in 1usize..=4) {
        let mut rng = rng_from_seed(seed);
        let m = random_povm(d, n, &mut rng).unwrap();
        let states: Vec<_> = (0..k).map(|_| state(d, &mut rng)).collect();
        let r = concavity_gap(&m, &states, &random_probability(k, &mut rng)).unwrap();
        prop_assert!(r.quantity_lhs >= -1e-9 && r.slack >= -1e-9, "{:?}", r);
    }

    #[test]
    fn measurement_cannot_increase_divergence(seed in any::<u64>(), d in 2usize..=5, k in 1usize..=6) {
        let mut rng = rng_from_seed(seed);
        let m = random_povm(d, k, &mut rng).unwrap();
        let rho = state(d, &mut rng);
        let sigma = random_density(d, d, &mut rng).unwrap();
        let q = relative_entropy_quantum(&rho, &sigma).unwrap();
        prop_assume!(q.is_finite());
        let c = measured_relative_entropy(&m, &rho, &sigma).unwrap();
        prop_assert!(c.to_f64() <= q.to_f64() + 1e-9);
    }

    #[test]
    fn postprocessing_cannot_increase_divergence(seed in any::<u64>(), d in 2usize..=4, k in 1usize..=5, j in 1usize..=5) {
        let mut rng = rng_from_seed(seed);
        let m = random_povm(d, k, &mut rng).unwrap();
        let lm = postprocess(&random_stochastic(j, k, &mut rng), &m).unwrap();
        let rho = state(d, &mut rng);
        let sigma = random_density(d, d, &mut rng).unwrap();
        let a = measured_relative_entropy(&lm, &rho, &sigma).unwrap().to_f64();
        let b = measured_relative_entropy(&m, &rho, &sigma).unwrap().to_f64();
        prop_assert!(a <= b + 1e-9);
    }

    #[test]
    fn measuring_channel_is_affine_in_the_povm(seed in any::<u64>(), d in 2usize..=5, k in 1usize..=5, n in 1usize..=4) {
        let mut rng = rng_from_seed(seed);
        let ms: Vec<_> = (0..n).map(|_| random_povm(d, k, &mut rng).unwrap()).collect();
        let lambda = random_probability(n, &mut rng);
        let rho = state(d, &mut rng);
        let mixed = measure_distribution(&convex_combine(&ms, &lambda).unwrap(), &rho).unwrap();
        for i in 0..k {
            let avg: f64 = ms.iter().zip(lambda.as_slice()).map(|(m, l)| l * measure_distribution(m, &rho).unwrap().get(i)).sum();
            prop_assert!((mixed.get(i) - avg).abs() <= 1e-10);
        }
    }

    #[test]
    fn refinement_preserves_oe(seed in any::<u64>(), d in 2usize..=6, k in 1usize..=6) {
        let mut rng = rng_from_seed(seed);
        let m = random_povm(d, k, &mut rng).unwrap();
        let rho = state(d, &mut rng);
        let split = refine_split(&m);
        let a = observational_entropy(&m, &rho).unwrap().total;
        prop_assert!((observational_entropy(&split, &rho).unwrap().total - a).abs() <= 1e-10);
        let back = postprocess(&StochasticMap::pair_merge(k), &split).unwrap();
        for (x, y) in back.elements().iter().zip(m.elements()) {
            prop_assert!(x.max_abs_diff(y) <= 1e-15);
        }
    }

    #[test]
    fn partial_measurement_reconstructs_marginal(seed in any::<u64>(), d_a in 2usize..=3, d_b in 2usize..=3, k in 1usize..=4) {
        let mut rng = rng_from_seed(seed);
        let m = random_povm(d_a, k, &mut rng).unwrap();
        let rho = state(d_a * d_b, &mut rng);
        let cq = partial_measure(&m, &rho, d_a, d_b).unwrap();
        prop_assert!(ProbabilityVector::new(cq.weights.as_slice().to_vec()).is_ok());
        let rho_b = rho.partial_trace_first(d_a, d_b).unwrap();
        prop_assert!(cq.average_conditional().unwrap().matrix().max_abs_diff(rho_b.matrix()) <= 1e-10);
    }

    #[test]
    fn omega_delta_identities(seed in any::<u64>(), d in 2usize..=6, same in any::<bool>()) {
        let mut rng = rng_from_seed(seed);
        let rho = state(d, &mut rng);
        let sigma = if same { rho.clone() } else { state(d, &mut rng) };
        let od = omega_delta(&rho, &sigma).unwrap();
        prop_assert!(omega_delta_residuals(&od, &rho, &sigma).iter().all(|&r| r <= 1e-9));
    }

    #[test]
    fn oe_continuity(seed in any::<u64>(), d in 2usize..=6, k in 1usize..=8) {
        let mut rng = rng_from_seed(seed);
        let m = random_povm(d, k, &mut rng).unwrap();
        let r = certify_oe_continuity(&m, &state(d, &mut rng), &state(d, &mut rng)).unwrap();
        prop_assert!(r.slack >= -1e-9, "{:?}", r);
    }

    #[test]
    fn von_neumann_and_shannon_continuity(seed in any::<u64>(), d in 2usize..=6) {
        let mut rng = rng_from_seed(seed);
        let r = certify_von_neumann_continuity(&state(d, &mut rng), &state(d, &mut rng)).unwrap();
        prop_assert!(r.slack >= -1e-9);
        let s = certify_shannon_continuity(&random_probability(d, &mut rng), &random_probability(d, &mut rng)).unwrap();
        prop_assert!(s.slack >= -1e-9);
    }

    #[test]
    fn conditional_oe_range_and_concavity(seed in any::<u64>(), d_a in 2usize..=3, d_b in 2usize..=3, k in 1usize..=4) {
        let mut rng = rng_from_seed(seed);
        let m = random_povm(d_a, k, &mut rng).unwrap();
        let (a, b) = (state(d_a * d_b, &mut rng), state(d_a * d_b, &mut rng));
        let va = conditional_oe(&m, &a, d_a, d_b).unwrap();
        let vb = conditional_oe(&m, &b, d_a, d_b).unwrap();
        prop_assert!(va >= -1e-9 && va <= (d_a as f64).ln() + 1e-9);
        let t: f64 = rng.random();
        let mix = DensityMatrix::mixture(&[a, b], &ProbabilityVector::new(vec![t, 1.0 - t]).unwrap()).unwrap();
        prop_assert!(conditional_oe(&m, &mix, d_a, d_b).unwrap() >= t * va + (1.0 - t) * vb - 1e-9);
    }

    #[test]
    fn g_dominates_h_and_is_concave(x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
        prop_assert!(g_func(x).unwrap() >= binary_h(x).unwrap() - 1e-15);
        let mid = g_func(0.5 * (x + y)).unwrap();
        prop_assert!(mid >= 0.5 * (g_func(x).unwrap() + g_func(y).unwrap()) - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn diamond_sandwich(seed in any::<u64>(), k in 2usize..=4) {
        let mut rng = rng_from_seed(seed);
        let m = random_povm(2, k, &mut rng).unwrap();
        let n = random_povm(2, k, &mut rng).unwrap();
        let s = diamond_distance(&m, &n, 1e-7).unwrap();
        let lo = seesaw_lower_bound(&m, &n, 4, seed).unwrap();
        prop_assert!(lo <= s.upper + 1e-7);
        prop_assert!(s.lower <= sum_upper_bound(&m, &n).unwrap() + 1e-7);
        let rho = state(2, &mut rng);
        let tv = measure_distribution(&m, &rho).unwrap().total_variation(&measure_distribution(&n, &rho).unwrap());
        prop_assert!(tv <= s.upper + 1e-7);
    }

    #[test]
    fn gamma_pseudo_metric(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let a = random_povm(2, 2, &mut rng).unwrap();
        let b = random_povm(2, 3, &mut rng).unwrap();
        let c = random_povm(2, 2, &mut rng).unwrap();
        let tol = 1e-6;
        let ab = sim_distance(&a, &b, tol).unwrap();
        let ba = sim_distance(&b, &a, tol).unwrap();
        prop_assert!((ab.value - ba.value).abs() <= 2.0 * tol);
        prop_assert!(sim_distance(&a, &a, tol).unwrap().value.abs() <= tol);
        let ac = sim_distance(&a, &c, tol).unwrap();
        let cb = sim_distance(&c, &b, tol).unwrap();
        prop_assert!(ab.value <= ac.value + cb.value + 3.0 * tol);
        prop_assert!((0.0..=1.0 + tol).contains(&ab.value));
    }
}
