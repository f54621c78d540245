mod common;

use common::policy_oracle::{
    finite_difference_gradient, forward, max_relative_error, permutation_likelihood_sum,
    sequence_log_prob_oracle,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surfpack::policy::{log_prob_gradient, sequence_log_prob};
use surfpack::{beam_search, generate_instances, greedy_decode, policy_forward, sample_sequence, Instance, PolicyParams};

fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> Instance {
    let t: Vec<(i64, i64, i64)> = (0..n)
        .map(|_| (rng.gen_range(1..=10), rng.gen_range(1..=10), rng.gen_range(1..=10)))
        .collect();
    Instance::from_triples("p", &t).unwrap()
}

#[test]
fn forward_matches_dense_reimplementation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..40 {
        let n = rng.gen_range(1..=7);
        let d = rng.gen_range(1..=10);
        let params = PolicyParams::uniform(d, 0.8, &mut rng);
        let instance = random_instance(&mut rng, n);
        let mut selected = vec![false; n];
        for _ in 0..n {
            let got = policy_forward(&params, &instance, &selected).unwrap();
            let want = forward(&params, &instance, &selected);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() <= 1e-12, "{got:?} vs {want:?}");
            }
            for (j, s) in selected.iter().enumerate() {
                if *s {
                    assert_eq!(got[j], 0.0);
                }
            }
            let free: Vec<usize> = (0..n).filter(|&j| !selected[j]).collect();
            selected[*free.choose(&mut rng).unwrap()] = true;
        }
    }
}

#[test]
fn sequence_log_prob_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let n = rng.gen_range(1..=6);
        let params = PolicyParams::uniform(6, 0.5, &mut rng);
        let instance = random_instance(&mut rng, n);
        let mut seq: Vec<usize> = (0..n).collect();
        seq.shuffle(&mut rng);
        let got = sequence_log_prob(&params, &instance, &seq).unwrap();
        assert!((got - sequence_log_prob_oracle(&params, &instance, &seq)).abs() < 1e-12);
    }
}

#[test]
fn analytic_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        let n = rng.gen_range(2..=6);
        let params = PolicyParams::uniform(8, 0.5, &mut rng);
        let instance = random_instance(&mut rng, n);
        let mut seq: Vec<usize> = (0..n).collect();
        seq.shuffle(&mut rng);
        let (lp, grad) = log_prob_gradient(&params, &instance, &seq).unwrap();
        assert_eq!(lp, sequence_log_prob(&params, &instance, &seq).unwrap());
        let fd = finite_difference_gradient(&params, &instance, &seq, 1e-5);
        let err = max_relative_error(&grad, &fd, 1e-4);
        assert!(err <= 1e-5, "relative error {err}");
    }
}

#[test]
fn zero_policy_samples_uniformly() {
    // n = 3 gives six equally likely orders under zero parameters.
    let params = PolicyParams::zeros(4);
    let instance = Instance::from_triples("u", &[(1, 2, 3), (4, 4, 4), (2, 5, 1)]).unwrap();
    let perms: Vec<Vec<usize>> = vec![
        vec![0, 1, 2],
        vec![0, 2, 1],
        vec![1, 0, 2],
        vec![1, 2, 0],
        vec![2, 0, 1],
        vec![2, 1, 0],
    ];
    let mut counts = [0u64; 6];
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let draws = 100_000;
    for _ in 0..draws {
        let s = sample_sequence(&params, &instance, 0, &mut rng).unwrap().sequence;
        counts[perms.iter().position(|p| *p == s).unwrap()] += 1;
    }
    let expected = draws as f64 / 6.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // 5 degrees of freedom, 0.1% upper tail.
    assert!(chi2 < 20.515, "chi2 = {chi2}, counts {counts:?}");
}

#[test]
fn permutation_likelihoods_sum_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for n in 1..=4 {
        for _ in 0..5 {
            let params = PolicyParams::uniform(5, 1.5, &mut rng);
            let instance = random_instance(&mut rng, n);
            let total = permutation_likelihood_sum(&params, &instance);
            assert!((total - 1.0).abs() <= 1e-9, "n={n}: {total}");
        }
    }
}

#[test]
fn step_distribution_is_normalized() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for _ in 0..50 {
        let n = rng.gen_range(1..=8);
        let params = PolicyParams::uniform(8, 1.0, &mut rng);
        let instance = random_instance(&mut rng, n);
        let mut selected = vec![false; n];
        selected.iter_mut().take(rng.gen_range(0..n)).for_each(|s| *s = true);
        let p = policy_forward(&params, &instance, &selected).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn beam_of_width_one_equals_greedy() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let params = PolicyParams::uniform(8, 0.5, &mut rng);
    for instance in generate_instances(100, 6, 1..=10, 8).unwrap() {
        assert_eq!(beam_search(&params, &instance, 1).unwrap(), greedy_decode(&params, &instance).unwrap());
    }
}
