use livmt_core::corpus::{draw_indices, temperature_probabilities, temperature_sample, SamplingSpec, Temperature};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spec(sizes: &[u64], t: Temperature, budget: u64) -> SamplingSpec {
    SamplingSpec { sizes: sizes.to_vec(), temperature: t, budget }
}

#[test]
fn documented_cases() {
    assert_eq!(temperature_sample(&spec(&[100, 300], Temperature::Value(1.0), 400)), vec![100, 300]);
    assert_eq!(temperature_sample(&spec(&[100, 300], Temperature::Value(1e6), 400)), vec![200, 200]);
    assert_eq!(temperature_sample(&spec(&[1000, 10], Temperature::Value(5.0), 100)), vec![72, 28]);
}

#[test]
fn randomized_specs_sum_to_budget() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..1000 {
        let k = rng.gen_range(1..8);
        let sizes: Vec<u64> = (0..k).map(|_| rng.gen_range(1..100_000)).collect();
        let t = if rng.gen_bool(0.1) { Temperature::Concat } else { Temperature::Value(rng.gen_range(0.5..20.0)) };
        let budget = rng.gen_range(0..200_000);
        let s = spec(&sizes, t, budget);
        let counts = temperature_sample(&s);
        match s.temperature {
            Temperature::Value(t) => {
                assert_eq!(counts.iter().sum::<u64>(), budget, "{s:?}");
                let p = temperature_probabilities(&sizes, t);
                assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
            // concatenation takes every corpus whole
            Temperature::Concat => assert_eq!(counts, sizes),
        }
    }
}

#[test]
fn drawn_indices_are_reproducible() {
    let sizes = [50, 5];
    let counts = [20, 12];
    let a = draw_indices(&sizes, &counts, 42);
    assert_eq!(a, draw_indices(&sizes, &counts, 42));
    assert_eq!(a[0].len(), 20);
    assert_eq!(a[1].len(), 12);
    let mut uniq = a[0].clone();
    uniq.dedup();
    assert_eq!(uniq.len(), 20, "drawn without replacement when the corpus is big enough");
    assert!(a[1].iter().all(|i| *i < 5));
    assert!(a.iter().all(|v| v.windows(2).all(|w| w[0] <= w[1])));
}
