//! Property tests: digest invariants checked against the brute-force oracle.

use proptest::collection::vec;
use proptest::prelude::*;

use qdigest::oracle::FrequencyVector;
use qdigest::{DigestConfig, QDigest};

/// Readings drawn from a domain small enough to force real compression but
/// large enough to exercise deep trees.
fn corpus() -> impl Strategy<Value = (DigestConfig, Vec<u64>)> {
    (1u32..=12, 1u64..=32).prop_flat_map(|(bits, k)| {
        let max_value = 1u64 << bits;
        vec(1..=max_value, 1..400)
            .prop_map(move |readings| (DigestConfig::new(max_value, k).unwrap(), readings))
    })
}

/// Exact check that `rank * den >= num * n` using wide integers.
fn rank_at_least(rank: u64, num: u64, den: u64, n: u64) -> bool {
    rank as u128 * den as u128 >= num as u128 * n as u128
}

/// Exact check that `rank <= (num/den + levels/k) * n`.
fn rank_within_budget(rank: u64, num: u64, den: u64, cfg: &DigestConfig, n: u64) -> bool {
    let lhs = rank as u128 * den as u128 * cfg.compression_factor() as u128;
    let rhs = (num as u128 * cfg.compression_factor() as u128 + den as u128 * cfg.levels() as u128)
        * n as u128;
    lhs <= rhs
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn conservation_size_and_property((cfg, readings) in corpus()) {
        let digest = QDigest::from_readings(&readings, cfg).unwrap();
        let n = readings.len() as u64;
        prop_assert_eq!(digest.total_count(), n);
        let sum: u64 = digest.buckets().map(|(_, c)| c).sum();
        prop_assert_eq!(sum, n);
        prop_assert!(digest.buckets().all(|(_, c)| c >= 1));
        if cfg.threshold(n) >= 1 {
            prop_assert!(digest.bucket_count() as u64 <= 3 * cfg.compression_factor());
        }
        prop_assert!(digest.validate().is_empty());
    }

    #[test]
    fn compress_is_idempotent((cfg, readings) in corpus()) {
        let digest = QDigest::from_readings(&readings, cfg).unwrap();
        prop_assert_eq!(digest.compress(), digest);
    }

    #[test]
    fn merged_digests_keep_the_property(
        (cfg, readings) in corpus(),
        split in any::<prop::sample::Index>(),
    ) {
        let cut = split.index(readings.len());
        let left = QDigest::from_readings(&readings[..cut], cfg).unwrap();
        let right = QDigest::from_readings(&readings[cut..], cfg).unwrap();
        let merged = left.merge(&right).unwrap();
        prop_assert_eq!(merged.total_count(), readings.len() as u64);
        prop_assert!(merged.validate().is_empty());
        if cfg.threshold(merged.total_count()) >= 1 {
            prop_assert!(merged.bucket_count() as u64 <= 3 * cfg.compression_factor());
        }
        // union-add plus deterministic compression makes merge commutative
        prop_assert_eq!(merged, right.merge(&left).unwrap());
    }

    #[test]
    fn quantile_rank_stays_in_the_window(
        (cfg, readings) in corpus(),
        q_num in 1u64..100,
    ) {
        let digest = QDigest::from_readings(&readings, cfg).unwrap();
        let fv = FrequencyVector::from_readings(&readings);
        let n = fv.total_count();
        let answer = digest.quantile(q_num as f64 / 100.0).unwrap();
        let below = fv.exact_rank(answer.value);
        let through = below + fv.frequency(answer.value);
        // some rank of the returned value is >= q*n and the strict-below
        // rank overshoots q*n by at most the error budget
        prop_assert!(rank_at_least(through, q_num, 100, n));
        prop_assert!(rank_within_budget(below, q_num, 100, &cfg, n));
    }

    #[test]
    fn quantile_error_never_exceeds_the_certificate(
        (cfg, readings) in corpus(),
        q_num in 1u64..100,
    ) {
        let digest = QDigest::from_readings(&readings, cfg).unwrap();
        let fv = FrequencyVector::from_readings(&readings);
        let report = digest.confidence_factor();
        let answer = digest.quantile(q_num as f64 / 100.0).unwrap();
        let err = fv.quantile_rank_error(q_num as f64 / 100.0, answer.value);
        prop_assert!(err <= report.weight as f64 + 1e-9);
        // the certificate itself never exceeds the worst-case bound
        prop_assert!(report.theta <= cfg.epsilon() + 1e-12);
    }

    #[test]
    fn rank_and_range_errors_are_bounded(
        (cfg, readings) in corpus(),
        x_seed in any::<prop::sample::Index>(),
        y_seed in any::<prop::sample::Index>(),
    ) {
        let digest = QDigest::from_readings(&readings, cfg).unwrap();
        let fv = FrequencyVector::from_readings(&readings);
        let n = fv.total_count();
        let budget = cfg.error_budget(n);

        let x = 1 + x_seed.index(cfg.max_value() as usize) as u64;
        let rank = digest.inverse_quantile(x).unwrap().rank;
        let exact = fv.exact_rank(x);
        prop_assert!(rank.abs_diff(exact) <= budget);

        let y = 1 + y_seed.index(cfg.max_value() as usize) as u64;
        let (lo, hi) = (x.min(y), x.max(y));
        let approx = digest.range_count(lo, hi).unwrap().rank;
        let exact_range = fv.exact_rank(hi + 1) - fv.exact_rank(lo);
        prop_assert!(approx.abs_diff(exact_range) <= 2 * budget);
    }

    #[test]
    fn consensus_is_complete_and_sound(
        (cfg, readings) in corpus(),
        s_num in 1u64..100,
    ) {
        let digest = QDigest::from_readings(&readings, cfg).unwrap();
        let fv = FrequencyVector::from_readings(&readings);
        let n = fv.total_count();
        let s = s_num as f64 / 100.0;
        let reported = digest.consensus(s);

        // completeness holds for frequencies above max(s, epsilon) * n: a
        // rarer value's leaf may have been folded away entirely when s is
        // below the error bound
        let k = cfg.compression_factor() as u128;
        let floor_num = (s_num as u128 * k).max(100 * cfg.levels() as u128);
        for (value, freq) in fv.iter() {
            if freq as u128 * 100 * k > floor_num * n as u128 {
                prop_assert!(
                    reported.iter().any(|&(v, _)| v == value),
                    "value {} with frequency {} missing", value, freq
                );
            }
        }
        let floor = (s - cfg.epsilon()) * n as f64;
        for &(value, _) in &reported {
            prop_assert!(fv.frequency(value) as f64 > floor);
        }
    }

    #[test]
    fn codec_round_trips_bit_exactly((cfg, readings) in corpus()) {
        let digest = QDigest::from_readings(&readings, cfg).unwrap();
        let bytes = digest.encode();
        let decoded = QDigest::decode(&bytes, cfg.compression_factor()).unwrap();
        prop_assert_eq!(&decoded, &digest);
        prop_assert_eq!(decoded.encode(), bytes);
    }

    #[test]
    fn fold_direction_does_not_break_guarantees(
        (cfg, readings) in corpus(),
        parts in 2usize..6,
        q_num in 1u64..100,
    ) {
        let chunk = readings.len().div_ceil(parts);
        let digests: Vec<QDigest> = readings
            .chunks(chunk)
            .map(|c| QDigest::from_readings(c, cfg).unwrap())
            .collect();

        let left = digests
            .iter()
            .skip(1)
            .fold(digests[0].clone(), |acc, d| acc.merge(d).unwrap());
        let right = digests
            .iter()
            .rev()
            .skip(1)
            .fold(digests.last().unwrap().clone(), |acc, d| acc.merge(d).unwrap());

        let fv = FrequencyVector::from_readings(&readings);
        let n = fv.total_count();
        for digest in [&left, &right] {
            prop_assert_eq!(digest.total_count(), n);
            prop_assert!(digest.validate().is_empty());
            let answer = digest.quantile(q_num as f64 / 100.0).unwrap();
            let below = fv.exact_rank(answer.value);
            let through = below + fv.frequency(answer.value);
            prop_assert!(rank_at_least(through, q_num, 100, n));
            prop_assert!(rank_within_budget(below, q_num, 100, &cfg, n));
        }
    }
}

/// Merging many singleton digests is the degenerate fully-distributed case.
#[test]
fn singleton_merge_chain_matches_oracle() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let cfg = DigestConfig::new(1 << 10, 7).unwrap();
    let readings: Vec<u64> = (0..500).map(|_| rng.random_range(1..=1 << 10)).collect();

    let mut digest = QDigest::empty(cfg);
    for &r in &readings {
        digest = digest.merge(&QDigest::from_value(r, cfg).unwrap()).unwrap();
    }

    assert_eq!(digest.total_count(), 500);
    assert!(digest.bucket_count() as u64 <= 3 * cfg.compression_factor());
    assert!(digest.validate().is_empty());

    let fv = FrequencyVector::from_readings(&readings);
    let budget = cfg.error_budget(500);
    for q_num in [10u64, 25, 50, 75, 90] {
        let answer = digest.quantile(q_num as f64 / 100.0).unwrap();
        let below = fv.exact_rank(answer.value);
        let through = below + fv.frequency(answer.value);
        assert!(through as u128 * 100 >= q_num as u128 * 500);
        assert!(below <= (q_num * 500).div_ceil(100) + budget);
    }
}
