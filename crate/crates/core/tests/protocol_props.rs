use proptest::prelude::*;
use qls_core::protocol::{batch_shot, run_batch, BatchResult, ProbeSpec, ProtocolConfig};

#[test]
fn wald_interval_coverage() {
    let cfg = ProtocolConfig::ideal();
    let p = 0.3;
    let n = 400;
    let batches = 1000;
    let covered = (0..batches)
        .filter(|&seed| {
            let b = run_batch(&cfg, &ProbeSpec::Excitation(p), n, seed).unwrap();
            (b.p_hat - p).abs() <= 1.96 * b.sigma_qpn
        })
        .count();
    let frac = covered as f64 / batches as f64;
    assert!((frac - 0.95).abs() <= 0.02, "coverage {frac}");
}

#[test]
fn shot_order_does_not_matter() {
    let cfg = ProtocolConfig::default();
    let fwd: u64 = (0..300)
        .map(|i| batch_shot(&cfg, 0.4, 9, i).outcome.is_dark() as u64)
        .sum();
    let rev: u64 = (0..300)
        .rev()
        .map(|i| batch_shot(&cfg, 0.4, 9, i).outcome.is_dark() as u64)
        .sum();
    assert_eq!(fwd, rev);
    assert_eq!(
        run_batch(&cfg, &ProbeSpec::Excitation(0.4), 300, 9).unwrap(),
        BatchResult::from_counts(fwd, 300).unwrap()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ideal_limit_reproduces_p(p in 0.0f64..=1.0, seed in any::<u64>()) {
        let b = run_batch(&ProtocolConfig::ideal(), &ProbeSpec::Excitation(p), 10_000, seed).unwrap();
        let sigma = (p * (1.0 - p) / 10_000.0).sqrt().max(1e-12);
        prop_assert!((b.p_hat - p).abs() < 4.0 * sigma + 1e-12);
    }

    #[test]
    fn seed_determinism(p in 0.0f64..=1.0, seed in any::<u64>()) {
        let cfg = ProtocolConfig::default();
        let a = run_batch(&cfg, &ProbeSpec::Excitation(p), 200, seed).unwrap();
        let b = run_batch(&cfg, &ProbeSpec::Excitation(p), 200, seed).unwrap();
        prop_assert_eq!(a, b);
    }
}
