use telu_lab::bench::{forward_median, run_bench, BenchConfig};
use telu_lab::ActivationId;

#[test]
fn doubling_the_vector_roughly_doubles_the_time() {
    let cfg = |vector_len, iterations| BenchConfig {
        vector_len,
        iterations,
        repetitions: 5,
        seed: 1,
    };
    let time = |id, len, iters| forward_median(&run_bench(&[id], &cfg(len, iters)).unwrap().records, id).unwrap();
    for id in ActivationId::LINEAR_UNITS {
        // every timed batch lasts at least ~50 ms so cheap units are not dominated by jitter
        let iters = (5e7 / time(id, 1_000_000, 1)).ceil().max(1.0) as usize;
        // interleaved trials; the median ratio absorbs host noise
        let mut ratios: Vec<f64> = (0..3)
            .map(|_| time(id, 2_000_000, iters) / time(id, 1_000_000, iters))
            .collect();
        ratios.sort_by(f64::total_cmp);
        assert!((1.5..=3.0).contains(&ratios[1]), "{id}: {ratios:?}");
    }
}

#[test]
fn records_follow_request_order() {
    let ids = [ActivationId::Smish, ActivationId::ReLU];
    let cfg = BenchConfig {
        vector_len: 64,
        iterations: 2,
        repetitions: 5,
        seed: 0,
    };
    let report = run_bench(&ids, &cfg).unwrap();
    let order: Vec<String> = report.records.iter().map(|r| format!("{}:{}", r.id, r.pass)).collect();
    assert_eq!(
        order,
        ["Smish:forward", "Smish:backward", "ReLU:forward", "ReLU:backward"]
    );
    assert!(report.checksum.is_finite());
}
