use criterion::{criterion_group, criterion_main, Criterion};

use latq::lattice::config_from_exponents;
use latq::rep::build_m;
use latq::strata::brute_force_points;
use latq::tropical::integral_tropical_hull;

// The parallel code path is gated behind the "parallel" feature, which is on
// by default. Run `cargo bench` and `cargo bench --no-default-features` to
// compare; the active mode is part of the benchmark id.
fn mode() -> &'static str {
    if cfg!(feature = "parallel") {
        "parallel"
    } else {
        "sequential"
    }
}

fn bench_brute_force(c: &mut Criterion) {
    let (cfg, _) =
        config_from_exponents(3, &[vec![0, 0, 0, 0], vec![-1, 0, 0, 0]]).unwrap();
    let rep = build_m(&cfg).unwrap();
    c.bench_function(&format!("brute_force_points/{}", mode()), |b| {
        b.iter(|| brute_force_points(std::hint::black_box(&rep), 2, None).unwrap())
    });
}

fn bench_hull(c: &mut Criterion) {
    let points: Vec<Vec<i64>> = vec![
        vec![0, 4, 4, 4],
        vec![4, 0, 4, 4],
        vec![4, 4, 0, 4],
        vec![4, 4, 4, 0],
    ];
    c.bench_function(&format!("integral_tropical_hull/{}", mode()), |b| {
        b.iter(|| integral_tropical_hull(std::hint::black_box(&points)))
    });
}

criterion_group!(benches, bench_brute_force, bench_hull);
criterion_main!(benches);
