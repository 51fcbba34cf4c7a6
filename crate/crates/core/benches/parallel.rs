// Compares single-threaded and pooled execution of the amplitude kernels and
// of a small sweep.
//
//   cargo bench -p vqpm
//   cargo bench -p vqpm --no-default-features   # sequential fallback build
//
// Under the default `parallel` build the "1-thread" rows run the rayon code
// path inside a one-worker pool; the "pool" rows use every core.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use vqpm::experiments::{run_sweep, SweepConfig};
use vqpm::par::with_threads;
use vqpm::qubo::{brute_force_solve, generate_random, scale_problem};
use vqpm::spectrum::build_oracle;
use vqpm::vqpm::{marginals, power_step, prepare_state, AnsatzState};

const POOLS: [(&str, Option<usize>); 2] = [("1-thread", Some(1)), ("pool", None)];

fn kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernels");
    group.sample_size(20);
    for n in [14usize, 18] {
        let p = generate_random(n, 1).unwrap();
        let s = scale_problem(&p).unwrap();
        let oracle = build_oracle(&s).unwrap();
        let ansatz = AnsatzState::uniform(n);
        for (label, threads) in POOLS {
            group.bench_with_input(BenchmarkId::new(format!("build_oracle/{label}"), n), &n, |b, _| {
                b.iter(|| with_threads(threads, || build_oracle(&s).unwrap()))
            });
            group.bench_with_input(BenchmarkId::new(format!("brute_force/{label}"), n), &n, |b, _| {
                b.iter(|| with_threads(threads, || brute_force_solve(&p).unwrap()))
            });
            group.bench_with_input(BenchmarkId::new(format!("iteration/{label}"), n), &n, |b, _| {
                b.iter(|| {
                    with_threads(threads, || {
                        let v = prepare_state(&ansatz);
                        let (post, p0) = power_step(&v, &oracle).unwrap();
                        (marginals(&post), p0)
                    })
                })
            });
        }
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    let cfg = SweepConfig::new(2, 12, 10, 7);
    for (label, threads) in POOLS {
        group.bench_function(format!("n2-12x10/{label}"), |b| {
            b.iter(|| with_threads(threads, || run_sweep(&cfg).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, kernels, sweep);
criterion_main!(benches);
