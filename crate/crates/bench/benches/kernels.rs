use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use oldroyd_bench::{coeffs, initial_state, samples, sim_config};
use oldroyd_core::solver::{simulate_from, Trajectory};
use oldroyd_core::spectral::Fft3;
use oldroyd_core::symbol::{build_symbol, lowfreq_decay_norm, semigroup, Profile, QuadConfig};

fn fft(c: &mut Criterion) {
    let mut g = c.benchmark_group("fft");
    for n in [16, 32] {
        let fft = Fft3::new(n);
        let (a, b) = (samples(n, 0.0), samples(n, 1.0));
        g.bench_with_input(BenchmarkId::new("forward_real_pair", n), &n, |bch, _| {
            bch.iter(|| fft.forward_real_pair(black_box(&a), black_box(&b)))
        });
        let (sa, sb) = fft.forward_real_pair(&a, &b);
        g.bench_with_input(BenchmarkId::new("inverse_real_pair", n), &n, |bch, _| {
            bch.iter(|| fft.inverse_real_pair(black_box(&sa), black_box(&sb)))
        });
    }
    g.finish();
}

fn symbol(c: &mut Criterion) {
    let co = coeffs();
    let (s4, s2) = build_symbol(0.1, &co);
    let mut g = c.benchmark_group("semigroup");
    for t in [1.0, 100.0] {
        g.bench_with_input(BenchmarkId::new("block4", t), &t, |bch, &t| {
            bch.iter(|| semigroup(black_box(&s4.m), t).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("block2", t), &t, |bch, &t| {
            bch.iter(|| semigroup(black_box(&s2.m), t).unwrap())
        });
    }
    g.finish();
}

fn step(c: &mut Criterion) {
    let mut g = c.benchmark_group("step");
    g.sample_size(10);
    for n in [16, 32] {
        let cfg = sim_config(n, 5);
        let init = initial_state(&cfg);
        g.bench_with_input(BenchmarkId::new("five_steps", n), &n, |bch, _| {
            bch.iter(|| simulate_from(&cfg, init.clone(), &mut Trajectory::default()).unwrap())
        });
    }
    g.finish();
}

fn quadrature(c: &mut Criterion) {
    let co = coeffs();
    let (p, q) = (Profile::default(), QuadConfig::default());
    let mut g = c.benchmark_group("quadrature");
    g.sample_size(10);
    for m in [0, 3] {
        g.bench_with_input(BenchmarkId::new("lowfreq_norm", m), &m, |bch, &m| {
            bch.iter(|| lowfreq_decay_norm(m, 100.0, &p, 0.325, &co, &q).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, fft, symbol, step, quadrature);
criterion_main!(benches);
