use std::hint::black_box;

use aibvp::exec;
use aibvp::semigroup::{q_quadrature, solve_inhomogeneous, uniform_times, BoundarySignal};
use aibvp::verify::{run_identity_suite, stability_sweep, Tolerances, DEFAULT_BAND};
use aibvp::{build_heat_1d, GridSpec};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::DVector;

fn both<F: Fn()>(c: &mut Criterion, group: &str, param: usize, f: F) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    g.bench_with_input(BenchmarkId::new("parallel", param), &param, |b, _| b.iter(&f));
    g.bench_with_input(BenchmarkId::new("sequential", param), &param, |b, _| b.iter(|| exec::with_sequential(&f)));
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let grid = GridSpec::new(65).unwrap();
    let ks = [0.0, 1.0, 4.0];
    let cd = [-6.0, -4.0, -2.0, -0.5, 0.5, 2.0];
    both(c, "stability_sweep", 65, || {
        black_box(stability_sweep(&grid, &ks, &cd, &cd, DEFAULT_BAND).unwrap());
    });
}

fn trajectory(c: &mut Criterion) {
    for n in [33, 65] {
        let t = build_heat_1d(&GridSpec::new(n).unwrap());
        let f = DVector::from_element(n - 2, 1.0);
        let g = DVector::from_vec(vec![0.0, 0.0]);
        let psi = BoundarySignal::sine(&[1.0, 0.0], 1.0, 0.0);
        let times = uniform_times(1.0, 64);
        both(c, "solve_inhomogeneous", n, || {
            black_box(solve_inhomogeneous(&t, &f, &g, &psi, &times, 256).unwrap());
        });
    }
}

fn quadrature(c: &mut Criterion) {
    let n = 65;
    let t = build_heat_1d(&GridSpec::new(n).unwrap());
    both(c, "q_quadrature", 4096, || {
        black_box(q_quadrature(&t, 2.0, 4.0, 4096).unwrap());
    });
}

fn identity_suite(c: &mut Criterion) {
    let t = build_heat_1d(&GridSpec::new(17).unwrap());
    both(c, "identity_suite", 17, || {
        black_box(run_identity_suite(&t, 42, &Tolerances::default()));
    });
}

criterion_group!(benches, sweep, trajectory, quadrature, identity_suite);
criterion_main!(benches);
