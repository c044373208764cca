use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use zeno_bench::{fig4_lindbladian, fig4_model, mixed};
use zeno_core::dynamics::{to_vec, Lindbladian};
use zeno_core::expm::expm;
use zeno_core::steady::{steady_state_with, SteadyMethod, SteadyOptions};
use zeno_core::{c64, Operator};

fn bench_rhs(c: &mut Criterion) {
    let mut group = c.benchmark_group("lindblad_apply");
    for nc in [1, 2] {
        let lind = fig4_lindbladian(nc);
        let d = lind.dim();
        let rho = to_vec(&mixed(d));
        let mut out = vec![c64::new(0.0, 0.0); d * d];
        group.bench_with_input(BenchmarkId::from_parameter(nc), &nc, |b, _| {
            b.iter(|| lind.apply_vec(black_box(&rho), &mut out))
        });
    }
    group.finish();
}

fn bench_superoperator(c: &mut Criterion) {
    let m = fig4_model(1);
    c.bench_function("superoperator/1", |b| {
        b.iter(|| Lindbladian::new(black_box(&m.hamiltonian), &m.collapse).unwrap().superoperator())
    });
}

fn bench_steady(c: &mut Criterion) {
    let m = fig4_model(1);
    let mut group = c.benchmark_group("steady_state/1");
    group.sample_size(10);
    for method in [SteadyMethod::TraceSolve, SteadyMethod::Svd] {
        let opts = SteadyOptions { method, ..Default::default() };
        group.bench_function(method.to_string(), |b| {
            b.iter(|| steady_state_with(&m.hamiltonian, &m.collapse, black_box(&opts)).unwrap())
        });
    }
    group.finish();
}

fn bench_expm(c: &mut Criterion) {
    let l = Operator::from_mat(fig4_lindbladian(1).superoperator()).unwrap().scale_real(10.0);
    let mut group = c.benchmark_group("expm");
    group.sample_size(10);
    group.bench_function("superoperator_dt10/1", |b| b.iter(|| expm(black_box(&l)).unwrap()));
    group.finish();
}

criterion_group!(benches, bench_rhs, bench_superoperator, bench_steady, bench_expm);
criterion_main!(benches);
