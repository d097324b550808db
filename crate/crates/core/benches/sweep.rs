use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qbattery::{sweep, trace, Axis, ChargingProtocol, Exec, ModelParams, Quantity, SweepAxis};

fn modes() -> [(&'static str, Exec); 2] {
    [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)]
}

fn bench_sweep(c: &mut Criterion) {
    let base = ModelParams::resonant(3, 0.3, 0.0, 0.0);
    let protocol = ChargingProtocol::with_horizon(10.0);
    let mut group = c.benchmark_group("sweep_3x3");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                sweep(
                    &base,
                    SweepAxis::linspace(Axis::G, 0.1, 0.7, 3),
                    SweepAxis::linspace(Axis::Eta, -2.0, 2.0, 3),
                    Quantity::EMax,
                    &protocol,
                    exec,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn bench_trace(c: &mut Criterion) {
    let params = ModelParams::resonant(6, 0.2, 1.0, 0.5);
    let protocol = ChargingProtocol::with_horizon(20.0);
    let mut group = c.benchmark_group("trace_n6");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| trace(&params, &protocol, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_sweep, bench_trace);
criterion_main!(benches);
