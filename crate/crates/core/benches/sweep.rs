use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use stokes_spectra::{ffh, DispersionModel, Execution};

fn sweep(c: &mut Criterion) {
    let model = DispersionModel::capillary_whitham(f64::INFINITY, 2.5);
    let wave = ffh::wave_for(&model, 1e-2).unwrap();
    let mut group = c.benchmark_group("sweep");
    group.sample_size(20);
    for n_p in [16, 64] {
        let p_list: Vec<f64> = (0..n_p).map(|j| (j as f64 + 0.5) / n_p as f64).collect();
        for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(label, n_p), &p_list, |b, p_list| {
                b.iter(|| ffh::sweep_with(exec, &wave, p_list, 24).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
