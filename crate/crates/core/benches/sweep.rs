use std::path::Path;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use medax::sweep::Execution;
use medax::{load_mesh_file, run_sweep, GridSpec, SweepOptions};

fn lattice_sweep(c: &mut Criterion) {
    let mesh = load_mesh_file(&Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/icosphere2.obj"))
        .expect("fixture loads");
    let grid = GridSpec::new([-1.2; 3], 0.8, [3, 3, 3]);
    let mut group = c.benchmark_group("icosphere_lattice");
    group.sample_size(10);
    for execution in [Execution::Sequential, Execution::Parallel] {
        let options = SweepOptions {
            chunks: 4,
            execution,
            ..SweepOptions::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(format!("{execution:?}")), &options, |b, options| {
            b.iter(|| run_sweep(&mesh, &grid, options).expect("sweep runs").stats.swaps)
        });
    }
    group.finish();
}

criterion_group!(benches, lattice_sweep);
criterion_main!(benches);
