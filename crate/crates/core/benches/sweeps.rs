use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use hypertrace::identities::{verify_identity, Catalog};
use hypertrace::pointcount::{frobenius_charpoly, CurveFamily};
use hypertrace::Execution;

const POLICIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn identity_sweeps(c: &mut Criterion) {
    let cat = Catalog::builtin();
    let mut group = c.benchmark_group("verify_identity");
    group.sample_size(10);
    for (name, p) in [("cubic-248", 97u64), ("quadratic", 13), ("koike-shiga-f1", 13)] {
        let spec = cat.get(name).unwrap();
        for (label, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(format!("{name}/p={p}"), label), &exec, |b, &exec| {
                b.iter(|| black_box(verify_identity(spec, p, exec).unwrap()))
            });
        }
    }
    group.finish();
}

fn charpoly_sweeps(c: &mut Criterion) {
    let fam = CurveFamily::new(3, vec![1, 1, 1, 1]).unwrap();
    let mut group = c.benchmark_group("frobenius_charpoly");
    group.sample_size(10);
    for (label, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::new("picard/p=7/m=6", label), &exec, |b, &exec| {
            b.iter(|| black_box(frobenius_charpoly(&fam, &[0, 1, 2, 3], 1, 7, 6, exec).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, identity_sweeps, charpoly_sweeps);
criterion_main!(benches);
