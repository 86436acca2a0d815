use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use profinity_core::cohomology::cohomology;
use profinity_core::gmodules::GModule;
use profinity_core::groups::FiniteGroup;
use profinity_core::par::{self, ExecMode};
use profinity_core::profinite::{cd_estimate, limit_cohomology_discrete, QuotientTower};

const MODES: [(&str, ExecMode); 2] = [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)];

fn bar_engine(c: &mut Criterion) {
    let mut group = c.benchmark_group("bar_h2");
    group.sample_size(10);
    let cases = [
        ("S4_Z2", GModule::trivial(Arc::new(FiniteGroup::symmetric(4).unwrap()), &[2]).unwrap()),
        ("D6_regular_Z2", GModule::regular(Arc::new(FiniteGroup::dihedral(6).unwrap()), 2).unwrap()),
    ];
    for (name, module) in &cases {
        for (label, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(label, name), module, |b, m| {
                par::set_mode(mode);
                b.iter(|| cohomology(m.group(), m, 2).unwrap());
            });
        }
    }
    group.finish();
}

fn tower_limits(c: &mut Criterion) {
    let mut group = c.benchmark_group("tower");
    group.sample_size(10);
    let zhat = QuotientTower::zhat(10).unwrap();
    let a = GModule::trivial(zhat.level(0).clone(), &[12]).unwrap();
    let zp = QuotientTower::zp(2, 6).unwrap();
    for (label, mode) in MODES {
        group.bench_function(BenchmarkId::new(label, "zhat10_h2_Z12"), |b| {
            par::set_mode(mode);
            b.iter(|| limit_cohomology_discrete(&zhat, &a, 2, 2).unwrap());
        });
        group.bench_function(BenchmarkId::new(label, "cd_zp2_depth6"), |b| {
            par::set_mode(mode);
            b.iter(|| cd_estimate(&zp, 2, 4, 2).unwrap());
        });
    }
    group.finish();
}

criterion_group!(benches, bar_engine, tower_limits);
criterion_main!(benches);
