//! Parallel against sequential execution on the grid workloads.

use boutroux_core::boutroux::solve_a;
use boutroux_core::exec::{self, Exec};
use boutroux_core::geometry::{droplet_boundary, Geometry};
use boutroux_core::orthopoly::{Moments, MOMENT_TOL};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64 as C;
use std::f64::consts::PI;
use std::hint::black_box;

const MODES: [(&str, Exec); 2] = [
    ("parallel", Exec::Parallel),
    ("sequential", Exec::Sequential),
];

fn droplet(c: &mut Criterion) {
    let a = solve_a(0.2).unwrap().a;
    let mut g = c.benchmark_group("droplet_boundary");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, 4096), &exec, |b, &exec| {
            b.iter(|| droplet_boundary(black_box(0.2), a, 4096, exec))
        });
    }
    g.finish();
}

fn level_set(c: &mut Criterion) {
    let geom = Geometry::boutroux(0.2).unwrap();
    let hf = geom.h_field().unwrap();
    let r = 1.3 * geom.sheets.bs.z2.norm().max(geom.z1());
    let cells: Vec<C> = (0..24)
        .flat_map(|i| {
            (0..24).map(move |j| {
                C::from_polar(
                    r * (i as f64 + 0.5) / 24.0,
                    PI / 3.0 * ((j as f64 + 0.5) / 12.0 - 1.0),
                )
            })
        })
        .collect();
    let mut g = c.benchmark_group("h_level_set");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, cells.len()), &exec, |b, &exec| {
            b.iter(|| exec::map(exec, &cells, |&z| hf.eval(z).ok()))
        });
    }
    g.finish();
}

fn moments(c: &mut Criterion) {
    let n = 12;
    let mut g = c.benchmark_group("moment_assembly");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, n), &exec, |b, &exec| {
            b.iter(|| {
                Moments::compute(n, black_box(0.2), n / 2 - 1 + n, 1.0, MOMENT_TOL, exec).unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, droplet, level_set, moments);
criterion_main!(benches);
