use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use bcklab::dynamics::{integrate, IntegratorConfig};
use bcklab::integrals::{eval_integral, IntegralId};
use bcklab::lagrangian::Bck;
use bcklab::par;
use bcklab::sampling::{self, Region};
use bcklab::symmetry::{catalog, rund_trautman_residual};
use bcklab::{Params, Potential, State1D};

fn residual_sweep(c: &mut Criterion) {
    let p = Params::new(0.3).unwrap();
    let pot = Potential::Linear { f: 1.3 };
    let lag = Bck::new(pot, p);
    let gen = catalog::x4(&p, 1.3);
    let mut group = c.benchmark_group("rund_trautman_sweep");
    for n in [1_000usize, 10_000] {
        let pts = sampling::offshell_points(42, n, &Region::default());
        let f = |pt: &_| rund_trautman_residual(&gen, &lag, pt).unwrap().abs();
        group.bench_with_input(BenchmarkId::new("parallel", n), &pts, |b, pts| {
            b.iter(|| par::max_abs(par::map(black_box(pts), f)))
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &pts, |b, pts| {
            b.iter(|| par::max_abs(par::map_seq(black_box(pts), f)))
        });
    }
    group.finish();
}

fn drift_evaluation(c: &mut Criterion) {
    let p = Params::new(0.3).unwrap();
    let pot = Potential::Linear { f: 1.3 };
    let tr = integrate(
        &pot,
        &p,
        State1D::new(0.0, 0.5, -0.4),
        10.0,
        &IntegratorConfig::default(),
    )
    .unwrap();
    let ids = &IntegralId::ALL[..8];
    let f = |s: &bcklab::dynamics::Sample| {
        ids.iter()
            .map(|id| eval_integral(*id, &pot, &p, &s.state).unwrap())
            .sum::<f64>()
    };
    let mut group = c.benchmark_group("drift_evaluation");
    group.bench_function("parallel", |b| {
        b.iter(|| par::map(black_box(&tr.samples), f))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| par::map_seq(black_box(&tr.samples), f))
    });
    group.finish();
}

fn trajectory_batch(c: &mut Criterion) {
    let p = Params::new(0.3).unwrap();
    let pot = Potential::Linear { f: 1.3 };
    let cfg = IntegratorConfig::default();
    let ics: Vec<State1D> = sampling::states(
        7,
        20,
        &Region {
            t: (0.0, 0.0),
            ..Region::default()
        },
    );
    let run = |ic: &State1D| integrate(&pot, &p, *ic, 5.0, &cfg).unwrap().samples.len();
    let mut group = c.benchmark_group("trajectory_batch");
    group.sample_size(10);
    group.bench_function("parallel", |b| b.iter(|| par::map(black_box(&ics), run)));
    group.bench_function("sequential", |b| {
        b.iter(|| par::map_seq(black_box(&ics), run))
    });
    group.finish();
}

criterion_group!(benches, residual_sweep, drift_evaluation, trajectory_batch);
criterion_main!(benches);
