//! Criterion benchmark bodies for the scattering pipeline, kept in a library so
//! other harnesses can reuse them.

use std::hint::black_box;

use criterion::Criterion;
use tempstep_core::specfun::{hyp2f1, HypArgs};
use tempstep_core::{integrate, scatter, Complex, IntegrationConfig, StepParameters};

fn reference(tau: f64) -> StepParameters {
    let r3 = 3f64.sqrt();
    StepParameters::new(1.0, 1.0, r3, 0.0, 2.0 * r3, 0.0, tau).expect("valid parameters")
}

pub fn special_functions(c: &mut Criterion) {
    let args = HypArgs::new(
        Complex::new(0.0, 4.3),
        Complex::new(1.0, -2.1),
        Complex::new(1.0, 3.5),
        -1.0,
    );
    c.bench_function("hyp2f1 at zeta = -1", |b| {
        b.iter(|| hyp2f1(black_box(args)))
    });
}

pub fn analytic(c: &mut Criterion) {
    let mut group = c.benchmark_group("scatter");
    for tau in [1e-4, 0.5, 5.0] {
        let params = reference(tau);
        group.bench_function(format!("tau={tau}"), |b| {
            b.iter(|| scatter(black_box(&params)))
        });
    }
    group.finish();
}

pub fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    let cfg = IntegrationConfig::default();
    for tau in [0.3, 3.0] {
        let params = reference(tau);
        group.bench_function(format!("tau={tau}"), |b| {
            b.iter(|| integrate(black_box(&params), &cfg))
        });
    }
    group.finish();
}

pub fn benchmarks(c: &mut Criterion) {
    special_functions(c);
    analytic(c);
    oracle(c);
}
