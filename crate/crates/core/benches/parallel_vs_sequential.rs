use alharm_core::filt2::{make_local_field2, Coeff};
use alharm_core::finabel::{fourier_c0_with, FinAbGroup, FunctionC0, MeasureC0};
use alharm_core::harm2::{DistC2, SchwartzC2};
use alharm_core::par::Exec;
use alharm_core::suites::{run_suite, Scenario};
use alharm_core::C64;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const POLICIES: [(&str, Exec); 2] = [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)];

fn finite_fourier(c: &mut Criterion) {
    let g = FinAbGroup::new(vec![16, 16, 16]).unwrap();
    let f = FunctionC0::new(g.clone(), (0..g.order()).map(|i| C64::new((i as f64).sin(), (i as f64).cos())).collect()).unwrap();
    let mu = MeasureC0::counting(&g);
    let mut grp = c.benchmark_group("fourier_c0_4096");
    for (name, e) in POLICIES {
        grp.bench_function(name, |b| b.iter(|| fourier_c0_with(&f, &mu, e).unwrap()));
    }
    grp.finish();
}

fn box_fourier(c: &mut Criterion) {
    let e = make_local_field2(Coeff::Fq(3), (-2, 1), (-2, 1)).unwrap().with_refs(0, 0).unwrap();
    let w = e.full_window();
    let f = SchwartzC2::random(&e, w, 3, 1).unwrap();
    let h = DistC2::random(&e.dual2(), w.dual(), 3, 2).unwrap();
    let mut grp = c.benchmark_group("fourier2_q3_4x4");
    grp.sample_size(10);
    for (name, ex) in POLICIES {
        grp.bench_function(BenchmarkId::new("function", name), |b| {
            Exec::set_current(ex);
            b.iter(|| f.fourier2().unwrap())
        });
        grp.bench_function(BenchmarkId::new("pairing", name), |b| {
            Exec::set_current(ex);
            b.iter(|| alharm_core::harm2::pairing2(&f.fourier2().unwrap(), &h).unwrap())
        });
    }
    Exec::set_current(Exec::Parallel);
    grp.finish();
}

fn suites(c: &mut Criterion) {
    let mut grp = c.benchmark_group("suite");
    grp.sample_size(10);
    for suite in ["fourier-c0", "poisson2", "centext"] {
        for (name, ex) in POLICIES {
            grp.bench_function(BenchmarkId::new(suite, name), |b| {
                Exec::set_current(ex);
                b.iter(|| run_suite(&Scenario::new(suite)).unwrap())
            });
        }
    }
    Exec::set_current(Exec::Parallel);
    grp.finish();
}

criterion_group!(benches, finite_fourier, box_fourier, suites);
criterion_main!(benches);
