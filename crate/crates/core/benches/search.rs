use std::hint::black_box;

use ardl_lab::ardl::{select_spec, ArdlData, Case, Search};
use ardl_lab::synth::{self, NormalStream};
use ardl_lab::unitroot::{adf_test, AdfOptions};
use criterion::{criterion_group, criterion_main, Criterion};

fn panel(k: usize, n: usize) -> ArdlData {
    let mut z = NormalStream::seeded(11);
    let regs: Vec<Vec<f64>> = (0..k)
        .map(|_| {
            let mut acc = 0.0;
            (0..n)
                .map(|_| {
                    acc += z.next();
                    acc
                })
                .collect()
        })
        .collect();
    let mut prev = 0.0;
    let dep = (0..n)
        .map(|t| {
            let target: f64 = regs.iter().map(|r| 0.5 * r[t]).sum();
            prev += -0.3 * (prev - target) + z.next();
            prev
        })
        .collect();
    ArdlData {
        dep_name: "y".into(),
        reg_names: (0..k).map(|j| format!("x{j}")).collect(),
        dep,
        regs,
    }
}

fn workloads(c: &mut Criterion, label: &str, run: &dyn Fn(&mut (dyn FnMut() + Send))) {
    let data = panel(4, 400);
    let names: Vec<String> = data.reg_names.clone();
    let x: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut g = c.benchmark_group(label);
    g.sample_size(10);
    g.bench_function("full_search_k4_lag3", |b| {
        b.iter(|| {
            let mut out = None;
            run(&mut || out = Some(select_spec(&data, &x, &[], Case::III, 3, Search::Full).unwrap()));
            black_box(out)
        })
    });
    g.bench_function("adf_monte_carlo_200", |b| {
        b.iter(|| {
            let mut out = Vec::new();
            run(&mut || {
                out = synth::monte_carlo(0, 200, |s| {
                    let mut z = NormalStream::seeded(s);
                    let mut acc = 0.0;
                    let y: Vec<f64> = (0..390)
                        .map(|_| {
                            acc += z.next();
                            acc
                        })
                        .collect();
                    adf_test(&y, &AdfOptions::default()).unwrap().p_value
                })
            });
            black_box(out)
        })
    });
    g.finish();
}

#[cfg(feature = "parallel")]
fn bench(c: &mut Criterion) {
    workloads(c, "rayon", &|f| f());
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    workloads(c, "one_thread", &|f| single.install(|| f()));
}

#[cfg(not(feature = "parallel"))]
fn bench(c: &mut Criterion) {
    workloads(c, "sequential", &|f| f());
}

criterion_group!(benches, bench);
criterion_main!(benches);
