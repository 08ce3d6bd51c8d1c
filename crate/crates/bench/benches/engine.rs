use angio_bench::model1_problem;
use angio_core::analysis::{is_m_matrix, Matrix};
use angio_core::engine::{problems::LinearDelay, solve, History};
use angio_core::{integrate, IntegratorOptions, PositivityMode};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn bench_integrate(c: &mut Criterion) {
    let mut group = c.benchmark_group("integrate_model1_h100");
    for tau in [None, Some(1.0), Some(10.0)] {
        let (problem, history) = model1_problem(tau);
        let label = tau.map_or("none".to_string(), |t| t.to_string());
        for mode in [PositivityMode::OriginalCoords, PositivityMode::LogCoords] {
            let opts = IntegratorOptions::default().with_mode(mode);
            group.bench_with_input(
                BenchmarkId::new(format!("{mode:?}"), &label),
                &opts,
                |b, opts| {
                    b.iter(|| integrate(black_box(&problem), &history, (0.0, 100.0), opts).unwrap())
                },
            );
        }
    }
    group.finish();
}

fn bench_linear_dde(c: &mut Criterion) {
    let sys = LinearDelay::new(1.0, 1.0).unwrap();
    c.bench_function("linear_dde_h20", |b| {
        b.iter(|| {
            solve(
                &sys,
                History::constant([1.0]),
                (0.0, 20.0),
                &IntegratorOptions::default(),
            )
            .unwrap()
        })
    });
}

fn bench_m_matrix(c: &mut Criterion) {
    let mut group = c.benchmark_group("is_m_matrix");
    for n in [2usize, 4, 8, 12] {
        // diagonally dominant Z-matrix
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { n as f64 } else { -0.5 })
                    .collect()
            })
            .collect();
        let m = Matrix::from_rows(&rows).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| is_m_matrix(black_box(m)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_integrate, bench_linear_dde, bench_m_matrix);
criterion_main!(benches);
