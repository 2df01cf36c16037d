use std::hint::black_box;

use bendwave::mask::{extract_frame, rasterize_polyline, BaseHint, BinaryMask};
use bendwave::midline::{processed_profile, Midline, Point};
use bendwave::parallel;
use bendwave::rodsim::{simulate, DriveProfile, Material, Medium, RodModel};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const PITCH: f64 = 0.5e-3;

fn arc(k: f64, n: usize, scale: f64) -> Vec<Point> {
    let mut p = Point::new(0.5 * scale, 0.04 * scale);
    let mut out = vec![p];
    let ds = 0.9 * scale / n as f64;
    for i in 1..n {
        let h = std::f64::consts::FRAC_PI_2 + k * i as f64 * ds / scale;
        p = p + Point::new(h.cos(), h.sin()) * ds;
        out.push(p);
    }
    out
}

fn masks(n: usize) -> Vec<BinaryMask> {
    (0..n)
        .map(|i| rasterize_polyline(&arc(0.5 + 0.05 * i as f64, 80, 120.0), 2.5, 120, 120, PITCH).unwrap())
        .collect()
}

fn bench_extract(c: &mut Criterion) {
    let frames = masks(32);
    let fixture = BinaryMask::empty(120, 120, PITCH).unwrap();
    let one = |m: &BinaryMask| extract_frame(m, &fixture, PITCH, BaseHint::Top).ok();
    assert!(frames.iter().all(|m| one(m).is_some()));
    let mut g = c.benchmark_group("extract_32_frames");
    g.bench_function("parallel", |b| b.iter(|| parallel::map(black_box(&frames), one)));
    g.bench_function("sequential", |b| b.iter(|| parallel::map_sequential(black_box(&frames), one)));
    g.finish();
}

fn bench_curvature(c: &mut Criterion) {
    let mids: Vec<Midline> = (0..200)
        .map(|i| Midline::new(arc(1.0 + 0.01 * i as f64, 400, 0.3), 0.0).unwrap())
        .collect();
    let one = |m: &Midline| processed_profile(m, 5, 100).ok();
    assert!(mids.iter().all(|m| one(m).is_some()));
    let mut g = c.benchmark_group("curvature_200_frames");
    g.bench_function("parallel", |b| b.iter(|| parallel::map(black_box(&mids), one)));
    g.bench_function("sequential", |b| b.iter(|| parallel::map_sequential(black_box(&mids), one)));
    g.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let grid: Vec<(Material, f64)> = [Material::Soft, Material::Medium, Material::Hard]
        .iter()
        .flat_map(|&m| [60.0, 150.0].map(move |rpm| (m, rpm)))
        .collect();
    let one = |&(m, rpm): &(Material, f64)| {
        let model = RodModel {
            n_nodes: 30,
            ..RodModel::preset(m, Medium::Water)
        };
        let drive = DriveProfile::rotary(rpm, 1.0, 0.05).unwrap();
        simulate(&model, &drive, 0.1, 0.01).map(|s| s.len()).ok()
    };
    let mut g = c.benchmark_group("sweep_6_runs");
    g.sample_size(10);
    for (name, seq) in [("parallel", false), ("sequential", true)] {
        g.bench_with_input(BenchmarkId::from_parameter(name), &seq, |b, &seq| {
            b.iter(|| {
                if seq {
                    parallel::map_sequential(black_box(&grid), one)
                } else {
                    parallel::map(black_box(&grid), one)
                }
            })
        });
    }
    g.finish();
}

criterion_group!(benches, bench_extract, bench_curvature, bench_sweep);
criterion_main!(benches);
