use criterion::{black_box, criterion_group, criterion_main, Criterion};
use scqkit::calibrate::{fit_exponential, pulse_fidelity, DeviceModel};
use scqkit::dynamics::Frame;
use scqkit::em::{maxwell_capacitance, ConductorLayout, Rect};
use scqkit::spectra::{FluxoniumParams, QubitParams, TransmonParams};
use scqkit::GateSpec;

fn spectra(c: &mut Criterion) {
    let transmon = QubitParams::Transmon(TransmonParams::new(7.68, 0.31, 0.0));
    let fluxonium = QubitParams::Fluxonium(FluxoniumParams::new(4.8, 0.99, 0.89, 0.5));
    c.bench_function("spectrum/transmon", |b| b.iter(|| black_box(&transmon).spectrum().unwrap()));
    c.bench_function("spectrum/fluxonium", |b| b.iter(|| black_box(&fluxonium).spectrum().unwrap()));
}

fn pulses(c: &mut Criterion) {
    let p = QubitParams::Transmon(TransmonParams::new(7.68, 0.31, 0.0));
    let dev = DeviceModel::new(&p, 4, 0.02, 52.78, 97.48).unwrap();
    let gate = GateSpec::x();
    let mut g = c.benchmark_group("pulse_fidelity");
    g.sample_size(10);
    for (name, frame) in [("lab", Frame::Lab), ("rwa", Frame::RotatingWave)] {
        g.bench_function(name, |b| b.iter(|| pulse_fidelity(&dev, &gate, 28.0, 0.0, 0.0, frame).unwrap()));
    }
    g.finish();
}

fn capacitance(c: &mut Criterion) {
    let layout = ConductorLayout::new(160.0, 80.0, 2.5)
        .with_conductor("pad_a", Rect::new(30.0, 30.0, 60.0, 50.0))
        .with_conductor("pad_b", Rect::new(70.0, 30.0, 100.0, 50.0));
    let mut g = c.benchmark_group("capacitance");
    g.sample_size(10);
    g.bench_function("two_pads", |b| b.iter(|| maxwell_capacitance(black_box(&layout)).unwrap()));
    g.finish();
}

fn fit(c: &mut Criterion) {
    let x: Vec<f64> = (0..=2000).step_by(2).map(f64::from).collect();
    let y: Vec<f64> = x.iter().map(|n| 0.5 * (-4.6e-4 * n).exp() + 0.5).collect();
    c.bench_function("fit_exponential", |b| b.iter(|| fit_exponential(black_box(&x), black_box(&y)).unwrap()));
}

criterion_group!(benches, spectra, pulses, capacitance, fit);
criterion_main!(benches);
