//! Physical behaviour of the full pipeline on the two reference systems.

use qbeats::dynamics::TimeSeries;
use qbeats::pipeline::{simulate, tr_mfe, InitialState, NoiseMethod, SimulationRequest};
use qbeats::postprocess::{argmax_after, local_maxima, local_minima, FluorescenceParams};
use qbeats::system::{NuclearGroup, RelaxationTimes, SpinSystemSpec};

fn grid(end: f64, step: f64) -> Vec<f64> {
    (0..=((end / step).round() as usize)).map(|k| k as f64 * step).collect()
}

fn octalin(field: f64, t1: f64, t2: f64) -> SpinSystemSpec<f64> {
    let times = RelaxationTimes::from_ns(t1, t2).unwrap();
    SpinSystemSpec::new(vec![NuclearGroup::from_gauss(8, 24.9)], 2.0028, 2.0028, field, times).unwrap()
}

fn dmb(field: f64, t1: f64, t2: f64) -> SpinSystemSpec<f64> {
    let groups = vec![NuclearGroup::from_gauss(2, 6.5), NuclearGroup::from_gauss(12, 16.6)];
    SpinSystemSpec::new(groups, 2.0028, 2.0028, field, RelaxationTimes::from_ns(t1, t2).unwrap()).unwrap()
}

fn run(spec: SpinSystemSpec<f64>, noise: NoiseMethod, times: Vec<f64>) -> TimeSeries<f64> {
    simulate(&SimulationRequest::new(spec, InitialState::Mixed, noise, times)).unwrap().total
}

fn at(series: &TimeSeries<f64>, idx: &[usize]) -> Vec<f64> {
    idx.iter().map(|&i| series.times()[i]).collect()
}

#[test]
fn dmb_zero_field_extrema() {
    let s = run(dmb(0.0, 20.0, 20.0), NoiseMethod::None, grid(70.0, 0.1));
    assert!((s.values()[0] - 1.0).abs() < 1e-10);
    let minima = at(&s, &local_minima(s.values()));
    let maxima = at(&s, &local_maxima(s.values()));
    for target in [2.0, 20.0, 40.0, 59.0] {
        assert!(minima.iter().any(|m| (m - target).abs() <= 2.0), "no minimum near {target}: {minima:?}");
    }
    assert!(maxima.iter().any(|m| (m - 45.0).abs() <= 2.0), "{maxima:?}");
}

#[test]
fn relaxation_asymptotes() {
    let s = run(octalin(0.0, 9.0, 9.0), NoiseMethod::Kraus, grid(90.0, 1.0));
    let end = *s.values().last().unwrap();
    assert!((end - 0.25).abs() <= 1e-8, "{end}");
    let s = run(dmb(0.1, f64::INFINITY, 20.0), NoiseMethod::Kraus, grid(200.0, 2.0));
    let end = *s.values().last().unwrap();
    // frozen: 0.49958 from the first run
    assert!((end - 0.49958).abs() <= 1e-5, "{end}");
}

#[test]
fn octalin_ratio_peaks_at_second_maximum() {
    let params = FluorescenceParams::new(0.35, 1.2, 1.0, 1.0).unwrap();
    let mut peaks = Vec::new();
    for step in [0.1, 0.05] {
        let times = grid(40.0, step);
        let high = SimulationRequest::new(octalin(0.3, f64::INFINITY, 9.0), InitialState::Mixed, NoiseMethod::Kraus, times.clone());
        let zero = SimulationRequest::new(octalin(0.0, 9.0, 9.0), InitialState::Mixed, NoiseMethod::Kraus, times);
        let (ratio, _, _) = tr_mfe(&high, &zero, &params).unwrap();
        let r = &ratio.ratio;
        let global = argmax_after(r, 0.0).unwrap();
        let maxima = local_maxima(r.values());
        assert_eq!(maxima.get(1), Some(&global), "maxima at {:?}", at(r, &maxima));
        peaks.push(r.times()[global]);
    }
    assert!((peaks[0] - peaks[1]).abs() <= 0.5);
}
