use driven_tls::analytic_model::{flip_time, step_count_estimate};
use driven_tls::dynamics::{
    bloch_trajectory, detect_steps, flip_time_from_spectrum, inversion_window_min, non_decay_trace, TraceOptions,
};
use driven_tls::floquet::{
    degeneracies, find_features, linspace, locate_peaks, spectrum_sweep, SweepOptions, DEGENERACY_TOL,
};
use driven_tls::{DriveParams, StateVector};

fn ground() -> StateVector {
    StateVector::basis(2, 0).unwrap()
}

fn peak_params() -> Vec<(DriveParams, f64)> {
    locate_peaks(1.0, 1.0, 6, &SweepOptions::default())
        .unwrap()
        .into_iter()
        .map(|f| (DriveParams::from_amp_ratio(1.0, 1.0, f.amp_ratio).unwrap(), f.gap))
        .collect()
}

#[test]
fn ladders_at_peaks() {
    let opts = TraceOptions::default();
    let peaks = peak_params();
    for n in [2usize, 5] {
        let (p, gap) = peaks[n - 1];
        let t = p.period();
        let tf = std::f64::consts::PI / gap;
        let trace = non_decay_trace(&p, &ground(), tf, &opts).unwrap();
        let ladder = detect_steps(&trace).unwrap();
        let expected = step_count_estimate(&p).unwrap().round() as i64;
        let count = ladder.len() as i64;
        assert!((count - expected).abs() <= 1, "peak {n}: {count} plateaus, expected {expected}");
        assert!(ladder.monotone_decreasing, "peak {n}: {ladder:?}");
        // Cuts sit on the field zeros T/4 + k T/2.
        let sample = t / opts.samples_per_period as f64;
        for pl in &ladder.plateaus[..ladder.len() - 1] {
            let k = ((pl.t_end - 0.25 * t) / (0.5 * t)).round();
            assert!((pl.t_end - (0.25 * t + 0.5 * k * t)).abs() <= sample, "{pl:?}");
        }
    }
}

#[test]
fn off_peak_ladder_is_not_monotone() {
    let p = DriveParams::from_amp_ratio(1.0, 1.0, 4.5).unwrap();
    let tf = flip_time(&p).unwrap();
    let trace = non_decay_trace(&p, &ground(), 1.2 * tf, &TraceOptions::default()).unwrap();
    let ladder = detect_steps(&trace).unwrap();
    assert!(!ladder.monotone_decreasing, "{ladder:?}");
}

#[test]
fn bloch_vectors_stay_on_sphere() {
    let p = DriveParams::from_amp_ratio(1.0, 1.0, 3.44).unwrap();
    let traj = bloch_trajectory(&p, &ground(), 20.0, &TraceOptions::default()).unwrap();
    assert_eq!(traj[0].z, 1.0);
    for b in &traj {
        assert!((b.norm() - 1.0).abs() <= 1e-10);
    }
    let trace = non_decay_trace(&p, &ground(), 20.0, &TraceOptions::default()).unwrap();
    for (b, pnd) in traj.iter().zip(trace.pnd()) {
        assert!((0.5 * (1.0 + b.z) - pnd).abs() <= 1e-12);
    }
}

#[test]
fn spectral_flip_time_tracks_rwa_at_strong_drive() {
    let sweep = spectrum_sweep(1.0, 1.0, &linspace(3.0, 10.0, 701)).unwrap();
    let features = find_features(&sweep, DEGENERACY_TOL).unwrap();
    for f in driven_tls::floquet::peaks(&features) {
        let pt = sweep
            .iter()
            .min_by(|a, b| (a.amp_ratio - f.amp_ratio).abs().total_cmp(&(b.amp_ratio - f.amp_ratio).abs()))
            .unwrap();
        let from_spectrum = flip_time_from_spectrum(pt).unwrap();
        let rwa = flip_time(&DriveParams::from_amp_ratio(1.0, 1.0, pt.amp_ratio).unwrap()).unwrap();
        assert!((from_spectrum / rwa - 1.0).abs() <= 0.05, "A/w={}: {from_spectrum} vs {rwa}", pt.amp_ratio);
    }
}

#[test]
fn population_inverts_at_every_peak() {
    let opts = TraceOptions::default();
    for (n, (p, gap)) in peak_params().into_iter().enumerate() {
        let tf = std::f64::consts::PI / gap;
        let m = inversion_window_min(&p, tf, p.period() / 8.0, &opts).unwrap();
        assert!(m <= 2e-2, "peak {}: window minimum {m:.3e}", n + 1);
        let at = *non_decay_trace(&p, &ground(), tf, &opts).unwrap().pnd().last().unwrap();
        assert!(at <= 0.05, "peak {}: P_ND(T_F) = {at:.3e}", n + 1);
    }
}

#[test]
fn transfer_is_suppressed_at_degeneracies() {
    let sweep = spectrum_sweep(1.0, 1.0, &linspace(0.5, 4.6, 411)).unwrap();
    let features = find_features(&sweep, DEGENERACY_TOL).unwrap();
    let found: Vec<f64> = degeneracies(&features).map(|f| f.amp_ratio).collect();
    assert_eq!(found.len(), 3, "{found:?}");
    for &r in &found[1..] {
        let p = DriveParams::from_amp_ratio(1.0, 1.0, r).unwrap();
        let trace = non_decay_trace(&p, &ground(), 10.0 * p.period(), &TraceOptions::default()).unwrap();
        let lowest = trace.pnd().iter().copied().fold(1.0, f64::min);
        assert!(lowest >= 0.5, "A/w={r}: min P_ND {lowest}");
    }
}
