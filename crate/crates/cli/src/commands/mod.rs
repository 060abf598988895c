pub mod dynamics;
pub mod multilevel;
pub mod scan;
pub mod spectrum;

use std::cell::RefCell;
use std::collections::HashMap;

use driven_tls::floquet::{locate_peaks, SpectralFeature, SweepOptions};

use crate::error::{usage, CliError, CliResult};

pub const MIN_POINTS: usize = 3;

pub fn positive(name: &str, x: f64) -> CliResult<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(usage(format!("--{name} must be positive and finite, got {x}")))
    }
}

pub fn amp_range(lo: f64, hi: f64, points: usize) -> CliResult<Vec<f64>> {
    if !(lo >= 0.0 && lo.is_finite() && hi.is_finite()) {
        return Err(usage(format!("amplitude range must be finite and non-negative, got [{lo}, {hi}]")));
    }
    if !(hi > lo) {
        return Err(usage(format!("--amp-max ({hi}) must exceed --amp-min ({lo})")));
    }
    if points < MIN_POINTS {
        return Err(usage(format!("--points must be at least {MIN_POINTS}, got {points}")));
    }
    Ok(driven_tls::floquet::linspace(lo, hi, points))
}

thread_local! {
    static PEAKS: RefCell<HashMap<(u64, u64, usize), Vec<SpectralFeature>>> = RefCell::new(HashMap::new());
}

/// The `n`-th measured gap maximum, from a sweep cached per `(delta, omega)`.
pub fn measured_peak(delta: f64, omega: f64, n: usize, steps_per_period: usize) -> CliResult<SpectralFeature> {
    if n == 0 {
        return Err(usage("--peak counts from 1"));
    }
    let key = (delta.to_bits(), omega.to_bits(), steps_per_period);
    let cached = PEAKS.with(|c| c.borrow().get(&key).filter(|v| v.len() >= n).map(|v| v[n - 1]));
    if let Some(f) = cached {
        return Ok(f);
    }
    let opts = SweepOptions { steps_per_period, ..SweepOptions::default() };
    let found = locate_peaks(delta, omega, n, &opts).map_err(CliError::from)?;
    let f = found[n - 1];
    PEAKS.with(|c| c.borrow_mut().insert(key, found));
    Ok(f)
}
