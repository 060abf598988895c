//! Population observables of the driven two-level system: the non-decay
//! probability `P_ND(t) = |<0|psi(t)>|^2`, Bloch vectors, the ladder of
//! population plateaus, and agreement with the closed-form model.
//!
//! Population moves in bursts around the zeros of the field, where the
//! instantaneous levels come closest. In between, around each field extremum
//! `k T/2`, the population oscillates quickly about a constant mean. Plateaus
//! are therefore cut at the field zeros `T/4 + k T/2` and centered on the
//! extrema.

use serde::{Deserialize, Serialize};

use crate::analytic_model::AnalyticModel;
use crate::error::{Error, Result};
use crate::floquet::{QuasienergyPoint, DEGENERACY_TOL};
use crate::operators::StateVector;
use crate::propagator::{evolve_state, PropagationGrid, TLS_STEPS_PER_PERIOD};
use crate::tls_model::{hamiltonian, DriveParams};

/// Probabilities may leave `[0, 1]` by this much through round-off.
pub const PROBABILITY_SLACK: f64 = 1e-10;
/// Smallest mean difference that counts as a step.
pub const STEP_FLOOR: f64 = 0.02;
pub const MIN_SAMPLES_PER_PERIOD: usize = 64;
/// Horizon for figure data, as a multiple of the flip time.
pub const HORIZON_FACTOR: f64 = 1.2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    pub steps_per_period: usize,
    /// Must divide `steps_per_period`.
    pub samples_per_period: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self { steps_per_period: TLS_STEPS_PER_PERIOD, samples_per_period: 256 }
    }
}

impl TraceOptions {
    pub(crate) fn grid(&self, period: f64, horizon: f64) -> Result<PropagationGrid> {
        if self.samples_per_period == 0 || self.steps_per_period % self.samples_per_period != 0 {
            return Err(Error::InvalidGrid(format!(
                "samples_per_period {} must divide steps_per_period {}",
                self.samples_per_period, self.steps_per_period
            )));
        }
        PropagationGrid::new(0.0, horizon, period, self.steps_per_period)?
            .with_stride(self.steps_per_period / self.samples_per_period)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityTrace {
    times: Vec<f64>,
    pnd: Vec<f64>,
    params: DriveParams,
}

impl ProbabilityTrace {
    pub fn new(times: Vec<f64>, pnd: Vec<f64>, params: DriveParams) -> Result<Self> {
        if times.len() != pnd.len() {
            return Err(Error::DimensionMismatch { expected: times.len(), found: pnd.len() });
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid("trace times must be strictly increasing".into()));
        }
        if let Some(v) = pnd.iter().find(|v| !(**v >= -PROBABILITY_SLACK && **v <= 1.0 + PROBABILITY_SLACK)) {
            return Err(Error::InvalidParams(format!("probability {v} outside [0, 1]")));
        }
        Ok(Self { times, pnd, params })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn pnd(&self) -> &[f64] {
        &self.pnd
    }

    pub fn params(&self) -> &DriveParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Smallest `P_ND` among samples with `|t - center| <= width/2`.
    pub fn window_min(&self, center: f64, width: f64) -> Option<f64> {
        self.times
            .iter()
            .zip(&self.pnd)
            .filter(|(t, _)| (*t - center).abs() <= 0.5 * width)
            .map(|(_, p)| *p)
            .reduce(f64::min)
    }
}

fn trajectory(
    p: &DriveParams,
    psi0: &StateVector,
    horizon: f64,
    opts: &TraceOptions,
) -> Result<Vec<(f64, StateVector)>> {
    if psi0.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: psi0.dim() });
    }
    evolve_state(|t| hamiltonian(p, t), psi0, &opts.grid(p.period(), horizon)?)
}

/// `P_ND(t)` on `[0, horizon]` from the numerical propagator.
pub fn non_decay_trace(
    p: &DriveParams,
    psi0: &StateVector,
    horizon: f64,
    opts: &TraceOptions,
) -> Result<ProbabilityTrace> {
    let (times, pnd) = trajectory(p, psi0, horizon, opts)?.into_iter().map(|(t, s)| (t, s.population(0))).unzip();
    ProbabilityTrace::new(times, pnd, *p)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plateau {
    pub t_start: f64,
    pub t_end: f64,
    pub mean_p: f64,
    /// Peak-to-peak of `P_ND` over the middle half of the segment(s).
    pub oscillation_amplitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepLadder {
    pub plateaus: Vec<Plateau>,
    /// Means fall step by step until the lowest plateau.
    pub monotone_decreasing: bool,
}

impl StepLadder {
    pub fn len(&self) -> usize {
        self.plateaus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plateaus.is_empty()
    }
}

struct Segment {
    t_start: f64,
    t_end: f64,
    sum: f64,
    count: usize,
    osc: f64,
}

impl Segment {
    fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }
}

/// Splits `trace` into plateaus between consecutive field zeros and merges
/// neighbors whose means differ by no more than the noise floor
/// `max(0.02, half the larger peak-to-peak oscillation)`.
pub fn detect_steps(trace: &ProbabilityTrace) -> Result<StepLadder> {
    let period = trace.params.period();
    let (t0, t1) = match (trace.times.first(), trace.times.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::TraceTooShort("empty trace".into())),
    };
    if t1 - t0 < period * (1.0 - 1e-9) {
        return Err(Error::TraceTooShort(format!("covers {:.4} of a period", (t1 - t0) / period)));
    }
    let per_period = (trace.len() - 1) as f64 * period / (t1 - t0);
    if per_period < MIN_SAMPLES_PER_PERIOD as f64 - 1e-9 {
        return Err(Error::TraceTooShort(format!("{per_period:.1} samples per period, need {MIN_SAMPLES_PER_PERIOD}")));
    }

    let half = 0.5 * period;
    let quarter = 0.25 * period;
    let eighth = 0.125 * period;
    // Segment k spans [k T/2 - T/4, k T/2 + T/4].
    let index = |t: f64| ((t + quarter) / half).floor().max(0.0) as usize;
    let mut segments: Vec<Segment> = Vec::new();
    let mut extrema: Vec<(f64, f64)> = Vec::new();
    for (&t, &p) in trace.times.iter().zip(&trace.pnd) {
        let k = index(t - t0);
        while segments.len() <= k {
            let j = segments.len() as f64;
            segments.push(Segment {
                t_start: (t0 + j * half - quarter).max(t0),
                t_end: (t0 + j * half + quarter).min(t1),
                sum: 0.0,
                count: 0,
                osc: 0.0,
            });
            extrema.push((f64::INFINITY, f64::NEG_INFINITY));
        }
        let seg = &mut segments[k];
        seg.sum += p;
        seg.count += 1;
        if (t - t0 - k as f64 * half).abs() <= eighth {
            let e = &mut extrema[k];
            *e = (e.0.min(p), e.1.max(p));
        }
    }
    for (seg, (lo, hi)) in segments.iter_mut().zip(&extrema) {
        seg.osc = if hi >= lo { hi - lo } else { 0.0 };
    }
    segments.retain(|s| s.count > 0);
    // A trailing sliver of less than T/8 joins its predecessor.
    if segments.len() > 1 && segments.last().is_some_and(|s| s.t_end - s.t_start < eighth) {
        let last = segments.pop().expect("len > 1");
        let prev = segments.last_mut().expect("len > 1");
        prev.t_end = last.t_end;
        prev.sum += last.sum;
        prev.count += last.count;
    }

    let mut merged: Vec<Segment> = Vec::new();
    for seg in segments {
        if let Some(cur) = merged.last_mut() {
            let floor = STEP_FLOOR.max(0.5 * cur.osc.max(seg.osc));
            if (seg.mean() - cur.mean()).abs() <= floor {
                cur.t_end = seg.t_end;
                cur.sum += seg.sum;
                cur.count += seg.count;
                cur.osc = cur.osc.max(seg.osc);
                continue;
            }
        }
        merged.push(seg);
    }

    let plateaus: Vec<Plateau> = merged
        .iter()
        .map(|s| Plateau {
            t_start: s.t_start,
            t_end: s.t_end,
            mean_p: s.mean().clamp(0.0, 1.0),
            oscillation_amplitude: s.osc,
        })
        .collect();
    let lowest = plateaus.iter().enumerate().min_by(|a, b| a.1.mean_p.total_cmp(&b.1.mean_p)).map_or(0, |(i, _)| i);
    let monotone_decreasing = plateaus[..=lowest].windows(2).all(|w| w[1].mean_p < w[0].mean_p);
    Ok(StepLadder { plateaus, monotone_decreasing })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochPoint {
    pub fn from_state(t: f64, psi: &StateVector) -> Result<Self> {
        if psi.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: psi.dim() });
        }
        let a = psi.amplitudes()[0];
        let b = psi.amplitudes()[1];
        let ab = a.conj() * b;
        Ok(Self { t, x: 2.0 * ab.re, y: 2.0 * ab.im, z: a.norm_sqr() - b.norm_sqr() })
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// `(<sx>, <sy>, <sz>)` along the trajectory.
pub fn bloch_trajectory(
    p: &DriveParams,
    psi0: &StateVector,
    horizon: f64,
    opts: &TraceOptions,
) -> Result<Vec<BlochPoint>> {
    trajectory(p, psi0, horizon, opts)?.iter().map(|(t, s)| BlochPoint::from_state(*t, s)).collect()
}

/// `pi / gap`. Fails when the gap is within `DEGENERACY_TOL * omega` of zero.
pub fn flip_time_from_spectrum(point: &QuasienergyPoint) -> Result<f64> {
    flip_time_from_gap(point.gap, point.omega)
}

pub fn flip_time_from_gap(gap: f64, omega: f64) -> Result<f64> {
    if !(gap > DEGENERACY_TOL * omega) {
        return Err(Error::DivergentFlipTime { gap });
    }
    Ok(std::f64::consts::PI / gap)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticComparison {
    pub sup_norm: f64,
    pub rms: f64,
}

/// Numerical against closed-form `P_ND` from `|0>` on `[0, horizon]`.
pub fn compare_analytic(p: &DriveParams, horizon: f64, opts: &TraceOptions) -> Result<AnalyticComparison> {
    let trace = non_decay_trace(p, &StateVector::basis(2, 0)?, horizon, opts)?;
    Ok(compare_trace(&trace))
}

pub fn compare_trace(trace: &ProbabilityTrace) -> AnalyticComparison {
    let model = AnalyticModel::new(&trace.params);
    let (mut sup, mut sq) = (0.0_f64, 0.0);
    for (&t, &p) in trace.times.iter().zip(&trace.pnd) {
        let d = (p - model.pnd(t)).abs();
        sup = sup.max(d);
        sq += d * d;
    }
    AnalyticComparison { sup_norm: sup, rms: (sq / trace.len().max(1) as f64).sqrt() }
}

/// Smallest `P_ND` from `|0>` in the window `t_flip +- width/2`.
pub fn inversion_window_min(p: &DriveParams, t_flip: f64, width: f64, opts: &TraceOptions) -> Result<f64> {
    let trace = non_decay_trace(p, &StateVector::basis(2, 0)?, t_flip + 0.5 * width, opts)?;
    trace
        .window_min(t_flip, width)
        .ok_or_else(|| Error::TraceTooShort(format!("no samples within {width} of {t_flip}")))
}
