//! Quasienergies from the monodromy operator `U(T)`, amplitude sweeps with
//! mode tracking, and detection of spectral features.
//!
//! Quasienergies are folded into the zone `(-omega/2, omega/2]`. The gap
//! between a pair of quasienergies is their distance on the quasienergy
//! circle, so it lives in `[0, omega/2]`. Along a sweep the signed difference
//! of the two tracked modes is additionally unwrapped, which tells two kinds
//! of gap extrema apart that look alike on the circle:
//!
//! * the difference crossing a multiple of `omega` is a true degeneracy;
//! * the difference crossing an odd multiple of `omega/2` is a fold cusp,
//!   where the two ribbons meet across the zone edge. These are maxima of the
//!   circle distance but not physical peaks, and are skipped.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{max_abs_diff, CMatrix, HermitianOperator, UnitaryOperator};
use crate::propagator::{propagate, PropagationGrid, TLS_STEPS_PER_PERIOD};
use crate::tls_model::{hamiltonian, DriveParams};

/// Default degeneracy tolerance in units of `omega`.
pub const DEGENERACY_TOL: f64 = 1e-3;
/// Matched modes of neighboring sweep points must overlap at least this much.
pub const MIN_TRACKING_OVERLAP: f64 = 0.9;
/// Absolute periodicity tolerance, scaled by `1 + max|H(t)|`.
pub const PERIODICITY_TOL: f64 = 1e-10;
const PERIODICITY_PROBES: [f64; 3] = [0.1, 0.37, 0.81];

/// Fold into `(-omega/2, omega/2]`.
pub fn fold(eps: f64, omega: f64) -> f64 {
    let r = (eps + 0.5 * omega).rem_euclid(omega) - 0.5 * omega;
    if r <= -0.5 * omega {
        r + omega
    } else {
        r
    }
}

/// Distance between two quasienergies on the circle of circumference `omega`.
pub fn circle_distance(a: f64, b: f64, omega: f64) -> f64 {
    let r = (a - b).rem_euclid(omega);
    r.min(omega - r)
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::InvalidParams(format!("omega must be positive, got {omega}")));
    }
    Ok(())
}

/// `U(T, 0)` for a generator of period `T = 2 pi / omega`.
///
/// Periodicity is checked at three probe times before propagating.
pub fn monodromy<G>(generator: G, omega: f64, steps_per_period: usize) -> Result<UnitaryOperator>
where
    G: Fn(f64) -> HermitianOperator,
{
    check_omega(omega)?;
    let period = TAU / omega;
    for frac in PERIODICITY_PROBES {
        let t = frac * period;
        let h = generator(t);
        let scale = 1.0 + h.matrix().iter().map(|z| z.norm()).fold(0.0, f64::max);
        let deviation = max_abs_diff(h.matrix(), generator(t + period).matrix());
        if !(deviation <= PERIODICITY_TOL * scale) {
            return Err(Error::NotPeriodic { period, time: t, deviation });
        }
    }
    let grid = PropagationGrid::new(0.0, period, period, steps_per_period)?;
    propagate(generator, &grid)
}

/// Monodromy operator of the driven two-level model.
pub fn tls_monodromy(p: &DriveParams, steps_per_period: usize) -> Result<UnitaryOperator> {
    monodromy(|t| hamiltonian(p, t), p.omega, steps_per_period)
}

/// Folded quasienergies and Floquet modes at `t = 0`.
#[derive(Clone, Debug)]
pub struct FloquetDecomposition {
    pub omega: f64,
    /// `-arg(lambda)/T`, folded.
    pub quasienergies: Vec<f64>,
    /// Column `k` is the mode belonging to `quasienergies[k]`.
    pub modes: CMatrix,
}

impl FloquetDecomposition {
    pub fn dim(&self) -> usize {
        self.quasienergies.len()
    }
}

pub fn quasienergies(u: &UnitaryOperator, omega: f64) -> Result<FloquetDecomposition> {
    check_omega(omega)?;
    let period = TAU / omega;
    let (values, modes) = u.eigen()?;
    let quasienergies = values
        .iter()
        .map(|l| {
            // arg in (-pi, pi]
            let mut arg = l.arg();
            if arg <= -PI {
                arg = PI;
            }
            fold(-arg / period, omega)
        })
        .collect();
    Ok(FloquetDecomposition { omega, quasienergies, modes })
}

/// One amplitude of a sweep, restricted to a tracked pair of modes.
#[derive(Clone, Debug)]
pub struct QuasienergyPoint {
    pub amp_ratio: f64,
    pub omega: f64,
    /// Folded quasienergies of the two tracked modes, in tracking order.
    pub quasienergies: [f64; 2],
    /// Circle distance between the pair.
    pub gap: f64,
    /// `quasienergies[0] - quasienergies[1]`, unwrapped along the sweep.
    pub unwrapped_difference: f64,
    /// The two tracked Floquet modes at `t = 0`, as columns.
    pub floquet_modes: CMatrix,
    /// Smallest overlap between a mode and its match at the previous point
    /// (1 for the first point).
    pub tracking_overlap: f64,
    /// Tracking fell below [`MIN_TRACKING_OVERLAP`] even after bisection, or
    /// the pair could not be identified unambiguously.
    pub flagged: bool,
}

impl QuasienergyPoint {
    /// `(max, min)` of the pair.
    pub fn eps_plus_minus(&self) -> (f64, f64) {
        let [a, b] = self.quasienergies;
        (a.max(b), a.min(b))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub steps_per_period: usize,
    /// Depth of interval halving when tracking overlap drops.
    pub max_bisections: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { steps_per_period: TLS_STEPS_PER_PERIOD, max_bisections: 6 }
    }
}

/// A pair of Floquet modes picked out of one monodromy operator.
#[derive(Clone, Debug)]
pub(crate) struct PairSolution {
    pub quasienergies: [f64; 2],
    pub modes: CMatrix,
    pub ambiguous: bool,
}

fn check_grid(amp_ratios: &[f64]) -> Result<()> {
    if amp_ratios.is_empty() {
        return Err(Error::InvalidSweep("empty amplitude grid".into()));
    }
    if amp_ratios.iter().any(|a| !a.is_finite() || *a < 0.0) {
        return Err(Error::InvalidSweep("amplitudes must be finite and non-negative".into()));
    }
    if amp_ratios.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidSweep("amplitude grid must be strictly increasing".into()));
    }
    Ok(())
}

/// `|<prev_i|next_j>|`.
fn overlaps(prev: &CMatrix, next: &CMatrix) -> [[f64; 2]; 2] {
    let mut o = [[0.0; 2]; 2];
    for (i, row) in o.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = prev.column(i).dotc(&next.column(j)).norm();
        }
    }
    o
}

/// Reorders `next` to follow `prev`; returns the smaller matched overlap.
fn match_pair(prev: &PairSolution, next: &mut PairSolution) -> f64 {
    let o = overlaps(&prev.modes, &next.modes);
    if o[0][1] + o[1][0] > o[0][0] + o[1][1] {
        next.quasienergies.swap(0, 1);
        next.modes.swap_columns(0, 1);
        o[0][1].min(o[1][0])
    } else {
        o[0][0].min(o[1][1])
    }
}

/// Representative of `d` modulo `omega` closest to `reference`.
fn unwrap_near(d: f64, reference: f64, omega: f64) -> f64 {
    d + ((reference - d) / omega).round() * omega
}

/// Tracks a pair of modes across `amp_ratios`, bisecting intervals whose
/// matched overlap is too small.
pub(crate) fn track_pair<F>(
    amp_ratios: &[f64],
    omega: f64,
    max_bisections: usize,
    mut solve: F,
) -> Result<Vec<QuasienergyPoint>>
where
    F: FnMut(f64) -> Result<PairSolution>,
{
    check_grid(amp_ratios)?;
    let mut out: Vec<QuasienergyPoint> = Vec::with_capacity(amp_ratios.len());
    let mut prev: Option<(f64, PairSolution, f64)> = None;
    for &a in amp_ratios {
        let mut next = solve(a)?;
        let (overlap, difference) = match prev.take() {
            None => (1.0, next.quasienergies[0] - next.quasienergies[1]),
            Some((a_prev, prev_sol, d_prev)) => {
                advance(a_prev, &prev_sol, d_prev, a, &mut next, omega, max_bisections, &mut solve)?
            }
        };
        let [e0, e1] = next.quasienergies;
        out.push(QuasienergyPoint {
            amp_ratio: a,
            omega,
            quasienergies: next.quasienergies,
            gap: circle_distance(e0, e1, omega),
            unwrapped_difference: difference,
            floquet_modes: next.modes.clone(),
            tracking_overlap: overlap,
            flagged: next.ambiguous || overlap < MIN_TRACKING_OVERLAP,
        });
        prev = Some((a, next, difference));
    }
    Ok(out)
}

/// Matches `next` (at `a`) to `prev` (at `a_prev`), inserting midpoints while
/// the overlap is low. Returns the final matched overlap and the unwrapped
/// difference at `a`.
#[allow(clippy::too_many_arguments)]
fn advance<F>(
    a_prev: f64,
    prev: &PairSolution,
    d_prev: f64,
    a: f64,
    next: &mut PairSolution,
    omega: f64,
    depth: usize,
    solve: &mut F,
) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<PairSolution>,
{
    let mut trial = next.clone();
    let overlap = match_pair(prev, &mut trial);
    if overlap >= MIN_TRACKING_OVERLAP || depth == 0 {
        *next = trial;
        let d = unwrap_near(next.quasienergies[0] - next.quasienergies[1], d_prev, omega);
        return Ok((overlap, d));
    }
    let mid_a = 0.5 * (a_prev + a);
    let mut mid = solve(mid_a)?;
    let (_, d_mid) = advance(a_prev, prev, d_prev, mid_a, &mut mid, omega, depth - 1, solve)?;
    advance(mid_a, &mid, d_mid, a, next, omega, depth - 1, solve)
}

/// Quasienergy sweep of the two-level model over `amp_ratios = A / omega`.
pub fn spectrum_sweep(delta: f64, omega: f64, amp_ratios: &[f64]) -> Result<Vec<QuasienergyPoint>> {
    spectrum_sweep_with(delta, omega, amp_ratios, &SweepOptions::default())
}

pub fn spectrum_sweep_with(
    delta: f64,
    omega: f64,
    amp_ratios: &[f64],
    opts: &SweepOptions,
) -> Result<Vec<QuasienergyPoint>> {
    DriveParams::new(delta, omega, 0.0)?;
    track_pair(amp_ratios, omega, opts.max_bisections, |a| {
        let p = DriveParams::from_amp_ratio(delta, omega, a)?;
        let fd = quasienergies(&tls_monodromy(&p, opts.steps_per_period)?, omega)?;
        Ok(PairSolution {
            quasienergies: [fd.quasienergies[0], fd.quasienergies[1]],
            modes: fd.modes,
            ambiguous: false,
        })
    })
}

/// Gap of the two-level model at one amplitude. Needs no tracking: the
/// circle distance of two eigenphases does not depend on their order.
pub fn tls_gap(delta: f64, omega: f64, amp_ratio: f64, steps_per_period: usize) -> Result<f64> {
    let p = DriveParams::from_amp_ratio(delta, omega, amp_ratio)?;
    let fd = quasienergies(&tls_monodromy(&p, steps_per_period)?, omega)?;
    Ok(circle_distance(fd.quasienergies[0], fd.quasienergies[1], omega))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Peak,
    Degeneracy,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralFeature {
    pub kind: FeatureKind,
    pub amp_ratio: f64,
    pub gap: f64,
    /// 1-based index among features of the same kind, by increasing amplitude.
    pub label: usize,
}

/// Vertex of the parabola through three points, clamped to the bracket.
fn parabolic_vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let d01 = (y[1] - y[0]) / (x[1] - x[0]);
    let d12 = (y[2] - y[1]) / (x[2] - x[1]);
    let curv = (d12 - d01) / (x[2] - x[0]);
    if curv == 0.0 || !curv.is_finite() {
        return (x[1], y[1]);
    }
    // y = y1 + s (x - x1) + curv (x - x1)^2 around x1
    let slope = d01 + curv * (x[1] - x[0]);
    let xv = (x[1] - 0.5 * slope / curv).clamp(x[0], x[2]);
    let yv = y[1] + slope * (xv - x[1]) + curv * (xv - x[1]).powi(2);
    (xv, yv)
}

/// Half-zone index of the unwrapped difference; changes at fold cusps.
fn half_zone(d: f64, omega: f64) -> f64 {
    (d / omega - 0.5).floor()
}

/// Gap maxima (peaks) and degeneracies of a tracked sweep.
///
/// Peaks are interior maxima of the gap that are not fold cusps, refined by
/// a parabola through the bracketing grid points. Degeneracies are sign
/// changes of the unwrapped difference relative to a multiple of `omega`,
/// located by linear interpolation, together with untracked gap minima below
/// `degeneracy_tol` (absolute, same units as `omega`).
pub fn find_features(sweep: &[QuasienergyPoint], degeneracy_tol: f64) -> Result<Vec<SpectralFeature>> {
    if sweep.len() < 3 {
        return Err(Error::SweepTooShort { found: sweep.len(), required: 3 });
    }
    let omega = sweep[0].omega;
    let a: Vec<f64> = sweep.iter().map(|p| p.amp_ratio).collect();
    let g: Vec<f64> = sweep.iter().map(|p| p.gap).collect();
    let d: Vec<f64> = sweep.iter().map(|p| p.unwrapped_difference).collect();

    let mut peaks = Vec::new();
    let mut degeneracies = Vec::new();
    for i in 1..sweep.len() - 1 {
        let is_max = g[i] > g[i - 1] && g[i] >= g[i + 1];
        let cusp = half_zone(d[i - 1], omega) != half_zone(d[i + 1], omega);
        if is_max && !cusp {
            let (x, y) = parabolic_vertex([a[i - 1], a[i], a[i + 1]], [g[i - 1], g[i], g[i + 1]]);
            peaks.push((x, y));
        }
    }
    for i in 0..sweep.len() - 1 {
        let k = (0.5 * (d[i] + d[i + 1]) / omega).round();
        let (r0, r1) = (d[i] - k * omega, d[i + 1] - k * omega);
        if r0 == 0.0 {
            degeneracies.push((a[i], 0.0));
        } else if r0 * r1 < 0.0 {
            let x = a[i] + (a[i + 1] - a[i]) * r0 / (r0 - r1);
            degeneracies.push((x, 0.0));
        }
    }
    for i in 1..sweep.len() - 1 {
        let is_min = g[i] < g[i - 1] && g[i] <= g[i + 1] && g[i] <= degeneracy_tol;
        if !is_min {
            continue;
        }
        let (x, y) = parabolic_vertex([a[i - 1], a[i], a[i + 1]], [g[i - 1], g[i], g[i + 1]]);
        let spacing = a[i + 1] - a[i - 1];
        if !degeneracies.iter().any(|&(xd, _)| (xd - x).abs() <= spacing) {
            degeneracies.push((x, y.max(0.0)));
        }
    }
    degeneracies.sort_by(|p, q| p.0.total_cmp(&q.0));

    let label = |kind, v: Vec<(f64, f64)>| {
        v.into_iter().enumerate().map(move |(k, (amp_ratio, gap))| SpectralFeature {
            kind,
            amp_ratio,
            gap,
            label: k + 1,
        })
    };
    let mut features: Vec<SpectralFeature> =
        label(FeatureKind::Peak, peaks).chain(label(FeatureKind::Degeneracy, degeneracies)).collect();
    features.sort_by(|p, q| p.amp_ratio.total_cmp(&q.amp_ratio));
    Ok(features)
}

/// Golden-section maximization of the two-level gap inside `[lo, hi]`, with
/// a fresh propagation per evaluation.
pub fn refine_peak(delta: f64, omega: f64, lo: f64, hi: f64, tol: f64, steps_per_period: usize) -> Result<(f64, f64)> {
    if !(hi > lo) {
        return Err(Error::InvalidSweep(format!("empty bracket [{lo}, {hi}]")));
    }
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let f = |x: f64| tls_gap(delta, omega, x, steps_per_period);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

/// Grid spacing in `A/omega` used when peaks are located on demand.
pub const PEAK_SEARCH_SPACING: f64 = 0.01;

/// First `count` measured gap maxima of the two-level model, from a sweep
/// starting at `A/omega = 0.1` that extends a little past the `count`-th zero
/// of J1.
pub fn locate_peaks(delta: f64, omega: f64, count: usize, opts: &SweepOptions) -> Result<Vec<SpectralFeature>> {
    let reference = crate::analytic_model::special_amplitudes(crate::analytic_model::SpecialPoint::Peak, count.max(1));
    let hi = reference[reference.len() - 1] + 1.5;
    let points = ((hi - 0.1) / PEAK_SEARCH_SPACING).round() as usize + 1;
    let sweep = spectrum_sweep_with(delta, omega, &linspace(0.1, hi, points), opts)?;
    let found: Vec<SpectralFeature> =
        peaks(&find_features(&sweep, DEGENERACY_TOL * omega)?).take(count).copied().collect();
    if found.len() < count {
        return Err(Error::InvalidSweep(format!(
            "only {} peak(s) resolved; peak {count} needs a spectrum sweep beyond A/omega = {hi:.2} at spacing {PEAK_SEARCH_SPACING}",
            found.len()
        )));
    }
    Ok(found)
}

/// Uniform grid of `points` values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![lo],
        _ => (0..points).map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64).collect(),
    }
}

pub fn peaks(features: &[SpectralFeature]) -> impl Iterator<Item = &SpectralFeature> {
    features.iter().filter(|f| f.kind == FeatureKind::Peak)
}

pub fn degeneracies(features: &[SpectralFeature]) -> impl Iterator<Item = &SpectralFeature> {
    features.iter().filter(|f| f.kind == FeatureKind::Degeneracy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{c, pauli};
    use crate::propagator::matrix_exp_skew;

    #[test]
    fn fold_range_and_idempotence() {
        let w = 1.3;
        for k in -40..=40 {
            let e = 0.37 * k as f64;
            let f = fold(e, w);
            assert!(f > -0.5 * w && f <= 0.5 * w, "{e} -> {f}");
            for m in -3..=3 {
                assert!((fold(f + m as f64 * w, w) - f).abs() < 1e-12);
            }
        }
        assert_eq!(fold(0.5, 1.0), 0.5);
        assert_eq!(fold(-0.5, 1.0), 0.5);
    }

    #[test]
    fn quasienergies_of_identity_and_minus_identity() {
        let fd = quasienergies(&UnitaryOperator::identity(2), 1.0).unwrap();
        assert!(fd.quasienergies.iter().all(|e| e.abs() < 1e-15));
        let fd = quasienergies(&UnitaryOperator::from_matrix_unchecked(-CMatrix::identity(2, 2)), 1.0).unwrap();
        assert!(fd.quasienergies.iter().all(|e| (e - 0.5).abs() < 1e-15), "{:?}", fd.quasienergies);
    }

    #[test]
    fn quasienergies_of_sigma_x_rotation() {
        let w = 2.0;
        let period = TAU / w;
        let u = matrix_exp_skew(&HermitianOperator::new(pauli::x()).unwrap(), 0.3).unwrap();
        let mut e = quasienergies(&u, w).unwrap().quasienergies;
        e.sort_by(f64::total_cmp);
        assert!((e[0] + 0.3 / period).abs() < 1e-14 && (e[1] - 0.3 / period).abs() < 1e-14);
    }

    #[test]
    fn monodromy_closed_forms() {
        let p = DriveParams::new(1.0, 1.0, 0.0).unwrap();
        let u = tls_monodromy(&p, TLS_STEPS_PER_PERIOD).unwrap();
        assert!(max_abs_diff(u.matrix(), &-CMatrix::identity(2, 2)) < 1e-9);
        let u = monodromy(|_| HermitianOperator::zeros(3), 2.0, 64).unwrap();
        assert_eq!(u.matrix(), &CMatrix::identity(3, 3));
    }

    #[test]
    fn monodromy_rejects_aperiodic_generator() {
        let err = monodromy(|t| HermitianOperator::new(pauli::z() * c(t, 0.0)).unwrap(), 1.0, 64);
        assert!(matches!(err, Err(Error::NotPeriodic { .. })));
    }

    #[test]
    fn undriven_point_folds_to_zone_edge() {
        let sweep = spectrum_sweep(1.0, 1.0, &[0.0]).unwrap();
        let p = &sweep[0];
        assert!(p.gap < 1e-8, "gap {}", p.gap);
        assert!(p.quasienergies.iter().all(|e| (e.abs() - 0.5).abs() < 1e-8 || (e - 0.5).abs() < 1e-8));
        // omega = 3 delta: +-delta/2 lie inside the zone, gap = delta
        let sweep = spectrum_sweep(1.0, 3.0, &[0.0]).unwrap();
        assert!((sweep[0].gap - 1.0).abs() < 1e-8);
    }

    #[test]
    fn sweep_cross_checks_monodromy() {
        let ratio = 1.9158529851037562;
        let sweep = spectrum_sweep(1.0, 1.0, &[ratio - 0.01, ratio, ratio + 0.01]).unwrap();
        let p = DriveParams::from_amp_ratio(1.0, 1.0, ratio).unwrap();
        let fd = quasienergies(&tls_monodromy(&p, TLS_STEPS_PER_PERIOD).unwrap(), 1.0).unwrap();
        let direct = circle_distance(fd.quasienergies[0], fd.quasienergies[1], 1.0);
        assert!((sweep[1].gap - direct).abs() < 1e-12);
    }

    #[test]
    fn quasienergies_are_symmetric() {
        let sweep = spectrum_sweep(1.0, 1.0, &linspace(0.0, 6.0, 61)).unwrap();
        for p in &sweep {
            let s = (p.quasienergies[0] + p.quasienergies[1]).rem_euclid(1.0);
            assert!(s.min(1.0 - s) < 1e-8, "{} {:?}", p.amp_ratio, p.quasienergies);
            assert!(p.gap >= 0.0 && p.gap <= 0.5);
        }
    }

    #[test]
    fn tracking_keeps_overlap_high() {
        let sweep = spectrum_sweep(1.0, 1.0, &linspace(1.0, 5.0, 401)).unwrap();
        for p in &sweep[1..] {
            assert!(p.tracking_overlap >= MIN_TRACKING_OVERLAP, "{} {}", p.amp_ratio, p.tracking_overlap);
            assert!(!p.flagged);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(spectrum_sweep(1.0, 1.0, &[]).is_err());
        assert!(spectrum_sweep(1.0, 1.0, &[1.0, 1.0]).is_err());
        assert!(spectrum_sweep(1.0, 1.0, &[2.0, 1.0]).is_err());
    }

    fn synthetic(amps: &[f64], gaps: &[f64]) -> Vec<QuasienergyPoint> {
        amps.iter()
            .zip(gaps)
            .map(|(&a, &g)| QuasienergyPoint {
                amp_ratio: a,
                omega: 1.0,
                quasienergies: [g / 2.0, -g / 2.0],
                gap: g,
                unwrapped_difference: g,
                floquet_modes: CMatrix::identity(2, 2),
                tracking_overlap: 1.0,
                flagged: false,
            })
            .collect()
    }

    #[test]
    fn monotone_gap_has_no_features() {
        let amps = linspace(0.0, 1.0, 20);
        let gaps: Vec<f64> = amps.iter().map(|a| 0.1 + 0.2 * a).collect();
        assert!(find_features(&synthetic(&amps, &gaps), 1e-3).unwrap().is_empty());
    }

    #[test]
    fn parabolic_refinement_is_exact_for_parabolas() {
        let amps = linspace(0.0, 1.0, 11);
        let gaps: Vec<f64> = amps.iter().map(|a| 0.3 - (a - 0.537f64).powi(2)).collect();
        let f = find_features(&synthetic(&amps, &gaps), 1e-3).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].kind, FeatureKind::Peak);
        assert!((f[0].amp_ratio - 0.537).abs() < 1e-12);
        assert!((f[0].gap - 0.3).abs() < 1e-12);
    }

    #[test]
    fn too_short_sweep() {
        let s = synthetic(&[0.0, 1.0], &[0.1, 0.2]);
        assert!(matches!(find_features(&s, 1e-3), Err(Error::SweepTooShort { found: 2, required: 3 })));
    }

    #[test]
    fn golden_section_refinement() {
        let (x, g) = refine_peak(1.0, 1.0, 3.35, 3.55, 1e-5, 1024).unwrap();
        let amps = linspace(3.35, 3.55, 21);
        let f = find_features(
            &spectrum_sweep_with(1.0, 1.0, &amps, &SweepOptions { steps_per_period: 1024, max_bisections: 6 }).unwrap(),
            1e-3,
        )
        .unwrap();
        let p = peaks(&f).next().unwrap();
        assert!((p.amp_ratio - x).abs() < 2e-3, "{} vs {x}", p.amp_ratio);
        assert!(g >= p.gap - 1e-6);
    }
}
