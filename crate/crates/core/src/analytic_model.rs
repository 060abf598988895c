//! Closed-form description of the driven two-level system.
//!
//! Averaging the rotating-frame field gives the effective gap
//! `delta' = delta J0(2A/omega)` and the flip time `T_F = pi / |delta'|`.
//! Dropping only the y component of the rotating field (the part that
//! averages to zero over each half period) leaves a field along x, which
//! integrates in closed form:
//!
//! ```text
//! gamma_x(t) = delta int_0^t Bx(s) ds = delta' t + d(t)
//! d(t)       = (delta/omega) sum_n J_2n(nu)/n sin(2n omega t)
//! U(t)      ~= exp(-i gamma_z sz / 2) exp(-i gamma_x sx / 2)
//! ```
//!
//! The approximation is built for the gap maxima of the quasienergy
//! spectrum, where the neglected y field does least harm. It is evaluated
//! anywhere but should only be trusted near those points. A static offset in
//! [`DriveParams`] is ignored.

use serde::{Deserialize, Serialize};

use crate::bessel::{bessel_j, bessel_j_zeros};
use crate::error::{Error, Result};
use crate::operators::{c, CMatrix, UnitaryOperator};
use crate::tls_model::{gamma_z, DriveParams, FieldSeries, SeriesTruncation};

/// `|delta'|` below this fraction of `delta` counts as a degeneracy.
pub const DIVERGENCE_RATIO: f64 = 1e-9;

/// `delta J0(2A/omega)`, signed.
pub fn rwa_gap(p: &DriveParams) -> f64 {
    p.delta * bessel_j(0, p.nu())
}

/// `pi / |delta'|`.
pub fn flip_time(p: &DriveParams) -> Result<f64> {
    let gap = rwa_gap(p);
    if !(gap.abs() > DIVERGENCE_RATIO * p.delta) {
        return Err(Error::DivergentFlipTime { gap });
    }
    Ok(std::f64::consts::PI / gap.abs())
}

pub fn delta_phase(p: &DriveParams, t: f64, truncation: &SeriesTruncation) -> f64 {
    AnalyticModel::with_truncation(p, truncation).delta_phase(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticPhases {
    pub gamma_x: f64,
    pub gamma_z: f64,
    pub delta_phase: f64,
    pub effective_gap: f64,
}

/// The model for one parameter set, with the Bessel coefficients computed
/// once.
#[derive(Clone, Debug)]
pub struct AnalyticModel {
    params: DriveParams,
    series: FieldSeries,
}

impl AnalyticModel {
    pub fn new(p: &DriveParams) -> Self {
        Self::with_truncation(p, &SeriesTruncation::default())
    }

    pub fn with_truncation(p: &DriveParams, truncation: &SeriesTruncation) -> Self {
        Self { params: *p, series: FieldSeries::new(p, truncation) }
    }

    pub fn params(&self) -> &DriveParams {
        &self.params
    }

    pub fn effective_gap(&self) -> f64 {
        self.params.delta * self.series.mean_bx()
    }

    pub fn delta_phase(&self, t: f64) -> f64 {
        self.params.delta / self.params.omega * self.series.oscillating_x_phase(t)
    }

    pub fn phases(&self, t: f64) -> AnalyticPhases {
        let effective_gap = self.effective_gap();
        let delta_phase = self.delta_phase(t);
        AnalyticPhases {
            gamma_x: effective_gap * t + delta_phase,
            gamma_z: gamma_z(&self.params, t),
            delta_phase,
            effective_gap,
        }
    }

    pub fn evolution(&self, t: f64) -> UnitaryOperator {
        let ph = self.phases(t);
        let (cz, sz) = ((0.5 * ph.gamma_z).cos(), (0.5 * ph.gamma_z).sin());
        let (cx, sx) = ((0.5 * ph.gamma_x).cos(), (0.5 * ph.gamma_x).sin());
        // diag(e^{-i gz/2}, e^{i gz/2}) * [[cx, -i sx], [-i sx, cx]]
        let u1 = [c(cz, -sz), c(cz, sz)];
        let m = CMatrix::from_row_slice(2, 2, &[u1[0] * cx, u1[0] * c(0.0, -sx), u1[1] * c(0.0, -sx), u1[1] * cx]);
        UnitaryOperator::from_matrix_unchecked(m)
    }

    /// `|<0|U(t)|0>|^2 = cos^2(gamma_x / 2)`.
    pub fn pnd(&self, t: f64) -> f64 {
        (0.5 * self.phases(t).gamma_x).cos().powi(2)
    }
}

pub fn phases(p: &DriveParams, t: f64) -> AnalyticPhases {
    AnalyticModel::new(p).phases(t)
}

pub fn analytic_evolution(p: &DriveParams, t: f64) -> UnitaryOperator {
    AnalyticModel::new(p).evolution(t)
}

pub fn analytic_pnd(p: &DriveParams, t: f64) -> f64 {
    AnalyticModel::new(p).pnd(t)
}

/// `sin^2(d(T_F)/2)`, the population left in `|0>` at the flip time.
pub fn predicted_residual(p: &DriveParams) -> Result<f64> {
    let tf = flip_time(p)?;
    Ok((0.5 * delta_phase(p, tf, &SeriesTruncation::default())).sin().powi(2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpecialPoint {
    /// Zeros of J1: extrema of the effective gap.
    Peak,
    /// Zeros of J0: vanishing effective gap.
    Cdt,
}

/// First `count` amplitude ratios `A/omega` at special points, ascending.
pub fn special_amplitudes(kind: SpecialPoint, count: usize) -> Vec<f64> {
    let order = match kind {
        SpecialPoint::Peak => 1,
        SpecialPoint::Cdt => 0,
    };
    bessel_j_zeros(order, count).into_iter().map(|z| 0.5 * z).collect()
}

/// Estimated number of population steps in one inversion, `omega / |delta'|`.
pub fn step_count_estimate(p: &DriveParams) -> Result<f64> {
    Ok(p.omega * flip_time(p)? / std::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{max_abs_diff, pauli, HermitianOperator};
    use crate::propagator::matrix_exp_skew;
    use std::f64::consts::PI;

    fn params(delta: f64, omega: f64, a: f64) -> DriveParams {
        DriveParams::new(delta, omega, a).unwrap()
    }

    #[test]
    fn rwa_gap_values() {
        assert_eq!(rwa_gap(&params(1.0, 1.0, 0.0)), 1.0);
        let z0 = special_amplitudes(SpecialPoint::Cdt, 1)[0];
        assert!(rwa_gap(&DriveParams::from_amp_ratio(1.0, 1.0, z0).unwrap()).abs() <= 1e-9);
        let g = rwa_gap(&params(1.0, 1.0, 3.8317060 / 2.0));
        assert!((g + 0.402759).abs() <= 1e-6, "{g}");
    }

    #[test]
    fn flip_time_values() {
        assert!((flip_time(&params(1.0, 1.0, 0.0)).unwrap() - PI).abs() < 1e-15);
        let tf = flip_time(&params(1.0, 1.0, 7.0155867 / 2.0)).unwrap();
        assert!((tf - 10.4678).abs() < 1e-3, "{tf}");
        let z0 = special_amplitudes(SpecialPoint::Cdt, 2)[1];
        let p = DriveParams::from_amp_ratio(1.0, 1.0, z0).unwrap();
        assert!(matches!(flip_time(&p), Err(Error::DivergentFlipTime { .. })));
        assert!(predicted_residual(&p).is_err());
        assert!(step_count_estimate(&p).is_err());
    }

    #[test]
    fn delta_phase_vanishes_at_half_periods() {
        let p = params(1.0, 1.0, 3.5);
        let tr = SeriesTruncation::default();
        assert_eq!(delta_phase(&p, 0.0, &tr), 0.0);
        assert!(delta_phase(&p, p.period() / 2.0, &tr).abs() < 1e-13);
        assert!((delta_phase(&p, 1.3, &tr) - delta_phase(&p, 1.3 + p.period(), &tr)).abs() < 1e-12);
    }

    #[test]
    fn delta_phase_scales_with_delta_over_omega() {
        let tr = SeriesTruncation::default();
        let base = params(1.0, 1.0, 2.7);
        let scaled = params(0.3, 1.0, 2.7);
        for t in [0.2, 1.1, 2.9] {
            assert!((delta_phase(&scaled, t, &tr) - 0.3 * delta_phase(&base, t, &tr)).abs() < 1e-14);
        }
    }

    #[test]
    fn phase_identity_holds() {
        let m = AnalyticModel::new(&params(1.3, 0.8, 4.0));
        for t in [0.0, 0.7, 5.5] {
            let ph = m.phases(t);
            assert!((ph.gamma_x - (ph.effective_gap * t + ph.delta_phase)).abs() <= 1e-12);
        }
    }

    #[test]
    fn evolution_is_identity_at_zero_and_rabi_when_undriven() {
        let m = AnalyticModel::new(&params(1.0, 1.0, 3.0));
        assert!(max_abs_diff(m.evolution(0.0).matrix(), &CMatrix::identity(2, 2)) < 1e-15);
        let m = AnalyticModel::new(&params(1.4, 1.0, 0.0));
        let h = HermitianOperator::new(pauli::x() * c(0.7, 0.0)).unwrap();
        for t in [0.3, 2.0, 9.1] {
            let exact = matrix_exp_skew(&h, t).unwrap();
            assert!(max_abs_diff(m.evolution(t).matrix(), exact.matrix()) < 1e-12);
        }
    }

    #[test]
    fn evolution_is_unitary_and_pnd_consistent() {
        let p = params(1.0, 1.0, 3.44);
        let m = AnalyticModel::new(&p);
        for t in [0.4, 3.3, 10.0] {
            let u = m.evolution(t);
            assert!(u.unitarity_deviation() < 1e-14);
            assert!((u.matrix()[(0, 0)].norm_sqr() - m.pnd(t)).abs() < 1e-14);
            assert_eq!(m.pnd(t), analytic_pnd(&p, t));
        }
    }

    #[test]
    fn special_amplitude_values() {
        let peaks = special_amplitudes(SpecialPoint::Peak, 3);
        for (got, want) in peaks.iter().zip([1.9158530, 3.5077933, 5.0867341]) {
            assert!((got - want).abs() < 1e-7, "{got}");
        }
        let cdt = special_amplitudes(SpecialPoint::Cdt, 2);
        for (got, want) in cdt.iter().zip([1.2024127788478865, 2.7600390551393016]) {
            assert!((got - want).abs() < 1e-9, "{got}");
        }
        let cdt = special_amplitudes(SpecialPoint::Cdt, 7);
        let peaks = special_amplitudes(SpecialPoint::Peak, 6);
        for k in 0..6 {
            assert!(cdt[k] < peaks[k] && peaks[k] < cdt[k + 1]);
        }
    }

    #[test]
    fn step_count_values() {
        assert!((step_count_estimate(&params(1.0, 1.0, 0.0)).unwrap() - 1.0).abs() < 1e-15);
        let p = DriveParams::from_amp_ratio(1.0, 1.0, 7.0155867 / 2.0).unwrap();
        assert!((step_count_estimate(&p).unwrap() - 3.332).abs() < 1e-3);
        let p = DriveParams::from_amp_ratio(1.0, 1.0, 16.4706301 / 2.0).unwrap();
        assert!((step_count_estimate(&p).unwrap() - 5.090).abs() < 1e-3);
    }

    #[test]
    fn residual_vanishes_undriven() {
        assert_eq!(predicted_residual(&params(1.0, 1.0, 0.0)).unwrap(), 0.0);
    }
}
