//! The sinusoidally driven two-level system.
//!
//! ```text
//! H(t) = (delta/2) sx + eps(t) sz,      eps(t) = eps_dc + A cos(omega t)
//! ```
//!
//! Units have hbar = 1 and every frequency is angular. `|0>` is the +1
//! eigenvector of sz.
//!
//! Removing the sz part with the rotation `U1 = exp(-i gamma_z sz / 2)`,
//! `gamma_z(t) = (2A/omega) sin(omega t)`, leaves a field of constant length
//! `delta` turning in the x-y plane:
//!
//! ```text
//! H2(t) = U1^dagger (delta/2) sx U1 = (delta/2) [cos(gamma_z) sx - sin(gamma_z) sy]
//! ```
//!
//! so that `U(t) = U1(t) U2(t)` with `i dU2/dt = H2 U2`. The field components
//! expand in Bessel functions of `nu = 2A/omega` (see [`FieldSeries`]).

use serde::{Deserialize, Serialize};

use crate::bessel::bessel_j_orders;
use crate::error::{Error, Result};
use crate::operators::{pauli, HermitianOperator};

pub use crate::bessel::{bessel_j, bessel_j_zeros};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    /// System gap.
    pub delta: f64,
    /// Drive frequency.
    pub omega: f64,
    /// Drive amplitude.
    pub amplitude: f64,
    /// Static field offset.
    #[serde(default)]
    pub dc_offset: f64,
}

impl DriveParams {
    pub fn new(delta: f64, omega: f64, amplitude: f64) -> Result<Self> {
        Self { delta, omega, amplitude, dc_offset: 0.0 }.validated()
    }

    /// Parameters with `amplitude = amp_ratio * omega`.
    pub fn from_amp_ratio(delta: f64, omega: f64, amp_ratio: f64) -> Result<Self> {
        Self::new(delta, omega, amp_ratio * omega)
    }

    pub fn with_dc_offset(mut self, dc_offset: f64) -> Result<Self> {
        self.dc_offset = dc_offset;
        self.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let bad = |what: &str| Err(Error::InvalidParams(what.to_string()));
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return bad("omega must be positive and finite");
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return bad("delta must be positive and finite");
        }
        if !(self.amplitude >= 0.0) || !self.amplitude.is_finite() {
            return bad("amplitude must be non-negative and finite");
        }
        if !self.dc_offset.is_finite() {
            return bad("dc offset must be finite");
        }
        Ok(self)
    }

    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.omega
    }

    /// `A / omega`.
    pub fn amp_ratio(&self) -> f64 {
        self.amplitude / self.omega
    }

    /// Bessel argument `nu = 2A / omega`.
    pub fn nu(&self) -> f64 {
        2.0 * self.amplitude / self.omega
    }

    pub fn field(&self, t: f64) -> f64 {
        self.dc_offset + self.amplitude * (self.omega * t).cos()
    }
}

pub fn hamiltonian(p: &DriveParams, t: f64) -> HermitianOperator {
    HermitianOperator::from_matrix_unchecked(pauli::combination(0.5 * p.delta, 0.0, p.field(t)))
}

/// Rotating-frame phase `(2A/omega) sin(omega t)`.
///
/// The static offset is not included; multi-level drives absorb it into the
/// field-free operator instead.
pub fn gamma_z(p: &DriveParams, t: f64) -> f64 {
    p.nu() * (p.omega * t).sin()
}

/// Generator of `U2` in the factorization `U = U1 U2`.
pub fn rotating_frame_hamiltonian(p: &DriveParams, t: f64) -> HermitianOperator {
    let g = gamma_z(p, t);
    let half = 0.5 * p.delta;
    HermitianOperator::from_matrix_unchecked(pauli::combination(half * g.cos(), -half * g.sin(), 0.0))
}

/// Where to cut the Bessel series of the rotating field.
///
/// Orders up to `nu + extra_orders` are kept; past `nu`, the sum stops at the
/// first order whose coefficient falls below `cutoff`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesTruncation {
    pub extra_orders: usize,
    pub cutoff: f64,
}

impl Default for SeriesTruncation {
    fn default() -> Self {
        Self { extra_orders: 40, cutoff: 1e-14 }
    }
}

impl SeriesTruncation {
    pub fn max_order(&self, nu: f64) -> usize {
        nu.abs().floor() as usize + self.extra_orders
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldComponents {
    pub bx: f64,
    pub by: f64,
}

/// Precomputed Bessel coefficients `J_k(nu)` for one drive.
///
/// ```text
/// Bx(t) = cos(gamma_z) = J0(nu) + 2 sum_n J_2n(nu) cos(2n omega t)
/// By(t) = sin(gamma_z) =          2 sum_n J_2n-1(nu) sin((2n-1) omega t)
/// ```
#[derive(Clone, Debug)]
pub struct FieldSeries {
    omega: f64,
    coeffs: Vec<f64>,
}

impl FieldSeries {
    pub fn new(p: &DriveParams, truncation: &SeriesTruncation) -> Self {
        let nu = p.nu();
        let max_order = truncation.max_order(nu);
        let mut coeffs = bessel_j_orders(max_order, nu);
        if let Some(last) = (0..coeffs.len()).find(|&k| k as f64 > nu && coeffs[k].abs() < truncation.cutoff) {
            coeffs.truncate(last);
        }
        Self { omega: p.omega, coeffs }
    }

    /// `J_0(nu)`, the period average of `Bx`.
    pub fn mean_bx(&self) -> f64 {
        self.coeffs[0]
    }

    /// Highest Bessel order kept.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn components(&self, t: f64) -> FieldComponents {
        let wt = self.omega * t;
        let mut bx = self.coeffs[0];
        let mut by = 0.0;
        for (k, &j) in self.coeffs.iter().enumerate().skip(1) {
            let arg = k as f64 * wt;
            if k % 2 == 0 {
                bx += 2.0 * j * arg.cos();
            } else {
                by += 2.0 * j * arg.sin();
            }
        }
        FieldComponents { bx, by }
    }

    /// `sum_n J_2n(nu)/n sin(2n omega t)`; multiply by `delta/omega` for the
    /// oscillating part of the x-phase.
    pub fn oscillating_x_phase(&self, t: f64) -> f64 {
        let wt = self.omega * t;
        self.coeffs
            .iter()
            .enumerate()
            .skip(2)
            .step_by(2)
            .map(|(k, &j)| j / (k / 2) as f64 * (k as f64 * wt).sin())
            .sum()
    }
}

pub fn field_components(p: &DriveParams, t: f64, truncation: &SeriesTruncation) -> FieldComponents {
    FieldSeries::new(p, truncation).components(t)
}
