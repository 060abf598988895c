use serde::{Deserialize, Serialize};

use super::spectrum::ACDescriptor;
use super::system::MultiLevelSystem;
use crate::error::{Error, Result};
use crate::floquet::monodromy;
use crate::floquet::{quasienergies, spectrum_sweep_with, track_pair, PairSolution, QuasienergyPoint, SweepOptions};
use crate::operators::{c, CMatrix, HermitianOperator, StateVector};
use crate::propagator::{evolve_state, PropagationGrid, MULTILEVEL_STEPS_PER_PERIOD};

/// A Floquet mode must put at least this much weight on the crossing
/// states to be assigned to them.
pub const MIN_PAIR_WEIGHT: f64 = 0.5;

/// Bases attached to one avoided crossing.
#[derive(Clone, Debug)]
pub struct AcFrame {
    eps_center: f64,
    level_pair: (usize, usize),
    /// Eigenvectors of `H(eps_center)`, ascending.
    center_basis: CMatrix,
    /// `center_basis` with the crossing pair replaced by the eigenvectors of
    /// `D` inside the pair's span, larger eigenvalue first.
    diabatic_basis: CMatrix,
    coupling: f64,
}

impl AcFrame {
    pub fn new(sys: &MultiLevelSystem, ac: &ACDescriptor) -> Result<Self> {
        let (i, j) = ac.level_pair;
        if i == j || i.max(j) >= sys.dim() {
            return Err(Error::InvalidCrossing(format!(
                "level pair {:?} invalid for dim {}",
                ac.level_pair,
                sys.dim()
            )));
        }
        let (_, center_basis) = sys.hamiltonian(ac.eps_center).eigh()?;
        let pair = CMatrix::from_columns(&[center_basis.column(i), center_basis.column(j)]);
        let d_sub = HermitianOperator::with_tolerance(pair.adjoint() * sys.d().matrix() * &pair, 1e-9)?;
        let (d_vals, d_vecs) = d_sub.eigh()?;
        let diabatic = &pair * d_vecs;
        let mut diabatic_basis = center_basis.clone();
        diabatic_basis.set_column(i, &diabatic.column(1));
        diabatic_basis.set_column(j, &diabatic.column(0));
        Ok(Self {
            eps_center: ac.eps_center,
            level_pair: ac.level_pair,
            center_basis,
            diabatic_basis,
            coupling: 0.5 * (d_vals[1] - d_vals[0]),
        })
    }

    pub fn eps_center(&self) -> f64 {
        self.eps_center
    }

    pub fn level_pair(&self) -> (usize, usize) {
        self.level_pair
    }

    pub fn center_basis(&self) -> &CMatrix {
        &self.center_basis
    }

    pub fn diabatic_basis(&self) -> &CMatrix {
        &self.diabatic_basis
    }

    /// Half the splitting of `D` inside the crossing pair. A field amplitude
    /// `A` drives the pair like a two-level system with amplitude
    /// `coupling * A`.
    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// Field amplitude matching the two-level ratio `A_tls / omega`.
    pub fn field_amplitude(&self, amp_ratio: f64, omega: f64) -> f64 {
        amp_ratio * omega / self.coupling
    }

    fn pair_projector(&self) -> CMatrix {
        let (i, j) = self.level_pair;
        CMatrix::from_columns(&[self.center_basis.column(i), self.center_basis.column(j)])
    }

    fn basis(&self, basis: PopulationBasis) -> &CMatrix {
        match basis {
            PopulationBasis::CenterEigenbasis => &self.center_basis,
            PopulationBasis::AcDiabatic => &self.diabatic_basis,
        }
    }
}

/// Basis in which level populations are reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PopulationBasis {
    /// Eigenstates of `H(eps_center)`.
    CenterEigenbasis,
    /// As above, with the crossing pair replaced by its diabatic states,
    /// which play the part of `|0>` and `|1>` of the two-level model.
    AcDiabatic,
}

#[derive(Clone, Debug)]
pub enum InitialState {
    /// Lower (0) or upper (1) member of the crossing pair at the center.
    AcEigenstate(usize),
    /// Diabatic state 0 (two-level `|0>`) or 1.
    Diabatic(usize),
    Custom(StateVector),
}

impl InitialState {
    fn resolve(&self, frame: &AcFrame, dim: usize) -> Result<StateVector> {
        let (i, j) = frame.level_pair;
        let column = |m: &CMatrix, k: usize| StateVector::normalized(m.column(k).into_owned());
        match self {
            Self::AcEigenstate(0) => column(&frame.center_basis, i),
            Self::AcEigenstate(1) => column(&frame.center_basis, j),
            Self::Diabatic(0) => column(&frame.diabatic_basis, i),
            Self::Diabatic(1) => column(&frame.diabatic_basis, j),
            Self::Custom(psi) if psi.dim() == dim => Ok(psi.clone()),
            Self::Custom(psi) => Err(Error::DimensionMismatch { expected: dim, found: psi.dim() }),
            Self::AcEigenstate(k) | Self::Diabatic(k) => {
                Err(Error::InvalidCrossing(format!("pair member {k} does not exist, use 0 or 1")))
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PopulationTraces {
    pub basis: PopulationBasis,
    pub level_pair: (usize, usize),
    pub times: Vec<f64>,
    /// `populations[s][k]`: level `k` at `times[s]`.
    pub populations: Vec<Vec<f64>>,
}

impl PopulationTraces {
    /// Population outside the crossing pair at every sample.
    pub fn leakage(&self) -> Vec<f64> {
        let (i, j) = self.level_pair;
        self.populations.iter().map(|p| (1.0 - p[i] - p[j]).max(0.0)).collect()
    }

    pub fn level(&self, k: usize) -> Vec<f64> {
        self.populations.iter().map(|p| p[k]).collect()
    }
}

/// Evolves `psi0` under `H0 + (eps_center + A cos(omega t)) D` for the field
/// amplitude `amplitude`.
#[allow(clippy::too_many_arguments)]
pub fn driven_dynamics(
    sys: &MultiLevelSystem,
    ac: &ACDescriptor,
    amplitude: f64,
    omega: f64,
    psi0: &InitialState,
    horizon: f64,
    basis: PopulationBasis,
    steps_per_period: usize,
    sample_stride: usize,
) -> Result<PopulationTraces> {
    if !(omega > 0.0) || !omega.is_finite() || !amplitude.is_finite() {
        return Err(Error::InvalidParams(format!("need omega > 0 and finite amplitude, got {omega}, {amplitude}")));
    }
    let frame = AcFrame::new(sys, ac)?;
    let psi = psi0.resolve(&frame, sys.dim())?;
    let period = std::f64::consts::TAU / omega;
    let grid = PropagationGrid::new(0.0, horizon, period, steps_per_period)?.with_stride(sample_stride)?;
    let generator = drive_generator(sys, ac.eps_center, amplitude, omega);
    let traj = evolve_state(generator, &psi, &grid)?;
    let b_adj = frame.basis(basis).adjoint();
    let (times, populations) = traj
        .into_iter()
        .map(|(t, s)| {
            let amps = &b_adj * s.amplitudes();
            (t, amps.iter().map(|a| a.norm_sqr()).collect())
        })
        .unzip();
    Ok(PopulationTraces { basis, level_pair: frame.level_pair, times, populations })
}

fn drive_generator(
    sys: &MultiLevelSystem,
    eps_center: f64,
    amplitude: f64,
    omega: f64,
) -> impl Fn(f64) -> HermitianOperator + '_ {
    move |t| {
        let eps = eps_center + amplitude * (omega * t).cos();
        HermitianOperator::from_matrix_unchecked(sys.h0().matrix() + sys.d().matrix() * c(eps, 0.0))
    }
}

#[derive(Clone, Debug)]
pub struct MultilevelSweep {
    pub omega: f64,
    /// Pair of Floquet modes dominated by the crossing states.
    pub points: Vec<QuasienergyPoint>,
    /// The effective two-level system on the same grid.
    pub reference: Vec<QuasienergyPoint>,
    /// RMS of `|gap_N - gap_TLS| / delta_M` over unflagged points.
    pub distortion: f64,
    pub flagged: usize,
}

/// Floquet sweep of the full system over two-level amplitude ratios
/// `A_tls / omega`, compared with the effective two-level system of `ac`.
///
/// At each amplitude the two Floquet modes with the largest weight on the
/// crossing pair (at the center field) are kept. Points where the second of
/// them has weight below [`MIN_PAIR_WEIGHT`] are flagged and left out of the
/// distortion.
pub fn floquet_sweep_multilevel(
    sys: &MultiLevelSystem,
    ac: &ACDescriptor,
    omega: f64,
    amp_ratios: &[f64],
    opts: &SweepOptions,
) -> Result<MultilevelSweep> {
    let frame = AcFrame::new(sys, ac)?;
    let projector = frame.pair_projector();
    let points = track_pair(amp_ratios, omega, opts.max_bisections, |r| {
        let amplitude = frame.field_amplitude(r, omega);
        let u = monodromy(drive_generator(sys, ac.eps_center, amplitude, omega), omega, opts.steps_per_period)?;
        let fd = quasienergies(&u, omega)?;
        let weights: Vec<f64> =
            (0..fd.dim()).map(|k| (projector.adjoint() * fd.modes.column(k)).norm_squared()).collect();
        let mut order: Vec<usize> = (0..fd.dim()).collect();
        order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]));
        let (a, b) = (order[0], order[1]);
        Ok(PairSolution {
            quasienergies: [fd.quasienergies[a], fd.quasienergies[b]],
            modes: CMatrix::from_columns(&[fd.modes.column(a), fd.modes.column(b)]),
            ambiguous: weights[b] < MIN_PAIR_WEIGHT,
        })
    })?;
    let reference = spectrum_sweep_with(ac.gap, omega, amp_ratios, opts)?;
    let mut sq = 0.0;
    let mut used = 0usize;
    for (p, r) in points.iter().zip(&reference) {
        if !p.flagged {
            sq += ((p.gap - r.gap) / ac.gap).powi(2);
            used += 1;
        }
    }
    let flagged = points.len() - used;
    let distortion = if used > 0 { (sq / used as f64).sqrt() } else { f64::NAN };
    Ok(MultilevelSweep { omega, points, reference, distortion, flagged })
}

/// Default options for multi-level sweeps.
pub fn multilevel_sweep_options() -> SweepOptions {
    SweepOptions { steps_per_period: MULTILEVEL_STEPS_PER_PERIOD, ..SweepOptions::default() }
}
