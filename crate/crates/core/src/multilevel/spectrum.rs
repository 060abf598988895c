use serde::{Deserialize, Serialize};

use super::system::MultiLevelSystem;
use crate::error::{Error, Result};
use crate::tls_model::DriveParams;

/// Sorted eigenvalues of `H0 + eps D` on a grid of `eps`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub eps: Vec<f64>,
    /// `levels[j][k]` is the `k`-th lowest eigenvalue at `eps[j]`.
    pub levels: Vec<Vec<f64>>,
}

impl SpectrumTable {
    pub fn dim(&self) -> usize {
        self.levels.first().map_or(0, Vec::len)
    }

    /// Splitting of levels `k + 1` and `k` at every grid point.
    pub fn gaps(&self, k: usize) -> Vec<f64> {
        self.levels.iter().map(|l| l[k + 1] - l[k]).collect()
    }
}

pub fn static_spectrum(sys: &MultiLevelSystem, eps_grid: &[f64]) -> Result<SpectrumTable> {
    if eps_grid.is_empty() {
        return Err(Error::InvalidSweep("empty field grid".into()));
    }
    if eps_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidSweep("field grid must be strictly increasing".into()));
    }
    let levels = eps_grid.iter().map(|&e| sys.hamiltonian(e).eigenvalues()).collect::<Result<_>>()?;
    Ok(SpectrumTable { eps: eps_grid.to_vec(), levels })
}

/// An isolated avoided crossing between adjacent levels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ACDescriptor {
    /// Field at the minimal splitting.
    pub eps_center: f64,
    /// Minimal splitting `delta_M`.
    pub gap: f64,
    /// Indices of the two levels in energy order, lower first.
    pub level_pair: (usize, usize),
    /// Diabatic slopes `dE/d eps`: first the state that is lower before the
    /// crossing, then the one that is upper before it.
    pub slopes: (f64, f64),
}

impl ACDescriptor {
    /// Two-level parameters of the crossing: `delta = gap`, the static
    /// offset at the center, and the resonant choice `omega = gap`. The
    /// amplitude is left at zero for the caller to fill in.
    pub fn effective_tls(&self) -> Result<DriveParams> {
        DriveParams { delta: self.gap, omega: self.gap, amplitude: 0.0, dc_offset: self.eps_center }.validated()
    }

    /// Half the difference of the diabatic slopes: a field change `x` moves
    /// the two-level bias by `coupling * x`.
    pub fn coupling(&self) -> f64 {
        0.5 * (self.slopes.0 - self.slopes.1).abs()
    }
}

/// Vertex of the parabola through three points.
fn vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let d01 = (y[1] - y[0]) / (x[1] - x[0]);
    let d12 = (y[2] - y[1]) / (x[2] - x[1]);
    let curv = (d12 - d01) / (x[2] - x[0]);
    if !(curv > 0.0) {
        return (x[1], y[1]);
    }
    let slope = d01 + curv * (x[1] - x[0]);
    let xv = (x[1] - 0.5 * slope / curv).clamp(x[0], x[2]);
    (xv, y[1] + slope * (xv - x[1]) + curv * (xv - x[1]).powi(2))
}

/// Ratio of splitting to minimal gap beyond which a level is taken to follow
/// its diabatic state.
const DIABATIC_RATIO: f64 = 10.0;

fn slope_at(table: &SpectrumTable, level: usize, j: usize, leftward: bool) -> f64 {
    let n = table.eps.len();
    let (a, b) = if leftward {
        if j == 0 {
            (0, 1)
        } else {
            (j - 1, j)
        }
    } else if j + 1 >= n {
        (n - 2, n - 1)
    } else {
        (j, j + 1)
    };
    (table.levels[b][level] - table.levels[a][level]) / (table.eps[b] - table.eps[a])
}

/// Local minima of adjacent-level splittings below `max_gap`.
///
/// Centers and gaps come from a parabola through the three bracketing grid
/// points. Diabatic slopes are one-sided differences taken where the
/// splitting has grown to ten times the minimum on either side (or at the
/// table edge), averaging the lower level on one side with the upper level on
/// the other.
pub fn find_acs(table: &SpectrumTable, max_gap: f64) -> Vec<ACDescriptor> {
    let n = table.eps.len();
    let mut out = Vec::new();
    if n < 3 {
        return out;
    }
    let scale = table.levels.iter().flatten().fold(1.0_f64, |m, e| m.max(e.abs()));
    // Eigenvalue round-off must not pass for a dip.
    let noise = 1e-10 * scale;
    for k in 0..table.dim().saturating_sub(1) {
        let g = table.gaps(k);
        for j in 1..n - 1 {
            if !(g[j] < g[j - 1] - noise && g[j] <= g[j + 1] && g[j] < max_gap) {
                continue;
            }
            let (eps_center, gap) =
                vertex([table.eps[j - 1], table.eps[j], table.eps[j + 1]], [g[j - 1], g[j], g[j + 1]]);
            let far = DIABATIC_RATIO * gap.max(g[j] * 1e-3);
            let left = (0..j).rev().find(|&i| g[i] >= far).unwrap_or(0);
            let right = (j + 1..n).find(|&i| g[i] >= far).unwrap_or(n - 1);
            let lower_before = 0.5 * (slope_at(table, k, left, true) + slope_at(table, k + 1, right, false));
            let upper_before = 0.5 * (slope_at(table, k + 1, left, true) + slope_at(table, k, right, false));
            out.push(ACDescriptor { eps_center, gap, level_pair: (k, k + 1), slopes: (lower_before, upper_before) });
        }
    }
    out.sort_by(|a, b| a.eps_center.total_cmp(&b.eps_center));
    out
}

/// Golden-section refinement of an AC's center and gap within
/// `eps_center +- half_width`, evaluating the splitting directly.
pub fn refine_ac(sys: &MultiLevelSystem, ac: &ACDescriptor, half_width: f64, tol: f64) -> Result<ACDescriptor> {
    let (lo_level, hi_level) = ac.level_pair;
    if hi_level >= sys.dim() {
        return Err(Error::InvalidCrossing(format!("level {hi_level} out of range for dim {}", sys.dim())));
    }
    let split = |x: f64| -> Result<f64> {
        let v = sys.hamiltonian(x).eigenvalues()?;
        Ok(v[hi_level] - v[lo_level])
    };
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (ac.eps_center - half_width, ac.eps_center + half_width);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (split(c)?, split(d)?);
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = split(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = split(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok(ACDescriptor { eps_center: x, gap: split(x)?, ..*ac })
}
