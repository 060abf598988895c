//! Time-ordered exponentials on a fixed grid.
//!
//! Each step applies `exp(-i H(t_mid) h)`, the exponential midpoint rule
//! (second-order Magnus). Every factor is the exact exponential of a
//! Hermitian sample, so the product stays unitary to round-off whatever the
//! step size; accuracy is second order in `h`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::{c, CMatrix, CVector, HermitianOperator, StateVector, UnitaryOperator};

/// Entrywise Hermiticity tolerance applied to every generator sample.
pub const GENERATOR_HERMITIAN_TOL: f64 = 1e-10;
pub const TLS_STEPS_PER_PERIOD: usize = 4096;
pub const MULTILEVEL_STEPS_PER_PERIOD: usize = 8192;
pub const MIN_STEPS_PER_PERIOD: usize = 64;

/// Fixed integration grid over `[t0, t1]`.
///
/// The nominal step is `period / steps_per_period`; the step count is rounded
/// up so that the grid lands exactly on `t1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagationGrid {
    pub t0: f64,
    pub t1: f64,
    pub period: f64,
    pub steps_per_period: usize,
    pub sample_stride: usize,
}

impl PropagationGrid {
    pub fn new(t0: f64, t1: f64, period: f64, steps_per_period: usize) -> Result<Self> {
        Self { t0, t1, period, steps_per_period, sample_stride: 1 }.validated()
    }

    pub fn with_stride(mut self, sample_stride: usize) -> Result<Self> {
        self.sample_stride = sample_stride;
        self.validated()
    }

    fn validated(self) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidGrid(m));
        if !(self.t1 > self.t0) || !self.t0.is_finite() || !self.t1.is_finite() {
            return bad(format!("need t1 > t0, got [{}, {}]", self.t0, self.t1));
        }
        if !(self.period > 0.0) || !self.period.is_finite() {
            return bad(format!("period must be positive, got {}", self.period));
        }
        if self.steps_per_period < MIN_STEPS_PER_PERIOD {
            return bad(format!(
                "steps_per_period must be at least {MIN_STEPS_PER_PERIOD}, got {}",
                self.steps_per_period
            ));
        }
        if self.sample_stride == 0 {
            return bad("sample_stride must be positive".into());
        }
        Ok(self)
    }

    pub fn steps(&self) -> usize {
        let exact = (self.t1 - self.t0) * self.steps_per_period as f64 / self.period;
        // Absorb round-off so that e.g. exactly one period gives steps_per_period.
        ((exact - 1e-9).ceil() as usize).max(1)
    }

    pub fn step(&self) -> f64 {
        (self.t1 - self.t0) / self.steps() as f64
    }

    /// Midpoint of step `k`.
    fn midpoint(&self, k: usize) -> f64 {
        self.t0 + (k as f64 + 0.5) * self.step()
    }

    fn time(&self, k: usize) -> f64 {
        if k == self.steps() {
            self.t1
        } else {
            self.t0 + k as f64 * self.step()
        }
    }

    /// Same interval and stride with `factor` times more steps.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self { steps_per_period: self.steps_per_period * factor, ..*self }.validated()
    }
}

/// `exp(-i H dt)`.
///
/// Two-level operators use the closed form
/// `exp(-i (h0 + n.sigma) dt) = e^{-i h0 dt} (cos(|n| dt) - i sin(|n| dt) n.sigma/|n|)`;
/// larger ones go through the Hermitian eigendecomposition.
pub fn matrix_exp_skew(h: &HermitianOperator, dt: f64) -> Result<UnitaryOperator> {
    let m = h.matrix();
    if h.dim() == 2 {
        return Ok(UnitaryOperator::from_matrix_unchecked(exp_2x2(m, dt)));
    }
    if h.dim() == 1 {
        let phase = Complex64::from_polar(1.0, -m[(0, 0)].re * dt);
        return Ok(UnitaryOperator::from_matrix_unchecked(CMatrix::from_element(1, 1, phase)));
    }
    let (values, vectors) = h.eigh()?;
    let n = h.dim();
    let phases = CVector::from_iterator(n, values.iter().map(|&v| Complex64::from_polar(1.0, -v * dt)));
    let scaled = CMatrix::from_fn(n, n, |i, j| vectors[(i, j)] * phases[j]);
    Ok(UnitaryOperator::from_matrix_unchecked(scaled * vectors.adjoint()))
}

fn exp_2x2(m: &CMatrix, dt: f64) -> CMatrix {
    let h0 = 0.5 * (m[(0, 0)].re + m[(1, 1)].re);
    let nz = 0.5 * (m[(0, 0)].re - m[(1, 1)].re);
    let nx = m[(1, 0)].re;
    let ny = m[(1, 0)].im;
    let norm = (nx * nx + ny * ny + nz * nz).sqrt();
    let theta = norm * dt;
    let cos = theta.cos();
    // sin(theta)/|n|, well defined as |n| -> 0
    let sinc = if theta.abs() < 1e-8 { dt * (1.0 - theta * theta / 6.0) } else { theta.sin() / norm };
    let g = Complex64::from_polar(1.0, -h0 * dt);
    let a = c(cos, -sinc * nz);
    let d = c(cos, sinc * nz);
    // -i sinc (nx sx + ny sy): off-diagonals -i sinc (nx -/+ i ny)
    let b = c(-sinc * ny, -sinc * nx);
    let e = c(sinc * ny, -sinc * nx);
    CMatrix::from_row_slice(2, 2, &[g * a, g * b, g * e, g * d])
}

struct Stepper<'a, G> {
    generator: &'a G,
    grid: PropagationGrid,
    dim: usize,
}

impl<'a, G> Stepper<'a, G>
where
    G: Fn(f64) -> HermitianOperator,
{
    fn new(generator: &'a G, grid: &PropagationGrid) -> Self {
        let dim = generator(grid.t0).dim();
        Self { generator, grid: *grid, dim }
    }

    fn step_operator(&self, k: usize) -> Result<UnitaryOperator> {
        let h = (self.generator)(self.grid.midpoint(k));
        if h.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: h.dim() });
        }
        let deviation = h.hermiticity_deviation();
        if !(deviation <= GENERATOR_HERMITIAN_TOL) {
            return Err(Error::NotHermitian { deviation, tolerance: GENERATOR_HERMITIAN_TOL });
        }
        matrix_exp_skew(&h, self.grid.step())
    }
}

/// `U(t1, t0)` for the generator sampled on `grid`.
pub fn propagate<G>(generator: G, grid: &PropagationGrid) -> Result<UnitaryOperator>
where
    G: Fn(f64) -> HermitianOperator,
{
    let stepper = Stepper::new(&generator, grid);
    let mut u = CMatrix::identity(stepper.dim, stepper.dim);
    for k in 0..grid.steps() {
        let s = stepper.step_operator(k)?;
        u = s.matrix() * u;
    }
    Ok(UnitaryOperator::from_matrix_unchecked(u))
}

/// Trajectory of `psi0`, sampled at `t0`, every `sample_stride` steps, and
/// at `t1`.
pub fn evolve_state<G>(generator: G, psi0: &StateVector, grid: &PropagationGrid) -> Result<Vec<(f64, StateVector)>>
where
    G: Fn(f64) -> HermitianOperator,
{
    let stepper = Stepper::new(&generator, grid);
    if psi0.dim() != stepper.dim {
        return Err(Error::DimensionMismatch { expected: stepper.dim, found: psi0.dim() });
    }
    let steps = grid.steps();
    let mut out = Vec::with_capacity(steps / grid.sample_stride + 2);
    out.push((grid.t0, psi0.clone()));
    let mut psi = psi0.clone();
    for k in 0..steps {
        psi = stepper.step_operator(k)?.apply(&psi)?;
        let done = k + 1;
        if done % grid.sample_stride == 0 || done == steps {
            out.push((grid.time(done), psi.clone()));
        }
    }
    Ok(out)
}

/// Largest entrywise difference between the propagator on `grid` and on a
/// grid `refine` times finer. Fixed grids carry no error control of their
/// own; this is the check that goes with them.
pub fn self_convergence<G>(generator: G, grid: &PropagationGrid, refine: usize) -> Result<f64>
where
    G: Fn(f64) -> HermitianOperator,
{
    let coarse = propagate(&generator, grid)?;
    let fine = propagate(&generator, &grid.refined(refine)?)?;
    Ok(crate::operators::max_abs_diff(coarse.matrix(), fine.matrix()))
}
