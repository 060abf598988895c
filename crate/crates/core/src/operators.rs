//! Dense complex operators and state vectors.
//!
//! Three newtypes carry the invariants the rest of the crate relies on:
//! [`HermitianOperator`] (generators), [`UnitaryOperator`] (propagators and
//! monodromy operators) and [`StateVector`] (normalized pure states). All
//! wrap `nalgebra` dense storage; the dimensions handled here are small
//! (2 for the two-level model, tens for multi-level systems).

use nalgebra::linalg::{Schur, SymmetricEigen};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Entrywise tolerance of the Hermitian invariant.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance of the unitarity invariant, `max |U^dagger U - I|`.
pub const UNITARY_TOL: f64 = 1e-10;
/// Tolerance of the normalization invariant.
pub const NORM_TOL: f64 = 1e-10;

const EIGEN_MAX_ITER: usize = 10_000;

#[cfg(test)]
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest entrywise modulus of `m - m^dagger`.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Largest entrywise modulus of `m^dagger m - I`.
pub fn unitarity_deviation(m: &CMatrix) -> f64 {
    let prod = m.adjoint() * m;
    let n = prod.nrows();
    let mut dev = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((prod[(i, j)] - target).norm());
        }
    }
    dev
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn check_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    /// Validates `matrix` against [`HERMITIAN_TOL`] and stores its Hermitian part.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, HERMITIAN_TOL)
    }

    /// Like [`HermitianOperator::new`] with a caller-chosen tolerance. The
    /// stored matrix is symmetrized, so it is exactly Hermitian regardless of
    /// the tolerance used for acceptance.
    pub fn with_tolerance(matrix: CMatrix, tolerance: f64) -> Result<Self> {
        check_square(&matrix)?;
        let deviation = hermiticity_deviation(&matrix);
        if !(deviation <= tolerance) {
            return Err(Error::NotHermitian { deviation, tolerance });
        }
        let sym = (&matrix + matrix.adjoint()) * c(0.5, 0.0);
        Ok(Self { matrix: sym })
    }

    /// Wraps `matrix` without checking. Intended for hot loops that build
    /// operators which are Hermitian by construction; the propagator still
    /// checks every sample it receives.
    pub fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { matrix: CMatrix::zeros(dim, dim) }
    }

    /// Real diagonal operator.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = c(d, 0.0);
        }
        Self { matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        hermiticity_deviation(&self.matrix)
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `self + scale * other`.
    pub fn add_scaled(&self, other: &HermitianOperator, scale: f64) -> Result<HermitianOperator> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(Self { matrix: &self.matrix + &other.matrix * c(scale, 0.0) })
    }

    pub fn scaled(&self, scale: f64) -> HermitianOperator {
        Self { matrix: &self.matrix * c(scale, 0.0) }
    }

    /// Eigenvalues in ascending order with the matching orthonormal
    /// eigenvectors as columns.
    pub fn eigh(&self) -> Result<(Vec<f64>, CMatrix)> {
        let eig =
            SymmetricEigen::try_new(self.matrix.clone(), f64::EPSILON, EIGEN_MAX_ITER).ok_or(Error::EigenFailure)?;
        let n = self.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Ok((values, vectors))
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eigh()?.0)
    }

    /// `<psi|H|psi>`.
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: psi.dim() });
        }
        let v = psi.amplitudes();
        Ok(v.dotc(&(&self.matrix * v)).re)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryOperator {
    matrix: CMatrix,
}

impl UnitaryOperator {
    /// Validates `matrix` against [`UNITARY_TOL`].
    pub fn new(matrix: CMatrix) -> Result<Self> {
        check_square(&matrix)?;
        let deviation = unitarity_deviation(&matrix);
        if !(deviation <= UNITARY_TOL) {
            return Err(Error::NotUnitary { deviation, tolerance: UNITARY_TOL });
        }
        Ok(Self { matrix })
    }

    pub fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: CMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.matrix)
    }

    pub fn adjoint(&self) -> UnitaryOperator {
        Self { matrix: self.matrix.adjoint() }
    }

    /// `self * earlier`: evolve with `earlier` first, then with `self`.
    pub fn after(&self, earlier: &UnitaryOperator) -> Result<UnitaryOperator> {
        if earlier.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: earlier.dim() });
        }
        Ok(Self { matrix: &self.matrix * &earlier.matrix })
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: psi.dim() });
        }
        Ok(StateVector { amplitudes: &self.matrix * &psi.amplitudes })
    }

    /// Eigenvalues (unit-modulus) and orthonormal eigenvectors as columns.
    ///
    /// Unitary matrices are normal, so the complex Schur form is diagonal up to
    /// round-off and the Schur vectors are eigenvectors, including inside
    /// degenerate eigenspaces.
    pub fn eigen(&self) -> Result<(Vec<Complex64>, CMatrix)> {
        if self.dim() == 2 {
            return Ok(su2_eigen(&self.matrix));
        }
        let schur = Schur::try_new(self.matrix.clone(), f64::EPSILON, EIGEN_MAX_ITER).ok_or(Error::EigenFailure)?;
        let (q, t) = schur.unpack();
        let values = (0..self.dim()).map(|k| t[(k, k)]).collect();
        Ok((values, q))
    }
}

/// Closed-form eigen-decomposition of a 2x2 unitary.
///
/// Writes `U = e^{i phi} (a0 I - i a.sigma)` with `a0^2 + |a|^2 = 1`; the
/// eigenvectors are those of `a.sigma`.
fn su2_eigen(u: &CMatrix) -> (Vec<Complex64>, CMatrix) {
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let half_phase = Complex64::from_polar(1.0, det.arg() / 2.0);
    let v = u * half_phase.conj();
    // v = a0 I - i (ax sx + ay sy + az sz)
    let a0 = 0.5 * (v[(0, 0)] + v[(1, 1)]).re;
    let az = -0.5 * (v[(0, 0)] - v[(1, 1)]).im;
    let ax = -0.5 * (v[(0, 1)] + v[(1, 0)]).im;
    let ay = 0.5 * (v[(1, 0)] - v[(0, 1)]).re;
    let norm = (ax * ax + ay * ay + az * az).sqrt();
    let theta = norm.atan2(a0);
    let lam_plus = half_phase * Complex64::from_polar(1.0, -theta);
    let lam_minus = half_phase * Complex64::from_polar(1.0, theta);
    let mut vecs = CMatrix::identity(2, 2);
    if norm > 1e-300 {
        let (nx, ny, nz) = (ax / norm, ay / norm, az / norm);
        // +1 eigenvector of n.sigma, chosen from the better-conditioned column.
        let plus = if nz >= 0.0 {
            let s = (2.0 * (1.0 + nz)).sqrt();
            [c(1.0 + nz, 0.0) / s, c(nx, ny) / s]
        } else {
            let s = (2.0 * (1.0 - nz)).sqrt();
            [c(nx, -ny) / s, c(1.0 - nz, 0.0) / s]
        };
        // orthogonal complement
        let minus = [-plus[1].conj(), plus[0].conj()];
        vecs = CMatrix::from_row_slice(2, 2, &[plus[0], minus[0], plus[1], minus[1]]);
    }
    (vec![lam_plus, lam_minus], vecs)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let norm_sq = amplitudes.norm_squared();
        if amplitudes.is_empty() || !((norm_sq - 1.0).abs() <= NORM_TOL) {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized { norm_sq: norm * norm });
        }
        Ok(Self { amplitudes: amplitudes / c(norm, 0.0) })
    }

    /// Computational basis state `|k>`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::DimensionMismatch { expected: dim, found: k + 1 });
        }
        let mut v = CVector::zeros(dim);
        v[k] = c(1.0, 0.0);
        Ok(Self { amplitudes: v })
    }

    /// Column `k` of a unitary (or otherwise orthonormal) matrix.
    pub fn from_column(m: &CMatrix, k: usize) -> Result<Self> {
        Self::new(m.column(k).into_owned())
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// `|<k|psi>|^2` in the computational basis.
    pub fn population(&self, k: usize) -> f64 {
        self.amplitudes[k].norm_sqr()
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

/// Pauli matrices in the basis where `|0>` is the +1 eigenvector of sigma_z.
pub mod pauli {
    use super::{c, CMatrix};

    pub fn identity() -> CMatrix {
        CMatrix::identity(2, 2)
    }

    pub fn x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
    }

    pub fn y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
    }

    pub fn z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
    }

    /// `bx sx + by sy + bz sz`.
    pub fn combination(bx: f64, by: f64, bz: f64) -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(bz, 0.0), c(bx, -by), c(bx, by), c(-bz, 0.0)])
    }
}
