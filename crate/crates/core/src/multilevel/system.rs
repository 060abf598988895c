use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::operators::{c, hermiticity_deviation, CMatrix, HermitianOperator};

/// Hermiticity tolerance applied to ingested documents.
pub const INGEST_HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed system document at line {line}, column {column}: {message}")]
    Malformed { line: usize, column: usize, message: String },

    #[error("`{field}` is not Hermitian: max deviation {deviation:.3e} exceeds {INGEST_HERMITIAN_TOL:.0e}")]
    NotHermitian { field: &'static str, deviation: f64 },

    #[error("`{field}` has {found} where dim = {dim} requires {dim}")]
    DimensionMismatch { field: &'static str, dim: usize, found: String },
}

/// `H(eps) = H0 + eps D`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiLevelSystem {
    h0: HermitianOperator,
    d: HermitianOperator,
    labels: Option<Vec<String>>,
    units: Option<String>,
}

/// On-disk layout: matrices as rows of `[re, im]` pairs.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    dim: usize,
    h0: Vec<Vec<[f64; 2]>>,
    d: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    labels: Option<Vec<String>>,
    #[serde(default)]
    units: Option<String>,
}

fn to_matrix(field: &'static str, dim: usize, rows: &[Vec<[f64; 2]>]) -> std::result::Result<CMatrix, LoadError> {
    if rows.len() != dim {
        return Err(LoadError::DimensionMismatch { field, dim, found: format!("{} rows", rows.len()) });
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
        return Err(LoadError::DimensionMismatch { field, dim, found: format!("{} entries in row {i}", r.len()) });
    }
    Ok(CMatrix::from_fn(dim, dim, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

fn checked(field: &'static str, m: CMatrix) -> std::result::Result<HermitianOperator, LoadError> {
    let deviation = hermiticity_deviation(&m);
    HermitianOperator::with_tolerance(m, INGEST_HERMITIAN_TOL).map_err(|_| LoadError::NotHermitian { field, deviation })
}

fn push_number(out: &mut String, x: f64) {
    // 17 significant digits round-trip every f64.
    write!(out, "{x:.16e}").expect("writing to a String");
}

fn push_matrix(out: &mut String, m: &CMatrix) {
    out.push_str("[\n");
    for i in 0..m.nrows() {
        out.push_str("    [");
        for j in 0..m.ncols() {
            if j > 0 {
                out.push_str(", ");
            }
            out.push('[');
            push_number(out, m[(i, j)].re);
            out.push_str(", ");
            push_number(out, m[(i, j)].im);
            out.push(']');
        }
        out.push(']');
        if i + 1 < m.nrows() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("  ]");
}

impl MultiLevelSystem {
    pub fn new(h0: HermitianOperator, d: HermitianOperator) -> Result<Self> {
        if h0.dim() != d.dim() {
            return Err(Error::DimensionMismatch { expected: h0.dim(), found: d.dim() });
        }
        if h0.dim() < 2 {
            return Err(Error::InvalidParams(format!("a multi-level system needs dim >= 2, got {}", h0.dim())));
        }
        Ok(Self { h0, d, labels: None, units: None })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_units(mut self, units: impl Into<String>) -> Self {
        self.units = Some(units.into());
        self
    }

    /// `h0 = (delta/2) sx`, `d = sz`: the two-level model as a system.
    pub fn two_level_embedding(delta: f64) -> Result<Self> {
        use crate::operators::pauli;
        Self::new(HermitianOperator::new(pauli::x() * c(0.5 * delta, 0.0))?, HermitianOperator::new(pauli::z())?)
    }

    pub fn dim(&self) -> usize {
        self.h0.dim()
    }

    pub fn h0(&self) -> &HermitianOperator {
        &self.h0
    }

    pub fn d(&self) -> &HermitianOperator {
        &self.d
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn units(&self) -> Option<&str> {
        self.units.as_deref()
    }

    /// `H0 + eps D`.
    pub fn hamiltonian(&self, eps: f64) -> HermitianOperator {
        HermitianOperator::from_matrix_unchecked(self.h0.matrix() + self.d.matrix() * c(eps, 0.0))
    }

    /// Parses a system document.
    ///
    /// Matrices are symmetrized on ingest, so documents holding exactly
    /// Hermitian matrices (everything written by [`MultiLevelSystem::to_json`])
    /// round-trip bit for bit.
    pub fn from_json(text: &str) -> std::result::Result<Self, LoadError> {
        let doc: Document = serde_json::from_str(text).map_err(|e| LoadError::Malformed {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if doc.dim < 2 {
            return Err(LoadError::DimensionMismatch { field: "dim", dim: doc.dim, found: "dim < 2".into() });
        }
        let h0 = checked("h0", to_matrix("h0", doc.dim, &doc.h0)?)?;
        let d = checked("d", to_matrix("d", doc.dim, &doc.d)?)?;
        if let Some(labels) = &doc.labels {
            if labels.len() != doc.dim {
                return Err(LoadError::DimensionMismatch {
                    field: "labels",
                    dim: doc.dim,
                    found: format!("{} labels", labels.len()),
                });
            }
        }
        Ok(Self { h0, d, labels: doc.labels, units: doc.units })
    }

    pub fn load(path: &Path) -> std::result::Result<Self, LoadError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    /// Canonical document: fields in schema order, numbers with 17
    /// significant digits.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        writeln!(out, "  \"dim\": {},", self.dim()).expect("writing to a String");
        out.push_str("  \"h0\": ");
        push_matrix(&mut out, self.h0.matrix());
        out.push_str(",\n  \"d\": ");
        push_matrix(&mut out, self.d.matrix());
        if let Some(labels) = &self.labels {
            let quoted: Vec<String> =
                labels.iter().map(|l| serde_json::to_string(l).expect("strings serialize")).collect();
            write!(out, ",\n  \"labels\": [{}]", quoted.join(", ")).expect("writing to a String");
        }
        if let Some(units) = &self.units {
            write!(out, ",\n  \"units\": {}", serde_json::to_string(units).expect("strings serialize"))
                .expect("writing to a String");
        }
        out.push_str("\n}\n");
        out
    }

    pub fn save(&self, path: &Path) -> std::result::Result<(), LoadError> {
        std::fs::write(path, self.to_json()).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })
    }
}

/// A level outside the engineered crossing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectator {
    /// Energy at `eps_center`, relative to the crossing.
    pub offset: f64,
    /// `dE/d eps`.
    pub slope: f64,
    /// Coupling to each of the two crossing states.
    pub coupling: f64,
}

/// Recipe for a system with one engineered avoided crossing.
///
/// The two crossing states have diabatic energies
/// `slopes.k * (eps - eps_center)` and are coupled by `gap / 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticAcSpec {
    pub dim: usize,
    pub gap: f64,
    pub eps_center: f64,
    pub slopes: (f64, f64),
    pub spectators: Vec<Spectator>,
}

impl Default for SyntheticAcSpec {
    /// Eight levels, gap 0.15, six spectators 60 to 180 gaps away with
    /// alternating slopes, each coupled by half a gap.
    fn default() -> Self {
        let gap = 0.15;
        let spectators = [-180.0, -120.0, -60.0, 60.0, 120.0, 180.0]
            .iter()
            .enumerate()
            .map(|(k, &m)| Spectator {
                offset: m * gap,
                slope: if k % 2 == 0 { 1.0 } else { -1.0 },
                coupling: 0.5 * gap,
            })
            .collect();
        Self { dim: 8, gap, eps_center: 1.0, slopes: (1.0, -1.0), spectators }
    }
}

impl SyntheticAcSpec {
    pub fn two_level(gap: f64, eps_center: f64, slopes: (f64, f64)) -> Self {
        Self { dim: 2, gap, eps_center, slopes, spectators: vec![] }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSynthetic(m));
        if !(self.gap > 0.0) || !self.gap.is_finite() {
            return bad(format!("gap must be positive, got {}", self.gap));
        }
        if self.dim < 2 {
            return bad(format!("dim must be at least 2, got {}", self.dim));
        }
        if self.dim != 2 + self.spectators.len() {
            return bad(format!("dim {} does not match 2 + {} spectators", self.dim, self.spectators.len()));
        }
        if self.slopes.0 == self.slopes.1 {
            return bad("crossing states need different slopes".into());
        }
        let finite = [self.eps_center, self.slopes.0, self.slopes.1]
            .into_iter()
            .chain(self.spectators.iter().flat_map(|s| [s.offset, s.slope, s.coupling]))
            .all(f64::is_finite);
        if !finite {
            return bad("non-finite entry".into());
        }
        Ok(())
    }
}

/// Spectator contamination of the engineered gap that is still accepted.
const CONTAMINATION_LIMIT: f64 = 0.1;

/// Builds the system described by `spec` and checks the engineered gap.
///
/// Levels 0 and 1 are the crossing states, the spectators follow in order.
/// Fails if the spectators move the measured gap by more than 10%.
pub fn synthetic_ac(spec: &SyntheticAcSpec) -> Result<MultiLevelSystem> {
    spec.validate()?;
    let n = spec.dim;
    let ec = spec.eps_center;
    let mut h0 = CMatrix::zeros(n, n);
    let mut d = CMatrix::zeros(n, n);
    let slopes = [spec.slopes.0, spec.slopes.1];
    for (k, &s) in slopes.iter().enumerate() {
        h0[(k, k)] = c(-s * ec, 0.0);
        d[(k, k)] = c(s, 0.0);
    }
    h0[(0, 1)] = c(0.5 * spec.gap, 0.0);
    h0[(1, 0)] = c(0.5 * spec.gap, 0.0);
    for (k, sp) in spec.spectators.iter().enumerate() {
        let i = k + 2;
        h0[(i, i)] = c(sp.offset - sp.slope * ec, 0.0);
        d[(i, i)] = c(sp.slope, 0.0);
        for j in 0..2 {
            h0[(i, j)] = c(sp.coupling, 0.0);
            h0[(j, i)] = c(sp.coupling, 0.0);
        }
    }
    let labels = (0..n)
        .map(|i| match i {
            0 => "ac_a".to_string(),
            1 => "ac_b".to_string(),
            _ => format!("spectator_{}", i - 2),
        })
        .collect();
    let sys = MultiLevelSystem::new(HermitianOperator::new(h0)?, HermitianOperator::new(d)?)?.with_labels(labels)?;

    let measured = engineered_gap(&sys, spec)?;
    if (measured - spec.gap).abs() > CONTAMINATION_LIMIT * spec.gap {
        return Err(Error::SpectatorCollision { requested: spec.gap, measured });
    }
    Ok(sys)
}

/// Smallest splitting of the two levels carrying the crossing states, over
/// a window of a few gaps around the center.
pub(crate) fn engineered_gap(sys: &MultiLevelSystem, spec: &SyntheticAcSpec) -> Result<f64> {
    let (vals, vecs) = sys.hamiltonian(spec.eps_center).eigh()?;
    let weight = |k: usize| vecs[(0, k)].norm_sqr() + vecs[(1, k)].norm_sqr();
    let mut order: Vec<usize> = (0..sys.dim()).collect();
    order.sort_by(|&a, &b| weight(b).total_cmp(&weight(a)));
    let (lo, hi) = (order[0].min(order[1]), order[0].max(order[1]));
    if hi != lo + 1 {
        return Err(Error::SpectatorCollision { requested: spec.gap, measured: vals[hi] - vals[lo] });
    }
    let width = 4.0 * spec.gap / (spec.slopes.0 - spec.slopes.1).abs();
    let split = |x: f64| -> Result<f64> {
        let v = sys.hamiltonian(x).eigenvalues()?;
        Ok(v[hi] - v[lo])
    };
    let mut best = f64::INFINITY;
    let samples = 400;
    for k in 0..=samples {
        let x = spec.eps_center - width + 2.0 * width * k as f64 / samples as f64;
        best = best.min(split(x)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_operators() {
        let s = MultiLevelSystem::two_level_embedding(1.0).unwrap();
        assert_eq!(s.dim(), 2);
        let e = s.hamiltonian(0.0).eigenvalues().unwrap();
        assert!((e[1] - e[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_mismatched_operators() {
        let err = MultiLevelSystem::new(HermitianOperator::zeros(2), HermitianOperator::zeros(3));
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
        assert!(MultiLevelSystem::new(HermitianOperator::zeros(1), HermitianOperator::zeros(1)).is_err());
    }

    #[test]
    fn json_round_trip_is_bit_identical() {
        let sys = synthetic_ac(&SyntheticAcSpec::default()).unwrap().with_units("arb");
        let text = sys.to_json();
        let back = MultiLevelSystem::from_json(&text).unwrap();
        assert_eq!(back, sys);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn malformed_document_reports_position() {
        let err = MultiLevelSystem::from_json("{\n  \"dim\": 2,\n  \"h0\": [[1, 2]\n}").unwrap_err();
        match err {
            LoadError::Malformed { line, .. } => assert!(line >= 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_hermitian_document() {
        let text = r#"{"dim": 2, "h0": [[[0,0],[1,0]],[[2,0],[0,0]]], "d": [[[1,0],[0,0]],[[0,0],[-1,0]]]}"#;
        assert!(matches!(MultiLevelSystem::from_json(text), Err(LoadError::NotHermitian { field: "h0", .. })));
    }

    #[test]
    fn dimension_mismatch_document() {
        let text = r#"{"dim": 2, "h0": [[[0,0],[1,0]],[[1,0],[0,0]]], "d": [[[1,0]]]}"#;
        assert!(matches!(MultiLevelSystem::from_json(text), Err(LoadError::DimensionMismatch { field: "d", .. })));
        let text =
            r#"{"dim": 2, "h0": [[[0,0],[1,0]],[[1,0],[0,0]]], "d": [[[1,0],[0,0]],[[0,0],[-1,0]]], "labels": ["a"]}"#;
        assert!(matches!(MultiLevelSystem::from_json(text), Err(LoadError::DimensionMismatch { field: "labels", .. })));
    }

    #[test]
    fn two_level_synthetic_has_exact_gap() {
        let spec = SyntheticAcSpec::two_level(0.3, -0.5, (2.0, -1.0));
        let sys = synthetic_ac(&spec).unwrap();
        let e = sys.hamiltonian(-0.5).eigenvalues().unwrap();
        assert!((e[1] - e[0] - 0.3).abs() < 1e-14);
    }

    #[test]
    fn default_synthetic_gap_within_one_percent() {
        let spec = SyntheticAcSpec::default();
        let sys = synthetic_ac(&spec).unwrap();
        let g = engineered_gap(&sys, &spec).unwrap();
        assert!((g - 0.15).abs() <= 0.01 * 0.15, "{g}");
    }

    #[test]
    fn colliding_spectator_is_rejected() {
        let mut spec = SyntheticAcSpec::default();
        spec.spectators[3] = Spectator { offset: 0.1 * spec.gap, slope: 0.0, coupling: 2.0 * spec.gap };
        assert!(matches!(synthetic_ac(&spec), Err(Error::SpectatorCollision { .. })));
    }

    #[test]
    fn invalid_specs() {
        let spec = SyntheticAcSpec { dim: 5, ..SyntheticAcSpec::default() };
        assert!(matches!(synthetic_ac(&spec), Err(Error::InvalidSynthetic(_))));
        let spec = SyntheticAcSpec::two_level(0.0, 0.0, (1.0, -1.0));
        assert!(synthetic_ac(&spec).is_err());
    }
}
