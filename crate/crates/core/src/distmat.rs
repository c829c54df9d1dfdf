//! Distance matrices, half-square matrices and point sets.
//!
//! A [`DistanceMatrix`] stores the full symmetric `N×N` matrix of pairwise
//! chord distances (or great-circle arcs). The estimators never look at
//! distances directly; they work on the [`HalfSquareMatrix`] whose entries
//! are `d²/2`. For exact points on a sphere of radius `R` centred at the
//! origin that matrix equals `R²·11ᵀ − αᵀα` and therefore has rank at most 4.

use nalgebra::{DMatrix, DVector, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};

/// Relative tolerance for symmetry and zero-diagonal checks.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceKind {
    Chord,
    Arc,
}

/// Symmetric matrix of pairwise distances with zero diagonal and strictly
/// positive off-diagonal entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    data: DMatrix<f64>,
    kind: DistanceKind,
}

impl DistanceMatrix {
    /// Validates `data`; entries asymmetric by less than the tolerance are
    /// averaged and a near-zero diagonal is set to exactly zero.
    pub fn new(data: DMatrix<f64>, kind: DistanceKind) -> Result<Self> {
        let diag = validate_matrix(&data);
        if !diag.square {
            return Err(Error::validation(format!(
                "distance matrix must be square, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        if diag.n < 2 {
            return Err(Error::validation("distance matrix needs at least 2 points"));
        }
        if !diag.finite {
            return Err(Error::validation(
                "distance matrix contains non-finite entries",
            ));
        }
        let tol = SYMMETRY_TOL * diag.max_abs.max(f64::MIN_POSITIVE);
        if diag.symmetry_residual > tol {
            return Err(Error::validation(format!(
                "distance matrix is not symmetric (max asymmetry {:.3e})",
                diag.symmetry_residual
            )));
        }
        if diag.diagonal_residual > tol {
            return Err(Error::validation(format!(
                "distance matrix has nonzero diagonal (max {:.3e})",
                diag.diagonal_residual
            )));
        }
        if diag.min_off_diagonal <= 0.0 {
            return Err(Error::validation(format!(
                "off-diagonal distances must be positive (min {:.3e})",
                diag.min_off_diagonal
            )));
        }

        let mut data = (&data + data.transpose()) * 0.5;
        data.fill_diagonal(0.0);
        Ok(DistanceMatrix { data, kind })
    }

    /// Builds a matrix from the strict upper triangle, given row by row
    /// (`n(n-1)/2` values: d01, d02, …, d0n, d12, …).
    pub fn from_upper(n: usize, upper: &[f64], kind: DistanceKind) -> Result<Self> {
        if upper.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::validation(format!(
                "expected {} upper-triangle entries for n={n}, got {}",
                n * n.saturating_sub(1) / 2,
                upper.len()
            )));
        }
        let mut data = DMatrix::zeros(n, n);
        let mut it = upper.iter();
        for i in 0..n {
            for j in i + 1..n {
                let v = *it.next().expect("length checked");
                data[(i, j)] = v;
                data[(j, i)] = v;
            }
        }
        Self::new(data, kind)
    }

    /// Euclidean distances between all pairs of points.
    pub fn from_points(points: &PointSet) -> Result<Self> {
        let n = points.len();
        if n < 2 {
            return Err(Error::validation("need at least 2 points"));
        }
        if points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::validation("point coordinates must be finite"));
        }
        let mut data = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let d = (points[i] - points[j]).norm();
                if d == 0.0 {
                    return Err(Error::degenerate(format!("points {i} and {j} coincide")));
                }
                data[(i, j)] = d;
                data[(j, i)] = d;
            }
        }
        Ok(DistanceMatrix {
            data,
            kind: DistanceKind::Chord,
        })
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn kind(&self) -> DistanceKind {
        self.kind
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn max_entry(&self) -> f64 {
        self.data.max()
    }

    /// Leading `k×k` block (first `k` points).
    pub fn prefix(&self, k: usize) -> Result<Self> {
        if k < 2 || k > self.n() {
            return Err(Error::validation(format!(
                "prefix size {k} out of range 2..={}",
                self.n()
            )));
        }
        Ok(DistanceMatrix {
            data: self.data.view((0, 0), (k, k)).into_owned(),
            kind: self.kind,
        })
    }

    /// Same matrix with every entry multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::validation("scale factor must be positive"));
        }
        Ok(DistanceMatrix {
            data: &self.data * factor,
            kind: self.kind,
        })
    }

    /// Reorders points: new point `i` is old point `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n();
        let mut seen = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::validation("not a permutation"));
        }
        let data = DMatrix::from_fn(n, n, |i, j| self.data[(perm[i], perm[j])]);
        Ok(DistanceMatrix {
            data,
            kind: self.kind,
        })
    }

    pub fn half_squares(&self) -> Result<HalfSquareMatrix> {
        HalfSquareMatrix::from_distances(self)
    }
}

/// Matrix of half-squared chord distances, `h[i][j] = d[i][j]² / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSquareMatrix {
    data: DMatrix<f64>,
}

impl HalfSquareMatrix {
    pub fn from_distances(d: &DistanceMatrix) -> Result<Self> {
        if d.kind() != DistanceKind::Chord {
            return Err(Error::validation(
                "half-square matrix requires chord distances; convert arcs first",
            ));
        }
        Ok(HalfSquareMatrix {
            data: d.as_matrix().map(|v| 0.5 * v * v),
        })
    }

    /// Wraps an already-formed half-square matrix after checking the same
    /// invariants as [`DistanceMatrix`].
    pub fn from_matrix(data: DMatrix<f64>) -> Result<Self> {
        let diag = validate_matrix(&data);
        let tol = SYMMETRY_TOL * diag.max_abs.max(f64::MIN_POSITIVE);
        if !diag.square || diag.n < 2 || !diag.finite {
            return Err(Error::validation(
                "half-square matrix must be square, finite, n >= 2",
            ));
        }
        if diag.symmetry_residual > tol || diag.diagonal_residual > tol {
            return Err(Error::validation(
                "half-square matrix must be symmetric with zero diagonal",
            ));
        }
        if diag.min_off_diagonal <= 0.0 {
            return Err(Error::validation(
                "half-square entries must be positive off the diagonal",
            ));
        }
        let mut data = (&data + data.transpose()) * 0.5;
        data.fill_diagonal(0.0);
        Ok(HalfSquareMatrix { data })
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn row_sums(&self) -> DVector<f64> {
        DVector::from_iterator(self.n(), self.data.row_iter().map(|r| r.sum()))
    }

    /// `b̄ᵀ·h·b̄` with `b̄` the all-ones vector.
    pub fn total(&self) -> f64 {
        self.data.sum()
    }

    /// Back to chord distances.
    pub fn distances(&self) -> DistanceMatrix {
        DistanceMatrix {
            data: self.data.map(|v| (2.0 * v).sqrt()),
            kind: DistanceKind::Chord,
        }
    }
}

/// Ordered set of points in 3-space.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointSet {
    points: Vec<Vector3<f64>>,
}

impl PointSet {
    pub fn new(points: Vec<Vector3<f64>>) -> Self {
        PointSet { points }
    }

    pub fn from_coords(coords: &[[f64; 3]]) -> Self {
        PointSet {
            points: coords
                .iter()
                .map(|c| Vector3::new(c[0], c[1], c[2]))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vector3<f64>> {
        self.points.iter()
    }

    pub fn points(&self) -> &[Vector3<f64>] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Vector3<f64>> {
        self.points
    }

    /// Distance of each point from the origin.
    pub fn radii(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.norm()).collect()
    }

    pub fn centroid(&self) -> Vector3<f64> {
        let sum: Vector3<f64> = self.points.iter().sum();
        sum / self.points.len().max(1) as f64
    }

    /// True when every point lies within `tol` of the sphere `‖p − center‖ = r`.
    pub fn on_sphere(&self, center: &Vector3<f64>, r: f64, tol: f64) -> bool {
        self.points
            .iter()
            .all(|p| ((p - center).norm() - r).abs() <= tol)
    }

    pub fn distances(&self) -> Result<DistanceMatrix> {
        DistanceMatrix::from_points(self)
    }
}

impl std::ops::Index<usize> for PointSet {
    type Output = Vector3<f64>;

    fn index(&self, i: usize) -> &Vector3<f64> {
        &self.points[i]
    }
}

impl FromIterator<Vector3<f64>> for PointSet {
    fn from_iter<I: IntoIterator<Item = Vector3<f64>>>(iter: I) -> Self {
        PointSet {
            points: iter.into_iter().collect(),
        }
    }
}

/// Result of [`validate_matrix`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixDiagnostics {
    pub n: usize,
    pub square: bool,
    pub finite: bool,
    /// max |d[i][j] − d[j][i]|
    pub symmetry_residual: f64,
    /// max |d[i][i]|
    pub diagonal_residual: f64,
    pub min_off_diagonal: f64,
    pub max_off_diagonal: f64,
    pub max_abs: f64,
    pub passes: bool,
}

/// Checks the distance-matrix invariants without failing.
pub fn validate_matrix(data: &DMatrix<f64>) -> MatrixDiagnostics {
    let n = data.nrows();
    let square = data.is_square();
    let finite = data.iter().all(|v| v.is_finite());
    let max_abs = data.iter().fold(0.0_f64, |m, v| m.max(v.abs()));

    let mut symmetry_residual = 0.0_f64;
    let mut diagonal_residual = 0.0_f64;
    let mut min_off = f64::INFINITY;
    let mut max_off = f64::NEG_INFINITY;
    if square {
        for i in 0..n {
            diagonal_residual = diagonal_residual.max(data[(i, i)].abs());
            for j in 0..n {
                if i == j {
                    continue;
                }
                symmetry_residual = symmetry_residual.max((data[(i, j)] - data[(j, i)]).abs());
                min_off = min_off.min(data[(i, j)]);
                max_off = max_off.max(data[(i, j)]);
            }
        }
    }
    if n < 2 {
        min_off = 0.0;
        max_off = 0.0;
    }
    let tol = SYMMETRY_TOL * max_abs;
    let passes = square
        && n >= 2
        && finite
        && symmetry_residual <= tol
        && diagonal_residual <= tol
        && min_off > 0.0;

    MatrixDiagnostics {
        n,
        square,
        finite,
        symmetry_residual,
        diagonal_residual,
        min_off_diagonal: min_off,
        max_off_diagonal: max_off,
        max_abs,
        passes,
    }
}
