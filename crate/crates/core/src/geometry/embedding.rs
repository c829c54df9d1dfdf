use nalgebra::{DMatrix, Vector3};

use crate::distmat::{HalfSquareMatrix, PointSet};
use crate::error::{Error, Result};

/// Gram eigenvalues below this fraction of the largest count as zero.
const POSITIVE_RTOL: f64 = 1e-12;
/// A fourth Gram eigenvalue above this fraction of the largest means the
/// input is not well described by three dimensions.
const DIMENSION_WARN_RTOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct Embedding {
    pub points: PointSet,
    /// Gram eigenvalues in descending signed order.
    pub gram_eigenvalues: Vec<f64>,
    pub dimensionality_warning: bool,
}

/// Classical multidimensional scaling into 3D.
///
/// The result is centred at the origin and expressed in principal axes.
/// Coordinates are only defined up to a rigid motion.
pub fn embed(h: &HalfSquareMatrix) -> Result<Embedding> {
    let n = h.n();
    if n < 4 {
        return Err(Error::validation(format!(
            "need at least 4 points, got {n}"
        )));
    }
    let j = DMatrix::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64);
    let mut gram = -(&j * h.as_matrix() * &j);
    gram = (&gram + gram.transpose()) * 0.5;

    let eig = nalgebra::SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();

    let top = values[0];
    if !(top > 0.0) || values[2] <= POSITIVE_RTOL * top {
        return Err(Error::degenerate(
            "fewer than three positive Gram eigenvalues; points are coplanar or collinear",
        ));
    }
    let warning = values
        .get(3)
        .is_some_and(|v| v.abs() > DIMENSION_WARN_RTOL * top)
        || values
            .last()
            .is_some_and(|v| -v > DIMENSION_WARN_RTOL * top);

    let mut axes = Vec::with_capacity(3);
    for &k in &order[..3] {
        let mut v = eig.eigenvectors.column(k).into_owned();
        v /= v.norm();
        if let Some(first) = v.iter().copied().find(|c| c.abs() > 1e-12) {
            if first < 0.0 {
                v.neg_mut();
            }
        }
        axes.push(v * eig.eigenvalues[k].sqrt());
    }
    let points = (0..n)
        .map(|i| Vector3::new(axes[0][i], axes[1][i], axes[2][i]))
        .collect();
    Ok(Embedding {
        points,
        gram_eigenvalues: values,
        dimensionality_warning: warning,
    })
}

/// 3D coordinates whose pairwise distances reproduce `h`.
pub fn coords_from_distances(h: &HalfSquareMatrix) -> Result<PointSet> {
    embed(h).map(|e| e.points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{platonic_points, PlatonicSolid};

    #[test]
    fn recovers_distances() {
        let p = platonic_points(PlatonicSolid::Icosahedron, 2.0).unwrap();
        let h = p.distances().unwrap().half_squares().unwrap();
        let e = embed(&h).unwrap();
        assert!(!e.dimensionality_warning);
        let back = e.points.distances().unwrap().half_squares().unwrap();
        assert!((back.as_matrix() - h.as_matrix()).amax() < 1e-12);
        assert!(e.points.centroid().norm() < 1e-12);
    }

    #[test]
    fn principal_axes() {
        let p = PointSet::from_coords(&[
            [0.0, 0.0, 0.0],
            [3.0, 0.0, 0.0],
            [0.0, 2.0, 0.0],
            [0.0, 0.0, 1.0],
            [1.0, 1.0, 1.0],
        ]);
        let e = embed(&p.distances().unwrap().half_squares().unwrap()).unwrap();
        let x = DMatrix::from_fn(5, 3, |i, k| e.points[i][k]);
        let cov = x.transpose() * &x;
        assert!(
            cov[(0, 1)].abs() < 1e-10 && cov[(0, 2)].abs() < 1e-10 && cov[(1, 2)].abs() < 1e-10
        );
        assert!(cov[(0, 0)] >= cov[(1, 1)] && cov[(1, 1)] >= cov[(2, 2)]);
    }

    #[test]
    fn coplanar_is_degenerate() {
        let p = PointSet::from_coords(&[
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [1.0, 1.0, 0.0],
        ]);
        let h = p.distances().unwrap().half_squares().unwrap();
        assert!(matches!(embed(&h), Err(Error::Degenerate(_))));
    }

    #[test]
    fn non_euclidean_input_warns() {
        // Great-circle distances on an octahedron are not Euclidean.
        let chords = crate::fixtures::octahedron();
        let arcs = chords.as_matrix().map(|c| 2.0 * (c / 2.0).min(1.0).asin());
        let h = HalfSquareMatrix::from_matrix(arcs.map(|a| a * a / 2.0)).unwrap();
        let e = embed(&h).unwrap();
        assert!(e.dimensionality_warning);
    }
}
