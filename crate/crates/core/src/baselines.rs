//! Reference estimators: the tetrahedron circumradius from its edge lengths
//! and two least-squares sphere fits that work on coordinates.

use nalgebra::{DMatrix, Matrix4, Vector3, Vector4};
use serde::Serialize;

use crate::distmat::{DistanceMatrix, PointSet};
use crate::error::{Error, Result};

/// `|det CM| / d_max⁶` below this is treated as a flat tetrahedron.
pub const CM_VOLUME_RTOL: f64 = 1e-12;
/// Normal-matrix condition number beyond which the algebraic fit refuses.
pub const FIT_MAX_CONDITION: f64 = 1e12;
pub const FIT_MAX_ITERATIONS: usize = 100_000;
pub const FIT_CENTER_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphereFit {
    pub center: [f64; 3],
    pub radius: f64,
    pub rms_residual: f64,
    pub iterations: usize,
}

impl SphereFit {
    fn new(points: &PointSet, center: Vector3<f64>, radius: f64, iterations: usize) -> Self {
        let ss: f64 = points
            .iter()
            .map(|p| ((p - center).norm() - radius).powi(2))
            .sum();
        SphereFit {
            center: center.into(),
            radius,
            rms_residual: (ss / points.len() as f64).sqrt(),
            iterations,
        }
    }

    pub fn center_vector(&self) -> Vector3<f64> {
        Vector3::from(self.center)
    }
}

/// Circumradius of a tetrahedron given its six edge lengths:
/// `R² = −½·det(D²)/det(CM)`, where `CM` is the bordered Cayley–Menger matrix.
pub fn cayley_menger_circumradius(d: &DistanceMatrix) -> Result<f64> {
    if d.n() != 4 {
        return Err(Error::validation(format!(
            "Cayley-Menger circumradius needs 4 points, got {}",
            d.n()
        )));
    }
    let sq = d.as_matrix().map(|v| v * v);
    let mut cm = DMatrix::from_element(5, 5, 1.0);
    cm[(0, 0)] = 0.0;
    cm.view_mut((1, 1), (4, 4)).copy_from(&sq);

    let det_cm = cm.determinant();
    let scale = d.max_entry().powi(6);
    if !(det_cm.abs() > CM_VOLUME_RTOL * scale) {
        return Err(Error::degenerate("tetrahedron volume is close to zero"));
    }
    let r2 = -0.5 * sq.determinant() / det_cm;
    if !(r2 > 0.0) {
        return Err(Error::NonSpherical(format!(
            "edge lengths do not form a tetrahedron (R² = {r2:e})"
        )));
    }
    Ok(r2.sqrt())
}

fn require_points(points: &PointSet) -> Result<()> {
    if points.len() < 4 {
        return Err(Error::validation(format!(
            "need at least 4 points, got {}",
            points.len()
        )));
    }
    if points
        .iter()
        .any(|p| !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()))
    {
        return Err(Error::validation("non-finite coordinate"));
    }
    Ok(())
}

/// Linear least-squares fit of `‖p − c‖² = R²`, solved for `c` and
/// `R² − ‖c‖²` after centring and scaling the points.
pub fn algebraic_sphere_fit(points: &PointSet) -> Result<SphereFit> {
    require_points(points)?;
    let mean = points.centroid();
    let scale = (points
        .iter()
        .map(|p| (p - mean).norm_squared())
        .sum::<f64>()
        / points.len() as f64)
        .sqrt();
    if !(scale > 0.0) {
        return Err(Error::degenerate("all points coincide"));
    }

    let mut normal = Matrix4::zeros();
    let mut rhs = Vector4::zeros();
    for p in points.iter() {
        let q = (p - mean) / scale;
        let row = Vector4::new(2.0 * q.x, 2.0 * q.y, 2.0 * q.z, 1.0);
        normal += row * row.transpose();
        rhs += row * q.norm_squared();
    }
    let eig = normal.symmetric_eigenvalues();
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), v| {
        (lo.min(v.abs()), hi.max(v.abs()))
    });
    if !(lo > 0.0) || hi / lo > FIT_MAX_CONDITION {
        return Err(Error::IllConditioned {
            condition: if lo > 0.0 { hi / lo } else { f64::INFINITY },
        });
    }
    let sol = normal
        .cholesky()
        .ok_or_else(|| Error::degenerate("normal matrix is not positive definite"))?
        .solve(&rhs);
    let c = Vector3::new(sol[0], sol[1], sol[2]);
    let r2 = sol[3] + c.norm_squared();
    if !(r2 > 0.0) {
        return Err(Error::degenerate("fitted squared radius is not positive"));
    }
    let center = mean + c * scale;
    Ok(SphereFit::new(points, center, r2.sqrt() * scale, 0))
}

/// Geometric least-squares fit by fixed-point iteration: `R` is the mean
/// distance to the centre, and the centre is the point centroid shifted by
/// `R` times the mean unit vector from the points to the centre.
pub fn iterative_sphere_fit(points: &PointSet, init: &SphereFit) -> Result<SphereFit> {
    require_points(points)?;
    let n = points.len() as f64;
    let mean = points.centroid();
    let mut center = init.center_vector();
    for iter in 1..=FIT_MAX_ITERATIONS {
        let mut radius = 0.0;
        let mut pull = Vector3::zeros();
        for p in points.iter() {
            let v = center - p;
            let len = v.norm();
            if len == 0.0 {
                return Err(Error::degenerate("centre coincides with a data point"));
            }
            radius += len;
            pull += v / len;
        }
        radius /= n;
        let next = mean + pull * (radius / n);
        let moved = (next - center).norm();
        center = next;
        if moved < FIT_CENTER_RTOL * radius {
            let radius = points.iter().map(|p| (p - center).norm()).sum::<f64>() / n;
            return Ok(SphereFit::new(points, center, radius, iter));
        }
    }
    Err(Error::NotConverged {
        iterations: FIT_MAX_ITERATIONS,
    })
}

/// Both fits in sequence, the iterative one seeded by the algebraic one.
pub fn fit_both(points: &PointSet) -> Result<(SphereFit, SphereFit)> {
    let algebraic = algebraic_sphere_fit(points)?;
    let iterative = iterative_sphere_fit(points, &algebraic)?;
    Ok((algebraic, iterative))
}
