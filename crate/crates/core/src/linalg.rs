//! Symmetric eigendecomposition helpers shared by the estimators and the
//! coordinate embedding.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Eigenpairs of a symmetric matrix ordered by descending absolute value.
///
/// Ties in |λ| keep the order of the signed values (larger first). Each
/// eigenvector is normalised so that its first non-negligible component is
/// positive, which makes the decomposition reproducible across platforms.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: DMatrix<f64>,
}

impl SymEigen {
    pub fn new(m: &DMatrix<f64>) -> Self {
        let eig = SymmetricEigen::new(m.clone());
        let n = eig.eigenvalues.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            let (la, lb) = (eig.eigenvalues[a], eig.eigenvalues[b]);
            lb.abs()
                .total_cmp(&la.abs())
                .then_with(|| lb.total_cmp(&la))
        });

        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let mut vectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            let mut col = eig.eigenvectors.column(src).into_owned();
            let norm = col.norm();
            if norm > 0.0 {
                col /= norm;
            }
            if let Some(first) = col.iter().copied().find(|c| c.abs() > 1e-12) {
                if first < 0.0 {
                    col.neg_mut();
                }
            }
            vectors.set_column(dst, &col);
        }
        SymEigen { values, vectors }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, k: usize) -> DVector<f64> {
        self.vectors.column(k).into_owned()
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_radius(&self) -> f64 {
        self.values.first().map_or(0.0, |v| v.abs())
    }

    /// Ratio of largest to smallest |λ|; infinite when singular.
    pub fn condition(&self) -> f64 {
        let max = self.spectral_radius();
        let min = self.values.last().map_or(0.0, |v| v.abs());
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// Solves `A·x = rhs` with the given reciprocal eigenvalues
    /// (`inverted[k]` is either `1/λ_k` or 0 for a truncated direction).
    pub fn apply_inverse(&self, inverted: &[f64], rhs: &DVector<f64>) -> DVector<f64> {
        let coeffs = self.vectors.tr_mul(rhs);
        let scaled = DVector::from_iterator(
            coeffs.len(),
            coeffs.iter().zip(inverted).map(|(c, inv)| c * inv),
        );
        &self.vectors * scaled
    }
}
