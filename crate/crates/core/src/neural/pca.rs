use nalgebra::DMatrix;

use crate::error::{check_dim, invalid, Result};
use crate::scalar::Scalar;

use super::linalg::symmetric_eigen_desc;

/// Projection onto the leading principal components.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaProjection<T> {
    pub mean: Vec<T>,
    /// Orthonormal rows, one per component.
    pub basis: Vec<Vec<T>>,
    /// Eigenvalue of each retained component, non-increasing.
    pub variances: Vec<T>,
    pub explained_fraction: T,
}

impl<T: Scalar> PcaProjection<T> {
    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn components(&self) -> usize {
        self.basis.len()
    }

    /// Maps a projected vector back into input space.
    pub fn reconstruct(&self, z: &[T]) -> Vec<T> {
        let mut x = self.mean.clone();
        for (row, &coef) in self.basis.iter().zip(z) {
            for (xi, &b) in x.iter_mut().zip(row) {
                *xi += coef * b;
            }
        }
        x
    }

    pub(crate) fn project_unchecked(&self, x: &[T]) -> Vec<T> {
        self.basis
            .iter()
            .map(|row| {
                row.iter()
                    .zip(x.iter().zip(&self.mean))
                    .map(|(&b, (&xi, &m))| b * (xi - m))
                    .sum()
            })
            .collect()
    }
}

/// Smallest set of leading components explaining at least `variance_target`
/// of the sample variance.
pub fn pca_fit<T: Scalar>(samples: &[Vec<T>], variance_target: f64) -> Result<PcaProjection<T>> {
    if samples.len() < 2 {
        return invalid(format!(
            "PCA needs at least 2 samples, got {}",
            samples.len()
        ));
    }
    if !(variance_target > 0.0 && variance_target <= 1.0) {
        return invalid(format!(
            "variance target must lie in (0, 1], got {variance_target}"
        ));
    }
    let dim = samples[0].len();
    if dim == 0 {
        return invalid("PCA on zero-dimensional samples");
    }
    for s in samples {
        check_dim(dim, s.len())?;
    }
    let n = samples.len() as f64;
    let mut mean = vec![0.0; dim];
    for s in samples {
        for (m, v) in mean.iter_mut().zip(s) {
            *m += v.as_f64();
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let centered = DMatrix::from_fn(samples.len(), dim, |i, j| samples[i][j].as_f64() - mean[j]);
    let cov = (centered.transpose() * &centered) / (n - 1.0);
    let pairs = symmetric_eigen_desc(cov);

    let total: f64 = pairs.iter().map(|p| p.0.max(0.0)).sum();
    let mut kept = 0;
    let mut explained = 0.0;
    if total > 0.0 {
        let goal = variance_target * total * (1.0 - 1e-10);
        for p in &pairs {
            explained += p.0.max(0.0);
            kept += 1;
            if explained >= goal {
                break;
            }
        }
    } else {
        kept = 1;
        explained = 1.0;
    }
    let fraction = if total > 0.0 {
        (explained / total).min(1.0)
    } else {
        1.0
    };
    Ok(PcaProjection {
        mean: mean.into_iter().map(T::of).collect(),
        basis: pairs[..kept]
            .iter()
            .map(|p| p.1.iter().map(|&v| T::of(v)).collect())
            .collect(),
        variances: pairs[..kept].iter().map(|p| T::of(p.0.max(0.0))).collect(),
        explained_fraction: T::of(fraction),
    })
}

/// Subtracts the mean and applies the basis.
pub fn pca_project<T: Scalar>(p: &PcaProjection<T>, x: &[T]) -> Result<Vec<T>> {
    check_dim(p.input_dim(), x.len())?;
    Ok(p.project_unchecked(x))
}
