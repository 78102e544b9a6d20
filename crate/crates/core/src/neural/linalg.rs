//! Dense linear algebra, carried out in `f64` through `nalgebra`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::scalar::Scalar;

/// Solves `(A^T A + ridge I) X = A^T B` for `X`.
///
/// `design` is `n x p` row-major, `targets` is `n x c` row-major; the result
/// is `p x c` row-major.
pub(crate) fn ridge_solve<T: Scalar>(
    design: &[Vec<T>],
    targets: &[Vec<T>],
    ridge: f64,
) -> Vec<Vec<T>> {
    let (gram, rhs) = normal_equations(design, targets, ridge);
    let p = gram.nrows();
    let solution = match gram.clone().cholesky() {
        Some(chol) => chol.solve(&rhs),
        None => gram
            .lu()
            .solve(&rhs)
            .unwrap_or_else(|| DMatrix::zeros(p, rhs.ncols())),
    };
    (0..p)
        .map(|i| {
            (0..solution.ncols())
                .map(|j| T::of(solution[(i, j)]))
                .collect()
        })
        .collect()
}

/// `(A^T A + ridge I, A^T B)` in `f64`.
pub(crate) fn normal_equations<T: Scalar>(
    design: &[Vec<T>],
    targets: &[Vec<T>],
    ridge: f64,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = design.len();
    let p = design.first().map_or(0, Vec::len);
    let c = targets.first().map_or(0, Vec::len);
    let a = DMatrix::from_fn(n, p, |i, j| design[i][j].as_f64());
    let b = DMatrix::from_fn(n, c, |i, j| targets[i][j].as_f64());
    let at = a.transpose();
    let mut gram = &at * &a;
    for i in 0..p {
        gram[(i, i)] += ridge;
    }
    (gram, at * b)
}

/// Eigenpairs of a symmetric matrix, largest eigenvalue first.
pub(crate) fn symmetric_eigen_desc(matrix: DMatrix<f64>) -> Vec<(f64, Vec<f64>)> {
    let eig = SymmetricEigen::new(matrix);
    let mut pairs: Vec<(f64, Vec<f64>)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &value)| (value, eig.eigenvectors.column(k).iter().copied().collect()))
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite eigenvalues"));
    pairs
}
