use faer::{c64, Mat, Side};

use crate::error::{invalid, Error, Result};

/// Eigenpairs of a dense Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns.
    pub vectors: Mat<c64>,
}

/// Eigenpairs of a dense real symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Mat<f64>,
}

fn max_abs<T>(m: &Mat<T>, f: impl Fn(&T) -> f64) -> f64 {
    let mut best = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            best = best.max(f(&m[(i, j)]));
        }
    }
    best
}

fn hermitian_defect(m: &Mat<c64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Dense Hermitian eigendecomposition.
///
/// Rejects inputs with `max|A - A*| > 1e-10 max|A|`.
pub fn hermitian_eigs(matrix: &Mat<c64>) -> Result<HermitianEigen> {
    if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
        return invalid("eigensolver needs a nonempty square matrix");
    }
    let scale = max_abs(matrix, |z| z.norm());
    let defect = hermitian_defect(matrix);
    if defect > 1e-10 * scale {
        return invalid(format!(
            "matrix is not Hermitian: defect {defect:.3e} against scale {scale:.3e}"
        ));
    }
    let evd = matrix
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let values = (0..s.nrows()).map(|i| s[i].re).collect();
    Ok(HermitianEigen {
        values,
        vectors: evd.U().to_owned(),
    })
}

/// Dense real symmetric eigendecomposition.
pub fn symmetric_eigs(matrix: &Mat<f64>) -> Result<SymmetricEigen> {
    if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
        return invalid("eigensolver needs a nonempty square matrix");
    }
    let scale = max_abs(matrix, |x| x.abs());
    let mut defect = 0.0f64;
    for j in 0..matrix.ncols() {
        for i in 0..j {
            defect = defect.max((matrix[(i, j)] - matrix[(j, i)]).abs());
        }
    }
    if defect > 1e-10 * scale {
        return invalid(format!("matrix is not symmetric: defect {defect:.3e}"));
    }
    let evd = matrix
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    Ok(SymmetricEigen {
        values: (0..s.nrows()).map(|i| s[i]).collect(),
        vectors: evd.U().to_owned(),
    })
}
