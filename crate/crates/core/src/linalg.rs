//! Small dense symmetric-matrix helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative eigenvalue floor below which a direction is treated as null.
pub const PINV_REL_FLOOR: f64 = 1e-10;

/// Relative (to the trace) tolerance for negative eigenvalues of a PSD matrix.
pub const PSD_REL_TOL: f64 = 1e-10;

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Ratio of the largest to the smallest eigenvalue magnitude.
pub fn condition_estimate(m: &DMatrix<f64>) -> f64 {
    let eig = SymmetricEigen::new(symmetrize(m));
    let (lo, hi) = eig.eigenvalues.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), v| {
        (lo.min(v.abs()), hi.max(v.abs()))
    });
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Moore-Penrose inverse of a symmetric matrix via its eigendecomposition.
///
/// Eigenvalues below `PINV_REL_FLOOR * largest` are dropped.
pub fn pinv_symmetric(m: &DMatrix<f64>, context: &'static str) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(symmetrize(m));
    let largest = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let floor = PINV_REL_FLOOR * largest;
    if !largest.is_finite() || largest <= 0.0 {
        return Err(Error::EigenFloor {
            context,
            largest,
            floor,
        });
    }
    let inv: DVector<f64> = eig.eigenvalues.map(|v| if v > floor { 1.0 / v } else { 0.0 });
    let v = &eig.eigenvectors;
    Ok(v * DMatrix::from_diagonal(&inv) * v.transpose())
}

/// Factor `L` with `L * L^T = m` for a positive semidefinite `m`.
///
/// Eigenvalues within `PSD_REL_TOL * trace` of zero are clamped to zero, so
/// exactly rank-deficient covariances factor without error.
pub fn psd_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    psd_sqrt_with_scale(m, m.trace().abs())
}

/// As [`psd_sqrt`] but with the tolerance taken relative to `scale`.
pub(crate) fn psd_sqrt_with_scale(m: &DMatrix<f64>, scale: f64) -> Result<DMatrix<f64>> {
    if m.nrows() == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(symmetrize(m));
    let tolerance = PSD_REL_TOL * scale;
    let min = eig.eigenvalues.min();
    if min < -tolerance {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
            tolerance,
        });
    }
    // roundoff-sized eigenvalues of either sign are null directions
    let roots = eig.eigenvalues.map(|v| if v > tolerance { v.sqrt() } else { 0.0 });
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&roots))
}
