//! Dense complex linear algebra helpers built on nalgebra.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

const SCHUR_MAX_ITER: usize = 0;

/// All eigenvalues of a dense complex matrix, from its complex Schur form.
pub fn eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let triangular = (0..n).all(|j| (j + 1..n).all(|i| m[(i, j)] == Complex64::new(0.0, 0.0)));
    if triangular {
        return Ok(m.diagonal().iter().copied().collect());
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, SCHUR_MAX_ITER).ok_or(Error::EigFailure)?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Solves `a x = b` by LU with partial pivoting.
pub fn solve(a: DMatrix<Complex64>, b: &DVector<Complex64>) -> Option<DVector<Complex64>> {
    a.lu().solve(b)
}
