//! Dense least squares by singular value decomposition.
//!
//! The SVD is rank-revealing, so near-dependent columns are reported as a
//! failure with diagnostics instead of silently producing huge coefficients
//! (normal equations would square the condition number).

use nalgebra::{DMatrix, DVector, RealField};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Minimizer of ‖A·x − b‖₂ with its residual norm and the numerical rank.
#[derive(Debug, Clone)]
pub struct LeastSquares<F> {
    pub solution: Vec<F>,
    pub residual_norm: F,
    pub rank: usize,
}

/// Solves min ‖A·x − b‖₂. Errors if A is rank-deficient beyond the scaled
/// machine-precision tolerance.
pub fn solve_least_squares<F>(a: &DMatrix<F>, b: &DVector<F>) -> Result<LeastSquares<F>>
where
    F: Scalar + RealField,
{
    if a.nrows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} rows, rhs has {}",
            a.nrows(),
            b.len()
        )));
    }
    if a.ncols() == 0 || a.nrows() < a.ncols() {
        return Err(Error::InvalidInput(format!(
            "need nrows >= ncols >= 1, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let svd = a.clone().svd(true, true);
    let s_max = svd
        .singular_values
        .iter()
        .copied()
        .fold(F::zero(), |m, s| if s > m { s } else { m });
    let eps = s_max * F::from(a.nrows().max(a.ncols())).unwrap() * F::epsilon();
    let rank = svd.rank(eps);
    if rank < a.ncols() {
        let s_min = svd
            .singular_values
            .iter()
            .copied()
            .fold(s_max, |m, s| if s < m { s } else { m });
        return Err(Error::NumericalFailure(format!(
            "rank-deficient least-squares system: rank {rank} < {} columns \
             (singular values in [{s_min}, {s_max}], tolerance {eps})",
            a.ncols()
        )));
    }
    let x = svd
        .solve(b, eps)
        .map_err(|e| Error::NumericalFailure(format!("SVD solve failed: {e}")))?;
    let residual_norm = (a * &x - b).norm();
    Ok(LeastSquares {
        solution: x.iter().copied().collect(),
        residual_norm,
        rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_square_system() {
        let a = DMatrix::<f64>::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 4.0]);
        let b = DVector::from_column_slice(&[1.0, 2.0]);
        let ls = solve_least_squares(&a, &b).unwrap();
        assert!((ls.solution[0] - 0.5).abs() < 1e-14);
        assert!((ls.solution[1] - 0.5).abs() < 1e-14);
        assert!(ls.residual_norm < 1e-14);
        assert_eq!(ls.rank, 2);
    }

    #[test]
    fn overdetermined_regression() {
        // y = 1 + 2x sampled with a symmetric perturbation: the LS line is
        // exact and the residual is the perturbation norm.
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0 + 0.1, 3.0 - 0.1, 5.0 - 0.1, 7.0 + 0.1];
        let a = DMatrix::<f64>::from_fn(4, 2, |i, j| if j == 0 { 1.0 } else { xs[i] });
        let b = DVector::from_column_slice(&ys);
        let ls = solve_least_squares(&a, &b).unwrap();
        assert!((ls.solution[0] - 1.0).abs() < 1e-12);
        assert!((ls.solution[1] - 2.0).abs() < 1e-12);
        assert!((ls.residual_norm - 0.2).abs() < 1e-12);
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let a = DMatrix::<f64>::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        let b = DVector::from_column_slice(&[1.0, 2.0, 3.0]);
        match solve_least_squares(&a, &b) {
            Err(Error::NumericalFailure(msg)) => assert!(msg.contains("rank")),
            other => panic!("expected rank failure, got {other:?}"),
        }
    }

    #[test]
    fn underdetermined_rejected() {
        let a = DMatrix::<f64>::from_row_slice(1, 2, &[1.0, 2.0]);
        let b = DVector::from_column_slice(&[1.0]);
        assert!(solve_least_squares(&a, &b).is_err());
    }

    #[test]
    fn works_in_f32() {
        let a = DMatrix::<f32>::from_row_slice(2, 1, &[1.0, 1.0]);
        let b = DVector::<f32>::from_column_slice(&[2.0, 4.0]);
        let ls = solve_least_squares(&a, &b).unwrap();
        assert!((ls.solution[0] - 3.0).abs() < 1e-5);
    }
}
