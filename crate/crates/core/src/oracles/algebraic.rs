//! Dual solution of a linear algebraic system `Āx = b`: stationarity of the
//! dual functional gives `−ĀĀᵀz = b`, and the primal unknown is recovered as
//! `x = −Āᵀz`.

use nalgebra::{DMatrix, DVector};

/// Acceptance threshold on `‖Āx − b‖ / ‖b‖`.
pub const CONSISTENCY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum AlgebraicOutcome {
    Solved { x: DVector<f64>, relative_residual: f64 },
    /// `b` is not in the column space of `Ā`.
    NoSolution { relative_residual: f64 },
}

impl AlgebraicOutcome {
    pub fn solution(&self) -> Option<&DVector<f64>> {
        match self {
            AlgebraicOutcome::Solved { x, .. } => Some(x),
            AlgebraicOutcome::NoSolution { .. } => None,
        }
    }
}

/// Least-norm solve of `−ĀĀᵀz = b` through the SVD, followed by the
/// residual test on the recovered `x`.
pub fn algebraic_dual_demo(abar: &DMatrix<f64>, b: &DVector<f64>) -> AlgebraicOutcome {
    assert_eq!(abar.nrows(), b.len(), "row count of Ā must match b");
    let gram = -(abar * abar.transpose());
    let svd = gram.svd(true, true);
    let cutoff = f64::EPSILON * svd.singular_values.max() * b.len().max(1) as f64;
    let z = svd
        .solve(b, cutoff)
        .unwrap_or_else(|_| DVector::zeros(b.len()));
    let x = -(abar.transpose() * z);
    let bnorm = b.norm();
    let res = (abar * &x - b).norm();
    let relative_residual = if bnorm > 0.0 { res / bnorm } else { res };
    if relative_residual <= CONSISTENCY_TOL {
        AlgebraicOutcome::Solved { x, relative_residual }
    } else {
        AlgebraicOutcome::NoSolution { relative_residual }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_singular_examples() {
        let out = algebraic_dual_demo(&DMatrix::identity(3, 3), &DVector::from_vec(vec![1.0, 2.0, 3.0]));
        let x = out.solution().unwrap();
        for (i, v) in x.iter().enumerate() {
            assert!((v - (i + 1) as f64).abs() < 1e-14);
        }
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let out = algebraic_dual_demo(&a, &DVector::from_vec(vec![0.0, 1.0]));
        assert!(matches!(out, AlgebraicOutcome::NoSolution { .. }));
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 0.0, 0.0, 1.0, 1.0]);
        let out = algebraic_dual_demo(&a, &DVector::zeros(2));
        assert_eq!(out.solution().unwrap().norm(), 0.0);
    }
}
