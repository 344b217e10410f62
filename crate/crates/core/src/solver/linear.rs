//! Sparse Cholesky solves with a residual contract.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Llt;
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::{Col, Side};

use super::sparse::CsrMatrix;
use super::SolveError;

/// Relative residual every solve must meet.
pub const RESIDUAL_TOL: f64 = 1e-10;

const MAX_REFINEMENT: usize = 3;

/// Cholesky factorization of a symmetric positive definite CSR matrix.
pub struct Factorization {
    matrix: CsrMatrix,
    llt: Option<Llt<usize, f64>>,
}

impl std::fmt::Debug for Factorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Factorization").field("n", &self.matrix.nrows).finish()
    }
}

/// Ratio of the largest to the smallest diagonal entry; a cheap lower bound
/// on the condition number of an SPD matrix.
pub fn diagonal_condition(a: &CsrMatrix) -> f64 {
    let d = a.diagonal();
    let max = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min = d.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

pub fn factorize(a: &CsrMatrix) -> Result<Factorization, SolveError> {
    assert_eq!(a.nrows, a.ncols, "factorize needs a square matrix");
    let n = a.nrows;
    if n == 0 {
        return Ok(Factorization {
            matrix: a.clone(),
            llt: None,
        });
    }
    // Upper triangle by rows is the lower triangle by columns.
    let mut col_ptr = Vec::with_capacity(n + 1);
    let mut row_idx = Vec::new();
    let mut vals = Vec::new();
    col_ptr.push(0);
    for i in 0..n {
        let (c, v) = a.row(i);
        for (&j, &x) in c.iter().zip(v) {
            if j >= i {
                row_idx.push(j);
                vals.push(x);
            }
        }
        col_ptr.push(row_idx.len());
    }
    let sym = SymbolicSparseColMatRef::new_checked(n, n, &col_ptr, None, &row_idx);
    let mat = SparseColMatRef::new(sym, &vals);
    let llt = mat.sp_cholesky(Side::Lower).map_err(|_| SolveError::NotPositiveDefinite {
        size: n,
        condition_estimate: diagonal_condition(a),
    })?;
    Ok(Factorization {
        matrix: a.clone(),
        llt: Some(llt),
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl Factorization {
    pub fn size(&self) -> usize {
        self.matrix.nrows
    }

    fn apply(&self, b: &[f64]) -> Vec<f64> {
        let llt = self.llt.as_ref().expect("non-empty factorization");
        let rhs = Col::<f64>::from_fn(b.len(), |i| b[i]);
        let x = llt.solve(&rhs);
        (0..b.len()).map(|i| x[i]).collect()
    }

    /// Solves `A x = b`; returns the solution and its relative residual.
    pub fn solve(&self, b: &[f64]) -> Result<(Vec<f64>, f64), SolveError> {
        assert_eq!(b.len(), self.size());
        let bn = norm(b);
        if self.size() == 0 || bn == 0.0 {
            return Ok((vec![0.0; b.len()], 0.0));
        }
        // Iterative refinement while it still reduces the residual.
        let mut x = self.apply(b);
        let mut best: Option<(Vec<f64>, f64)> = None;
        for _ in 0..=MAX_REFINEMENT {
            let ax = self.matrix.mul_vec(&x);
            let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
            let res = norm(&r) / bn;
            if !res.is_finite() || best.as_ref().is_some_and(|(_, b)| res >= *b) {
                break;
            }
            let done = res == 0.0;
            best = Some((x.clone(), res));
            if done {
                break;
            }
            let dx = self.apply(&r);
            for (xi, d) in x.iter_mut().zip(dx) {
                *xi += d;
            }
        }
        let (x, residual) = best.unwrap_or((x, f64::INFINITY));
        if !(residual <= RESIDUAL_TOL) {
            return Err(SolveError::Residual {
                residual,
                condition_estimate: diagonal_condition(&self.matrix),
            });
        }
        Ok((x, residual))
    }
}

/// One-shot solve of a symmetric positive definite system.
pub fn linear_solve(a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>, SolveError> {
    Ok(factorize(a)?.solve(b)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_two_by_two() {
        let i = CsrMatrix::identity(3);
        assert_eq!(linear_solve(&i, &[1.0, -2.0, 3.0]).unwrap(), vec![1.0, -2.0, 3.0]);
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 2.0)]);
        let x = linear_solve(&a, &[3.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn indefinite_is_reported() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)]);
        assert!(matches!(
            linear_solve(&a, &[1.0, 1.0]),
            Err(SolveError::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn empty_system() {
        let a = CsrMatrix::from_pattern(0, &[]);
        assert!(linear_solve(&a, &[]).unwrap().is_empty());
    }
}
