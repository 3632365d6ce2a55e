//! Cyclic Jacobi eigensolver for Hermitian matrices and a one-sided
//! (Hestenes) Jacobi SVD used for operator norms.
//!
//! Both sweeps visit index pairs in the fixed order `(0,1), (0,2), ..,
//! (n-2,n-1)` so results are reproducible run to run.

use crate::error::{Error, Result};
use crate::linalg::matrix::{ComplexMatrix, C64, ZERO};
use crate::tolerance;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in descending order with matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenSystem {
    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.vectors.column(i)
    }

    /// `sum_i lambda_i v_i v_i^dagger`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (i, &lambda) in self.values.iter().enumerate() {
            let v = self.vector(i);
            out.add_scaled_assign(&ComplexMatrix::outer(&v), C64::new(lambda, 0.0))
                .expect("same shape");
        }
        out
    }
}

/// Unitary 2x2 block `[[u00, u01], [u10, u11]]` that diagonalizes the
/// Hermitian block `[[app, apq], [conj(apq), aqq]]` under `U^dagger A U`.
fn jacobi_rotation(app: f64, aqq: f64, apq: C64) -> [C64; 4] {
    let r = apq.norm();
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let e = phase.conj();
    [
        C64::new(c, 0.0),
        C64::new(s, 0.0),
        e * (-s),
        e * c,
    ]
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Fails when the input is not Hermitian within the structural
/// tolerance.
pub fn hermitian_eigensystem(a: &ComplexMatrix) -> Result<EigenSystem> {
    if !a.is_square() {
        return Err(Error::Validation(format!(
            "eigensystem of non-square {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let violation = a.hermitian_violation();
    if violation > tolerance::STRUCTURAL {
        return Err(Error::Validation(format!(
            "matrix is not Hermitian (violation {violation:e})"
        )));
    }
    Ok(jacobi_eigen(a.hermitian_part()))
}

fn jacobi_eigen(mut m: ComplexMatrix) -> EigenSystem {
    let n = m.rows();
    let mut v = ComplexMatrix::identity(n);
    let threshold = 1e-15 * m.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.norm() <= threshold || apq == ZERO {
                    continue;
                }
                rotated = true;
                let u = jacobi_rotation(m[(p, p)].re, m[(q, q)].re, apq);
                rotate_columns(&mut m, p, q, &u);
                rotate_rows(&mut m, p, q, &u);
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
                rotate_columns(&mut v, p, q, &u);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    EigenSystem { values, vectors }
}

/// `M <- M U` restricted to columns p, q.
fn rotate_columns(m: &mut ComplexMatrix, p: usize, q: usize, u: &[C64; 4]) {
    for k in 0..m.rows() {
        let a = m[(k, p)];
        let b = m[(k, q)];
        m[(k, p)] = a * u[0] + b * u[2];
        m[(k, q)] = a * u[1] + b * u[3];
    }
}

/// `M <- U^dagger M` restricted to rows p, q.
fn rotate_rows(m: &mut ComplexMatrix, p: usize, q: usize, u: &[C64; 4]) {
    for k in 0..m.cols() {
        let a = m[(p, k)];
        let b = m[(q, k)];
        m[(p, k)] = u[0].conj() * a + u[2].conj() * b;
        m[(q, k)] = u[1].conj() * a + u[3].conj() * b;
    }
}

/// Singular values in descending order, by one-sided Jacobi orthogonalization
/// of the columns.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let mut m = a.clone();
    let (rows, cols) = (m.rows(), m.cols());
    let col_dot = |m: &ComplexMatrix, p: usize, q: usize| -> C64 {
        (0..rows).map(|k| m[(k, p)].conj() * m[(k, q)]).sum()
    };
    let col_norm2 = |m: &ComplexMatrix, p: usize| -> f64 {
        (0..rows).map(|k| m[(k, p)].norm_sqr()).sum()
    };

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let alpha = col_norm2(&m, p);
                let beta = col_norm2(&m, q);
                let gamma = col_dot(&m, p, q);
                if gamma.norm() <= 1e-15 * (alpha * beta).sqrt() || gamma == ZERO {
                    continue;
                }
                rotated = true;
                let u = jacobi_rotation(alpha, beta, gamma);
                rotate_columns(&mut m, p, q, &u);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut values: Vec<f64> = (0..cols).map(|p| col_norm2(&m, p).sqrt()).collect();
    values.sort_by(|x, y| y.total_cmp(x));
    values
}

/// Largest singular value.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    if a.rows() == 0 || a.cols() == 0 {
        return 0.0;
    }
    // Orthogonalizing the shorter dimension is cheaper.
    let values = if a.cols() <= a.rows() {
        singular_values(a)
    } else {
        singular_values(&a.adjoint())
    };
    values.first().copied().unwrap_or(0.0)
}

/// `sqrt(lambda_max(A^dagger A))` through the eigensolver; an independent
/// route to the operator norm.
pub fn operator_norm_via_eigen(a: &ComplexMatrix) -> Result<f64> {
    let gram = a.adjoint().matmul(a)?;
    let eig = hermitian_eigensystem(&gram.hermitian_part())?;
    Ok(eig.values.first().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eigenvalue(a: &ComplexMatrix) -> f64 {
    let eig = jacobi_eigen(a.hermitian_part());
    eig.values.last().copied().unwrap_or(0.0)
}
