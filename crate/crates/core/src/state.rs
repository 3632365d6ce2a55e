//! Density operators, projectors and state validation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigensystem, min_eigenvalue, partial_trace, total_dim, ComplexMatrix, C64,
};
use crate::tolerance;

fn check_dims(matrix: &ComplexMatrix, dims: &[usize]) -> Result<()> {
    if !matrix.is_square() {
        return Err(Error::Dimension(format!(
            "operator must be square, got {}x{}",
            matrix.rows(),
            matrix.cols()
        )));
    }
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(Error::Dimension(format!(
            "subsystem dimensions must be >= 2, got {dims:?}"
        )));
    }
    if total_dim(dims)? != matrix.rows() {
        return Err(Error::Dimension(format!(
            "dims {dims:?} do not multiply to side {}",
            matrix.rows()
        )));
    }
    Ok(())
}

/// Pass/fail per property with the size of each violation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateReport {
    pub hermitian: bool,
    pub psd: bool,
    pub unit_trace: bool,
    pub hermitian_violation: f64,
    pub trace_violation: f64,
    pub min_eigenvalue: f64,
}

impl StateReport {
    pub fn passed(&self) -> bool {
        self.hermitian && self.psd && self.unit_trace
    }
}

/// Checks Hermiticity, unit trace and positivity of a square matrix.
/// Positivity is judged on the Hermitian part.
pub fn validate_state(rho: &ComplexMatrix, tol: f64) -> StateReport {
    if !rho.is_square() {
        return StateReport {
            hermitian: false,
            psd: false,
            unit_trace: false,
            hermitian_violation: f64::INFINITY,
            trace_violation: f64::INFINITY,
            min_eigenvalue: f64::NEG_INFINITY,
        };
    }
    let hermitian_violation = rho.hermitian_violation();
    let trace_violation = (rho.trace() - C64::new(1.0, 0.0)).norm();
    let min_eig = min_eigenvalue(rho);
    StateReport {
        hermitian: hermitian_violation <= tol,
        psd: min_eig >= -tol,
        unit_trace: trace_violation <= tol,
        hermitian_violation,
        trace_violation,
        min_eigenvalue: min_eig,
    }
}

/// Unit-trace positive semidefinite Hermitian operator with its subsystem
/// dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityOperator {
    /// Validates all three state properties at the structural tolerance.
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        check_dims(&matrix, &dims)?;
        let report = validate_state(&matrix, tolerance::STRUCTURAL);
        if !report.passed() {
            return Err(Error::Validation(format!("not a density operator: {report:?}")));
        }
        Ok(Self { matrix, dims })
    }

    /// Skips the eigenvalue check; Hermiticity and trace are still enforced.
    /// For outputs of completely positive maps, which are positive by
    /// construction.
    pub(crate) fn from_cp_output(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        check_dims(&matrix, &dims)?;
        let herm = matrix.hermitian_violation();
        let tr = (matrix.trace() - C64::new(1.0, 0.0)).norm();
        if herm > tolerance::STRUCTURAL || tr > tolerance::STRUCTURAL {
            return Err(Error::Validation(format!(
                "channel output is not a state (hermitian violation {herm:e}, trace violation {tr:e})"
            )));
        }
        Ok(Self { matrix, dims })
    }

    pub fn pure(ket: &[C64], dims: Vec<usize>) -> Result<Self> {
        Self::new(ComplexMatrix::outer(ket), dims)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let d = total_dim(&dims)?;
        Self::new(ComplexMatrix::identity(d).scale_real(1.0 / d as f64), dims)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `rho (x) sigma` with concatenated dimension lists.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let matrix = self.matrix.kron(&other.matrix)?;
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Ok(Self { matrix, dims })
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let matrix = partial_trace(&self.matrix, &self.dims, keep)?;
        let mut keep_sorted = keep.to_vec();
        keep_sorted.sort_unstable();
        let dims = keep_sorted.iter().map(|&k| self.dims[k]).collect();
        Ok(Self { matrix, dims })
    }

    /// `tr(rho A)`, real part.
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<f64> {
        Ok(self.matrix.trace_product(op)?.re)
    }

    /// Convex combination `w rho + (1 - w) sigma`.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::Dimension(format!(
                "mixing states with dims {:?} and {:?}",
                self.dims, other.dims
            )));
        }
        let mut m = self.matrix.scale_real(w);
        m.add_scaled_assign(&other.matrix, C64::new(1.0 - w, 0.0))?;
        Ok(Self {
            matrix: m,
            dims: self.dims.clone(),
        })
    }
}

/// Hermitian idempotent operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl Projector {
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        check_dims(&matrix, &dims)?;
        let herm = matrix.hermitian_violation();
        if herm > tolerance::STRUCTURAL {
            return Err(Error::Validation(format!(
                "projector is not Hermitian (violation {herm:e})"
            )));
        }
        let idem = matrix.matmul(&matrix)?.max_abs_diff(&matrix)?;
        if idem > tolerance::IDEMPOTENT {
            return Err(Error::Validation(format!(
                "projector is not idempotent (violation {idem:e})"
            )));
        }
        Ok(Self { matrix, dims })
    }

    pub fn zero(dims: Vec<usize>) -> Result<Self> {
        let d = total_dim(&dims)?;
        Self::new(ComplexMatrix::zeros(d, d), dims)
    }

    pub fn identity(dims: Vec<usize>) -> Result<Self> {
        let d = total_dim(&dims)?;
        Self::new(ComplexMatrix::identity(d), dims)
    }

    /// Projector onto the span of the given orthonormal vectors.
    pub fn from_orthonormal(vectors: &[Vec<C64>], dims: Vec<usize>) -> Result<Self> {
        let d = total_dim(&dims)?;
        let mut m = ComplexMatrix::zeros(d, d);
        for v in vectors {
            if v.len() != d {
                return Err(Error::Dimension(format!(
                    "vector of length {} for dimension {d}",
                    v.len()
                )));
            }
            m.add_scaled_assign(&ComplexMatrix::outer(v), C64::new(1.0, 0.0))?;
        }
        Self::new(m, dims)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Trace of the projector, rounded to the nearest integer.
    pub fn rank(&self) -> usize {
        self.matrix.trace().re.round().max(0.0) as usize
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eigensystem(&self.matrix)?.values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximally_mixed_qubit_passes() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        let r = validate_state(&half, 1e-10);
        assert!(r.passed());
    }

    #[test]
    fn negative_eigenvalue_fails_psd_only() {
        let m = ComplexMatrix::real_diagonal(&[1.5, -0.5]);
        let r = validate_state(&m, 1e-10);
        assert!(!r.psd);
        assert!(r.unit_trace);
        assert!(r.hermitian);
        assert!((r.min_eigenvalue + 0.5).abs() < 1e-12);
        assert!(DensityOperator::new(m, vec![2]).is_err());
    }

    #[test]
    fn non_hermitian_reported() {
        let m = ComplexMatrix::from_real_rows(&[&[0.5, 0.3], &[0.0, 0.5]]);
        let r = validate_state(&m, 1e-10);
        assert!(!r.hermitian);
        assert!((r.hermitian_violation - 0.3).abs() < 1e-12);
    }

    #[test]
    fn dims_must_match() {
        let m = ComplexMatrix::identity(4).scale_real(0.25);
        assert!(DensityOperator::new(m.clone(), vec![2, 3]).is_err());
        assert!(DensityOperator::new(m.clone(), vec![4, 1]).is_err());
        let rho = DensityOperator::new(m, vec![2, 2]).unwrap();
        let reduced = rho.partial_trace(&[1]).unwrap();
        assert_eq!(reduced.dims(), &[2]);
        assert!((reduced.matrix().trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn projector_checks() {
        assert!(Projector::new(ComplexMatrix::real_diagonal(&[1.0, 0.5]), vec![2]).is_err());
        let p = Projector::new(ComplexMatrix::real_diagonal(&[1.0, 0.0]), vec![2]).unwrap();
        assert_eq!(p.rank(), 1);
        let ev = p.eigenvalues().unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-12 && ev[1].abs() < 1e-12);
    }

    #[test]
    fn tensor_concatenates_dims() {
        let a = DensityOperator::maximally_mixed(vec![2]).unwrap();
        let b = DensityOperator::maximally_mixed(vec![3]).unwrap();
        let ab = a.tensor(&b).unwrap();
        assert_eq!(ab.dims(), &[2, 3]);
        assert_eq!(ab.dim(), 6);
    }
}
