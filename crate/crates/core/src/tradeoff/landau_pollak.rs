//! The Landau-Pollak relation and the overlap norms that feed it.

use serde::{Deserialize, Serialize};

use crate::complexity::StructuredProjector;
use crate::error::{Error, Result};
use crate::linalg::{operator_norm, ComplexMatrix};
use crate::protocol::{encode, Basis, Message};
use crate::state::{DensityOperator, Projector};

/// Slack on `lhs <= rhs`.
pub const LP_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpOutcome {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `sum_i tr(rho A_i) <= 1 + (sum_{i != j} ||A_i A_j||^2)^{1/2}`.
pub fn landau_pollak_check(projectors: &[Projector], rho: &DensityOperator) -> Result<LpOutcome> {
    let mats: Vec<&ComplexMatrix> = projectors.iter().map(Projector::matrix).collect();
    landau_pollak_matrices(&mats, rho.matrix())
}

/// Same relation on raw matrices; callers vouch that they are projectors.
pub(crate) fn landau_pollak_matrices(projectors: &[&ComplexMatrix], rho: &ComplexMatrix) -> Result<LpOutcome> {
    if let Some(bad) = projectors.iter().find(|p| p.rows() != rho.rows() || p.cols() != rho.cols()) {
        return Err(Error::Dimension(format!(
            "projector is {}x{}, state is {}x{}",
            bad.rows(),
            bad.cols(),
            rho.rows(),
            rho.cols()
        )));
    }
    let mut lhs = 0.0;
    for p in projectors {
        lhs += rho.trace_product(p)?.re;
    }
    let mut cross = 0.0;
    for (i, a) in projectors.iter().enumerate() {
        for (j, b) in projectors.iter().enumerate() {
            if i != j {
                cross += operator_norm(&a.matmul(b)?).powi(2);
            }
        }
    }
    let rhs = 1.0 + cross.sqrt();
    Ok(LpOutcome {
        lhs,
        rhs,
        holds: lhs <= rhs + LP_SLACK,
    })
}

/// `||X_x Z_z X_x||` computed from the dense `2^n` operators.
pub fn conjugate_overlap_norm(x: Message, z: Message, n: usize) -> Result<f64> {
    if x.n() != n || z.n() != n {
        return Err(Error::InvalidParameter(format!(
            "messages {x}, {z} do not both have length {n}"
        )));
    }
    let xx = ComplexMatrix::outer(&encode(x, Basis::X));
    let zz = ComplexMatrix::outer(&encode(z, Basis::Z));
    Ok(operator_norm(&xx.matmul(&zz)?.matmul(&xx)?))
}

/// Dense `||P Q||` for two structured projectors on the same space.
pub fn cross_norm_bound(p: &StructuredProjector, q: &StructuredProjector) -> Result<f64> {
    if p.layout != q.layout {
        return Err(Error::Dimension("projectors live on different spaces".into()));
    }
    if p.blocks.is_empty() || q.blocks.is_empty() {
        return Ok(0.0);
    }
    Ok(operator_norm(&p.to_dense()?.matmul(&q.to_dense()?)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::breidbart_vector;
    use crate::linalg::C64;

    fn proj(v: [f64; 2]) -> Projector {
        let k = [C64::new(v[0], 0.0), C64::new(v[1], 0.0)];
        Projector::new(ComplexMatrix::outer(&k), vec![2]).unwrap()
    }

    #[test]
    fn single_projector_never_exceeds_one() {
        let rho = DensityOperator::maximally_mixed(vec![2]).unwrap();
        let out = landau_pollak_check(&[proj([1.0, 0.0])], &rho).unwrap();
        assert_eq!(out.rhs, 1.0);
        assert!((out.lhs - 0.5).abs() < 1e-15);
        assert!(out.holds);
    }

    #[test]
    fn bisecting_angle_case() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let rho = DensityOperator::pure(&breidbart_vector(), vec![2]).unwrap();
        let out = landau_pollak_check(&[proj([1.0, 0.0]), proj([h, h])], &rho).unwrap();
        let expected = 2.0 * (std::f64::consts::PI / 8.0).cos().powi(2);
        assert!((out.lhs - expected).abs() < 1e-12);
        assert!((out.lhs - 1.7071067811865475).abs() < 1e-12);
        assert!((out.rhs - 2.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let rho = DensityOperator::maximally_mixed(vec![2, 2]).unwrap();
        assert!(landau_pollak_check(&[proj([1.0, 0.0])], &rho).is_err());
    }

    #[test]
    fn one_qubit_overlaps_are_half() {
        for x in Message::all(1) {
            for z in Message::all(1) {
                assert!((conjugate_overlap_norm(x, z, 1).unwrap() - 0.5).abs() < 1e-12);
            }
        }
    }
}
