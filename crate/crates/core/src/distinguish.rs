//! Perfect distinguishability of receiver states and the per-class
//! projection-valued measures used as decoders.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigensystem, ComplexMatrix, C64};
use crate::protocol::Message;
use crate::state::{DensityOperator, Projector};
use crate::tolerance;

/// Projector onto the eigenvectors of `rho` with eigenvalue above `tol`.
pub fn support_projector(rho: &DensityOperator, tol: f64) -> Result<Projector> {
    let eig = hermitian_eigensystem(rho.matrix())?;
    let vectors: Vec<Vec<C64>> = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > tol)
        .map(|(i, _)| eig.vector(i))
        .collect();
    Projector::from_orthonormal(&vectors, rho.dims().to_vec())
}

fn check_same_dims(states: &[DensityOperator]) -> Result<()> {
    if let Some(first) = states.first() {
        if let Some(bad) = states.iter().find(|s| s.dims() != first.dims()) {
            return Err(Error::Dimension(format!(
                "state dims {:?} differ from {:?}",
                bad.dims(),
                first.dims()
            )));
        }
    }
    Ok(())
}

/// `overlaps[i][j] = tr(rho_i supp(rho_j))`.
fn overlap_table(states: &[DensityOperator], supports: &[Projector]) -> Result<Vec<Vec<f64>>> {
    states
        .par_iter()
        .map(|s| {
            supports
                .iter()
                .map(|p| s.expectation(p.matrix()))
                .collect::<Result<Vec<f64>>>()
        })
        .collect()
}

fn orthogonal(overlaps: &[Vec<f64>], i: usize, j: usize, tol: f64) -> bool {
    overlaps[i][j] <= tol && overlaps[j][i] <= tol
}

/// Support projectors of the family when every pair has orthogonal
/// supports; `None` otherwise. Pairwise orthogonal supports give mutually
/// orthogonal projectors, hence a joint sub-PVM.
pub fn perfectly_distinguishable(
    states: &[DensityOperator],
    tol: f64,
) -> Result<Option<Vec<Projector>>> {
    check_same_dims(states)?;
    let supports = states
        .par_iter()
        .map(|s| support_projector(s, tolerance::SPECTRAL))
        .collect::<Result<Vec<_>>>()?;
    let overlaps = overlap_table(states, &supports)?;
    for i in 0..states.len() {
        for j in (i + 1)..states.len() {
            if !orthogonal(&overlaps, i, j, tol) {
                return Ok(None);
            }
        }
    }
    Ok(Some(supports))
}

/// A set of messages whose receiver states are perfectly distinguishable,
/// with one decoding projector per member (present only for classes of two
/// or more members).
#[derive(Debug, Clone, PartialEq)]
pub struct DistinguishableClass {
    pub members: Vec<Message>,
    pub pvm: Option<Vec<Projector>>,
}

impl DistinguishableClass {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn smallest_member(&self) -> Message {
        *self.members.iter().min().expect("classes are nonempty")
    }

    /// Largest violations of the three decoder conditions: mutual
    /// orthogonality, sub-normalization, and perfect reconstruction.
    pub fn pvm_violations(&self, states: &[DensityOperator]) -> Result<PvmViolations> {
        let Some(pvm) = &self.pvm else {
            return Ok(PvmViolations::default());
        };
        let d = pvm.first().map_or(0, Projector::dim);
        let mut ortho: f64 = 0.0;
        let mut sum = ComplexMatrix::zeros(d, d);
        for (i, p) in pvm.iter().enumerate() {
            sum.add_scaled_assign(p.matrix(), C64::new(1.0, 0.0))?;
            for (j, q) in pvm.iter().enumerate() {
                let prod = p.matrix().matmul(q.matrix())?;
                let target = if i == j {
                    p.matrix().clone()
                } else {
                    ComplexMatrix::zeros(d, d)
                };
                ortho = ortho.max(prod.max_abs_diff(&target)?);
            }
        }
        // sum <= 1  <=>  max eigenvalue of sum <= 1
        let top = hermitian_eigensystem(&sum.hermitian_part())?.values[0];
        let mut recon: f64 = 0.0;
        for (i, m) in self.members.iter().enumerate() {
            for (j, p) in pvm.iter().enumerate() {
                let v = states[m.index()].expectation(p.matrix())?;
                let target = if i == j { 1.0 } else { 0.0 };
                recon = recon.max((v - target).abs());
            }
        }
        Ok(PvmViolations {
            orthogonality: ortho,
            subnormalization: (top - 1.0).max(0.0),
            reconstruction: recon,
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct PvmViolations {
    pub orthogonality: f64,
    pub subnormalization: f64,
    pub reconstruction: f64,
}

/// Greedy partition of the full message set (states indexed by message)
/// into perfectly distinguishable classes. Messages are visited in
/// lexicographic order; each joins the first class whose members all have
/// supports orthogonal to its own, or opens a new class.
pub fn distinguishable_partition(
    states: &[DensityOperator],
    n: usize,
    tol: f64,
) -> Result<Vec<DistinguishableClass>> {
    if states.len() != 1 << n {
        return Err(Error::Dimension(format!(
            "family has {} states, expected 2^{n}",
            states.len()
        )));
    }
    check_same_dims(states)?;
    let supports = states
        .par_iter()
        .map(|s| support_projector(s, tolerance::SPECTRAL))
        .collect::<Result<Vec<_>>>()?;
    let overlaps = overlap_table(states, &supports)?;

    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..states.len() {
        match classes
            .iter_mut()
            .find(|class| class.iter().all(|&j| orthogonal(&overlaps, i, j, tol)))
        {
            Some(class) => class.push(i),
            None => classes.push(vec![i]),
        }
    }

    Ok(classes
        .into_iter()
        .map(|idx| {
            let members = idx
                .iter()
                .map(|&i| Message::new(i, n).expect("index in range"))
                .collect();
            let pvm = (idx.len() >= 2).then(|| idx.iter().map(|&i| supports[i].clone()).collect());
            DistinguishableClass { members, pvm }
        })
        .collect())
}
