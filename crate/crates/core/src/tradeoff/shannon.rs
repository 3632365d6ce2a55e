//! Shannon-information counterpart of the trade-off: outcome tables for a
//! receiver's measurement and their mutual information with Alice's message.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, ComplexMatrix};
use crate::protocol::{receiver_state, Basis, Message, ProtocolInstance, Side};
use crate::tolerance;

/// Joint probabilities `P(message, outcome)`, one row per message.
pub type JointTable = Vec<Vec<f64>>;

/// Slack on `I_BZ + I_EX <= N`.
pub const SHANNON_SLACK: f64 = 1e-9;
/// How far a joint table may sum away from one.
pub const TABLE_NORMALIZATION: f64 = 1e-12;

fn validate_povm(povm: &[ComplexMatrix], dim: usize) -> Result<()> {
    if povm.is_empty() {
        return Err(Error::InvalidPovm("no elements".into()));
    }
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for (k, m) in povm.iter().enumerate() {
        if m.rows() != dim || m.cols() != dim {
            return Err(Error::Dimension(format!(
                "POVM element {k} is {}x{}, receiver space has dimension {dim}",
                m.rows(),
                m.cols()
            )));
        }
        if m.hermitian_violation() > tolerance::COMPLETENESS {
            return Err(Error::InvalidPovm(format!("element {k} is not Hermitian")));
        }
        if min_eigenvalue(m) < -tolerance::SPECTRAL {
            return Err(Error::InvalidPovm(format!("element {k} is not positive")));
        }
        sum = sum.add(m)?;
    }
    let violation = sum.max_abs_diff(&ComplexMatrix::identity(dim))?;
    if violation > tolerance::SPECTRAL {
        return Err(Error::InvalidPovm(format!(
            "elements sum to identity only within {violation:e}"
        )));
    }
    Ok(())
}

/// `P(msg, k) = 2^-N tr(state(msg) M_k)`.
pub fn outcome_distribution(
    inst: &ProtocolInstance,
    basis: Basis,
    side: Side,
    povm: &[ComplexMatrix],
) -> Result<JointTable> {
    let dim = match side {
        Side::B => inst.channel().dim_b(),
        Side::E => inst.channel().dim_e(),
    };
    validate_povm(povm, dim)?;
    let prior = 1.0 / (1u64 << inst.n()) as f64;
    Message::all(inst.n())
        .map(|msg| {
            let state = receiver_state(inst, msg, basis, side)?;
            povm.iter()
                .map(|m| Ok(prior * state.expectation(m)?.max(0.0)))
                .collect()
        })
        .collect()
}

fn plogp_sum(ps: impl Iterator<Item = f64>) -> f64 {
    ps.filter(|&p| p > 0.0).map(|p| -p * p.log2()).sum()
}

/// Shannon entropy in bits.
pub fn entropy(ps: &[f64]) -> f64 {
    plogp_sum(ps.iter().copied())
}

/// `I = sum p(a,b) log2 p(a,b) / (p(a) p(b))`.
pub fn mutual_information(joint: &JointTable) -> Result<f64> {
    let mut total = 0.0;
    for row in joint {
        for &p in row {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::Unnormalized(format!("table entry {p} is not a probability")));
            }
            total += p;
        }
    }
    if (total - 1.0).abs() > TABLE_NORMALIZATION {
        return Err(Error::Unnormalized(format!("table sums to {total}")));
    }
    let cols = joint.iter().map(Vec::len).max().unwrap_or(0);
    let rows: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
    let columns: Vec<f64> = (0..cols)
        .map(|k| joint.iter().map(|r| r.get(k).copied().unwrap_or(0.0)).sum())
        .collect();
    let h_joint = plogp_sum(joint.iter().flatten().copied());
    // H(A) + H(B) - H(A,B) is nonnegative up to rounding.
    Ok((entropy(&rows) + entropy(&columns) - h_joint).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShannonCheck {
    pub i_bz: f64,
    pub i_ex: f64,
    pub sum: f64,
    pub holds: bool,
}

/// `I(A:B | Z) + I(A:E | X) <= N` for the given measurements.
pub fn shannon_tradeoff_check(
    inst: &ProtocolInstance,
    bob_povm: &[ComplexMatrix],
    eve_povm: &[ComplexMatrix],
) -> Result<ShannonCheck> {
    let i_bz = mutual_information(&outcome_distribution(inst, Basis::Z, Side::B, bob_povm)?)?;
    let i_ex = mutual_information(&outcome_distribution(inst, Basis::X, Side::E, eve_povm)?)?;
    let sum = i_bz + i_ex;
    Ok(ShannonCheck {
        i_bz,
        i_ex,
        sum,
        holds: sum <= inst.n() as f64 + SHANNON_SLACK,
    })
}
