//! Completely positive trace-preserving maps in Kraus form, with the output
//! split into a receiver block (B) followed by an eavesdropper block (E).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{permute_rows, total_dim, ComplexMatrix, C64};
use crate::state::DensityOperator;
use crate::tolerance;

/// Cap on the total number of stored Kraus entries (2^24).
pub const MAX_KRAUS_ENTRIES: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    name: String,
    kraus: Vec<ComplexMatrix>,
    in_dims: Vec<usize>,
    out_dims_b: Vec<usize>,
    out_dims_e: Vec<usize>,
}

/// Completeness and shape diagnostics for a channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelReport {
    pub passed: bool,
    pub nonempty: bool,
    pub shapes_ok: bool,
    /// Largest entry of `|sum K^dagger K - I|`.
    pub completeness_violation: f64,
}

impl QuantumChannel {
    /// Builds a channel and rejects it unless it passes [`validate_channel`]
    /// at the completeness tolerance.
    pub fn new(
        name: impl Into<String>,
        kraus: Vec<ComplexMatrix>,
        in_dims: Vec<usize>,
        out_dims_b: Vec<usize>,
        out_dims_e: Vec<usize>,
    ) -> Result<Self> {
        let ch = Self::new_unchecked(name, kraus, in_dims, out_dims_b, out_dims_e);
        let report = validate_channel(&ch, tolerance::COMPLETENESS);
        if !report.passed {
            return Err(Error::Validation(format!(
                "channel '{}' is not a valid CPTP map: {report:?}",
                ch.name
            )));
        }
        Ok(ch)
    }

    /// No validation at all. Useful for deliberately broken channels in
    /// diagnostics; [`validate_channel`] reports what is wrong.
    pub fn new_unchecked(
        name: impl Into<String>,
        kraus: Vec<ComplexMatrix>,
        in_dims: Vec<usize>,
        out_dims_b: Vec<usize>,
        out_dims_e: Vec<usize>,
    ) -> Self {
        Self {
            name: name.into(),
            kraus,
            in_dims,
            out_dims_b,
            out_dims_e,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn in_dims(&self) -> &[usize] {
        &self.in_dims
    }

    pub fn out_dims_b(&self) -> &[usize] {
        &self.out_dims_b
    }

    pub fn out_dims_e(&self) -> &[usize] {
        &self.out_dims_e
    }

    /// `out_dims_b ++ out_dims_e`.
    pub fn out_dims(&self) -> Vec<usize> {
        let mut d = self.out_dims_b.clone();
        d.extend_from_slice(&self.out_dims_e);
        d
    }

    pub fn in_dim(&self) -> usize {
        self.in_dims.iter().product()
    }

    pub fn dim_b(&self) -> usize {
        self.out_dims_b.iter().product()
    }

    pub fn dim_e(&self) -> usize {
        self.out_dims_e.iter().product()
    }

    pub fn out_dim(&self) -> usize {
        self.dim_b() * self.dim_e()
    }

    /// Subsystem indices of B and E within [`Self::out_dims`].
    pub fn b_indices(&self) -> Vec<usize> {
        (0..self.out_dims_b.len()).collect()
    }

    pub fn e_indices(&self) -> Vec<usize> {
        let nb = self.out_dims_b.len();
        (nb..nb + self.out_dims_e.len()).collect()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    fn check_input(&self, side: usize) -> Result<()> {
        if side != self.in_dim() {
            return Err(Error::Dimension(format!(
                "channel '{}' expects input dimension {}, got {side}",
                self.name,
                self.in_dim()
            )));
        }
        Ok(())
    }

    /// `sum_k K rho K^dagger` on a raw matrix; no state checks on the output.
    pub fn apply_raw(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if !rho.is_square() {
            return Err(Error::Dimension("channel input must be square".into()));
        }
        self.check_input(rho.rows())?;
        let d = self.out_dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for k in &self.kraus {
            let t = k.matmul(rho)?;
            let term = t.matmul(&k.adjoint())?;
            out.add_scaled_assign(&term, C64::new(1.0, 0.0))?;
        }
        Ok(out)
    }

    /// `sum_k (K psi)(K psi)^dagger` for a pure input.
    pub fn apply_pure_raw(&self, ket: &[C64]) -> Result<ComplexMatrix> {
        self.check_input(ket.len())?;
        let d = self.out_dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for k in &self.kraus {
            let w = k.mul_vec(ket)?;
            let data = out.data_mut();
            for (i, wi) in w.iter().enumerate() {
                if *wi == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &mut data[i * d..(i + 1) * d];
                for (o, wj) in row.iter_mut().zip(&w) {
                    *o += wi * wj.conj();
                }
            }
        }
        Ok(out)
    }

    /// Channel output for a pure input as a state on B (x) E.
    pub fn apply_pure(&self, ket: &[C64]) -> Result<DensityOperator> {
        DensityOperator::from_cp_output(self.apply_pure_raw(ket)?, self.out_dims())
    }

    /// `n`-fold tensor power with output factors regrouped as
    /// `B_1 .. B_n E_1 .. E_n`.
    pub fn tensor_power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("tensor power needs n >= 1".into()));
        }
        let count = self
            .kraus
            .len()
            .checked_pow(n as u32)
            .ok_or_else(|| Error::Capacity("Kraus count overflows".into()))?;
        let rows = self
            .out_dim()
            .checked_pow(n as u32)
            .ok_or_else(|| Error::Capacity("output dimension overflows".into()))?;
        let cols = self
            .in_dim()
            .checked_pow(n as u32)
            .ok_or_else(|| Error::Capacity("input dimension overflows".into()))?;
        if rows > crate::linalg::MAX_SIDE || cols > crate::linalg::MAX_SIDE {
            return Err(Error::Capacity(format!(
                "{n}-fold channel needs a {rows}x{cols} Kraus operator (limit {})",
                crate::linalg::MAX_SIDE
            )));
        }
        if count.saturating_mul(rows).saturating_mul(cols) > MAX_KRAUS_ENTRIES {
            return Err(Error::Capacity(format!(
                "{n}-fold channel needs {count} Kraus operators of {rows}x{cols}"
            )));
        }

        let nb = self.out_dims_b.len();
        let ne = self.out_dims_e.len();
        let per_copy = nb + ne;
        let mut interleaved = Vec::with_capacity(per_copy * n);
        for _ in 0..n {
            interleaved.extend_from_slice(&self.out_dims_b);
            interleaved.extend_from_slice(&self.out_dims_e);
        }
        let mut order = Vec::with_capacity(per_copy * n);
        for copy in 0..n {
            order.extend((0..nb).map(|j| copy * per_copy + j));
        }
        for copy in 0..n {
            order.extend((0..ne).map(|j| copy * per_copy + nb + j));
        }

        let mut kraus = self.kraus.clone();
        for _ in 1..n {
            let mut next = Vec::with_capacity(kraus.len() * self.kraus.len());
            for a in &kraus {
                for b in &self.kraus {
                    next.push(a.kron(b)?);
                }
            }
            kraus = next;
        }
        let kraus = kraus
            .iter()
            .map(|k| permute_rows(k, &interleaved, &order))
            .collect::<Result<Vec<_>>>()?;

        let repeat = |d: &[usize]| -> Vec<usize> { (0..n).flat_map(|_| d.iter().copied()).collect() };
        Ok(Self {
            name: self.name.clone(),
            kraus,
            in_dims: repeat(&self.in_dims),
            out_dims_b: repeat(&self.out_dims_b),
            out_dims_e: repeat(&self.out_dims_e),
        })
    }
}

/// `sum_k K rho K^dagger` as a state on `out_dims_b ++ out_dims_e`.
pub fn apply_channel(ch: &QuantumChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    if rho.dims().iter().product::<usize>() != ch.in_dim() {
        return Err(Error::Dimension(format!(
            "state dims {:?} do not match channel input dims {:?}",
            rho.dims(),
            ch.in_dims()
        )));
    }
    DensityOperator::from_cp_output(ch.apply_raw(rho.matrix())?, ch.out_dims())
}

/// Layout of an isometry's output space: `B (x) E (x) traced`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OutputLayout {
    pub b: Vec<usize>,
    pub e: Vec<usize>,
    /// Environment factor that is traced out; empty for a plain isometry.
    pub traced: Vec<usize>,
}

/// Stinespring-style builder: a single Kraus operator when nothing is traced,
/// otherwise one operator `(1 (x) <k|) V` per basis state of the traced block.
pub fn isometry_to_channel(
    name: impl Into<String>,
    v: &ComplexMatrix,
    in_dims: Vec<usize>,
    layout: OutputLayout,
) -> Result<QuantumChannel> {
    let in_dim = total_dim(&in_dims)?;
    let be = total_dim(&layout.b)? * total_dim(&layout.e)?;
    let traced = total_dim(&layout.traced)?;
    if v.cols() != in_dim || v.rows() != be * traced {
        return Err(Error::Dimension(format!(
            "isometry is {}x{}, layout needs {}x{in_dim}",
            v.rows(),
            v.cols(),
            be * traced
        )));
    }
    let gram = v.adjoint().matmul(v)?;
    let violation = gram.max_abs_diff(&ComplexMatrix::identity(in_dim))?;
    if violation > tolerance::COMPLETENESS {
        return Err(Error::Validation(format!(
            "V is not an isometry: |V^dagger V - I| = {violation:e}"
        )));
    }
    let kraus: Vec<ComplexMatrix> = (0..traced)
        .map(|k| ComplexMatrix::from_fn(be, in_dim, |r, c| v[(r * traced + k, c)]))
        .filter(|m| m.max_abs() > 0.0)
        .collect();
    QuantumChannel::new(name, kraus, in_dims, layout.b, layout.e)
}

/// Completeness `sum K^dagger K = I` and shape coherence.
pub fn validate_channel(ch: &QuantumChannel, tol: f64) -> ChannelReport {
    let in_dim = ch.in_dim();
    let out_dim = ch.out_dim();
    let nonempty = !ch.kraus.is_empty();
    let dims_ok = !ch.in_dims.is_empty()
        && ch.in_dims.iter().chain(&ch.out_dims_b).chain(&ch.out_dims_e).all(|&d| d >= 1);
    let shapes_ok = dims_ok
        && ch
            .kraus
            .iter()
            .all(|k| k.rows() == out_dim && k.cols() == in_dim);
    let completeness_violation = if shapes_ok {
        let mut sum = ComplexMatrix::zeros(in_dim, in_dim);
        for k in &ch.kraus {
            let kk = k.adjoint().matmul(k).expect("shapes checked");
            sum.add_scaled_assign(&kk, C64::new(1.0, 0.0)).expect("shapes checked");
        }
        sum.max_abs_diff(&ComplexMatrix::identity(in_dim))
            .expect("shapes checked")
    } else {
        f64::INFINITY
    };
    ChannelReport {
        passed: nonempty && shapes_ok && completeness_violation <= tol,
        nonempty,
        shapes_ok,
        completeness_violation,
    }
}

/// JSON form: `{name, in_dims, out_dims_B, out_dims_E, kraus}` where each
/// Kraus operator is a row-major list of `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelJson {
    pub name: String,
    pub in_dims: Vec<usize>,
    #[serde(rename = "out_dims_B")]
    pub out_dims_b: Vec<usize>,
    #[serde(rename = "out_dims_E")]
    pub out_dims_e: Vec<usize>,
    pub kraus: Vec<Vec<[f64; 2]>>,
}

impl From<&QuantumChannel> for ChannelJson {
    fn from(ch: &QuantumChannel) -> Self {
        Self {
            name: ch.name.clone(),
            in_dims: ch.in_dims.clone(),
            out_dims_b: ch.out_dims_b.clone(),
            out_dims_e: ch.out_dims_e.clone(),
            kraus: ch
                .kraus
                .iter()
                .map(|k| k.as_slice().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl TryFrom<ChannelJson> for QuantumChannel {
    type Error = Error;

    fn try_from(j: ChannelJson) -> Result<Self> {
        let rows = total_dim(&j.out_dims_b)? * total_dim(&j.out_dims_e)?;
        let cols = total_dim(&j.in_dims)?;
        let kraus = j
            .kraus
            .into_iter()
            .map(|entries| {
                let data = entries.into_iter().map(|[re, im]| C64::new(re, im)).collect();
                ComplexMatrix::new(rows, cols, data)
            })
            .collect::<Result<Vec<_>>>()?;
        QuantumChannel::new(j.name, kraus, j.in_dims, j.out_dims_b, j.out_dims_e)
    }
}

impl QuantumChannel {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ChannelJson::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: ChannelJson = serde_json::from_str(s)?;
        Self::try_from(j)
    }
}
