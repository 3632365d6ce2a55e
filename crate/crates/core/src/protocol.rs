//! The prepare-and-send protocol and its entanglement-based counterpart.
//!
//! Alice encodes an `N`-bit message in the computational basis `Z` or in the
//! conjugate basis `X`; the eavesdropping channel splits the transmitted
//! qubits into Bob's system `B` and Eve's system `E`. In the entangled
//! picture Alice keeps `N` reference qubits `A'`, and the global state over
//! `A' (x) B (x) E` is `Theta = (id (x) Lambda)(|phi^N><phi^N|)`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{validate_channel, QuantumChannel};
use crate::error::{Error, Result};
use crate::linalg::{partial_trace, permute_ket, tensor_vec, ComplexMatrix, C64};
use crate::state::DensityOperator;
use crate::tolerance;

/// Largest `N` for which the dense global state is materialized by default.
pub const DENSE_THETA_MAX_N: usize = 2;
/// Largest message length supported at all (`2^N` sides stay small).
pub const MAX_N: usize = 6;

/// An `N`-bit message; bit 0 is the leftmost qubit and the most significant
/// bit of [`Message::index`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Message {
    index: usize,
    n: usize,
}

impl Message {
    pub fn new(index: usize, n: usize) -> Result<Self> {
        if n == 0 || n > 63 || index >= (1usize << n) {
            return Err(Error::InvalidParameter(format!(
                "message index {index} out of range for N = {n}"
            )));
        }
        Ok(Self { index, n })
    }

    pub fn from_bits(bits: &str) -> Result<Self> {
        if bits.is_empty() || !bits.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::InvalidParameter(format!("'{bits}' is not a bit string")));
        }
        let index = usize::from_str_radix(bits, 2)
            .map_err(|e| Error::InvalidParameter(format!("'{bits}': {e}")))?;
        Self::new(index, bits.len())
    }

    /// All `2^n` messages in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Message> {
        (0..(1usize << n)).map(move |index| Message { index, n })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bit(&self, i: usize) -> u8 {
        ((self.index >> (self.n - 1 - i)) & 1) as u8
    }

    pub fn bits(&self) -> String {
        (0..self.n).map(|i| if self.bit(i) == 1 { '1' } else { '0' }).collect()
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.bits())
    }
}

impl fmt::Debug for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Message({})", self.bits())
    }
}

impl Serialize for Message {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.bits())
    }
}

impl<'de> Deserialize<'de> for Message {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Message::from_bits(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

/// Receiving party.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    B,
    E,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Z => "Z",
            Basis::X => "X",
        })
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::B => "B",
            Side::E => "E",
        })
    }
}

fn qubit(bit: u8, basis: Basis) -> [C64; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match (basis, bit) {
        (Basis::Z, 0) => [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        (Basis::Z, _) => [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        (Basis::X, 0) => [C64::new(h, 0.0), C64::new(h, 0.0)],
        (Basis::X, _) => [C64::new(h, 0.0), C64::new(-h, 0.0)],
    }
}

/// `|y>` for `Z`, `|y_1 bar> (x) .. (x) |y_N bar>` for `X`.
pub fn encode(msg: Message, basis: Basis) -> Vec<C64> {
    (0..msg.n()).fold(vec![C64::new(1.0, 0.0)], |acc, i| {
        tensor_vec(&acc, &qubit(msg.bit(i), basis))
    })
}

/// `|phi>^(x)N` with all `A'` qubits first, then all `A` qubits.
pub fn epr_state(n: usize) -> Result<Vec<C64>> {
    if n == 0 {
        return Err(Error::InvalidParameter("EPR state needs n >= 1".into()));
    }
    if n > MAX_N {
        return Err(Error::Capacity(format!(
            "EPR state on {n} pairs exceeds the limit of {MAX_N}"
        )));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let pair = [C64::new(h, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(h, 0.0)];
    let paired = (0..n).fold(vec![C64::new(1.0, 0.0)], |acc, _| tensor_vec(&acc, &pair));
    // Pair order is A'_1 A_1 A'_2 A_2 ..; regroup as A'_1 .. A'_n A_1 .. A_n.
    let order: Vec<usize> = (0..n).map(|i| 2 * i).chain((0..n).map(|i| 2 * i + 1)).collect();
    permute_ket(&paired, &vec![2; 2 * n], &order)
}

/// Dimension bookkeeping for `A' (x) B (x) E`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaLayout {
    pub n: usize,
    pub dims_b: Vec<usize>,
    pub dims_e: Vec<usize>,
}

impl ThetaLayout {
    pub fn a_dim(&self) -> usize {
        1 << self.n
    }

    pub fn b_dim(&self) -> usize {
        self.dims_b.iter().product()
    }

    pub fn e_dim(&self) -> usize {
        self.dims_e.iter().product()
    }

    pub fn total_dim(&self) -> usize {
        self.a_dim() * self.b_dim() * self.e_dim()
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut d = vec![2; self.n];
        d.extend_from_slice(&self.dims_b);
        d.extend_from_slice(&self.dims_e);
        d
    }

    pub fn side_dims(&self, side: Side) -> &[usize] {
        match side {
            Side::B => &self.dims_b,
            Side::E => &self.dims_e,
        }
    }
}

/// A channel together with the receiver states every later stage consumes:
/// Bob's `rho^B_z` for Z-encoded messages and Eve's `sigma^E_x` for
/// X-encoded messages.
#[derive(Debug, Clone)]
pub struct ProtocolInstance {
    n: usize,
    channel: QuantumChannel,
    rho_b_z: Vec<DensityOperator>,
    sigma_e_x: Vec<DensityOperator>,
}

impl ProtocolInstance {
    /// Validates the channel and fills both receiver-state caches.
    pub fn new(n: usize, channel: QuantumChannel) -> Result<Self> {
        check_channel_for_n(n, &channel)?;
        let report = validate_channel(&channel, tolerance::COMPLETENESS);
        if !report.passed {
            return Err(Error::Validation(format!(
                "channel '{}' is not trace preserving: {report:?}",
                channel.name()
            )));
        }
        let cache = |basis: Basis, side: Side| -> Result<Vec<DensityOperator>> {
            Message::all(n)
                .collect::<Vec<_>>()
                .par_iter()
                .map(|&m| reduced_output(&channel, m, basis, side))
                .collect()
        };
        let rho_b_z = cache(Basis::Z, Side::B)?;
        let sigma_e_x = cache(Basis::X, Side::E)?;
        Ok(Self {
            n,
            channel,
            rho_b_z,
            sigma_e_x,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn channel(&self) -> &QuantumChannel {
        &self.channel
    }

    pub fn layout(&self) -> ThetaLayout {
        ThetaLayout {
            n: self.n,
            dims_b: self.channel.out_dims_b().to_vec(),
            dims_e: self.channel.out_dims_e().to_vec(),
        }
    }

    /// Bob's states for Z-encoded messages, indexed by message.
    pub fn bob_states(&self) -> &[DensityOperator] {
        &self.rho_b_z
    }

    /// Eve's states for X-encoded messages, indexed by message.
    pub fn eve_states(&self) -> &[DensityOperator] {
        &self.sigma_e_x
    }

    /// The family the trade-off theorem pairs with a side: Bob reads Z-encoded
    /// messages, Eve reads X-encoded ones.
    pub fn theorem_states(&self, side: Side) -> &[DensityOperator] {
        match side {
            Side::B => &self.rho_b_z,
            Side::E => &self.sigma_e_x,
        }
    }

    fn check_message(&self, msg: Message) -> Result<()> {
        if msg.n() != self.n {
            return Err(Error::InvalidParameter(format!(
                "message {msg} has length {}, protocol uses N = {}",
                msg.n(),
                self.n
            )));
        }
        Ok(())
    }
}

fn check_channel_for_n(n: usize, channel: &QuantumChannel) -> Result<()> {
    if n == 0 || n > MAX_N {
        return Err(Error::Capacity(format!(
            "N = {n} outside the supported range 1..={MAX_N}"
        )));
    }
    if channel.in_dim() != 1 << n {
        return Err(Error::Dimension(format!(
            "channel '{}' acts on dimension {}, protocol needs 2^{n}",
            channel.name(),
            channel.in_dim()
        )));
    }
    Ok(())
}

fn reduced_output(ch: &QuantumChannel, msg: Message, basis: Basis, side: Side) -> Result<DensityOperator> {
    let out = ch.apply_pure(&encode(msg, basis))?;
    let keep = match side {
        Side::B => ch.b_indices(),
        Side::E => ch.e_indices(),
    };
    out.partial_trace(&keep)
}

/// `tr_E Lambda(|enc><enc|)` or `tr_B Lambda(|enc><enc|)`.
pub fn receiver_state(
    inst: &ProtocolInstance,
    msg: Message,
    basis: Basis,
    side: Side,
) -> Result<DensityOperator> {
    inst.check_message(msg)?;
    match (basis, side) {
        (Basis::Z, Side::B) => Ok(inst.rho_b_z[msg.index()].clone()),
        (Basis::X, Side::E) => Ok(inst.sigma_e_x[msg.index()].clone()),
        _ => reduced_output(&inst.channel, msg, basis, side),
    }
}

/// Dense `Theta` without state validation; works for any Kraus list.
pub fn theta_matrix(n: usize, channel: &QuantumChannel) -> Result<ComplexMatrix> {
    check_channel_for_n(n, channel)?;
    let phi = epr_state(n)?;
    let a = 1usize << n;
    let out = channel.out_dim();
    let total = a
        .checked_mul(out)
        .filter(|&t| t <= crate::linalg::MAX_SIDE)
        .ok_or_else(|| Error::Capacity(format!("Theta side 2^{n} x {out} exceeds the dense limit")))?;
    let mut theta = ComplexMatrix::zeros(total, total);
    let mut w = vec![C64::new(0.0, 0.0); total];
    for k in channel.kraus() {
        // w[(a', o)] = sum_a K[o][a] phi[(a', a)]
        for ap in 0..a {
            for o in 0..out {
                let row = k.row(o);
                w[ap * out + o] = (0..a).map(|i| row[i] * phi[ap * a + i]).sum();
            }
        }
        let data = theta.data_mut();
        for (i, wi) in w.iter().enumerate() {
            if *wi == C64::new(0.0, 0.0) {
                continue;
            }
            for (o, wj) in data[i * total..(i + 1) * total].iter_mut().zip(&w) {
                *o += wi * wj.conj();
            }
        }
    }
    Ok(theta)
}

/// `Theta` as a validated state, for `N <= DENSE_THETA_MAX_N`.
pub fn global_state_theta(inst: &ProtocolInstance) -> Result<DensityOperator> {
    global_state_theta_with_limit(inst, DENSE_THETA_MAX_N)
}

/// As [`global_state_theta`] with an explicit `N` cap.
pub fn global_state_theta_with_limit(inst: &ProtocolInstance, max_n: usize) -> Result<DensityOperator> {
    if inst.n > max_n {
        return Err(Error::Capacity(format!(
            "dense Theta requested for N = {} above the limit {max_n}",
            inst.n
        )));
    }
    let m = theta_matrix(inst.n, &inst.channel)?;
    DensityOperator::from_cp_output(m, inst.layout().dims())
}

/// How an a-posteriori state is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Condition the dense global state on Alice's outcome.
    Dense,
    /// Use `P = 2^-N tr Lambda(|enc><enc|)` and the channel output directly.
    Structured,
}

/// Probability of Alice's outcome `msg` in `basis`, and the conditional
/// state on `B (x) E`.
pub fn aposteriori(
    inst: &ProtocolInstance,
    basis: Basis,
    msg: Message,
    route: Route,
) -> Result<(f64, DensityOperator)> {
    inst.check_message(msg)?;
    let (p, m) = match route {
        Route::Dense => {
            if inst.n > DENSE_THETA_MAX_N {
                return Err(Error::Capacity(format!(
                    "dense a-posteriori route requested for N = {}",
                    inst.n
                )));
            }
            let theta = theta_matrix(inst.n, &inst.channel)?;
            condition_theta(&theta, inst.n, inst.channel.out_dim(), basis, msg)?
        }
        Route::Structured => structured_aposteriori(&inst.channel, inst.n, basis, msg)?,
    };
    Ok((p, DensityOperator::from_cp_output(m, inst.channel.out_dims())?))
}

/// `(<a| (x) 1) Theta (|a> (x) 1)`, normalized, with `|a>` the encoding of
/// `msg`. Returns the probability and the normalized conditional matrix.
fn condition_theta(
    theta: &ComplexMatrix,
    n: usize,
    out: usize,
    basis: Basis,
    msg: Message,
) -> Result<(f64, ComplexMatrix)> {
    let a = encode(msg, basis);
    let dim_a = 1usize << n;
    let mut m = ComplexMatrix::zeros(out, out);
    for i in 0..dim_a {
        for j in 0..dim_a {
            let w = a[i].conj() * a[j];
            if w == C64::new(0.0, 0.0) {
                continue;
            }
            for r in 0..out {
                for c in 0..out {
                    m[(r, c)] += w * theta[(i * out + r, j * out + c)];
                }
            }
        }
    }
    normalize_branch(m)
}

fn structured_aposteriori(
    ch: &QuantumChannel,
    n: usize,
    basis: Basis,
    msg: Message,
) -> Result<(f64, ComplexMatrix)> {
    let out = ch.apply_pure_raw(&encode(msg, basis))?;
    let scale = 1.0 / (1u64 << n) as f64;
    normalize_branch(out.scale_real(scale))
}

fn normalize_branch(m: ComplexMatrix) -> Result<(f64, ComplexMatrix)> {
    let p = m.trace().re;
    if p <= f64::EPSILON {
        return Err(Error::ZeroProbability(p));
    }
    Ok((p, m.scale_real(1.0 / p)))
}

/// Outcome of comparing the two protocol pictures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub n: usize,
    pub dense: bool,
    /// Largest `|P(msg) - 2^-N|` over both bases.
    pub max_probability_deviation: f64,
    /// Largest entrywise distance between a-posteriori states and the
    /// prepare-and-send channel outputs.
    pub max_state_deviation: f64,
    pub passed: bool,
}

/// Checks `P_Z(z) = P_X(x) = 2^-N` and that each a-posteriori state equals
/// the channel output for the corresponding encoded message.
pub fn equivalence_check(inst: &ProtocolInstance, tol: f64) -> Result<EquivalenceReport> {
    equivalence_check_channel(inst.n, &inst.channel, tol)
}

/// [`equivalence_check`] for an arbitrary (possibly invalid) Kraus list.
/// Uses the dense global state for `N <= DENSE_THETA_MAX_N` and the
/// structured identities above that.
pub fn equivalence_check_channel(n: usize, ch: &QuantumChannel, tol: f64) -> Result<EquivalenceReport> {
    check_channel_for_n(n, ch)?;
    let dense = n <= DENSE_THETA_MAX_N;
    let theta = if dense { Some(theta_matrix(n, ch)?) } else { None };
    let uniform = 1.0 / (1u64 << n) as f64;
    let mut max_p: f64 = 0.0;
    let mut max_s: f64 = 0.0;
    for basis in [Basis::Z, Basis::X] {
        for msg in Message::all(n) {
            let direct = ch.apply_pure_raw(&encode(msg, basis))?;
            let (p, state) = match &theta {
                Some(t) => condition_theta(t, n, ch.out_dim(), basis, msg)?,
                None => structured_aposteriori(ch, n, basis, msg)?,
            };
            max_p = max_p.max((p - uniform).abs());
            max_s = max_s.max(state.max_abs_diff(&direct)?);
        }
    }
    Ok(EquivalenceReport {
        n,
        dense,
        max_probability_deviation: max_p,
        max_state_deviation: max_s,
        passed: max_p <= tol && max_s <= tol,
    })
}

/// `tr_{B E} Theta`, which must be `I / 2^N`.
pub fn reference_marginal(theta: &DensityOperator, n: usize) -> Result<ComplexMatrix> {
    partial_trace(theta.matrix(), theta.dims(), &(0..n).collect::<Vec<_>>())
}
