//! Computable stand-in for the conditional complexity of a message given a
//! receiver's state.
//!
//! A [`DecoderCatalogue`] is a prefix-free set of programs. Each catalogue
//! entry is a codeword `"0" + h` attached to a perfectly distinguishable
//! class of messages, decoded by that class's PVM; every message also has a
//! literal program `"1" + bits` of length `N + 1` that ignores the quantum
//! input. A message's proxy complexity is its shortest program length.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::distinguish::DistinguishableClass;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::protocol::{encode, theta_matrix, Basis, Message, ProtocolInstance, Side, ThetaLayout, DENSE_THETA_MAX_N};
use crate::state::Projector;

pub const LITERAL_PREFIX: &str = "1";
pub const ENTRY_PREFIX: &str = "0";

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogueEntry {
    pub codeword: String,
    pub class: DistinguishableClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderCatalogue {
    n: usize,
    side: Side,
    basis: Basis,
    entries: Vec<CatalogueEntry>,
}

/// Huffman code lengths for `weights`, ties broken by `keys` (smaller
/// first). A single symbol gets length 0.
fn huffman_lengths(weights: &[usize], keys: &[usize]) -> Vec<usize> {
    let count = weights.len();
    if count == 0 {
        return Vec::new();
    }
    // Node ids: leaves 0..count, internal nodes after.
    let mut parent: Vec<usize> = vec![usize::MAX; count];
    let mut heap = BinaryHeap::new();
    for i in 0..count {
        heap.push(Reverse((weights[i], keys[i], i)));
    }
    while heap.len() > 1 {
        let Reverse((wa, ka, a)) = heap.pop().expect("len > 1");
        let Reverse((wb, kb, b)) = heap.pop().expect("len > 1");
        let id = parent.len();
        parent.push(usize::MAX);
        parent[a] = id;
        parent[b] = id;
        heap.push(Reverse((wa + wb, ka.min(kb), id)));
    }
    (0..count)
        .map(|leaf| {
            let mut depth = 0;
            let mut node = leaf;
            while parent[node] != usize::MAX {
                node = parent[node];
                depth += 1;
            }
            depth
        })
        .collect()
}

/// Canonical codewords for the given lengths, assigned in the order of
/// `order` (which must sort by length first).
fn canonical_codes(lengths: &[usize], order: &[usize]) -> Vec<String> {
    let mut codes = vec![String::new(); lengths.len()];
    let mut code: u128 = 0;
    let mut prev_len = 0;
    for (pos, &i) in order.iter().enumerate() {
        let len = lengths[i];
        if pos > 0 {
            code += 1;
        }
        code <<= len - prev_len;
        prev_len = len;
        codes[i] = (0..len)
            .map(|b| if (code >> (len - 1 - b)) & 1 == 1 { '1' } else { '0' })
            .collect();
    }
    codes
}

impl DecoderCatalogue {
    /// Classes of size >= 2 receive codewords `"0" + h` with `h` a canonical
    /// Huffman code weighted by class size; ties go to the class with the
    /// smaller least member.
    pub fn build(partition: &[DistinguishableClass], n: usize, side: Side, basis: Basis) -> Result<Self> {
        let mut seen = vec![false; 1 << n];
        for class in partition {
            for m in &class.members {
                if m.n() != n || seen[m.index()] {
                    return Err(Error::InvalidParameter(format!(
                        "partition is not a partition of {{0,1}}^{n} (message {m})"
                    )));
                }
                seen[m.index()] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidParameter(format!(
                "partition does not cover {{0,1}}^{n}"
            )));
        }

        let classes: Vec<&DistinguishableClass> = partition.iter().filter(|c| c.len() >= 2).collect();
        let weights: Vec<usize> = classes.iter().map(|c| c.len()).collect();
        let keys: Vec<usize> = classes.iter().map(|c| c.smallest_member().index()).collect();
        let lengths = huffman_lengths(&weights, &keys);
        let mut order: Vec<usize> = (0..classes.len()).collect();
        order.sort_by_key(|&i| (lengths[i], keys[i]));
        let codes = canonical_codes(&lengths, &order);

        let entries = order
            .iter()
            .map(|&i| CatalogueEntry {
                codeword: format!("{ENTRY_PREFIX}{}", codes[i]),
                class: classes[i].clone(),
            })
            .collect();
        Ok(Self {
            n,
            side,
            basis,
            entries,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn entries(&self) -> &[CatalogueEntry] {
        &self.entries
    }

    pub fn literal_length(&self) -> usize {
        self.n + 1
    }

    /// Literal program for a message: escape bit then the message bits.
    pub fn literal_program(&self, msg: Message) -> String {
        format!("{LITERAL_PREFIX}{}", msg.bits())
    }

    /// Adds an entry after checking prefix-freeness against the full code and
    /// disjointness from existing entries.
    pub fn with_entry(mut self, codeword: impl Into<String>, class: DistinguishableClass) -> Result<Self> {
        let codeword = codeword.into();
        if class.len() < 2 || class.pvm.is_none() {
            return Err(Error::InvalidParameter("entries need a class of size >= 2 with a PVM".into()));
        }
        if !codeword.starts_with(ENTRY_PREFIX) || !codeword.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::InvalidParameter(format!("'{codeword}' is not an entry codeword")));
        }
        for e in &self.entries {
            if e.codeword.starts_with(&codeword) || codeword.starts_with(&e.codeword) {
                return Err(Error::InvalidParameter(format!(
                    "'{codeword}' conflicts with '{}'",
                    e.codeword
                )));
            }
            if e.class.members.iter().any(|m| class.members.contains(m)) {
                return Err(Error::InvalidParameter("classes overlap".into()));
            }
        }
        self.entries.push(CatalogueEntry { codeword, class });
        Ok(self)
    }

    /// `sum 2^-len` over entry codewords plus the literal block.
    pub fn kraft_sum(&self) -> f64 {
        let entries: f64 = self.entries.iter().map(|e| 0.5f64.powi(e.codeword.len() as i32)).sum();
        entries + (1u64 << self.n) as f64 * 0.5f64.powi(self.literal_length() as i32)
    }

    /// No codeword, literal programs included, is a prefix of another.
    pub fn is_prefix_free(&self) -> bool {
        let mut words: Vec<String> = self.entries.iter().map(|e| e.codeword.clone()).collect();
        words.extend(Message::all(self.n).map(|m| self.literal_program(m)));
        words.sort();
        // After sorting, any prefix relation shows up between neighbours.
        words.windows(2).all(|w| !w[1].starts_with(&w[0]))
    }

    /// Number of messages covered by entries with codeword length `<= l`.
    pub fn catalogue_count(&self, l: usize) -> usize {
        self.entries
            .iter()
            .filter(|e| e.codeword.len() <= l)
            .map(|e| e.class.len())
            .sum()
    }
}

/// Shortest program length for every message.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityProfile {
    pub n: usize,
    pub side: Side,
    pub basis: Basis,
    /// Indexed by message.
    pub lengths: Vec<usize>,
}

impl ComplexityProfile {
    pub fn max_length(&self) -> usize {
        self.lengths.iter().copied().max().unwrap_or(0)
    }

    /// `sum_msg 2^-N len(msg)`.
    pub fn average_length(&self) -> f64 {
        self.lengths.iter().sum::<usize>() as f64 / self.lengths.len() as f64
    }

    /// CSV with header `message_bits,side,basis,length`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("message_bits,side,basis,length\n");
        for (i, len) in self.lengths.iter().enumerate() {
            let m = Message::new(i, self.n).expect("index in range");
            writeln!(out, "{m},{},{},{len}", self.side, self.basis).expect("string write");
        }
        out
    }
}

/// `len(msg) = min(codeword length of msg's entry, N + 1)`.
pub fn proxy_complexity(cat: &DecoderCatalogue) -> ComplexityProfile {
    let mut lengths = vec![cat.literal_length(); 1 << cat.n];
    for e in &cat.entries {
        for m in &e.class.members {
            lengths[m.index()] = lengths[m.index()].min(e.codeword.len());
        }
    }
    ComplexityProfile {
        n: cat.n,
        side: cat.side,
        basis: cat.basis,
        lengths,
    }
}

/// `|{msg : len(msg) <= l}|`.
pub fn low_complexity_count(profile: &ComplexityProfile, l: usize) -> usize {
    profile.lengths.iter().filter(|&&len| len <= l).count()
}

/// `P_t = sum_z Z_z (x) E_z (x) 1_E` (Bob) or `Q_s = sum_x X_x (x) 1_B (x) F_x`
/// (Eve), kept as the list of `(message, receiver projector)` blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredProjector {
    pub side: Side,
    pub layout: ThetaLayout,
    pub blocks: Vec<(Message, Projector)>,
}

impl StructuredProjector {
    pub fn empty(side: Side, layout: ThetaLayout) -> Self {
        Self {
            side,
            layout,
            blocks: Vec::new(),
        }
    }

    /// Alice's basis paired with this side.
    pub fn basis(&self) -> Basis {
        match self.side {
            Side::B => Basis::Z,
            Side::E => Basis::X,
        }
    }

    /// `sum rank(E_z)` times the dimension of the untouched receiver space.
    pub fn trace(&self) -> usize {
        let other = match self.side {
            Side::B => self.layout.e_dim(),
            Side::E => self.layout.b_dim(),
        };
        self.blocks.iter().map(|(_, p)| p.rank()).sum::<usize>() * other
    }

    /// Dense operator on `A' (x) B (x) E`; only for `N <= 2`.
    pub fn to_dense(&self) -> Result<ComplexMatrix> {
        if self.layout.n > DENSE_THETA_MAX_N {
            return Err(Error::Capacity(format!(
                "dense projector requested for N = {} above the limit {DENSE_THETA_MAX_N}",
                self.layout.n
            )));
        }
        let d = self.layout.total_dim();
        let mut out = ComplexMatrix::zeros(d, d);
        let id_b = ComplexMatrix::identity(self.layout.b_dim());
        let id_e = ComplexMatrix::identity(self.layout.e_dim());
        for (msg, p) in &self.blocks {
            let reference = ComplexMatrix::outer(&encode(*msg, self.basis()));
            let term = match self.side {
                Side::B => reference.kron(p.matrix())?.kron(&id_e)?,
                Side::E => reference.kron(&id_b)?.kron(p.matrix())?,
            };
            out.add_scaled_assign(&term, C64::new(1.0, 0.0))?;
        }
        Ok(out)
    }

    /// `tr(Theta P) = 2^-N sum_blocks tr(rho_msg E_msg)` using the receiver
    /// states cached on the instance.
    pub fn expectation_structured(&self, inst: &ProtocolInstance) -> Result<f64> {
        let states = inst.theorem_states(self.side);
        let mut acc = 0.0;
        for (msg, p) in &self.blocks {
            acc += states[msg.index()].expectation(p.matrix())?;
        }
        Ok(acc / (1u64 << self.layout.n) as f64)
    }
}

fn entry_blocks(entry: &CatalogueEntry) -> Vec<(Message, Projector)> {
    let pvm = entry.class.pvm.as_ref().expect("catalogue entries carry a PVM");
    entry.class.members.iter().copied().zip(pvm.iter().cloned()).collect()
}

/// Projector of one catalogue entry.
pub fn program_projector(cat: &DecoderCatalogue, entry_index: usize, layout: &ThetaLayout) -> Result<StructuredProjector> {
    let entry = cat.entries.get(entry_index).ok_or_else(|| {
        Error::InvalidParameter(format!(
            "catalogue has {} entries, asked for {entry_index}",
            cat.entries.len()
        ))
    })?;
    Ok(StructuredProjector {
        side: cat.side,
        layout: layout.clone(),
        blocks: entry_blocks(entry),
    })
}

/// Sum of entry projectors with codeword length `<= l`. Literal programs do
/// not contribute.
pub fn cumulative_projector(cat: &DecoderCatalogue, l: usize, layout: &ThetaLayout) -> StructuredProjector {
    StructuredProjector {
        side: cat.side,
        layout: layout.clone(),
        blocks: cat
            .entries
            .iter()
            .filter(|e| e.codeword.len() <= l)
            .flat_map(entry_blocks)
            .collect(),
    }
}

/// Both sides of `tr(Theta P_hat_l) = 2^-N |{catalogue messages with codeword
/// length <= l}|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectationCheck {
    pub side: Side,
    pub l: usize,
    pub structured: f64,
    pub dense: Option<f64>,
    pub rhs: f64,
    pub agree: bool,
}

pub const EXPECTATION_TOL: f64 = 1e-9;

pub fn expectation_identity_check(inst: &ProtocolInstance, cat: &DecoderCatalogue, l: usize) -> Result<ExpectationCheck> {
    expectation_identity(inst, cat, l, inst.n() <= DENSE_THETA_MAX_N)
}

/// [`expectation_identity_check`] with the dense cross-check switched on or
/// off by the caller.
pub fn expectation_identity(
    inst: &ProtocolInstance,
    cat: &DecoderCatalogue,
    l: usize,
    with_dense: bool,
) -> Result<ExpectationCheck> {
    let layout = inst.layout();
    let proj = cumulative_projector(cat, l, &layout);
    let structured = proj.expectation_structured(inst)?;
    let dense = if with_dense {
        let theta = theta_matrix(inst.n(), inst.channel())?;
        Some(theta.trace_product(&proj.to_dense()?)?.re)
    } else {
        None
    };
    let rhs = cat.catalogue_count(l) as f64 / (1u64 << inst.n()) as f64;
    let agree = (structured - rhs).abs() <= EXPECTATION_TOL
        && dense.is_none_or(|d| (d - rhs).abs() <= EXPECTATION_TOL);
    Ok(ExpectationCheck {
        side: cat.side,
        l,
        structured,
        dense,
        rhs,
        agree,
    })
}
