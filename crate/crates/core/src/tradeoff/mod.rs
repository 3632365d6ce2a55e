//! The information-disturbance trade-off: counting bounds on low-complexity
//! messages for Bob and Eve, the uncertainty relation behind them, and the
//! Shannon-information cross-check.

mod counting;
mod landau_pollak;
mod shannon;

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use counting::{
    average_complexity_check, average_versus_counting, is_nontrivial, max_complexity_corollary, theorem_bound,
    tradeoff_bound, AverageComplexity, AverageVersusCounting, Corollary1, LengthHistogram,
};
pub use landau_pollak::{conjugate_overlap_norm, cross_norm_bound, landau_pollak_check, LpOutcome, LP_SLACK};
pub use shannon::{
    entropy, mutual_information, outcome_distribution, shannon_tradeoff_check, JointTable, ShannonCheck,
    SHANNON_SLACK,
};

use crate::attacks::{make_attack, natural_povms, AttackSpec};
use crate::complexity::{
    cumulative_projector, expectation_identity, program_projector, proxy_complexity, ComplexityProfile,
    DecoderCatalogue, ExpectationCheck, StructuredProjector,
};
use crate::distinguish::{distinguishable_partition, DistinguishableClass};
use crate::error::Result;
use crate::linalg::{operator_norm, ComplexMatrix};
use crate::protocol::{global_state_theta, Basis, ProtocolInstance, Side, DENSE_THETA_MAX_N};
use crate::tolerance::Tolerances;

/// Partition, catalogue and profile for one receiver.
#[derive(Debug, Clone)]
pub struct SideAnalysis {
    pub partition: Vec<DistinguishableClass>,
    pub catalogue: DecoderCatalogue,
    pub profile: ComplexityProfile,
    pub histogram: LengthHistogram,
}

/// Bob is paired with Z-encoded messages, Eve with X-encoded ones.
pub fn analyze_side(inst: &ProtocolInstance, side: Side, decision_tol: f64) -> Result<SideAnalysis> {
    let basis = match side {
        Side::B => Basis::Z,
        Side::E => Basis::X,
    };
    let partition = distinguishable_partition(inst.theorem_states(side), inst.n(), decision_tol)?;
    let catalogue = DecoderCatalogue::build(&partition, inst.n(), side, basis)?;
    let profile = proxy_complexity(&catalogue);
    let histogram = LengthHistogram::from_profile(&profile);
    Ok(SideAnalysis {
        partition,
        catalogue,
        profile,
        histogram,
    })
}

/// One `(l, m)` point of the counting bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRecord {
    pub l: usize,
    pub m: usize,
    pub count_b: u64,
    pub count_e: u64,
    /// Counts restricted to catalogue entries (literal programs left out).
    pub catalogue_count_b: u64,
    pub catalogue_count_e: u64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpRoute {
    /// Dense projectors and dense `Theta`.
    Dense,
    /// Structured expectations; cross terms replaced by the proven
    /// `2^{-N/2}` overlap bound.
    StructuredBound,
}

/// Uncertainty relation for `{P_t : l(t) <= l} u {Q_s : l(s) <= m}` with
/// state `Theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpRecord {
    pub l: usize,
    pub m: usize,
    pub route: LpRoute,
    pub family_size: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossNormSummary {
    pub pairs: usize,
    pub max_norm: f64,
    pub limit: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffReport {
    pub n: usize,
    pub attack: AttackSpec,
    pub c_offset: i32,
    pub grid: Vec<GridRecord>,
    pub lp_records: Vec<LpRecord>,
    pub cross_norms: Option<CrossNormSummary>,
    pub expectation_checks: Vec<ExpectationCheck>,
    pub corollary1: Corollary1,
    pub shannon: ShannonCheck,
    /// Informational only.
    pub average: AverageComplexity,
}

impl TradeoffReport {
    pub fn grid_holds(&self) -> bool {
        self.grid.iter().all(|g| g.holds)
    }

    /// Conjunction of every asserted check. The average-length comparison is
    /// not part of it.
    pub fn all_hold(&self) -> bool {
        self.grid_holds()
            && self.lp_records.iter().all(|r| r.holds)
            && self.cross_norms.is_none_or(|c| c.holds)
            && self.expectation_checks.iter().all(|e| e.agree)
            && self.corollary1.holds
            && self.shannon.holds
    }

    pub const CSV_HEADER: &'static str = "n,attack,l,m,count_B,count_E,bound,holds";

    /// One row per grid point.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        self.write_csv_rows(&mut out);
        out
    }

    pub fn write_csv_rows(&self, out: &mut String) {
        for g in &self.grid {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                self.n,
                self.attack.slug(),
                g.l,
                g.m,
                g.count_b,
                g.count_e,
                format_sig(g.bound),
                g.holds
            )
            .expect("string write");
        }
    }
}

/// Float with 12 significant digits, trailing zeros trimmed.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("round trip of formatted float");
    format!("{rounded}")
}

/// Cached dense operators and traces for the uncertainty-relation checks.
struct DenseFamily {
    n: usize,
    lengths_b: Vec<usize>,
    lengths_e: Vec<usize>,
    /// `tr(Theta A)` for every `P_t` then every `Q_s`.
    expectations: Vec<f64>,
    /// `||A_i A_j||` over the same ordering.
    norms: Vec<Vec<f64>>,
}

impl DenseFamily {
    fn build(inst: &ProtocolInstance, b: &DecoderCatalogue, e: &DecoderCatalogue) -> Result<Self> {
        let layout = inst.layout();
        let theta = global_state_theta(inst)?;
        let mut mats: Vec<ComplexMatrix> = Vec::new();
        for cat in [b, e] {
            for i in 0..cat.entries().len() {
                mats.push(program_projector(cat, i, &layout)?.to_dense()?);
            }
        }
        let expectations = mats
            .iter()
            .map(|m| theta.expectation(m))
            .collect::<Result<Vec<_>>>()?;
        let norms = mats
            .par_iter()
            .map(|a| {
                mats.iter()
                    .map(|c| Ok(operator_norm(&a.matmul(c)?)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n: inst.n(),
            lengths_b: b.entries().iter().map(|e| e.codeword.len()).collect(),
            lengths_e: e.entries().iter().map(|e| e.codeword.len()).collect(),
            expectations,
            norms,
        })
    }

    fn members(&self, l: usize, m: usize) -> Vec<usize> {
        let nb = self.lengths_b.len();
        let b = (0..nb).filter(|&i| self.lengths_b[i] <= l);
        let e = (0..self.lengths_e.len())
            .filter(|&i| self.lengths_e[i] <= m)
            .map(|i| nb + i);
        b.chain(e).collect()
    }

    fn record(&self, l: usize, m: usize) -> LpRecord {
        let idx = self.members(l, m);
        let lhs: f64 = idx.iter().map(|&i| self.expectations[i]).sum();
        let mut cross = 0.0;
        for &i in &idx {
            for &j in &idx {
                if i != j {
                    cross += self.norms[i][j].powi(2);
                }
            }
        }
        let rhs = 1.0 + f64::sqrt(cross);
        LpRecord {
            l,
            m,
            route: LpRoute::Dense,
            family_size: idx.len(),
            lhs,
            rhs,
            holds: lhs <= rhs + LP_SLACK,
        }
    }

    fn cross_summary(&self) -> CrossNormSummary {
        let nb = self.lengths_b.len();
        let n_total = self.norms.len();
        let mut max_norm: f64 = 0.0;
        let mut pairs = 0;
        for t in 0..nb {
            for s in nb..n_total {
                max_norm = max_norm.max(self.norms[t][s]);
                pairs += 1;
            }
        }
        let limit = 2f64.powf(-(self.n as f64) / 2.0);
        CrossNormSummary {
            pairs,
            max_norm,
            limit,
            holds: max_norm <= limit + LP_SLACK,
        }
    }
}

/// Structured version of [`DenseFamily::record`] for `N` above the dense
/// limit: the left side comes from receiver states, and every cross term is
/// replaced by its proven ceiling (`0` within a side, `2^{-N/2}` across).
fn structured_lp_record(
    inst: &ProtocolInstance,
    b: &DecoderCatalogue,
    e: &DecoderCatalogue,
    l: usize,
    m: usize,
) -> Result<LpRecord> {
    let layout = inst.layout();
    let p: StructuredProjector = cumulative_projector(b, l, &layout);
    let q: StructuredProjector = cumulative_projector(e, m, &layout);
    let lhs = p.expectation_structured(inst)? + q.expectation_structured(inst)?;
    let t = b.entries().iter().filter(|x| x.codeword.len() <= l).count();
    let s = e.entries().iter().filter(|x| x.codeword.len() <= m).count();
    let rhs = 1.0 + (2.0 * (t * s) as f64 * 2f64.powi(-(inst.n() as i32))).sqrt();
    Ok(LpRecord {
        l,
        m,
        route: LpRoute::StructuredBound,
        family_size: t + s,
        lhs,
        rhs,
        holds: lhs <= rhs + LP_SLACK,
    })
}

/// Knobs for [`verify_tradeoff`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub c_offset: i32,
    pub tolerances: Tolerances,
    /// Dense `Theta` paths run for `N <= dense_limit` (capped at
    /// [`DENSE_THETA_MAX_N`]).
    pub dense_limit: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            c_offset: 0,
            tolerances: Tolerances::default(),
            dense_limit: DENSE_THETA_MAX_N,
        }
    }
}

/// Runs every check for one attack at one message length.
pub fn verify_tradeoff(inst: &ProtocolInstance, attack: &AttackSpec, opts: &VerifyOptions) -> Result<TradeoffReport> {
    let n = inst.n();
    let (c_offset, tolerances) = (opts.c_offset, &opts.tolerances);
    let dense_ok = n <= opts.dense_limit.min(DENSE_THETA_MAX_N);
    let b = analyze_side(inst, Side::B, tolerances.decision)?;
    let e = analyze_side(inst, Side::E, tolerances.decision)?;

    let grid_range = 0..=n + 1;
    let grid: Vec<GridRecord> = grid_range
        .clone()
        .flat_map(|l| grid_range.clone().map(move |m| (l, m)))
        .map(|(l, m)| {
            let count_b = b.histogram.count_le(l);
            let count_e = e.histogram.count_le(m);
            let bound = tradeoff_bound(l, m, n, c_offset);
            GridRecord {
                l,
                m,
                count_b,
                count_e,
                catalogue_count_b: b.catalogue.catalogue_count(l) as u64,
                catalogue_count_e: e.catalogue.catalogue_count(m) as u64,
                bound,
                holds: (count_b + count_e) as f64 <= bound,
            }
        })
        .collect();

    let dense = if dense_ok {
        Some(DenseFamily::build(inst, &b.catalogue, &e.catalogue)?)
    } else {
        None
    };
    let lp_records = grid
        .iter()
        .map(|g| match &dense {
            Some(fam) => Ok(fam.record(g.l, g.m)),
            None => structured_lp_record(inst, &b.catalogue, &e.catalogue, g.l, g.m),
        })
        .collect::<Result<Vec<_>>>()?;
    let cross_norms = dense.as_ref().map(DenseFamily::cross_summary);

    let mut expectation_checks = Vec::new();
    for side in [&b, &e] {
        for l in grid_range.clone() {
            expectation_checks.push(expectation_identity(inst, &side.catalogue, l, dense_ok)?);
        }
    }

    let (bob_povm, eve_povm) = natural_povms(attack, n);
    let shannon = shannon_tradeoff_check(inst, &bob_povm, &eve_povm)?;

    Ok(TradeoffReport {
        n,
        attack: *attack,
        c_offset,
        grid,
        lp_records,
        cross_norms,
        expectation_checks,
        corollary1: max_complexity_corollary(&b.histogram, &e.histogram, n, c_offset),
        shannon,
        average: average_complexity_check(&b.histogram, &e.histogram, n, c_offset),
    })
}

/// Builds the attack channel and the protocol instance, then verifies.
pub fn verify_attack(attack: &AttackSpec, n: usize, opts: &VerifyOptions) -> Result<TradeoffReport> {
    let inst = ProtocolInstance::new(n, make_attack(attack, n)?)?;
    verify_tradeoff(&inst, attack, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloningRecord {
    pub attack: AttackSpec,
    pub max_b: usize,
    pub max_e: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoCloningReport {
    pub n: usize,
    pub threshold: i64,
    pub attacks: Vec<CloningRecord>,
    /// The symmetric cloner leaves both sides at the literal ceiling.
    pub cloner_both_literal: bool,
    /// A perfect cloner of both bases would have `max_B + max_E = 2`.
    pub perfect_cloner_sum: usize,
    pub perfect_cloner_contradicts: bool,
    pub holds: bool,
}

/// No library attack gets both sides below the corollary threshold, and the
/// best symmetric cloner copies neither basis perfectly.
pub fn no_cloning_check(n: usize, c_offset: i32, tolerances: &Tolerances) -> Result<NoCloningReport> {
    let threshold = n as i64 - 3 - 2 * c_offset as i64;
    let attacks = AttackSpec::library()
        .par_iter()
        .map(|spec| {
            let inst = ProtocolInstance::new(n, make_attack(spec, n)?)?;
            let b = analyze_side(&inst, Side::B, tolerances.decision)?;
            let e = analyze_side(&inst, Side::E, tolerances.decision)?;
            let c = max_complexity_corollary(&b.histogram, &e.histogram, n, c_offset);
            Ok(CloningRecord {
                attack: *spec,
                max_b: c.max_b,
                max_e: c.max_e,
                holds: c.holds,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let cloner_both_literal = attacks
        .iter()
        .filter(|r| r.attack == AttackSpec::UniversalCloner)
        .all(|r| r.max_b == n + 1 && r.max_e == n + 1);
    let perfect_cloner_contradicts = 2 < threshold;
    Ok(NoCloningReport {
        n,
        threshold,
        holds: attacks.iter().all(|r| r.holds) && cloner_both_literal,
        attacks,
        cloner_both_literal,
        perfect_cloner_sum: 2,
        perfect_cloner_contradicts,
    })
}
