//! Counting bounds on low-complexity messages and the corollaries drawn
//! from them. Everything here is arithmetic on length histograms, so it
//! scales to message lengths far beyond what the state simulation reaches.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::complexity::ComplexityProfile;
use crate::error::{Error, Result};

/// `2^n (1 + 2^{(l + m - n + 3)/2 + c})`, the bound before the machine
/// constant is folded in.
pub fn tradeoff_bound(l: usize, m: usize, n: usize, c_offset: i32) -> f64 {
    let exponent = (l as f64 + m as f64 - n as f64 + 3.0) / 2.0 + c_offset as f64;
    2f64.powi(n as i32) * (1.0 + exponent.exp2())
}

/// `2^n (1 + 2^{(l + m - n)/2 + c})`, the bound as the theorem states it.
pub fn theorem_bound(l: usize, m: usize, n: usize, c_offset: i32) -> f64 {
    let exponent = (l as f64 + m as f64 - n as f64) / 2.0 + c_offset as f64;
    2f64.powi(n as i32) * (1.0 + exponent.exp2())
}

/// Whether [`tradeoff_bound`] says anything beyond the trivial `2 * 2^n`.
/// Holds exactly when `l + m < n - 3 - 2c`.
pub fn is_nontrivial(l: usize, m: usize, n: usize, c_offset: i32) -> bool {
    tradeoff_bound(l, m, n, c_offset) < 2f64.powi(n as i32 + 1)
}

/// Number of messages at each proxy length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthHistogram {
    pub n: usize,
    pub counts: BTreeMap<usize, u64>,
}

impl LengthHistogram {
    /// Histogram given directly as `(length, count)` pairs; the counts must
    /// cover all `2^n` messages.
    pub fn from_counts(n: usize, pairs: &[(usize, u64)]) -> Result<Self> {
        let mut counts = BTreeMap::new();
        for &(len, count) in pairs {
            *counts.entry(len).or_insert(0) += count;
        }
        let total: u64 = counts.values().sum();
        if n >= 64 || total != 1u64 << n {
            return Err(Error::InvalidParameter(format!(
                "histogram covers {total} messages, expected 2^{n}"
            )));
        }
        Ok(Self { n, counts })
    }

    pub fn from_profile(profile: &ComplexityProfile) -> Self {
        let mut counts = BTreeMap::new();
        for &len in &profile.lengths {
            *counts.entry(len).or_insert(0) += 1;
        }
        Self { n: profile.n, counts }
    }

    /// `|{msg : len(msg) <= l}|`.
    pub fn count_le(&self, l: usize) -> u64 {
        self.counts.range(..=l).map(|(_, c)| c).sum()
    }

    pub fn max_length(&self) -> usize {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }

    /// Average length under uniformly distributed messages.
    pub fn average(&self) -> f64 {
        let total: u64 = self.counts.values().sum();
        let weighted: f64 = self.counts.iter().map(|(&l, &c)| l as f64 * c as f64).sum();
        weighted / total as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Corollary1 {
    pub max_b: usize,
    pub max_e: usize,
    pub sum: usize,
    pub threshold: i64,
    pub holds: bool,
}

/// `max_z len_B(z) + max_x len_E(x) >= n - 3 - 2c`.
///
/// At `l = max_B`, `m = max_E` every message is counted on both sides, so the
/// bound has to reach `2 * 2^n`, which forces `l + m >= n - 3 - 2c`.
pub fn max_complexity_corollary(b: &LengthHistogram, e: &LengthHistogram, n: usize, c_offset: i32) -> Corollary1 {
    let (max_b, max_e) = (b.max_length(), e.max_length());
    let threshold = n as i64 - 3 - 2 * c_offset as i64;
    Corollary1 {
        max_b,
        max_e,
        sum: max_b + max_e,
        threshold,
        holds: (max_b + max_e) as i64 >= threshold,
    }
}

/// Average-length sum against `n - c`. Reported, not asserted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AverageComplexity {
    pub avg_b: f64,
    pub avg_e: f64,
    pub avg_sum: f64,
    pub comparator: f64,
    pub meets_comparator: bool,
}

pub fn average_complexity_check(b: &LengthHistogram, e: &LengthHistogram, n: usize, c_offset: i32) -> AverageComplexity {
    let (avg_b, avg_e) = (b.average(), e.average());
    let comparator = n as f64 - c_offset as f64;
    AverageComplexity {
        avg_b,
        avg_e,
        avg_sum: avg_b + avg_e,
        comparator,
        meets_comparator: avg_b + avg_e >= comparator,
    }
}

/// A synthetic pair of profiles whose average lengths are large while the
/// counting bound fails: three quarters of Bob's messages at `N/2`, three
/// quarters of Eve's at `N/3`, the rest at `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AverageVersusCounting {
    pub n: usize,
    pub avg_sum: f64,
    pub nine_n_over_eight: f64,
    pub l: usize,
    pub m: usize,
    pub count_sum: u64,
    pub theorem_bound: f64,
    pub pre_constant_bound: f64,
    pub violates_theorem_form: bool,
    pub violates_pre_constant_form: bool,
}

pub fn average_versus_counting(n: usize) -> Result<AverageVersusCounting> {
    if n == 0 || !n.is_multiple_of(6) || n > 60 {
        return Err(Error::InvalidParameter(format!(
            "synthetic profile needs a positive multiple of 6 below 64, got {n}"
        )));
    }
    let quarter = 1u64 << (n - 2);
    let b = LengthHistogram::from_counts(n, &[(n / 2, 3 * quarter), (n, quarter)])?;
    let e = LengthHistogram::from_counts(n, &[(n / 3, 3 * quarter), (n, quarter)])?;
    let (l, m) = (n / 2, n / 3);
    let count_sum = b.count_le(l) + e.count_le(m);
    let theorem = theorem_bound(l, m, n, 0);
    let pre = tradeoff_bound(l, m, n, 0);
    Ok(AverageVersusCounting {
        n,
        avg_sum: b.average() + e.average(),
        nine_n_over_eight: 9.0 * n as f64 / 8.0,
        l,
        m,
        count_sum,
        theorem_bound: theorem,
        pre_constant_bound: pre,
        violates_theorem_form: count_sum as f64 > theorem,
        violates_pre_constant_form: count_sum as f64 > pre,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_values() {
        assert_eq!(tradeoff_bound(0, 0, 1, 0), 6.0);
        assert_eq!(tradeoff_bound(1, 1, 3, 0), 24.0);
        assert_eq!(tradeoff_bound(2, 2, 1, 0), 18.0);
        assert_eq!(theorem_bound(2, 2, 4, 0), 32.0);
    }

    #[test]
    fn nontrivial_region() {
        for n in 1..12 {
            for c in -1..2 {
                for l in 0..n + 2 {
                    for m in 0..n + 2 {
                        let expected = ((l + m) as i64) < n as i64 - 3 - 2 * c as i64;
                        assert_eq!(is_nontrivial(l, m, n, c), expected, "n={n} l={l} m={m} c={c}");
                    }
                }
            }
        }
    }

    #[test]
    fn histogram_counts() {
        let h = LengthHistogram::from_counts(2, &[(1, 3), (3, 1)]).unwrap();
        assert_eq!(h.count_le(0), 0);
        assert_eq!(h.count_le(2), 3);
        assert_eq!(h.count_le(3), 4);
        assert_eq!(h.max_length(), 3);
        assert!((h.average() - 1.5).abs() < 1e-15);
        assert!(LengthHistogram::from_counts(2, &[(1, 3)]).is_err());
    }

    #[test]
    fn corollary_examples() {
        let one = |n| LengthHistogram::from_counts(n, &[(1, 1 << n)]).unwrap();
        let lit = |n: usize| LengthHistogram::from_counts(n, &[(n + 1, 1 << n)]).unwrap();
        let c = max_complexity_corollary(&one(3), &lit(3), 3, 0);
        assert_eq!((c.max_b, c.max_e, c.sum, c.threshold), (1, 4, 5, 0));
        assert!(c.holds);
        let c = max_complexity_corollary(&lit(4), &one(4), 4, 0);
        assert_eq!((c.sum, c.threshold), (6, 1));
        // A perfect cloner of both bases would need 1 + 1 >= n - 3.
        assert!(!max_complexity_corollary(&one(6), &one(6), 6, 0).holds);
    }

    #[test]
    fn average_of_identity_profile() {
        let b = LengthHistogram::from_counts(2, &[(1, 4)]).unwrap();
        let e = LengthHistogram::from_counts(2, &[(3, 4)]).unwrap();
        let a = average_complexity_check(&b, &e, 2, 0);
        assert_eq!(a.avg_sum, 4.0);
        assert!(a.meets_comparator);
    }

    #[test]
    fn synthetic_profile_at_24() {
        let r = average_versus_counting(24).unwrap();
        assert_eq!(r.avg_sum, 27.0);
        assert_eq!(r.count_sum, 3 << 23);
        assert!(r.violates_theorem_form);
        assert!(!r.violates_pre_constant_form);
        // the pre-constant form only gives way once (3 - N/6)/2 < -1
        assert!(average_versus_counting(36).unwrap().violates_pre_constant_form);
        assert!(!average_versus_counting(30).unwrap().violates_pre_constant_form);
        assert!(average_versus_counting(25).is_err());
    }
}
