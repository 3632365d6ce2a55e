//! Index bookkeeping for multipartite operators.
//!
//! Subsystem 0 is the leftmost tensor factor and occupies the most
//! significant digit of a flat index.

use crate::error::{Error, Result};
use crate::linalg::matrix::{ComplexMatrix, C64, ZERO};

pub fn total_dim(dims: &[usize]) -> Result<usize> {
    dims.iter().try_fold(1usize, |acc, &d| {
        acc.checked_mul(d)
            .ok_or_else(|| Error::Capacity(format!("dimension product of {dims:?} overflows")))
    })
}

/// Splits a flat index into per-subsystem digits.
pub fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

pub fn flat_index(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

/// For a reordering of subsystems (`order[k]` is the old subsystem placed at
/// position `k`) returns `map` with `map[new_index] = old_index`.
pub fn permutation_map(dims: &[usize], order: &[usize]) -> Result<Vec<usize>> {
    check_permutation(dims.len(), order)?;
    let n = total_dim(dims)?;
    let new_dims: Vec<usize> = order.iter().map(|&o| dims[o]).collect();
    let mut map = vec![0; n];
    let mut old_digits = vec![0; dims.len()];
    for (new_index, slot) in map.iter_mut().enumerate() {
        let new_digits = digits(new_index, &new_dims);
        for (k, &o) in order.iter().enumerate() {
            old_digits[o] = new_digits[k];
        }
        *slot = flat_index(&old_digits, dims);
    }
    Ok(map)
}

fn check_permutation(len: usize, order: &[usize]) -> Result<()> {
    let mut seen = vec![false; len];
    if order.len() != len {
        return Err(Error::Dimension(format!(
            "permutation {order:?} does not cover {len} subsystems"
        )));
    }
    for &o in order {
        if o >= len || seen[o] {
            return Err(Error::Dimension(format!("invalid permutation {order:?}")));
        }
        seen[o] = true;
    }
    Ok(())
}

/// Reorders the tensor factors of a state vector.
pub fn permute_ket(ket: &[C64], dims: &[usize], order: &[usize]) -> Result<Vec<C64>> {
    if total_dim(dims)? != ket.len() {
        return Err(Error::Dimension(format!(
            "vector of length {} vs dims {dims:?}",
            ket.len()
        )));
    }
    let map = permutation_map(dims, order)?;
    Ok(map.iter().map(|&old| ket[old]).collect())
}

/// Reorders the tensor factors of the row space of `m` (its output space).
pub fn permute_rows(m: &ComplexMatrix, dims: &[usize], order: &[usize]) -> Result<ComplexMatrix> {
    if total_dim(dims)? != m.rows() {
        return Err(Error::Dimension(format!(
            "{} rows vs dims {dims:?}",
            m.rows()
        )));
    }
    let map = permutation_map(dims, order)?;
    Ok(ComplexMatrix::from_fn(m.rows(), m.cols(), |r, c| m[(map[r], c)]))
}

/// Reorders the tensor factors of a square operator on both sides.
pub fn permute_operator(m: &ComplexMatrix, dims: &[usize], order: &[usize]) -> Result<ComplexMatrix> {
    if !m.is_square() || total_dim(dims)? != m.rows() {
        return Err(Error::Dimension(format!(
            "{}x{} operator vs dims {dims:?}",
            m.rows(),
            m.cols()
        )));
    }
    let map = permutation_map(dims, order)?;
    Ok(ComplexMatrix::from_fn(m.rows(), m.cols(), |r, c| m[(map[r], map[c])]))
}

/// Traces out every subsystem not listed in `keep`. The kept subsystems stay
/// in their original relative order.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "partial trace of non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    if total_dim(dims)? != m.rows() {
        return Err(Error::Dimension(format!(
            "dims {dims:?} do not match side {}",
            m.rows()
        )));
    }
    if keep.is_empty() {
        return Err(Error::Dimension("keep set is empty".into()));
    }
    let mut kept = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() || kept[k] {
            return Err(Error::Dimension(format!(
                "keep set {keep:?} invalid for {} subsystems",
                dims.len()
            )));
        }
        kept[k] = true;
    }

    let keep_dims: Vec<usize> = (0..dims.len()).filter(|&i| kept[i]).map(|i| dims[i]).collect();
    let trace_dims: Vec<usize> = (0..dims.len()).filter(|&i| !kept[i]).map(|i| dims[i]).collect();
    let keep_dim: usize = keep_dims.iter().product();
    let trace_dim: usize = trace_dims.iter().product();

    // groups[t] lists (full index, kept index) for traced index t.
    let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(keep_dim); trace_dim];
    for full in 0..m.rows() {
        let d = digits(full, dims);
        let mut k_idx = 0;
        let mut t_idx = 0;
        for (i, &x) in d.iter().enumerate() {
            if kept[i] {
                k_idx = k_idx * dims[i] + x;
            } else {
                t_idx = t_idx * dims[i] + x;
            }
        }
        groups[t_idx].push((full, k_idx));
    }

    let mut out = ComplexMatrix::zeros(keep_dim, keep_dim);
    for group in &groups {
        for &(r_full, r_keep) in group {
            for &(c_full, c_keep) in group {
                let v = m[(r_full, c_full)];
                if v != ZERO {
                    out[(r_keep, c_keep)] += v;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::tensor;
    use crate::random::{random_density, seeded_rng};

    #[test]
    fn digits_round_trip() {
        let dims = [2, 3, 2];
        for i in 0..12 {
            assert_eq!(flat_index(&digits(i, &dims), &dims), i);
        }
        assert_eq!(digits(5, &dims), vec![0, 2, 1]);
    }

    #[test]
    fn product_state_factorizes() {
        let mut rng = seeded_rng(3);
        let rho = random_density(&mut rng, 2);
        let sigma = random_density(&mut rng, 3);
        let joint = tensor(&rho, &sigma).unwrap();
        let back = partial_trace(&joint, &[2, 3], &[0]).unwrap();
        assert!(back.max_abs_diff(&rho).unwrap() < 1e-12);
        let back = partial_trace(&joint, &[2, 3], &[1]).unwrap();
        assert!(back.max_abs_diff(&sigma).unwrap() < 1e-12);
    }

    #[test]
    fn keep_all_is_identity_map() {
        let mut rng = seeded_rng(5);
        let rho = random_density(&mut rng, 4);
        let same = partial_trace(&rho, &[2, 2], &[0, 1]).unwrap();
        assert_eq!(same, rho);
    }

    #[test]
    fn epr_marginal_is_maximally_mixed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let phi = [h, 0.0, 0.0, h].map(|x| C64::new(x, 0.0));
        let rho = ComplexMatrix::outer(&phi);
        let reduced = partial_trace(&rho, &[2, 2], &[0]).unwrap();
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(reduced.max_abs_diff(&half).unwrap() < 1e-15);
    }

    #[test]
    fn dimension_errors() {
        let rho = ComplexMatrix::identity(4);
        assert!(partial_trace(&rho, &[2, 3], &[0]).is_err());
        assert!(partial_trace(&rho, &[2, 2], &[]).is_err());
        assert!(partial_trace(&rho, &[2, 2], &[2]).is_err());
        assert!(partial_trace(&rho, &[2, 2], &[0, 0]).is_err());
    }

    #[test]
    fn swap_permutation() {
        let ket: Vec<C64> = (0..6).map(|i| C64::new(i as f64, 0.0)).collect();
        // dims [2,3] -> [3,2]
        let swapped = permute_ket(&ket, &[2, 3], &[1, 0]).unwrap();
        // new index (b, a) with b in 0..3, a in 0..2 -> old index a*3 + b
        let expected: Vec<f64> = vec![0.0, 3.0, 1.0, 4.0, 2.0, 5.0];
        assert_eq!(swapped.iter().map(|z| z.re).collect::<Vec<_>>(), expected);
        assert!(permute_ket(&ket, &[2, 3], &[0, 0]).is_err());
    }
}
