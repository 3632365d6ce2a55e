//! Seeded generators for random test instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{vec_norm, ComplexMatrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    random_matrix(rng, n, n).hermitian_part()
}

/// Normalized `G G^dagger` for Gaussian `G`; full rank almost surely.
pub fn random_density(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = random_matrix(rng, n, n);
    let rho = g.matmul(&g.adjoint()).expect("square");
    let tr = rho.trace().re;
    rho.scale_real(1.0 / tr).hermitian_part()
}

pub fn random_pure_state(rng: &mut impl Rng, n: usize) -> Vec<C64> {
    let mut v: Vec<C64> = (0..n).map(|_| gaussian(rng)).collect();
    let norm = vec_norm(&v);
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

/// Orthonormal columns from Gram-Schmidt on Gaussian vectors.
pub fn random_orthonormal(rng: &mut impl Rng, n: usize, k: usize) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(k);
    while basis.len() < k {
        let mut v: Vec<C64> = (0..n).map(|_| gaussian(rng)).collect();
        for b in &basis {
            let overlap: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= overlap * bi;
            }
        }
        let norm = vec_norm(&v);
        if norm > 1e-8 {
            v.iter_mut().for_each(|z| *z /= norm);
            basis.push(v);
        }
    }
    basis
}

/// Projector of the given rank onto a Haar-like random subspace.
pub fn random_projector(rng: &mut impl Rng, n: usize, rank: usize) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(n, n);
    for v in random_orthonormal(rng, n, rank) {
        p.add_scaled_assign(&ComplexMatrix::outer(&v), C64::new(1.0, 0.0))
            .expect("same shape");
    }
    p
}
