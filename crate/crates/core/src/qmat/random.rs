//! Seeded samplers for the fuzzing campaigns.
//!
//! All randomness flows through [`QRng`], a ChaCha20 stream generator: a
//! 64-bit seed plus a per-trial stream index fully determine every draw, so
//! campaigns are reproducible regardless of scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::hermitian::{CMatrix, HermitianMatrix, C64};
use super::measurement::Povm;
use super::state::{DensityMatrix, ProbabilityVector};
use crate::error::{Error, Result};

pub type QRng = ChaCha20Rng;

pub fn rng_from_seed(seed: u64) -> QRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Independent stream for trial `index` of a campaign seeded with `seed`.
pub fn rng_for_trial(seed: u64, index: u64) -> QRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `rows × cols` matrix of i.i.d. standard complex Gaussians.
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re * s, im * s)
    })
}

pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> HermitianMatrix {
    HermitianMatrix::from_raw(ginibre(dim, dim, rng))
}

/// Haar-random unit vector.
pub fn random_pure_vector(dim: usize, rng: &mut impl Rng) -> Vec<C64> {
    let g = ginibre(dim, 1, rng);
    let norm = g.norm();
    g.iter().map(|z| z / norm).collect()
}

/// Ginibre state `G G† / tr(G G†)` with `G` of shape `dim × rank`.
pub fn random_density(dim: usize, rank: usize, rng: &mut impl Rng) -> Result<DensityMatrix> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(Error::Domain(format!("random_density needs 1 ≤ rank ≤ dim, got rank {rank}, dim {dim}")));
    }
    let g = ginibre(dim, rank, rng);
    DensityMatrix::from_unnormalized(HermitianMatrix::from_raw(&g * g.adjoint()))
}

/// Full-rank Ginibre state.
pub fn random_full_rank_density(dim: usize, rng: &mut impl Rng) -> Result<DensityMatrix> {
    random_density(dim, dim, rng)
}

/// Uniform (flat Dirichlet) probability vector.
pub fn random_probability(n: usize, rng: &mut impl Rng) -> ProbabilityVector {
    let w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    ProbabilityVector::normalized(w).expect("exponential weights are positive")
}

/// POVM `M_i = S^{-1/2} A_i S^{-1/2}` with `A_i` Ginibre squares and `S = Σ A_i`.
pub fn random_povm(dim: usize, outcomes: usize, rng: &mut impl Rng) -> Result<Povm> {
    if dim == 0 || outcomes == 0 {
        return Err(Error::Domain("random_povm needs dim ≥ 1 and outcomes ≥ 1".into()));
    }
    for _ in 0..2 {
        let parts: Vec<HermitianMatrix> = (0..outcomes)
            .map(|_| {
                let g = ginibre(dim, dim, rng);
                HermitianMatrix::from_raw(&g * g.adjoint())
            })
            .collect();
        let sum = parts.iter().fold(HermitianMatrix::zeros(dim), |acc, a| &acc + a);
        let e = sum.eig()?;
        if e.min() <= 1e-12 {
            continue;
        }
        let inv_sqrt = e.rebuild(|x| 1.0 / x.sqrt());
        let elements = parts.iter().map(|a| a.conjugate_by(inv_sqrt.as_matrix())).collect();
        return Povm::new(elements);
    }
    Err(Error::NumericalFailure("random_povm drew a singular normalizer twice".into()))
}

/// Random rank-one projective measurement (Haar-random basis).
pub fn random_projective(dim: usize, rng: &mut impl Rng) -> Result<Povm> {
    Povm::eigenbasis(&random_hermitian(dim, rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_is_pure() {
        let mut rng = rng_from_seed(7);
        for d in 2..6 {
            let rho = random_density(d, 1, &mut rng).unwrap();
            assert!((rho.purity() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn full_rank_has_positive_spectrum() {
        let mut rng = rng_from_seed(8);
        let rho = random_density(5, 5, &mut rng).unwrap();
        assert!(rho.spectrum().unwrap()[0] > 1e-8);
    }

    #[test]
    fn deterministic_given_seed() {
        let a = random_density(4, 2, &mut rng_from_seed(99)).unwrap();
        let b = random_density(4, 2, &mut rng_from_seed(99)).unwrap();
        assert_eq!(a, b);
        let m = random_povm(3, 4, &mut rng_for_trial(5, 11)).unwrap();
        let n = random_povm(3, 4, &mut rng_for_trial(5, 11)).unwrap();
        assert_eq!(m, n);
    }

    #[test]
    fn single_outcome_povm_is_identity() {
        let m = random_povm(3, 1, &mut rng_from_seed(1)).unwrap();
        assert!(m.element(0).max_abs_diff(&HermitianMatrix::identity(3)) < 1e-12);
    }

    #[test]
    fn qubit_povm_sums_to_identity() {
        let m = random_povm(2, 4, &mut rng_from_seed(2)).unwrap();
        let sum = m.elements().iter().fold(HermitianMatrix::zeros(2), |a, e| &a + e);
        assert!(sum.max_abs_diff(&HermitianMatrix::identity(2)) <= 1e-9);
    }

    #[test]
    fn invalid_rank_rejected() {
        assert!(random_density(2, 3, &mut rng_from_seed(0)).is_err());
        assert!(random_density(2, 0, &mut rng_from_seed(0)).is_err());
    }
}
