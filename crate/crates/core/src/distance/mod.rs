//! Distances between measurements: the diamond distance between measuring
//! channels, heuristic and trivial brackets for it, and the simulation
//! pseudo-metric γ.

mod sdp;
mod simulation;

pub use sdp::{GapSample, SolverOptions};
pub use simulation::{one_way_sim_distance, one_way_sim_distance_with, sim_distance, sim_distance_with, OneWaySimulation, SimDistance};

use crate::error::{Error, Result};
use crate::qmat::random::{ginibre, random_pure_vector, rng_for_trial};
use crate::qmat::{trace_norm, CMatrix, HermitianMatrix, Povm, C64};
use sdp::{primal_value, SdpInput};
use serde::Serialize;

/// Choi matrix on `output ⊗ input`.
#[derive(Clone, Debug)]
pub struct ChoiMatrix {
    pub d_in: usize,
    pub d_out: usize,
    pub matrix: HermitianMatrix,
}

impl ChoiMatrix {
    /// Diagonal block for classical output `i`.
    pub fn block(&self, i: usize) -> HermitianMatrix {
        let d = self.d_in;
        let m = self.matrix.as_matrix().view((i * d, i * d), (d, d)).into_owned();
        HermitianMatrix::new(m).expect("square block")
    }
}

fn check_aligned(m: &Povm, n: &Povm) -> Result<()> {
    if m.dim() != n.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: n.dim() });
    }
    if m.len() != n.len() {
        return Err(Error::ShapeMismatch(format!("outcome counts {} and {} differ; pad or postprocess first", m.len(), n.len())));
    }
    Ok(())
}

/// Pads the POVM with fewer outcomes by zero elements.
pub fn align(m: &Povm, n: &Povm) -> Result<(Povm, Povm)> {
    if m.dim() != n.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: n.dim() });
    }
    let k = m.len().max(n.len());
    Ok((m.padded(k), n.padded(k)))
}

/// Choi matrix of `Φ_M − Φ_N`: blocks `(M_i − N_i)ᵀ` along the diagonal.
pub fn choi_of_measuring_diff(m: &Povm, n: &Povm) -> Result<ChoiMatrix> {
    check_aligned(m, n)?;
    let d = m.dim();
    let k = m.len();
    let mut out = CMatrix::zeros(k * d, k * d);
    for i in 0..k {
        let b = (m.element(i) - n.element(i)).transpose();
        out.view_mut((i * d, i * d), (d, d)).copy_from(b.as_matrix());
    }
    Ok(ChoiMatrix { d_in: d, d_out: k, matrix: HermitianMatrix::new(out)? })
}

/// Output of a certified SDP solve.
#[derive(Clone, Debug, Serialize)]
pub struct SdpSolution {
    /// Midpoint of the certified bracket.
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    /// `upper − lower`.
    pub gap: f64,
    pub iterations: usize,
    /// Reference state whose primal value is `lower`.
    #[serde(skip)]
    pub certificate_primal: HermitianMatrix,
    /// Feasible dual blocks `Z_j` whose value is `upper`.
    #[serde(skip)]
    pub certificate_dual: Vec<HermitianMatrix>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub history: Vec<GapSample>,
}

fn diff_blocks(m: &Povm, n: &Povm) -> Vec<CMatrix> {
    (0..m.len()).map(|i| (m.element(i) - n.element(i)).transpose().into_matrix()).collect()
}

/// `½‖Φ_M − Φ_N‖⋄`; the smaller POVM is zero-padded.
pub fn diamond_distance(m: &Povm, n: &Povm, tol: f64) -> Result<SdpSolution> {
    diamond_distance_with(m, n, &SolverOptions::with_tol(tol))
}

pub fn diamond_distance_with(m: &Povm, n: &Povm, opts: &SolverOptions) -> Result<SdpSolution> {
    let (m, n) = align(m, n)?;
    let blocks = diff_blocks(&m, &n);
    let d = m.dim();
    if blocks.iter().all(|b| b.iter().all(|z| z.norm() == 0.0)) {
        let zero = HermitianMatrix::zeros(d);
        return Ok(SdpSolution {
            value: 0.0,
            lower: 0.0,
            upper: 0.0,
            gap: 0.0,
            iterations: 0,
            certificate_primal: HermitianMatrix::identity(d).scale(1.0 / d as f64),
            certificate_dual: vec![zero; blocks.len()],
            history: Vec::new(),
        });
    }
    let input = SdpInput { d, offsets: blocks.iter().map(|b| -b).collect(), sources: None };
    let raw = sdp::solve(&input, opts)?;
    Ok(SdpSolution {
        value: 0.5 * (raw.lower + raw.upper),
        lower: raw.lower,
        upper: raw.upper,
        gap: (raw.upper - raw.lower).max(0.0),
        iterations: raw.iterations,
        certificate_primal: HermitianMatrix::new(raw.rho_hat)?,
        certificate_dual: raw.z.into_iter().map(HermitianMatrix::new).collect::<Result<_>>()?,
        history: raw.history,
    })
}

/// Primal value `Σ_i tr((√ρ D_iᵀ √ρ)₊)` of a reference state; a lower bound on
/// the diamond distance for every state `ρ`.
pub fn diamond_primal_value(m: &Povm, n: &Povm, rho: &HermitianMatrix) -> Result<f64> {
    let (m, n) = align(m, n)?;
    primal_value(rho.as_matrix(), &diff_blocks(&m, &n))
}

/// `Σ_i ½‖M_i − N_i‖₁`, an upper bound on the diamond distance.
pub fn sum_upper_bound(m: &Povm, n: &Povm) -> Result<f64> {
    let (m, n) = align(m, n)?;
    let mut total = 0.0;
    for i in 0..m.len() {
        total += 0.5 * trace_norm(&(m.element(i) - n.element(i)))?;
    }
    Ok(total)
}

fn sign_of(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    h.map_spectrum(|x| if x > 0.0 { 1.0 } else if x < 0.0 { -1.0 } else { 0.0 })
}

/// Alternating ascent over ancilla-assisted pure inputs `ψ ∈ ℂ^d ⊗ ℂ^d`.
///
/// Writing `ψ = vec(Ψ)`, the objective is `½ Σ_i ‖Ψ† D_i Ψ‖₁`; for fixed sign
/// operators `Q_i` it is the quadratic form of `Σ_i Q_iᵀ ⊗ D_i`.
pub fn seesaw_lower_bound(m: &Povm, n: &Povm, restarts: usize, seed: u64) -> Result<f64> {
    let (m, n) = align(m, n)?;
    let d = m.dim();
    let diffs: Vec<HermitianMatrix> = (0..m.len()).map(|i| m.element(i) - n.element(i)).collect();
    let mut best = 0.0f64;
    for r in 0..restarts.max(1) {
        let mut rng = rng_for_trial(seed, r as u64);
        let mut psi = ginibre(d, d, &mut rng);
        psi /= C64::new(psi.norm(), 0.0);
        let mut value = f64::NEG_INFINITY;
        for _ in 0..1000 {
            let mut h = CMatrix::zeros(d * d, d * d);
            for dm in &diffs {
                let x = HermitianMatrix::new(psi.adjoint() * dm.as_matrix() * &psi)?;
                let q = sign_of(&x)?;
                h += q.as_matrix().transpose().kronecker(dm.as_matrix());
            }
            let e = HermitianMatrix::new(h)?.eig()?;
            let top = e.vector(d * d - 1);
            psi = CMatrix::from_fn(d, d, |row, col| top[col * d + row]);
            let next = 0.5 * e.max();
            if next <= value + 1e-14 {
                value = value.max(next);
                break;
            }
            value = next;
        }
        best = best.max(value);
    }
    Ok(best)
}

/// Same ascent restricted to product inputs: `½ Σ_i |⟨a|D_i|a⟩|`.
pub fn seesaw_product_lower_bound(m: &Povm, n: &Povm, restarts: usize, seed: u64) -> Result<f64> {
    let (m, n) = align(m, n)?;
    let d = m.dim();
    let diffs: Vec<HermitianMatrix> = (0..m.len()).map(|i| m.element(i) - n.element(i)).collect();
    let mut best = 0.0f64;
    for r in 0..restarts.max(1) {
        let mut rng = rng_for_trial(seed, r as u64);
        let mut a = random_pure_vector(d, &mut rng);
        let mut value = f64::NEG_INFINITY;
        for _ in 0..1000 {
            let mut h = HermitianMatrix::zeros(d);
            for dm in &diffs {
                let p = HermitianMatrix::projector(&a).inner(dm);
                let s = if p >= 0.0 { 1.0 } else { -1.0 };
                h = &h + &(dm * s);
            }
            let e = h.eig()?;
            a = e.vector(d - 1);
            let next = 0.5 * e.max();
            if next <= value + 1e-14 {
                value = value.max(next);
                break;
            }
            value = next;
        }
        best = best.max(value);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::{convex_combine, permute};
    use crate::qmat::random::{random_povm, rng_from_seed};
    use crate::qmat::ProbabilityVector;

    fn mixing_pair(d: usize, lambda: f64) -> (Povm, Povm) {
        let mut v = vec![C64::new(0.0, 0.0); d];
        v[0] = C64::new(1.0, 0.0);
        let p = HermitianMatrix::projector(&v);
        let m = Povm::binary(&p).unwrap();
        let swapped = permute(&m, &[1, 0]).unwrap();
        let ml = convex_combine(&[m.clone(), swapped], &ProbabilityVector::new(vec![1.0 - lambda, lambda]).unwrap()).unwrap();
        (ml, m)
    }

    #[test]
    fn choi_blocks_are_transposed_differences() {
        let mut rng = rng_from_seed(51);
        let m = random_povm(3, 2, &mut rng).unwrap();
        let n = random_povm(3, 2, &mut rng).unwrap();
        let c = choi_of_measuring_diff(&m, &n).unwrap();
        for i in 0..2 {
            let direct = (m.element(i) - n.element(i)).transpose();
            assert!(c.block(i).max_abs_diff(&direct) < 1e-15);
        }
        assert!(c.matrix.trace().abs() < 1e-12);
        let cross = c.matrix.as_matrix()[(0, 3)];
        assert_eq!(cross, C64::new(0.0, 0.0));
    }

    #[test]
    fn identical_povms_are_at_distance_zero() {
        let m = Povm::computational(3);
        let s = diamond_distance(&m, &m, 1e-8).unwrap();
        assert_eq!(s.value, 0.0);
    }

    #[test]
    fn mixing_pair_has_distance_lambda() {
        for &(d, lambda) in &[(2, 0.1), (3, 0.3), (4, 0.45)] {
            let (ml, m) = mixing_pair(d, lambda);
            let s = diamond_distance(&ml, &m, 1e-8).unwrap();
            assert!(s.gap <= 1e-8);
            assert!((s.value - lambda).abs() < 1e-7, "d={d}: {} vs {lambda}", s.value);
        }
    }

    #[test]
    fn trivial_vs_projective_after_split() {
        let half = HermitianMatrix::identity(2).scale(0.5);
        let m = Povm::new(vec![half.clone(), half]).unwrap();
        let s = diamond_distance(&m, &Povm::computational(2), 1e-8).unwrap();
        assert!((s.value - 0.5).abs() < 1e-7, "{s:?}");
    }

    #[test]
    fn sandwich_on_random_pairs() {
        let mut rng = rng_from_seed(52);
        for trial in 0..5 {
            let m = random_povm(2, 3, &mut rng).unwrap();
            let n = random_povm(2, 3, &mut rng).unwrap();
            let s = diamond_distance(&m, &n, 1e-8).unwrap();
            let lo = seesaw_lower_bound(&m, &n, 8, trial).unwrap();
            let prod = seesaw_product_lower_bound(&m, &n, 8, trial).unwrap();
            let hi = sum_upper_bound(&m, &n).unwrap();
            assert!(prod <= lo + 1e-9);
            assert!(lo <= s.upper + 1e-9 && s.lower <= hi + 1e-9);
            assert!((s.value - lo).abs() < 1e-5, "{} vs {lo}", s.value);
        }
    }

    #[test]
    fn unaligned_choi_rejected() {
        assert!(choi_of_measuring_diff(&Povm::trivial(2), &Povm::computational(2)).is_err());
    }
}
