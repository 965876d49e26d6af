use super::{afw_bound, check_pair, BoundKind, BoundReport};
use crate::entropy::{observational_entropy, relative_entropy_quantum, von_neumann};
use crate::error::{Error, Result};
use crate::povm::{cq_relative_entropy, partial_measure};
use crate::qmat::{trace_distance, DensityMatrix, ExtendedReal, Povm};
use serde::Serialize;

fn check_bipartite(rho_ab: &DensityMatrix, d_a: usize, d_b: usize) -> Result<()> {
    if rho_ab.dim() != d_a * d_b {
        return Err(Error::DimensionMismatch { expected: d_a * d_b, found: rho_ab.dim() });
    }
    Ok(())
}

/// Conditional observational entropy `S_{M_A}(A|B)`, via
/// `S_M(ρ_A) − S(ρ_B) + Σ_j p_j S(ρ_j)`.
pub fn conditional_oe(m_a: &Povm, rho_ab: &DensityMatrix, d_a: usize, d_b: usize) -> Result<f64> {
    check_bipartite(rho_ab, d_a, d_b)?;
    let cq = partial_measure(m_a, rho_ab, d_a, d_b)?;
    let rho_a = rho_ab.partial_trace_second(d_a, d_b)?;
    let rho_b = rho_ab.partial_trace_first(d_a, d_b)?;
    let mut avg = 0.0;
    for j in 0..cq.len() {
        if cq.present[j] {
            avg += cq.weights.get(j) * von_neumann(&cq.conditionals[j])?;
        }
    }
    Ok(observational_entropy(m_a, &rho_a)?.total - von_neumann(&rho_b)? + avg)
}

/// `log d_A − D((Φ⊗I)ρ ‖ (Φ⊗I)(1/d_A ⊗ ω_B))` evaluated on the block-diagonal
/// embedding of both classical-quantum states.
fn candidate_value(m_a: &Povm, rho_ab: &DensityMatrix, omega_b: &DensityMatrix, d_a: usize, d_b: usize, embedded: bool) -> Result<ExtendedReal> {
    if omega_b.dim() != d_b {
        return Err(Error::DimensionMismatch { expected: d_b, found: omega_b.dim() });
    }
    let reference = DensityMatrix::maximally_mixed(d_a).tensor(omega_b);
    let lhs = partial_measure(m_a, rho_ab, d_a, d_b)?;
    let rhs = partial_measure(m_a, &reference, d_a, d_b)?;
    let d = if embedded { relative_entropy_quantum(&lhs.embed()?, &rhs.embed()?)? } else { cq_relative_entropy(&lhs, &rhs)? };
    Ok(match d {
        ExtendedReal::Finite(x) => ExtendedReal::Finite((d_a as f64).ln() - x),
        ExtendedReal::Infinite => ExtendedReal::Infinite,
    })
}

/// Same quantity from the defining relative entropy, with `ω_B = ρ_B`.
/// `Infinite` here stands for `−∞`.
pub fn conditional_oe_by_definition(m_a: &Povm, rho_ab: &DensityMatrix, d_a: usize, d_b: usize) -> Result<ExtendedReal> {
    check_bipartite(rho_ab, d_a, d_b)?;
    let rho_b = rho_ab.partial_trace_first(d_a, d_b)?;
    candidate_value(m_a, rho_ab, &rho_b, d_a, d_b, true)
}

#[derive(Clone, Debug, Serialize)]
pub struct VariationalReport {
    pub value: f64,
    /// Candidate value at `ω_B = ρ_B`.
    pub saturated: f64,
    /// Largest candidate over the trial states; `−∞` candidates are skipped.
    pub best_trial: Option<f64>,
    /// `max(0, best_trial − value)`.
    pub worst_excess: f64,
    pub trials: usize,
    pub passed: bool,
}

/// Checks `log d_A − D(… ‖ …(1/d_A ⊗ ω_B)) ≤ S_{M_A}(A|B)` on each trial `ω_B`
/// and equality at `ω_B = ρ_B`.
pub fn conditional_oe_variational_check(
    m_a: &Povm,
    rho_ab: &DensityMatrix,
    d_a: usize,
    d_b: usize,
    trial_states: &[DensityMatrix],
) -> Result<VariationalReport> {
    let value = conditional_oe(m_a, rho_ab, d_a, d_b)?;
    let rho_b = rho_ab.partial_trace_first(d_a, d_b)?;
    let saturated = candidate_value(m_a, rho_ab, &rho_b, d_a, d_b, false)?
        .finite()
        .ok_or_else(|| Error::NumericalFailure("candidate at ω_B = ρ_B is infinite".into()))?;
    let mut best_trial: Option<f64> = None;
    for w in trial_states {
        if let ExtendedReal::Finite(c) = candidate_value(m_a, rho_ab, w, d_a, d_b, false)? {
            best_trial = Some(best_trial.map_or(c, |b| b.max(c)));
        }
    }
    let worst_excess = best_trial.map_or(0.0, |b| (b - value).max(0.0));
    let passed = worst_excess <= 1e-9 && (saturated - value).abs() <= 1e-9;
    Ok(VariationalReport { value, saturated, best_trial, worst_excess, trials: trial_states.len(), passed })
}

/// `|S_{M_A}(A|B)_ρ − S_{M_A}(A|B)_σ| ≤ g(ε) + ε log d_A`.
pub fn certify_conditional_continuity(
    m_a: &Povm,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    d_a: usize,
    d_b: usize,
) -> Result<BoundReport> {
    check_pair(rho, sigma)?;
    let eps = trace_distance(rho, sigma)?;
    let kappa = (d_a as f64).ln();
    let a = conditional_oe(m_a, rho, d_a, d_b)?;
    let b = conditional_oe(m_a, sigma, d_a, d_b)?;
    BoundReport::new(BoundKind::Conditional, (a - b).abs(), afw_bound(eps, kappa)?, eps, rho.dim(), kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::random::{random_density, random_povm, rng_from_seed};
    use crate::qmat::C64;

    fn bell() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = C64::new(0.0, 0.0);
        DensityMatrix::pure(&[C64::new(s, 0.0), z, z, C64::new(s, 0.0)]).unwrap()
    }

    #[test]
    fn product_state_reduces_to_local_oe() {
        let mut rng = rng_from_seed(41);
        let ra = random_density(2, 2, &mut rng).unwrap();
        let rb = random_density(3, 3, &mut rng).unwrap();
        let m = random_povm(2, 3, &mut rng).unwrap();
        let v = conditional_oe(&m, &ra.tensor(&rb), 2, 3).unwrap();
        let s = observational_entropy(&m, &ra).unwrap().total;
        assert!((v - s).abs() < 1e-10);
    }

    #[test]
    fn bell_state_projective_is_zero() {
        let v = conditional_oe(&Povm::computational(2), &bell(), 2, 2).unwrap();
        assert!(v.abs() < 1e-10, "{v}");
    }

    #[test]
    fn closed_form_matches_definition() {
        let mut rng = rng_from_seed(42);
        for _ in 0..20 {
            let rho = random_density(6, 6, &mut rng).unwrap();
            let m = random_povm(3, 2, &mut rng).unwrap();
            let a = conditional_oe(&m, &rho, 3, 2).unwrap();
            let b = conditional_oe_by_definition(&m, &rho, 3, 2).unwrap().to_f64();
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn variational_formula_holds() {
        let mut rng = rng_from_seed(43);
        let rho = random_density(4, 3, &mut rng).unwrap();
        let m = random_povm(2, 3, &mut rng).unwrap();
        let trials: Vec<_> = (0..10).map(|_| random_density(2, 2, &mut rng).unwrap()).chain([DensityMatrix::maximally_mixed(2)]).collect();
        let r = conditional_oe_variational_check(&m, &rho, 2, 2, &trials).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn continuity_self_pair() {
        let r = certify_conditional_continuity(&Povm::computational(2), &bell(), &bell(), 2, 2).unwrap();
        assert_eq!(r.quantity_lhs, 0.0);
        assert!(r.passed());
    }

    #[test]
    fn wrong_dimension_rejected() {
        assert!(conditional_oe(&Povm::computational(2), &bell(), 2, 3).is_err());
    }
}
