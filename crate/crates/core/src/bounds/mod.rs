//! Continuity machinery: the ωΔ decomposition, naive and AFW-type bounds,
//! concavity-gap certificates, relative-entropy distance to convex sets,
//! conditional observational entropy and restricted-measurement divergences.

mod conditional;
mod hull;
mod report;
mod restricted;

pub use conditional::{
    certify_conditional_continuity, conditional_oe, conditional_oe_by_definition, conditional_oe_variational_check, VariationalReport,
};
pub use hull::{
    certify_set_distance_continuity, hull_minimize, min_rel_entropy_to_set, ConvexStateSet, HullMinimum, DEFAULT_FW_TOLERANCE, FW_MAX_ITER,
};
pub use report::{BoundKind, BoundReport, CertificateStatus, PASS_TOLERANCE};
pub use restricted::{certify_restricted_continuity, restricted_divergence, RestrictedDivergence, ValueOrder};

use crate::entropy::{binary_h, g_func, observational_entropy, shannon, shannon_of, von_neumann};
use crate::error::{Error, Result};
use crate::qmat::{trace_distance, DensityMatrix, HermitianMatrix, Povm, ProbabilityVector};

/// Trace distances at or below this use the degenerate decomposition.
pub const DEGENERATE_EPSILON: f64 = 1e-12;

/// `ω = ρ/(1+ε) + ε Δ₋/(1+ε) = σ/(1+ε) + ε Δ₊/(1+ε)` with `ε = ½‖ρ − σ‖₁`.
#[derive(Clone, Debug)]
pub struct OmegaDelta {
    pub epsilon: f64,
    pub omega: DensityMatrix,
    pub delta_plus: DensityMatrix,
    pub delta_minus: DensityMatrix,
}

/// Builds `Δ±` from the Jordan parts of `ρ − σ` and ω as their symmetric mixture.
///
/// For `ε ≤ 1e-12` returns `ω = Δ± = ρ`.
pub fn omega_delta(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<OmegaDelta> {
    let epsilon = trace_distance(rho, sigma)?;
    if epsilon <= DEGENERATE_EPSILON {
        return Ok(OmegaDelta { epsilon, omega: rho.clone(), delta_plus: rho.clone(), delta_minus: rho.clone() });
    }
    let (pos, neg) = (rho.matrix() - sigma.matrix()).jordan_parts()?;
    let delta_plus = DensityMatrix::from_unnormalized(pos)?;
    let delta_minus = DensityMatrix::from_unnormalized(neg)?;
    let c = 1.0 / (2.0 * (1.0 + epsilon));
    let states = &(rho.matrix() + sigma.matrix()) * c;
    let deltas = &(delta_plus.matrix() + delta_minus.matrix()) * (epsilon * c);
    let omega = DensityMatrix::new(&states + &deltas)?;
    Ok(OmegaDelta { epsilon, omega, delta_plus, delta_minus })
}

/// `h(ε) + ε log|M| + ε max_i |log V_i|`.
pub fn naive_bound(m: &Povm, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    let mut worst = 0.0f64;
    for (i, v) in m.volumes().into_iter().enumerate() {
        if v <= crate::entropy::ZERO_VOLUME {
            return Err(Error::Domain(format!("POVM element {i} has zero trace; the naive bound needs V_i > 0")));
        }
        worst = worst.max(v.ln().abs());
    }
    Ok(binary_h(epsilon)? + epsilon * (m.len() as f64).ln() + epsilon * worst)
}

/// `g(ε) + ε κ`.
pub fn afw_bound(epsilon: f64, kappa: f64) -> Result<f64> {
    if epsilon < 0.0 || kappa < 0.0 || !kappa.is_finite() {
        return Err(Error::Domain(format!("afw bound needs ε ≥ 0 and finite κ ≥ 0, got ε = {epsilon}, κ = {kappa}")));
    }
    Ok(g_func(epsilon)? + epsilon * kappa)
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..=1.0 + 1e-12).contains(&epsilon) {
        return Err(Error::Domain(format!("trace distance {epsilon} outside [0, 1]")));
    }
    Ok(())
}

fn check_pair(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    Ok(())
}

/// `|S_M(ρ) − S_M(σ)| ≤ g(ε) + ε log d`.
pub fn certify_oe_continuity(m: &Povm, rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<BoundReport> {
    check_pair(rho, sigma)?;
    m.check_dim(rho.dim())?;
    let eps = trace_distance(rho, sigma)?;
    let lhs = (observational_entropy(m, rho)?.total - observational_entropy(m, sigma)?.total).abs();
    let kappa = (rho.dim() as f64).ln();
    BoundReport::new(BoundKind::Afw, lhs, afw_bound(eps, kappa)?, eps, rho.dim(), kappa)
}

/// Same difference as [`certify_oe_continuity`], against the naive bound.
pub fn certify_naive(m: &Povm, rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<BoundReport> {
    check_pair(rho, sigma)?;
    m.check_dim(rho.dim())?;
    let eps = trace_distance(rho, sigma)?.min(1.0);
    let lhs = (observational_entropy(m, rho)?.total - observational_entropy(m, sigma)?.total).abs();
    BoundReport::new(BoundKind::Naive, lhs, naive_bound(m, eps)?, eps, rho.dim(), f64::NAN)
}

/// `|S(ρ) − S(σ)| ≤ g(ε) + ε log d`.
pub fn certify_von_neumann_continuity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<BoundReport> {
    check_pair(rho, sigma)?;
    let eps = trace_distance(rho, sigma)?;
    let kappa = (rho.dim() as f64).ln();
    let lhs = (von_neumann(rho)? - von_neumann(sigma)?).abs();
    BoundReport::new(BoundKind::Afw, lhs, afw_bound(eps, kappa)?, eps, rho.dim(), kappa)
}

/// `|H(p) − H(q)| ≤ g(ε) + ε log N` with ε the total-variation distance.
pub fn certify_shannon_continuity(p: &ProbabilityVector, q: &ProbabilityVector) -> Result<BoundReport> {
    if p.len() != q.len() {
        return Err(Error::ShapeMismatch(format!("distributions of length {} and {}", p.len(), q.len())));
    }
    let eps = p.total_variation(q);
    let kappa = (p.len() as f64).ln();
    let lhs = (shannon(p) - shannon(q)).abs();
    BoundReport::new(BoundKind::Afw, lhs, afw_bound(eps, kappa)?, eps, p.len(), kappa)
}

/// Bounded concavity of `S_M`: `0 ≤ S_M(Σ λ_k ρ_k) − Σ λ_k S_M(ρ_k) ≤ H(λ)`.
pub fn concavity_gap(m: &Povm, states: &[DensityMatrix], lambda: &ProbabilityVector) -> Result<BoundReport> {
    if states.len() != lambda.len() {
        return Err(Error::ShapeMismatch(format!("{} states but {} weights", states.len(), lambda.len())));
    }
    let mix = DensityMatrix::mixture(states, lambda)?;
    m.check_dim(mix.dim())?;
    let mut average = 0.0;
    for (s, &w) in states.iter().zip(lambda.as_slice()) {
        average += w * observational_entropy(m, s)?.total;
    }
    let gap = observational_entropy(m, &mix)?.total - average;
    BoundReport::sandwich(BoundKind::Concavity, gap, 0.0, shannon(lambda), mix.dim())
}

/// Bounded concavity of Shannon entropy on a finite mixture of distributions.
pub fn shannon_concavity_gap(dists: &[ProbabilityVector], lambda: &ProbabilityVector) -> Result<BoundReport> {
    let n = dists.first().ok_or(Error::Empty("mixture of zero distributions"))?.len();
    if dists.len() != lambda.len() || dists.iter().any(|p| p.len() != n) {
        return Err(Error::ShapeMismatch("distributions and weights disagree in shape".into()));
    }
    let mut mix = vec![0.0; n];
    let mut average = 0.0;
    for (p, &w) in dists.iter().zip(lambda.as_slice()) {
        for (acc, &x) in mix.iter_mut().zip(p.as_slice()) {
            *acc += w * x;
        }
        average += w * shannon(p);
    }
    let gap = shannon_of(&mix) - average;
    BoundReport::sandwich(BoundKind::Concavity, gap, 0.0, shannon(lambda), n)
}

/// `|tr|`-weighted identity errors of a decomposition, for diagnostics.
pub fn omega_delta_residuals(od: &OmegaDelta, rho: &DensityMatrix, sigma: &DensityMatrix) -> [f64; 3] {
    let e = od.epsilon;
    let lhs1 = &(rho.matrix() * (1.0 / (1.0 + e))) + &(od.delta_minus.matrix() * (e / (1.0 + e)));
    let lhs2 = &(sigma.matrix() * (1.0 / (1.0 + e))) + &(od.delta_plus.matrix() * (e / (1.0 + e)));
    let diff: HermitianMatrix = &(od.delta_plus.matrix() - od.delta_minus.matrix()) * e;
    [
        lhs1.max_abs_diff(od.omega.matrix()),
        lhs2.max_abs_diff(od.omega.matrix()),
        diff.max_abs_diff(&(rho.matrix() - sigma.matrix())),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::refine_split;
    use crate::qmat::random::{random_density, random_povm, rng_from_seed};
    use std::f64::consts::LN_2;

    #[test]
    fn omega_delta_orthogonal_qubits() {
        let rho = DensityMatrix::basis(2, 0);
        let sigma = DensityMatrix::basis(2, 1);
        let od = omega_delta(&rho, &sigma).unwrap();
        assert!((od.epsilon - 1.0).abs() < 1e-14);
        assert!(od.delta_plus.matrix().max_abs_diff(rho.matrix()) < 1e-14);
        assert!(od.delta_minus.matrix().max_abs_diff(sigma.matrix()) < 1e-14);
        assert!(od.omega.matrix().max_abs_diff(DensityMatrix::maximally_mixed(2).matrix()) < 1e-14);
    }

    #[test]
    fn omega_delta_degenerate() {
        let rho = random_density(3, 2, &mut rng_from_seed(1)).unwrap();
        let od = omega_delta(&rho, &rho).unwrap();
        assert_eq!(od.omega, rho);
        assert!(omega_delta_residuals(&od, &rho, &rho).iter().all(|&r| r < 1e-15));
    }

    #[test]
    fn naive_bound_cases() {
        let m = Povm::computational(3);
        assert_eq!(naive_bound(&m, 0.0).unwrap(), 0.0);
        let t = naive_bound(&Povm::trivial(5), 0.3).unwrap();
        assert!((t - (binary_h(0.3).unwrap() + 0.3 * 5f64.ln())).abs() < 1e-14);
        let split = refine_split(&m);
        assert!(naive_bound(&split, 0.3).unwrap() > naive_bound(&m, 0.3).unwrap());
        let padded = m.padded(4);
        assert!(naive_bound(&padded, 0.1).is_err());
    }

    #[test]
    fn afw_bound_cases() {
        assert_eq!(afw_bound(0.0, 3.0).unwrap(), 0.0);
        let d = 4.0f64;
        assert!((afw_bound(1.0, d.ln()).unwrap() - (2.0 * LN_2 + d.ln())).abs() < 1e-14);
        let mut last = 0.0;
        for k in 1..=100 {
            let v = afw_bound(k as f64 / 100.0, 1.3).unwrap();
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn oe_certificate_identical_and_orthogonal() {
        let mut rng = rng_from_seed(2);
        let rho = random_density(4, 2, &mut rng).unwrap();
        let m = random_povm(4, 3, &mut rng).unwrap();
        let r = certify_oe_continuity(&m, &rho, &rho).unwrap();
        assert!(r.quantity_lhs.abs() < 1e-15 && r.bound_rhs.abs() < 1e-12);
        let r = certify_oe_continuity(&m, &DensityMatrix::basis(4, 0), &DensityMatrix::basis(4, 2)).unwrap();
        assert!((r.bound_rhs - (2.0 * LN_2 + 4f64.ln())).abs() < 1e-12);
        assert!(r.passed());
    }

    #[test]
    fn concavity_gap_degenerate_cases() {
        let mut rng = rng_from_seed(3);
        let rho = random_density(3, 3, &mut rng).unwrap();
        let sigma = random_density(3, 3, &mut rng).unwrap();
        let m = random_povm(3, 4, &mut rng).unwrap();
        let equal = concavity_gap(&m, &[rho.clone(), rho.clone()], &ProbabilityVector::uniform(2)).unwrap();
        assert!(equal.quantity_lhs.abs() < 1e-12);
        let det = concavity_gap(&m, &[rho, sigma], &ProbabilityVector::deterministic(2, 0)).unwrap();
        assert!(det.quantity_lhs.abs() < 1e-12);
    }

    #[test]
    fn entropy_continuity_certificates() {
        let mut rng = rng_from_seed(4);
        let rho = random_density(5, 5, &mut rng).unwrap();
        let sigma = random_density(5, 3, &mut rng).unwrap();
        assert!(certify_von_neumann_continuity(&rho, &sigma).unwrap().passed());
        let p = ProbabilityVector::new(vec![0.9, 0.05, 0.05]).unwrap();
        let q = ProbabilityVector::new(vec![0.2, 0.4, 0.4]).unwrap();
        assert!(certify_shannon_continuity(&p, &q).unwrap().passed());
    }
}
