use super::conditional::conditional_oe;
use super::{afw_bound, check_pair, BoundKind, BoundReport};
use crate::entropy::{measured_relative_entropy, observational_entropy};
use crate::error::{Error, Result};
use crate::povm::measure_distribution;
use crate::qmat::{trace_distance, DensityMatrix, ExtendedReal, Povm};

/// Frank–Wolfe duality-gap target used by the certificates.
pub const DEFAULT_FW_TOLERANCE: f64 = 1e-11;
pub const FW_MAX_ITER: usize = 10_000;

/// Convex reference set χ of states.
#[derive(Clone, Debug)]
pub enum ConvexStateSet {
    Singleton(DensityMatrix),
    /// `{1/d}` in the dimension of the argument state.
    MaxMixed,
    /// `{1_A/d_A ⊗ ω_B}`; paired with a measurement acting on `A` only.
    ProductWithFreeB { d_a: usize, d_b: usize },
    /// Convex hull of finitely many states.
    Hull(Vec<DensityMatrix>),
}

impl ConvexStateSet {
    pub fn hull(states: Vec<DensityMatrix>) -> Result<Self> {
        let first = states.first().ok_or(Error::Empty("hull with no vertices"))?;
        let d = first.dim();
        if let Some(s) = states.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: s.dim() });
        }
        Ok(ConvexStateSet::Hull(states))
    }

    /// Explicit vertex list, when the set is a polytope in state space.
    pub fn vertices(&self, dim: usize) -> Option<Vec<DensityMatrix>> {
        match self {
            ConvexStateSet::Singleton(s) => Some(vec![s.clone()]),
            ConvexStateSet::MaxMixed => Some(vec![DensityMatrix::maximally_mixed(dim)]),
            ConvexStateSet::Hull(v) => Some(v.clone()),
            ConvexStateSet::ProductWithFreeB { .. } => None,
        }
    }
}

/// Result of a hull minimization.
#[derive(Clone, Debug)]
pub struct HullMinimum {
    pub value: ExtendedReal,
    /// Mixture weights over the hull vertices at the returned point.
    pub weights: Vec<f64>,
    /// Final Frank–Wolfe duality gap; bounds the suboptimality of `value`.
    pub gap: f64,
    pub iterations: usize,
}

fn kl_to_mixture(p: &[f64], r: &[f64]) -> f64 {
    p.iter().zip(r).filter(|(pi, _)| **pi > 0.0).map(|(pi, ri)| pi * (pi / ri).ln()).sum()
}

fn mix(columns: &[Vec<f64>], w: &[f64]) -> Vec<f64> {
    let n = columns[0].len();
    let mut r = vec![0.0; n];
    for (c, &wk) in columns.iter().zip(w) {
        if wk != 0.0 {
            for (ri, ci) in r.iter_mut().zip(c) {
                *ri += wk * ci;
            }
        }
    }
    r
}

/// Derivative of `γ ↦ D(p ‖ r + γ a)`; `+∞` once a supported entry hits zero.
fn directional(p: &[f64], r: &[f64], a: &[f64], gamma: f64) -> (f64, f64) {
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    for ((&pi, &ri), &ai) in p.iter().zip(r).zip(a) {
        if pi <= 0.0 {
            continue;
        }
        let den = ri + gamma * ai;
        if den <= 0.0 {
            return (f64::INFINITY, f64::INFINITY);
        }
        d1 -= pi * ai / den;
        d2 += pi * ai * ai / (den * den);
    }
    (d1, d2)
}

/// Minimizes the convex map `w ↦ D(p ‖ Σ_k w_k q_k)` over the probability simplex
/// with away-step Frank–Wolfe and exact line search.
///
/// Vertices of the simplex are the linear-minimization oracle; iteration stops
/// when the duality gap drops to `tol` or after [`FW_MAX_ITER`] steps.
pub fn hull_minimize(p: &[f64], columns: &[Vec<f64>], tol: f64) -> Result<HullMinimum> {
    let k = columns.len();
    if k == 0 {
        return Err(Error::Empty("hull with no vertices"));
    }
    if columns.iter().any(|c| c.len() != p.len()) {
        return Err(Error::ShapeMismatch("vertex distributions differ in length from the target".into()));
    }
    let mut w = vec![1.0 / k as f64; k];
    let r0 = mix(columns, &w);
    if p.iter().zip(&r0).any(|(pi, ri)| *pi > 0.0 && *ri <= 0.0) {
        // The barycenter has the largest support in the hull.
        return Ok(HullMinimum { value: ExtendedReal::Infinite, weights: w, gap: 0.0, iterations: 0 });
    }
    if k == 1 {
        return Ok(HullMinimum { value: ExtendedReal::Finite(kl_to_mixture(p, &r0)), weights: w, gap: 0.0, iterations: 0 });
    }

    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    while iterations < FW_MAX_ITER {
        let r = mix(columns, &w);
        let grad: Vec<f64> = columns
            .iter()
            .map(|c| -p.iter().zip(c).zip(&r).filter(|((pi, _), _)| **pi > 0.0).map(|((pi, ci), ri)| pi * ci / ri).sum::<f64>())
            .collect();
        let gw: f64 = grad.iter().zip(&w).map(|(g, wk)| g * wk).sum();
        let s = (0..k).min_by(|&a, &b| grad[a].total_cmp(&grad[b])).expect("nonempty");
        gap = gw - grad[s];
        if gap <= tol {
            break;
        }
        iterations += 1;
        let v = (0..k).filter(|&j| w[j] > 0.0).max_by(|&a, &b| grad[a].total_cmp(&grad[b])).expect("active set nonempty");
        let toward = gap >= grad[v] - gw;
        let (dir, gamma_max): (Vec<f64>, f64) = if toward {
            ((0..k).map(|j| if j == s { 1.0 - w[j] } else { -w[j] }).collect(), 1.0)
        } else {
            ((0..k).map(|j| if j == v { w[j] - 1.0 } else { w[j] }).collect(), w[v] / (1.0 - w[v]))
        };
        let a = mix(columns, &dir);
        let gamma = line_search(p, &r, &a, gamma_max);
        for (wj, dj) in w.iter_mut().zip(&dir) {
            *wj += gamma * dj;
        }
        if !toward && gamma >= gamma_max {
            w[v] = 0.0;
        }
        for wj in w.iter_mut() {
            if *wj < 1e-300 {
                *wj = 0.0;
            }
        }
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
    }
    let value = kl_to_mixture(p, &mix(columns, &w));
    Ok(HullMinimum { value: ExtendedReal::Finite(value), weights: w, gap, iterations })
}

/// Root of the monotone derivative on `[0, γ_max]`, by safeguarded Newton.
fn line_search(p: &[f64], r: &[f64], a: &[f64], gamma_max: f64) -> f64 {
    let (end, _) = directional(p, r, a, gamma_max);
    if end <= 0.0 {
        return gamma_max;
    }
    let (mut lo, mut hi) = (0.0, gamma_max);
    let mut g = 0.5 * gamma_max;
    for _ in 0..200 {
        let (d1, d2) = directional(p, r, a, g);
        if d1 > 0.0 {
            hi = g;
        } else {
            lo = g;
        }
        let newton = if d1.is_finite() && d2 > 0.0 { g - d1 / d2 } else { f64::NAN };
        g = if newton.is_finite() && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (hi - lo) <= 1e-15 * gamma_max.max(1.0) || d1.abs() < 1e-16 {
            break;
        }
    }
    g.clamp(0.0, gamma_max)
}

/// `inf_{σ∈χ} D(Φ_M(ρ) ‖ Φ_M(σ))`.
///
/// For [`ConvexStateSet::ProductWithFreeB`] the channel is `Φ_M ⊗ I_B` with `M`
/// acting on `A`, and the infimum is attained at `ω_B = ρ_B`.
pub fn min_rel_entropy_to_set(m: &Povm, rho: &DensityMatrix, chi: &ConvexStateSet, tol: f64) -> Result<ExtendedReal> {
    match chi {
        ConvexStateSet::Singleton(sigma) => {
            check_pair(rho, sigma)?;
            measured_relative_entropy(m, rho, sigma)
        }
        ConvexStateSet::MaxMixed => {
            let d = rho.dim() as f64;
            Ok(ExtendedReal::Finite(d.ln() - observational_entropy(m, rho)?.total))
        }
        ConvexStateSet::ProductWithFreeB { d_a, d_b } => {
            Ok(ExtendedReal::Finite((*d_a as f64).ln() - conditional_oe(m, rho, *d_a, *d_b)?))
        }
        ConvexStateSet::Hull(states) => Ok(hull_minimum(m, rho, states, tol)?.value),
    }
}

pub(crate) fn hull_minimum(m: &Povm, rho: &DensityMatrix, states: &[DensityMatrix], tol: f64) -> Result<HullMinimum> {
    for s in states {
        check_pair(rho, s)?;
    }
    let p = measure_distribution(m, rho)?;
    let columns = states.iter().map(|s| Ok(measure_distribution(m, s)?.as_slice().to_vec())).collect::<Result<Vec<_>>>()?;
    hull_minimize(p.as_slice(), &columns, tol)
}

/// `|Z(ρ) − Z(σ)| ≤ g(ε) + ε κ` for `Z = inf_{χ} D(Φ_M(·) ‖ Φ_M(χ))`.
///
/// κ comes from the caller; `log d` is safe whenever `1/d ∈ χ`.
pub fn certify_set_distance_continuity(
    m: &Povm,
    chi: &ConvexStateSet,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    kappa: f64,
) -> Result<BoundReport> {
    check_pair(rho, sigma)?;
    let eps = trace_distance(rho, sigma)?;
    let z_rho = min_rel_entropy_to_set(m, rho, chi, DEFAULT_FW_TOLERANCE)?;
    let z_sigma = min_rel_entropy_to_set(m, sigma, chi, DEFAULT_FW_TOLERANCE)?;
    BoundReport::from_values(BoundKind::SetDistance, z_rho, z_sigma, afw_bound(eps, kappa)?, eps, rho.dim(), kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::random::{random_density, random_povm, rng_from_seed};

    #[test]
    fn singleton_of_self_is_zero() {
        let mut rng = rng_from_seed(31);
        let rho = random_density(3, 3, &mut rng).unwrap();
        let m = random_povm(3, 4, &mut rng).unwrap();
        let z = min_rel_entropy_to_set(&m, &rho, &ConvexStateSet::Singleton(rho.clone()), 1e-12).unwrap();
        assert!(z.to_f64().abs() < 1e-14);
    }

    #[test]
    fn max_mixed_closed_form() {
        let mut rng = rng_from_seed(32);
        let rho = random_density(4, 2, &mut rng).unwrap();
        let m = random_povm(4, 3, &mut rng).unwrap();
        let z = min_rel_entropy_to_set(&m, &rho, &ConvexStateSet::MaxMixed, 1e-12).unwrap().to_f64();
        let direct = measured_relative_entropy(&m, &rho, &DensityMatrix::maximally_mixed(4)).unwrap().to_f64();
        assert!((z - direct).abs() < 1e-12);
    }

    #[test]
    fn one_vertex_hull_matches_singleton() {
        let mut rng = rng_from_seed(33);
        let rho = random_density(3, 3, &mut rng).unwrap();
        let sigma = random_density(3, 3, &mut rng).unwrap();
        let m = random_povm(3, 3, &mut rng).unwrap();
        let a = min_rel_entropy_to_set(&m, &rho, &ConvexStateSet::Singleton(sigma.clone()), 1e-12).unwrap().to_f64();
        let b = min_rel_entropy_to_set(&m, &rho, &ConvexStateSet::hull(vec![sigma]).unwrap(), 1e-12).unwrap().to_f64();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn hull_all_infinite() {
        let rho = DensityMatrix::basis(2, 0);
        let chi = ConvexStateSet::hull(vec![DensityMatrix::basis(2, 1)]).unwrap();
        let z = min_rel_entropy_to_set(&Povm::computational(2), &rho, &chi, 1e-10).unwrap();
        assert_eq!(z, ExtendedReal::Infinite);
    }

    #[test]
    fn target_inside_hull_gives_zero() {
        let p = [0.3, 0.7];
        let cols = vec![vec![0.1, 0.9], vec![0.9, 0.1], vec![0.5, 0.5]];
        let r = hull_minimize(&p, &cols, 1e-13).unwrap();
        assert!(r.value.to_f64() < 1e-12, "{:?}", r);
    }

    #[test]
    fn empty_hull_rejected() {
        assert!(ConvexStateSet::hull(vec![]).is_err());
    }
}
