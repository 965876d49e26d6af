use super::hull::{hull_minimize, ConvexStateSet, DEFAULT_FW_TOLERANCE};
use super::{afw_bound, check_pair, BoundKind, BoundReport};
use crate::error::{Error, Result};
use crate::povm::measure_distribution;
use crate::qmat::{trace_distance, DensityMatrix, ExtendedReal, Povm};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Which side of the minimax a reported value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueOrder {
    InfSup,
    SupInf,
}

/// Bracket for `inf_{σ∈χ} sup_{M} D(Φ_M(ρ) ‖ Φ_M(σ))` over the flagged convex
/// closure of a finite measurement list.
#[derive(Clone, Debug, Serialize)]
pub struct RestrictedDivergence {
    /// Reported value; equals `sup_inf`.
    pub value: ExtendedReal,
    pub order: ValueOrder,
    /// `inf_sup − sup_inf`, nonnegative up to solver tolerance.
    pub gap: f64,
    /// `max_k D_k(σ_w)` at the returned hull point, an upper bound.
    pub inf_sup: ExtendedReal,
    /// `inf_σ Σ_k μ_k D_k(σ)` at the returned mixing weights, a lower bound.
    pub sup_inf: ExtendedReal,
    /// `max_k inf_σ D_k(σ)` over the generators alone.
    pub generator_max: ExtendedReal,
    /// Flag weights μ of the maximizing flagged combination.
    pub mixing: Vec<f64>,
    /// Hull weights of the minimizing state.
    pub hull_weights: Vec<f64>,
}

struct Objective {
    /// Outcome distribution of ρ, restricted to its support.
    p: Vec<f64>,
    /// Rows: supported outcomes; columns: hull vertices.
    q: DMatrix<f64>,
}

impl Objective {
    fn value(&self, w: &DVector<f64>) -> f64 {
        let r = &self.q * w;
        let mut f = 0.0;
        for (i, &pi) in self.p.iter().enumerate() {
            if r[i] <= 0.0 {
                return f64::INFINITY;
            }
            f += pi * (pi / r[i]).ln();
        }
        f
    }

    fn derivatives(&self, w: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
        let k = w.len();
        let r = &self.q * w;
        let mut f = 0.0;
        let mut g = DVector::zeros(k);
        let mut h = DMatrix::zeros(k, k);
        for (i, &pi) in self.p.iter().enumerate() {
            f += pi * (pi / r[i]).ln();
            let row = self.q.row(i).transpose();
            g -= &row * (pi / r[i]);
            h += &row * row.transpose() * (pi / (r[i] * r[i]));
        }
        (f, g, h)
    }
}

fn objectives(rho: &DensityMatrix, vertices: &[DensityMatrix], ms: &[Povm]) -> Result<Vec<Objective>> {
    ms.iter()
        .map(|m| {
            let p = measure_distribution(m, rho)?;
            let cols = vertices.iter().map(|v| measure_distribution(m, v)).collect::<Result<Vec<_>>>()?;
            let support: Vec<usize> = (0..p.len()).filter(|&i| p.get(i) > 0.0).collect();
            let q = DMatrix::from_fn(support.len(), vertices.len(), |a, j| cols[j].get(support[a]));
            Ok(Objective { p: support.iter().map(|&i| p.get(i)).collect(), q })
        })
        .collect()
}

/// Barrier function `τ t − Σ_k log(t − f_k(w)) − Σ_j log w_j`; `None` outside the domain.
fn barrier(objs: &[Objective], w: &DVector<f64>, t: f64, tau: f64) -> Option<f64> {
    if w.iter().any(|&x| x <= 0.0) {
        return None;
    }
    let mut b = tau * t - w.iter().map(|x| x.ln()).sum::<f64>();
    for o in objs {
        let s = t - o.value(w);
        if s.is_nan() || s <= 0.0 {
            return None;
        }
        b -= s.ln();
    }
    Some(b)
}

/// One centering step sequence at fixed τ; returns the updated point.
fn center(objs: &[Objective], mut w: DVector<f64>, mut t: f64, tau: f64) -> (DVector<f64>, f64) {
    let k = w.len();
    let n = k + 1;
    for _ in 0..100 {
        let mut grad = DVector::<f64>::zeros(n);
        let mut hess = DMatrix::<f64>::zeros(n, n);
        grad[k] = tau;
        for o in objs {
            let (f, g, h) = o.derivatives(&w);
            let s = t - f;
            let mut u = DVector::<f64>::zeros(n);
            u.rows_mut(0, k).copy_from(&g);
            u[k] = -1.0;
            grad += &u / s;
            hess += &u * u.transpose() / (s * s);
            let mut blk = hess.view_mut((0, 0), (k, k));
            blk += h / s;
        }
        for j in 0..k {
            grad[j] -= 1.0 / w[j];
            hess[(j, j)] += 1.0 / (w[j] * w[j]);
        }
        // KKT system for the constraint Σ w = 1.
        let mut kkt = DMatrix::<f64>::zeros(n + 1, n + 1);
        kkt.view_mut((0, 0), (n, n)).copy_from(&hess);
        for j in 0..k {
            kkt[(j, n)] = 1.0;
            kkt[(n, j)] = 1.0;
        }
        let mut rhs = DVector::<f64>::zeros(n + 1);
        rhs.rows_mut(0, n).copy_from(&(-&grad));
        let Some(sol) = kkt.clone().lu().solve(&rhs) else { break };
        let step = sol.rows(0, n).into_owned();
        let decrement = -grad.dot(&step);
        if decrement / 2.0 <= 1e-12 {
            break;
        }
        let current = barrier(objs, &w, t, tau).unwrap_or(f64::INFINITY);
        let mut alpha = 1.0;
        let mut moved = false;
        while alpha > 1e-14 {
            let wn = &w + step.rows(0, k) * alpha;
            let tn = t + step[k] * alpha;
            if let Some(b) = barrier(objs, &wn, tn, tau) {
                if b <= current - 0.25 * alpha * decrement {
                    w = wn;
                    t = tn;
                    moved = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (w, t)
}

fn max_value(objs: &[Objective], w: &DVector<f64>) -> f64 {
    objs.iter().map(|o| o.value(w)).fold(f64::NEG_INFINITY, f64::max)
}

/// `inf_w Σ_k μ_k D(p_k ‖ Q_k w)` as one hull problem over stacked outcomes;
/// returns the attained value and its Frank–Wolfe gap.
fn weighted_inf(objs: &[Objective], mu: &[f64], tol: f64) -> Result<(f64, f64)> {
    let kv = objs[0].q.ncols();
    let mut p = Vec::new();
    let mut cols = vec![Vec::new(); kv];
    for (o, &m) in objs.iter().zip(mu) {
        p.extend(o.p.iter().map(|x| m * x));
        for (j, c) in cols.iter_mut().enumerate() {
            c.extend(o.q.column(j).iter().map(|x| m * x));
        }
    }
    let r = hull_minimize(&p, &cols, tol)?;
    Ok((r.value.to_f64(), r.gap))
}

/// Minimax value of the restricted divergence with a certified bracket.
///
/// The upper side minimizes `max_k D_k` over hull weights with a log-barrier
/// Newton method; its central-path multipliers give flag weights μ whose
/// weighted infimum is the lower side. The generators' own infima are folded
/// into the lower side.
pub fn restricted_divergence(rho: &DensityMatrix, chi: &ConvexStateSet, ms: &[Povm], tol: f64) -> Result<RestrictedDivergence> {
    if ms.is_empty() {
        return Err(Error::Empty("measurement class"));
    }
    for m in ms {
        m.check_dim(rho.dim())?;
    }
    let vertices = chi
        .vertices(rho.dim())
        .ok_or_else(|| Error::Precondition("restricted divergence needs an explicit vertex set for χ".into()))?;
    for v in &vertices {
        check_pair(rho, v)?;
    }
    let objs = objectives(rho, &vertices, ms)?;
    let kv = vertices.len();
    let nm = ms.len();

    let mut generator_max = f64::NEG_INFINITY;
    for o in &objs {
        let cols: Vec<Vec<f64>> = (0..kv).map(|j| o.q.column(j).iter().copied().collect()).collect();
        let z = hull_minimize(&o.p, &cols, tol.min(DEFAULT_FW_TOLERANCE))?.value;
        match z {
            ExtendedReal::Infinite => {
                return Ok(RestrictedDivergence {
                    value: ExtendedReal::Infinite,
                    order: ValueOrder::SupInf,
                    gap: 0.0,
                    inf_sup: ExtendedReal::Infinite,
                    sup_inf: ExtendedReal::Infinite,
                    generator_max: ExtendedReal::Infinite,
                    mixing: Vec::new(),
                    hull_weights: vec![1.0 / kv as f64; kv],
                })
            }
            ExtendedReal::Finite(x) => generator_max = generator_max.max(x),
        }
    }

    let mut w = DVector::from_element(kv, 1.0 / kv as f64);
    let mut best_w = w.clone();
    let mut upper = max_value(&objs, &w);
    let mut lower = generator_max;
    let mut mixing: Vec<f64> = {
        let vals: Vec<f64> = objs.iter().map(|o| o.value(&w)).collect();
        let top = (0..nm).max_by(|&a, &b| vals[a].total_cmp(&vals[b])).expect("nonempty");
        (0..nm).map(|k| if k == top { 1.0 } else { 0.0 }).collect()
    };
    if kv > 1 && nm > 1 && upper - lower > tol {
        let mut t = upper + 1.0;
        let mut tau = 1.0;
        while tau < 1e14 {
            (w, t) = center(&objs, w, t, tau);
            let ub = max_value(&objs, &w);
            if ub < upper {
                upper = ub;
                best_w = w.clone();
            }
            let raw: Vec<f64> = objs.iter().map(|o| 1.0 / (t - o.value(&w))).collect();
            let total: f64 = raw.iter().sum();
            let mu: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let (psi, fw_gap) = weighted_inf(&objs, &mu, tol.min(DEFAULT_FW_TOLERANCE))?;
            let lb = psi - fw_gap;
            if lb > lower {
                lower = lb;
                mixing = mu;
            }
            if upper - lower <= tol {
                break;
            }
            tau *= 8.0;
        }
    } else if nm == 1 {
        upper = upper.min(generator_max);
    }
    let gap = upper - lower;
    Ok(RestrictedDivergence {
        value: ExtendedReal::Finite(lower),
        order: ValueOrder::SupInf,
        gap,
        inf_sup: ExtendedReal::Finite(upper),
        sup_inf: ExtendedReal::Finite(lower),
        generator_max: ExtendedReal::Finite(generator_max),
        mixing,
        hull_weights: best_w.iter().copied().collect(),
    })
}

/// `|Z(ρ) − Z(ρ′)| ≤ g(ε) + ε κ` for the restricted divergence.
pub fn certify_restricted_continuity(
    rho: &DensityMatrix,
    rho_prime: &DensityMatrix,
    chi: &ConvexStateSet,
    ms: &[Povm],
    kappa: f64,
) -> Result<BoundReport> {
    check_pair(rho, rho_prime)?;
    let eps = trace_distance(rho, rho_prime)?;
    let a = restricted_divergence(rho, chi, ms, 1e-9)?;
    let b = restricted_divergence(rho_prime, chi, ms, 1e-9)?;
    BoundReport::from_values(BoundKind::Restricted, a.value, b.value, afw_bound(eps, kappa)?, eps, rho.dim(), kappa)
}
