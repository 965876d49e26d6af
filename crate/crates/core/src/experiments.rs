//! Scripted reproductions: the binary-measurement mixing family, the no-go
//! scan, the refinement pathology, the channel and simulation-distance
//! continuity probes and the minimax spot check.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{afw_bound, naive_bound, restricted_divergence, BoundKind, BoundReport, ConvexStateSet};
use crate::distance::sim_distance;
use crate::entropy::{binary_h, measured_relative_entropy, observational_entropy, relative_entropy_classical, relative_entropy_quantum};
use crate::error::{Error, Result};
use crate::povm::{convex_combine, measure_distribution, permute, postprocess, refine_split};
use crate::qmat::random::{random_density, rng_from_seed};
use crate::qmat::{trace_distance, DensityMatrix, HermitianMatrix, Povm, ProbabilityVector, C64};

/// Closed-form probabilities, volumes and entropy of `M_λ` on the pure state it mixes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixingClosedForm {
    pub p0: f64,
    pub p1: f64,
    pub v0: f64,
    pub v1: f64,
    pub s_lambda: f64,
}

/// `S_λ = (1−λ) log((1+λ(d−2))/(1−λ)) + λ log(((d−1)−λ(d−2))/λ)`; `d` may be
/// astronomically large.
pub fn mixing_closed_form(d: f64, lambda: f64) -> MixingClosedForm {
    let v0 = 1.0 + lambda * (d - 2.0);
    let v1 = (d - 1.0) - lambda * (d - 2.0);
    let term = |p: f64, v: f64| if p > 0.0 { p * (v / p).ln() } else { 0.0 };
    MixingClosedForm { p0: 1.0 - lambda, p1: lambda, v0, v1, s_lambda: term(1.0 - lambda, v0) + term(lambda, v1) }
}

/// The pure state `|0⟩`, the measurement `M = (|0⟩⟨0|, 1 − |0⟩⟨0|)` and
/// `M_λ = (1−λ)M + λM̃` with `M̃` the swapped measurement.
pub fn mixing_family(d: usize, lambda: f64) -> Result<(DensityMatrix, Povm, Povm)> {
    let rho = DensityMatrix::basis(d, 0);
    let m = Povm::binary(rho.matrix())?;
    let swapped = permute(&m, &[1, 0])?;
    let ml = convex_combine(&[m.clone(), swapped], &ProbabilityVector::new(vec![1.0 - lambda, lambda])?)?;
    Ok((rho, m, ml))
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub d: usize,
    pub lambda: f64,
    pub s_lambda: f64,
    pub s_numeric: f64,
    pub p0: f64,
    pub p1: f64,
    pub v0: f64,
    pub v1: f64,
    /// `g(λ) + λ log d`, the state-continuity shape evaluated at λ.
    pub afw_rhs: f64,
    /// Naive bound of `M_λ` at ε = λ.
    pub naive_rhs: f64,
    pub ratio_to_logd: f64,
    /// Largest deviation of the numerics from the closed forms.
    pub max_abs_error: f64,
}

pub fn example1_sweep(dims: &[usize], lambdas: &[f64]) -> Result<Vec<SweepRow>> {
    if let Some(l) = lambdas.iter().find(|l| !(0.0..=0.5).contains(*l)) {
        return Err(Error::Domain(format!("mixing weight {l} outside [0, 1/2]")));
    }
    let jobs: Vec<(usize, f64)> = dims.iter().flat_map(|&d| lambdas.iter().map(move |&l| (d, l))).collect();
    jobs.par_iter()
        .map(|&(d, lambda)| {
            let (rho, _, ml) = mixing_family(d, lambda)?;
            let cf = mixing_closed_form(d as f64, lambda);
            let oe = observational_entropy(&ml, &rho)?;
            let err = [
                (oe.total - cf.s_lambda).abs(),
                (oe.probs.get(0) - cf.p0).abs(),
                (oe.probs.get(1) - cf.p1).abs(),
                (oe.volumes[0] - cf.v0).abs(),
                (oe.volumes[1] - cf.v1).abs(),
            ]
            .into_iter()
            .fold(0.0, f64::max);
            let logd = (d as f64).ln();
            Ok(SweepRow {
                d,
                lambda,
                s_lambda: cf.s_lambda,
                s_numeric: oe.total,
                p0: cf.p0,
                p1: cf.p1,
                v0: cf.v0,
                v1: cf.v1,
                afw_rhs: afw_bound(lambda, logd)?,
                naive_rhs: naive_bound(&ml, lambda)?,
                ratio_to_logd: cf.s_lambda / logd,
                max_abs_error: err,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct NoGoRow {
    pub d: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NoGoScan {
    pub lambda: f64,
    pub rows: Vec<NoGoRow>,
    pub monotone: bool,
    /// Smallest scanned `d` whose ratio exceeds the threshold.
    pub first_above: Option<f64>,
    pub threshold: f64,
    pub max_ratio: f64,
}

/// Ratios `S_λ / log d` along ascending dimensions, closed form only.
pub fn no_go_scan(lambda: f64, dims: &[f64], threshold: f64) -> Result<NoGoScan> {
    if !(0.0..=0.5).contains(&lambda) {
        return Err(Error::Domain(format!("mixing weight {lambda} outside [0, 1/2]")));
    }
    if dims.iter().any(|&d| d < 2.0) || dims.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("dimensions must be ascending and at least 2".into()));
    }
    let rows: Vec<NoGoRow> = dims.iter().map(|&d| NoGoRow { d, ratio: mixing_closed_form(d, lambda).s_lambda / d.ln() }).collect();
    let monotone = rows.windows(2).all(|w| w[1].ratio >= w[0].ratio - 1e-15);
    let first_above = rows.iter().find(|r| r.ratio > threshold).map(|r| r.d);
    let max_ratio = rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    Ok(NoGoScan { lambda, rows, monotone, first_above, threshold, max_ratio })
}

/// Powers of ten from 10 to `max_d`.
///
/// The ratio dips between `d = 2` and `d = 4` before rising, so scans that
/// should be monotone start at 10.
pub fn decade_dims(max_d: f64) -> Vec<f64> {
    let mut dims = Vec::new();
    let mut d = 10.0;
    while d <= max_d * (1.0 + 1e-12) {
        dims.push(d);
        d *= 10.0;
    }
    dims
}

/// Measurement-concavity gap of the mixing family against `h(λ)`; a violated
/// report is the expected outcome for large `d`.
pub fn concavity_violation_demo(d: usize, lambda: f64) -> Result<BoundReport> {
    let (rho, m, ml) = mixing_family(d, lambda)?;
    let swapped = permute(&m, &[1, 0])?;
    let avg = (1.0 - lambda) * observational_entropy(&m, &rho)?.total + lambda * observational_entropy(&swapped, &rho)?.total;
    let gap = observational_entropy(&ml, &rho)?.total - avg;
    BoundReport::sandwich(BoundKind::Concavity, gap, 0.0, binary_h(lambda)?, d)
}

#[derive(Clone, Debug, Serialize)]
pub struct PathologyRow {
    pub iteration: usize,
    pub outcomes: usize,
    pub max_volume: f64,
    pub delta_s: f64,
    pub epsilon: f64,
    pub naive_rhs: f64,
    pub afw_rhs: f64,
}

/// Repeated `refine_split` of the computational basis measurement on a fixed
/// random pair of states.
pub fn refinement_pathology(d: usize, iterations: usize, seed: u64) -> Result<Vec<PathologyRow>> {
    let mut rng = rng_from_seed(seed);
    let rho = random_density(d, d, &mut rng)?;
    let sigma = random_density(d, d, &mut rng)?;
    let eps = trace_distance(&rho, &sigma)?;
    let mut m = Povm::computational(d);
    let mut rows = Vec::with_capacity(iterations + 1);
    for iteration in 0..=iterations {
        let delta_s = (observational_entropy(&m, &rho)?.total - observational_entropy(&m, &sigma)?.total).abs();
        rows.push(PathologyRow {
            iteration,
            outcomes: m.len(),
            max_volume: m.volumes().into_iter().fold(0.0, f64::max),
            delta_s,
            epsilon: eps,
            naive_rhs: naive_bound(&m, eps)?,
            afw_rhs: afw_bound(eps, (d as f64).ln())?,
        });
        m = refine_split(&m);
    }
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct ChannelProbeRow {
    pub s: f64,
    pub f: f64,
    pub f_s: f64,
    pub diff: f64,
    pub bound: f64,
    /// `|F − F_s| ≤ s F` within 1e-9 and `F_s ≤ F`.
    pub holds: bool,
    /// `F_s ≤ (1 − s) F` within 1e-9, the consequence of joint convexity.
    pub convexity_holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChannelProbe {
    pub rows: Vec<ChannelProbeRow>,
    /// `F(Φ_s)` rises toward `F(Φ)` as `s` decreases along the grid.
    pub monotone: bool,
    pub all_hold: bool,
    pub convexity_all_hold: bool,
}

/// `F(Φ_s) = D(Φ_s(ρ) ‖ Φ_s(σ))` with `Φ_s = (1−s)Φ_M + s τ`, τ preparing the
/// uniform distribution on outcomes.
pub fn channel_continuity_probe(rho: &DensityMatrix, sigma: &DensityMatrix, m: &Povm, s_grid: &[f64]) -> Result<ChannelProbe> {
    if !relative_entropy_quantum(rho, sigma)?.is_finite() {
        return Err(Error::Precondition("D(ρ‖σ) is infinite".into()));
    }
    let p = measure_distribution(m, rho)?;
    let q = measure_distribution(m, sigma)?;
    let f = relative_entropy_classical(&p, q.as_slice())?.to_f64();
    let u = 1.0 / m.len() as f64;
    let mut rows = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain(format!("noise weight {s} outside [0, 1]")));
        }
        let ps = ProbabilityVector::normalized(p.as_slice().iter().map(|x| (1.0 - s) * x + s * u).collect())?;
        let qs: Vec<f64> = q.as_slice().iter().map(|x| (1.0 - s) * x + s * u).collect();
        let f_s = relative_entropy_classical(&ps, &qs)?.to_f64();
        let diff = (f - f_s).abs();
        let bound = s * f;
        rows.push(ChannelProbeRow {
            s,
            f,
            f_s,
            diff,
            bound,
            holds: diff <= bound + 1e-9 && f_s <= f + 1e-12,
            convexity_holds: f_s <= (1.0 - s) * f + 1e-9,
        });
    }
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| rows[b].s.total_cmp(&rows[a].s));
    let monotone = order.windows(2).all(|w| rows[w[1]].f_s >= rows[w[0]].f_s - 1e-12);
    let all_hold = rows.iter().all(|r| r.holds);
    let convexity_all_hold = rows.iter().all(|r| r.convexity_holds);
    Ok(ChannelProbe { rows, monotone, all_hold, convexity_all_hold })
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaProbeRow {
    pub gamma: f64,
    pub gamma_gap: f64,
    pub d_m: f64,
    pub d_n: f64,
    pub diff: f64,
    /// `D_{ΛM}` for the forward optimizing map.
    pub d_lambda_m: f64,
    /// `D_{Λ′N}` for the backward optimizing map.
    pub d_lambda_n: f64,
    pub monotone_ok: bool,
}

/// Records `γ(M, N)` against `|D_M − D_N|` and checks data processing for the
/// optimizing maps. No modulus of continuity is asserted.
pub fn gamma_continuity_probe(rho: &DensityMatrix, sigma: &DensityMatrix, pairs: &[(Povm, Povm)], tol: f64) -> Result<Vec<GammaProbeRow>> {
    if !relative_entropy_quantum(rho, sigma)?.is_finite() {
        return Err(Error::Precondition("D(ρ‖σ) is infinite".into()));
    }
    pairs
        .par_iter()
        .map(|(m, n)| {
            let g = sim_distance(m, n, tol)?;
            let d_m = measured_relative_entropy(m, rho, sigma)?.to_f64();
            let d_n = measured_relative_entropy(n, rho, sigma)?.to_f64();
            let lm = postprocess(&g.forward.best_map, m)?;
            let ln = postprocess(&g.backward.best_map, n)?;
            let d_lambda_m = measured_relative_entropy(&lm, rho, sigma)?.to_f64();
            let d_lambda_n = measured_relative_entropy(&ln, rho, sigma)?.to_f64();
            Ok(GammaProbeRow {
                gamma: g.value,
                gamma_gap: g.gap,
                d_m,
                d_n,
                diff: (d_m - d_n).abs(),
                d_lambda_m,
                d_lambda_n,
                monotone_ok: d_lambda_m <= d_m + 1e-9 && d_lambda_n <= d_n + 1e-9,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimaxCheck {
    pub inf_sup_grid: f64,
    pub sup_inf: f64,
    pub gap: f64,
    pub grid_points: usize,
    pub passed: bool,
}

/// All weight vectors of length `k` with entries in `{0, h, 2h, …}` summing to one.
fn simplex_grid(k: usize, steps: usize) -> Vec<Vec<f64>> {
    fn rec(k: usize, left: usize, steps: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if k == 1 {
            cur.push(left);
            out.push(cur.iter().map(|&c| c as f64 / steps as f64).collect());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(k - 1, left - c, steps, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, steps, steps, &mut Vec::new(), &mut out);
    out
}

/// Grid estimate of `inf_σ sup_μ Σ_k μ_k D_k(σ)` against the certified
/// `sup_inf` of [`restricted_divergence`].
///
/// The inner objective is linear in μ, so its maximum over the μ grid sits at
/// a grid vertex and equals `max_k D_k(σ)`.
pub fn minimax_spot_check(rho: &DensityMatrix, chi: &ConvexStateSet, ms: &[Povm], resolution: f64) -> Result<MinimaxCheck> {
    let vertices = chi.vertices(rho.dim()).ok_or_else(|| Error::Precondition("spot check needs an explicit vertex set".into()))?;
    if rho.dim() > 3 || ms.len() > 3 || vertices.len() > 4 {
        return Err(Error::Precondition("spot check is limited to d ≤ 3, ≤ 3 generators and ≤ 4 vertices".into()));
    }
    let steps = (1.0 / resolution).round() as usize;
    let per_m: Vec<(ProbabilityVector, Vec<ProbabilityVector>)> = ms
        .iter()
        .map(|m| Ok((measure_distribution(m, rho)?, vertices.iter().map(|v| measure_distribution(m, v)).collect::<Result<Vec<_>>>()?)))
        .collect::<Result<_>>()?;
    let grid = simplex_grid(vertices.len(), steps);
    let inf_sup_grid = grid
        .par_iter()
        .map(|w| {
            per_m
                .iter()
                .map(|(p, cols)| {
                    let r: Vec<f64> = (0..p.len()).map(|i| cols.iter().zip(w).map(|(c, wj)| wj * c.get(i)).sum()).collect();
                    relative_entropy_classical(p, &r).map(|x| x.to_f64())
                })
                .try_fold(f64::NEG_INFINITY, |acc, x| x.map(|x| acc.max(x)))
        })
        .try_reduce(|| f64::INFINITY, |a, b| Ok(a.min(b)))?;
    let sup_inf = restricted_divergence(rho, chi, ms, 1e-10)?.value.to_f64();
    let gap = inf_sup_grid - sup_inf;
    Ok(MinimaxCheck { inf_sup_grid, sup_inf, gap, grid_points: grid.len(), passed: gap.abs() <= 5e-3 })
}

/// Name, state, convex set and measurement class of a spot-check instance.
pub type MinimaxInstance = (String, DensityMatrix, ConvexStateSet, Vec<Povm>);

/// The three standard spot-check instances: a singleton χ, a single
/// measurement, and two qubit bases against a hull of diagonal states.
pub fn minimax_instances() -> Result<Vec<MinimaxInstance>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = Povm::new(vec![
        HermitianMatrix::projector(&[C64::new(s, 0.0), C64::new(s, 0.0)]),
        HermitianMatrix::projector(&[C64::new(s, 0.0), C64::new(-s, 0.0)]),
    ])?;
    let rho = DensityMatrix::new(HermitianMatrix::from_rows(&[vec![[0.7, 0.0], [0.2, 0.1]], vec![[0.2, -0.1], [0.3, 0.0]]])?)?;
    let diag = ConvexStateSet::hull(vec![
        DensityMatrix::diagonal(&[0.9, 0.1])?,
        DensityMatrix::diagonal(&[0.4, 0.6])?,
        DensityMatrix::diagonal(&[0.1, 0.9])?,
    ])?;
    Ok(vec![
        (
            "singleton".into(),
            rho.clone(),
            ConvexStateSet::Singleton(DensityMatrix::diagonal(&[0.5, 0.5])?),
            vec![Povm::computational(2), plus.clone()],
        ),
        ("single_measurement".into(), rho.clone(), diag.clone(), vec![plus.clone()]),
        ("two_bases_diagonal_hull".into(), rho, diag, vec![Povm::computational(2), plus]),
    ])
}
