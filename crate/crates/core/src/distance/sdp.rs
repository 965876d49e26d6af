//! Splitting solver for the dual diamond-norm program of measuring channels
//!
//! ```text
//! minimize t  subject to  t·1 ⪰ Σ_j Z_j,  Z_j ⪰ 0,  Z_j − G_j(Λ) + C_j ⪰ 0,  Λ column-stochastic
//! ```
//!
//! with `G_j(Λ) = Σ_i Λ_{ji} A_i`. Without sources (`A_i`) the map `Λ` is
//! absent and `−C_j` are the Choi blocks of a fixed channel difference.
//! Scaled-form ADMM; every few iterations both a feasible dual point and a
//! feasible primal point are built from the iterates, so the returned bracket
//! `[lower, upper]` is certified regardless of how far the iterates converged.

use crate::error::{Error, Result};
use crate::qmat::{CMatrix, HermitianMatrix, C64};
use nalgebra::DMatrix;

const CHECK_EVERY: usize = 10;
const BALANCE_EVERY: usize = 25;

#[derive(Clone, Debug)]
pub(crate) struct SdpInput {
    pub d: usize,
    pub offsets: Vec<CMatrix>,
    pub sources: Option<Vec<CMatrix>>,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Target width of the certified bracket.
    pub tol: f64,
    pub max_iter: usize,
    /// Keep the bound trajectory for diagnostics.
    pub record_history: bool,
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolverOptions { tol, ..Default::default() }
    }
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-7, max_iter: 100_000, record_history: false }
    }
}

/// One bound evaluation along the solver run.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct GapSample {
    pub iteration: usize,
    pub lower: f64,
    pub upper: f64,
    pub penalty: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct RawSolution {
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
    /// Normalized reference-state certificate for the lower bound.
    pub rho_hat: CMatrix,
    /// Repaired blocks certifying the upper bound.
    pub z: Vec<CMatrix>,
    /// Column-stochastic map attaining the upper bound, when `Λ` is present.
    pub map: Option<DMatrix<f64>>,
    pub history: Vec<GapSample>,
}

/// Upper bound, its feasible blocks, the projected map, lower bound and the
/// reference state attaining it.
type Bounds = (f64, Vec<CMatrix>, Option<DMatrix<f64>>, f64, CMatrix);

fn inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.dotc(b).re
}

fn trace(a: &CMatrix) -> f64 {
    (0..a.nrows()).map(|i| a[(i, i)].re).sum()
}

fn eye(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

fn herm(m: &CMatrix) -> Result<HermitianMatrix> {
    HermitianMatrix::new(m.clone())
}

fn psd(m: &CMatrix) -> Result<CMatrix> {
    Ok(herm(m)?.psd_part()?.into_matrix())
}

/// Euclidean projection of each column onto the probability simplex.
fn project_columns(m: &mut DMatrix<f64>) {
    for mut col in m.column_iter_mut() {
        let mut u: Vec<f64> = col.iter().copied().collect();
        u.sort_by(|a, b| b.total_cmp(a));
        let mut acc = 0.0;
        let mut theta = 0.0;
        for (k, &x) in u.iter().enumerate() {
            acc += x;
            let th = (acc - 1.0) / (k + 1) as f64;
            if x - th > 0.0 {
                theta = th;
            }
        }
        col.iter_mut().for_each(|x| *x = (*x - theta).max(0.0));
    }
}

/// Σ_j tr((√ρ B_j √ρ)₊), the primal objective at the best `W_j ≤ ρ`.
pub(crate) fn primal_value(rho: &CMatrix, blocks: &[CMatrix]) -> Result<f64> {
    let root = herm(rho)?.map_spectrum(|x| x.max(0.0).sqrt())?.into_matrix();
    let mut total = 0.0;
    for b in blocks {
        let m = &root * b * &root;
        total += herm(&m)?.eigenvalues()?.into_iter().filter(|&x| x > 0.0).sum::<f64>();
    }
    Ok(total)
}

/// Upper bound `λ_max(Σ_j Z_j′)` after shifting each `Z_j` into feasibility.
fn repaired_upper(z: &[CMatrix], blocks: &[CMatrix]) -> Result<(f64, Vec<CMatrix>)> {
    let d = z[0].nrows();
    let mut total = CMatrix::zeros(d, d);
    let mut repaired = Vec::with_capacity(z.len());
    for (zj, bj) in z.iter().zip(blocks) {
        let lo = herm(zj)?.min_eigenvalue()?.min(herm(&(zj - bj))?.min_eigenvalue()?);
        let shift = (-lo).max(0.0);
        let zr = zj + eye(d) * C64::new(shift, 0.0);
        total += &zr;
        repaired.push(zr);
    }
    Ok((herm(&total)?.max_eigenvalue()?, repaired))
}

/// Moves `W` into `[0, ρ]` via `ρ^{1/2} clamp(ρ^{-1/2} W ρ^{-1/2}) ρ^{1/2}`.
fn clamp_below(w: &CMatrix, rho: &CMatrix) -> Result<CMatrix> {
    let e = herm(rho)?.eig()?;
    let cut = 1e-14 * e.max().max(1e-300);
    let root = e.rebuild(|x| if x > cut { x.sqrt() } else { 0.0 }).into_matrix();
    let inv_root = e.rebuild(|x| if x > cut { 1.0 / x.sqrt() } else { 0.0 }).into_matrix();
    let x = herm(&(&inv_root * w * &inv_root))?.map_spectrum(|v| v.clamp(0.0, 1.0))?.into_matrix();
    Ok(&root * x * &root)
}

struct State {
    t: f64,
    z: Vec<CMatrix>,
    lambda: DMatrix<f64>,
    s0: CMatrix,
    y0: CMatrix,
    u: Vec<CMatrix>,
    yu: Vec<CMatrix>,
    v: Vec<CMatrix>,
    yv: Vec<CMatrix>,
    l: DMatrix<f64>,
    yl: DMatrix<f64>,
}

struct Solver<'a> {
    input: &'a SdpInput,
    n: usize,
    m: usize,
}

impl<'a> Solver<'a> {
    fn g(&self, lambda: &DMatrix<f64>, j: usize) -> CMatrix {
        let d = self.input.d;
        let mut out = CMatrix::zeros(d, d);
        if let Some(src) = &self.input.sources {
            for (i, a) in src.iter().enumerate() {
                let w = lambda[(j, i)];
                if w != 0.0 {
                    out += a * C64::new(w, 0.0);
                }
            }
        }
        out
    }

    /// Blocks `B_j = G_j(Λ) − C_j`.
    fn blocks(&self, lambda: &DMatrix<f64>) -> Vec<CMatrix> {
        (0..self.n).map(|j| self.g(lambda, j) - &self.input.offsets[j]).collect()
    }

    /// Exact minimizer over `(t, Z)` of the augmented quadratic with `b_j`
    /// already including `G_j(Λ)`.
    fn solve_tz(&self, c: &CMatrix, a: &[CMatrix], b: &[CMatrix], rho: f64) -> (f64, Vec<CMatrix>) {
        let d = self.input.d;
        let n = self.n as f64;
        let mut s = CMatrix::zeros(d, d);
        for (aj, bj) in a.iter().zip(b) {
            s += aj + bj;
        }
        let t = (trace(c) + 0.5 * trace(&s) - (1.0 + 0.5 * n) / rho) / d as f64;
        let r = (eye(d) * C64::new(t, 0.0) - c - &s * C64::new(0.5, 0.0)) / C64::new(1.0 + 0.5 * n, 0.0);
        let z = a.iter().zip(b).map(|(aj, bj)| (aj + bj + &r) * C64::new(0.5, 0.0)).collect();
        (t, z)
    }

    /// Gradient in `Λ` of the augmented quadratic after eliminating `(t, Z)`.
    fn lambda_grad(&self, lambda: &DMatrix<f64>, c: &CMatrix, a: &[CMatrix], b: &[CMatrix], ell: &DMatrix<f64>, rho: f64) -> DMatrix<f64> {
        let src = self.input.sources.as_ref().expect("sources present");
        let beff: Vec<CMatrix> = (0..self.n).map(|j| &b[j] + self.g(lambda, j)).collect();
        let (_, z) = self.solve_tz(c, a, &beff, rho);
        let mut grad = lambda - ell;
        for j in 0..self.n {
            let resid = &z[j] - &beff[j];
            for (i, ai) in src.iter().enumerate() {
                grad[(j, i)] -= inner(ai, &resid);
            }
        }
        grad
    }

    fn x_update(&self, st: &mut State, rho: f64) {
        let c = &st.s0 - &st.y0;
        let a: Vec<CMatrix> = (0..self.n).map(|j| &st.u[j] - &st.yu[j]).collect();
        let b: Vec<CMatrix> = (0..self.n).map(|j| &st.v[j] - &st.yv[j] - &self.input.offsets[j]).collect();
        if self.input.sources.is_some() {
            // The reduced problem in Λ is a quadratic with Hessian ⪰ 1; conjugate gradients.
            let ell = &st.l - &st.yl;
            let zero = DMatrix::zeros(self.n, self.m);
            let g0 = self.lambda_grad(&zero, &c, &a, &b, &ell, rho);
            let hess = |p: &DMatrix<f64>| self.lambda_grad(p, &c, &a, &b, &ell, rho) - &g0;
            let mut x = st.lambda.clone();
            let mut r = -&g0 - hess(&x);
            let mut p = r.clone();
            let mut rr = r.norm_squared();
            let stop = 1e-26 * g0.norm_squared().max(1.0);
            for _ in 0..(4 * self.n * self.m).max(20) {
                if rr <= stop {
                    break;
                }
                let hp = hess(&p);
                let alpha = rr / p.dot(&hp);
                x += &p * alpha;
                r -= &hp * alpha;
                let rr_new = r.norm_squared();
                p = &r + &p * (rr_new / rr);
                rr = rr_new;
            }
            st.lambda = x;
        }
        let beff: Vec<CMatrix> = (0..self.n).map(|j| &b[j] + self.g(&st.lambda, j)).collect();
        let (t, z) = self.solve_tz(&c, &a, &beff, rho);
        st.t = t;
        st.z = z;
    }

    /// Projection step; returns the squared primal residual and the squared
    /// norm of `Aᵀ(s_new − s_old)`.
    fn s_update(&self, st: &mut State) -> Result<(f64, f64)> {
        let d = self.input.d;
        let mut sum_z = CMatrix::zeros(d, d);
        for zj in &st.z {
            sum_z += zj;
        }
        let mut primal = 0.0;
        let a0 = eye(d) * C64::new(st.t, 0.0) - &sum_z;
        let v0 = &a0 + &st.y0;
        let s0 = psd(&v0)?;
        let ds0 = &s0 - &st.s0;
        st.y0 = &v0 - &s0;
        primal += (&a0 - &s0).norm_squared();
        st.s0 = s0;

        let mut dual_z: Vec<CMatrix> = vec![-&ds0; self.n];
        let mut dv = Vec::with_capacity(self.n);
        for j in 0..self.n {
            let vu = &st.z[j] + &st.yu[j];
            let u = psd(&vu)?;
            dual_z[j] += &u - &st.u[j];
            primal += (&st.z[j] - &u).norm_squared();
            st.yu[j] = &vu - &u;
            st.u[j] = u;

            let av = &st.z[j] - self.g(&st.lambda, j) + &self.input.offsets[j];
            let vv = &av + &st.yv[j];
            let v = psd(&vv)?;
            let dvj = &v - &st.v[j];
            dual_z[j] += &dvj;
            primal += (&av - &v).norm_squared();
            st.yv[j] = &vv - &v;
            st.v[j] = v;
            dv.push(dvj);
        }
        let mut dual = trace(&ds0).powi(2) + dual_z.iter().map(|m| m.norm_squared()).sum::<f64>();
        if let Some(src) = &self.input.sources {
            let vl = &st.lambda + &st.yl;
            let mut l = vl.clone();
            project_columns(&mut l);
            let mut dl = &l - &st.l;
            for j in 0..self.n {
                for (i, ai) in src.iter().enumerate() {
                    dl[(j, i)] -= inner(ai, &dv[j]);
                }
            }
            dual += dl.norm_squared();
            primal += (&st.lambda - &l).norm_squared();
            st.yl = &vl - &l;
            st.l = l;
        }
        Ok((primal, dual))
    }

    fn rescale_duals(st: &mut State, factor: f64) {
        let f = C64::new(factor, 0.0);
        st.y0 *= f;
        st.yu.iter_mut().for_each(|y| *y *= f);
        st.yv.iter_mut().for_each(|y| *y *= f);
        st.yl *= factor;
    }

    /// Certified bounds from the current iterate.
    fn bounds(&self, st: &State) -> Result<Bounds> {
        let d = self.input.d;
        let map = self.input.sources.as_ref().map(|_| st.l.clone());
        let blocks = match &map {
            Some(l) => self.blocks(l),
            None => self.blocks(&DMatrix::zeros(self.n, self.m)),
        };
        let (upper, z) = repaired_upper(&st.z, &blocks)?;

        let raw = psd(&(-&st.y0))?;
        let tr = trace(&raw);
        let rho_hat = if tr > 1e-300 { &raw / C64::new(tr, 0.0) } else { eye(d) / C64::new(d as f64, 0.0) };
        let lower = match &self.input.sources {
            None => primal_value(&rho_hat, &blocks)?,
            Some(src) => {
                let scale = if tr > 1e-300 { 1.0 / tr } else { 0.0 };
                let w: Vec<CMatrix> =
                    st.yv.iter().map(|y| clamp_below(&(psd(&(-y))? * C64::new(scale, 0.0)), &rho_hat)).collect::<Result<_>>()?;
                let mut total = -(0..self.n).map(|j| inner(&w[j], &self.input.offsets[j])).sum::<f64>();
                for ai in src {
                    total += (0..self.n).map(|j| inner(&w[j], ai)).fold(f64::INFINITY, f64::min);
                }
                total
            }
        };
        Ok((upper, z, map, lower, rho_hat))
    }
}

pub(crate) fn solve(input: &SdpInput, opts: &SolverOptions) -> Result<RawSolution> {
    let d = input.d;
    let n = input.offsets.len();
    let m = input.sources.as_ref().map_or(0, |s| s.len());
    if n == 0 {
        return Err(Error::Empty("diamond program with no blocks"));
    }
    let solver = Solver { input, n, m };
    let zero = CMatrix::zeros(d, d);
    let mut init_map = DMatrix::from_element(n, m, 1.0 / n as f64);
    project_columns(&mut init_map);
    let mut st = State {
        t: 0.0,
        z: vec![zero.clone(); n],
        lambda: init_map.clone(),
        s0: zero.clone(),
        y0: zero.clone(),
        u: vec![zero.clone(); n],
        yu: vec![zero.clone(); n],
        v: vec![zero.clone(); n],
        yv: vec![zero.clone(); n],
        l: init_map,
        yl: DMatrix::zeros(n, m),
    };
    let mut rho = 1.0;
    let mut best_upper = f64::INFINITY;
    let mut best_lower = f64::NEG_INFINITY;
    let mut best_z = Vec::new();
    let mut best_map = None;
    let mut best_rho_hat = eye(d) / C64::new(d as f64, 0.0);
    let mut history = Vec::new();
    let mut primal_acc = 0.0;
    let mut dual_acc = 0.0;
    for it in 1..=opts.max_iter {
        solver.x_update(&mut st, rho);
        let (p, q) = solver.s_update(&mut st)?;
        primal_acc += p;
        dual_acc += q * rho * rho;
        if it % CHECK_EVERY == 0 || it == 1 {
            let (upper, z, map, lower, rho_hat) = solver.bounds(&st)?;
            if upper < best_upper {
                best_upper = upper;
                best_z = z;
                best_map = map;
            }
            if lower > best_lower {
                best_lower = lower;
                best_rho_hat = rho_hat;
            }
            if opts.record_history {
                history.push(GapSample { iteration: it, lower: best_lower, upper: best_upper, penalty: rho });
            }
            if best_upper - best_lower <= opts.tol {
                return Ok(RawSolution {
                    lower: best_lower,
                    upper: best_upper,
                    iterations: it,
                    rho_hat: best_rho_hat,
                    z: best_z,
                    map: best_map,
                    history,
                });
            }
        }
        if it % BALANCE_EVERY == 0 {
            // Residual balancing; the scaled duals follow the penalty.
            let (pr, du) = (primal_acc.sqrt(), dual_acc.sqrt());
            if pr > 10.0 * du {
                rho *= 2.0;
                Solver::rescale_duals(&mut st, 0.5);
            } else if du > 10.0 * pr {
                rho *= 0.5;
                Solver::rescale_duals(&mut st, 2.0);
            }
            primal_acc = 0.0;
            dual_acc = 0.0;
        }
    }
    Err(Error::NonConvergence { iterations: opts.max_iter, best_gap: best_upper - best_lower })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_projection() {
        let mut m = DMatrix::from_column_slice(3, 2, &[0.5, 0.5, 0.5, 2.0, -1.0, 0.0]);
        project_columns(&mut m);
        for col in m.column_iter() {
            assert!((col.sum() - 1.0).abs() < 1e-12);
            assert!(col.iter().all(|&x| x >= 0.0));
        }
        assert!((m[(0, 1)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn clamp_respects_order() {
        let rho = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(0.7, 0.0), C64::new(0.3, 0.0)]));
        let w = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(0.9, 0.0), C64::new(0.1, 0.0)]));
        let c = clamp_below(&w, &rho).unwrap();
        assert!((c[(0, 0)].re - 0.7).abs() < 1e-12);
        assert!((c[(1, 1)].re - 0.1).abs() < 1e-12);
    }
}
