use super::sdp::{self, GapSample, SdpInput, SolverOptions};
use crate::error::{Error, Result};
use crate::povm::StochasticMap;
use crate::qmat::Povm;
use serde::Serialize;

/// `γ⃗(M, N) = inf_Λ ½‖Φ_{ΛM} − Φ_N‖⋄` with a certified bracket.
#[derive(Clone, Debug, Serialize)]
pub struct OneWaySimulation {
    /// Midpoint of `[lower, upper]`.
    pub value: f64,
    pub lower: f64,
    /// Diamond distance upper bound attained by `best_map`.
    pub upper: f64,
    pub gap: f64,
    pub iterations: usize,
    /// Postprocessing from outcomes of `M` to outcomes of `N`.
    pub best_map: StochasticMap,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub history: Vec<GapSample>,
}

/// Symmetrized simulation distance `γ = (γ⃗(M,N) + γ⃗(N,M))/2`.
#[derive(Clone, Debug, Serialize)]
pub struct SimDistance {
    pub value: f64,
    pub gap: f64,
    pub forward: OneWaySimulation,
    pub backward: OneWaySimulation,
}

/// Solves jointly over the postprocessing `Λ` and the dual diamond-norm blocks;
/// the program stays convex because `ΛM` is affine in `Λ`.
pub fn one_way_sim_distance(m: &Povm, n: &Povm, tol: f64) -> Result<OneWaySimulation> {
    one_way_sim_distance_with(m, n, &SolverOptions::with_tol(tol))
}

pub fn one_way_sim_distance_with(m: &Povm, n: &Povm, opts: &SolverOptions) -> Result<OneWaySimulation> {
    if m.dim() != n.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: n.dim() });
    }
    let input = SdpInput {
        d: m.dim(),
        offsets: n.elements().iter().map(|e| e.transpose().into_matrix()).collect(),
        sources: Some(m.elements().iter().map(|e| e.transpose().into_matrix()).collect()),
    };
    let raw = sdp::solve(&input, opts)?;
    let map = raw.map.ok_or_else(|| Error::NumericalFailure("simulation solve returned no map".into()))?;
    let entries: Vec<f64> = (0..map.nrows()).flat_map(|j| (0..map.ncols()).map(move |i| (j, i))).map(|(j, i)| map[(j, i)]).collect();
    let best_map = StochasticMap::new(map.nrows(), map.ncols(), entries)?;
    let lower = raw.lower.max(0.0);
    Ok(OneWaySimulation {
        value: 0.5 * (lower + raw.upper),
        lower,
        upper: raw.upper,
        gap: (raw.upper - lower).max(0.0),
        iterations: raw.iterations,
        best_map,
        history: raw.history,
    })
}

pub fn sim_distance(m: &Povm, n: &Povm, tol: f64) -> Result<SimDistance> {
    sim_distance_with(m, n, &SolverOptions::with_tol(tol))
}

pub fn sim_distance_with(m: &Povm, n: &Povm, opts: &SolverOptions) -> Result<SimDistance> {
    let forward = one_way_sim_distance_with(m, n, opts)?;
    let backward = one_way_sim_distance_with(n, m, opts)?;
    Ok(SimDistance {
        value: 0.5 * (forward.value + backward.value),
        gap: 0.5 * (forward.gap + backward.gap),
        forward,
        backward,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::diamond_distance;
    use crate::povm::{postprocess, refine_split};
    use crate::qmat::random::{random_povm, rng_from_seed};

    #[test]
    fn trivial_to_projective_qubit() {
        let r = one_way_sim_distance(&Povm::trivial(2), &Povm::computational(2), 1e-7).unwrap();
        assert!((r.value - 0.5).abs() < 1e-6, "{r:?}");
        let back = one_way_sim_distance(&Povm::computational(2), &Povm::trivial(2), 1e-7).unwrap();
        assert!(back.value.abs() < 1e-6);
        let g = sim_distance(&Povm::trivial(2), &Povm::computational(2), 1e-7).unwrap();
        assert!((g.value - 0.25).abs() < 1e-6);
    }

    #[test]
    fn refinements_simulate_each_other() {
        let mut rng = rng_from_seed(61);
        let m = random_povm(2, 2, &mut rng).unwrap();
        let g = sim_distance(&m, &refine_split(&m), 1e-7).unwrap();
        assert!(g.value.abs() < 1e-6, "{g:?}");
    }

    #[test]
    fn returned_map_attains_upper_bound() {
        let mut rng = rng_from_seed(62);
        let m = random_povm(2, 3, &mut rng).unwrap();
        let n = random_povm(2, 2, &mut rng).unwrap();
        let r = one_way_sim_distance(&m, &n, 1e-6).unwrap();
        let direct = diamond_distance(&postprocess(&r.best_map, &m).unwrap(), &n, 1e-8).unwrap();
        assert!(direct.value <= r.upper + 1e-7);
        assert!(r.lower <= direct.value + 1e-7);
    }
}
