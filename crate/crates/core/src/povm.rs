//! Structural operations on measurements: the measuring channel, convex and
//! disjoint combinations, refinement, classical postprocessing and partial
//! measurement of bipartite states.

use serde::Serialize;

use crate::entropy::{relative_entropy_classical, relative_entropy_quantum};
use crate::error::{Error, Result};
use crate::qmat::{io, CMatrix, DensityMatrix, ExtendedReal, HermitianMatrix, Povm, ProbabilityVector, C64, PROB_TOLERANCE};

/// Probability below which a cq outcome is treated as absent.
pub const ZERO_WEIGHT: f64 = 1e-12;

/// Outcome distribution `p_i = tr(M_i ρ)`.
pub fn measure_distribution(m: &Povm, rho: &DensityMatrix) -> Result<ProbabilityVector> {
    m.check_dim(rho.dim())?;
    let raw: Vec<f64> = m.elements().iter().map(|e| e.inner(rho.matrix())).collect();
    let sum: f64 = raw.iter().sum();
    if (sum - 1.0).abs() <= 1e-12 {
        ProbabilityVector::new(raw)
    } else {
        // Completeness holds only to 1e-9 entrywise for file-loaded POVMs.
        ProbabilityVector::normalized(raw)
    }
}

/// Elementwise convex combination of POVMs sharing an outcome set.
pub fn convex_combine(ms: &[Povm], lambda: &ProbabilityVector) -> Result<Povm> {
    let first = ms.first().ok_or(Error::Empty("convex combination of zero POVMs"))?;
    if ms.len() != lambda.len() {
        return Err(Error::ShapeMismatch(format!("{} POVMs but {} weights", ms.len(), lambda.len())));
    }
    for m in ms {
        if m.dim() != first.dim() || m.len() != first.len() {
            return Err(Error::ShapeMismatch("convex combination needs a common dimension and outcome count".into()));
        }
    }
    let elements = (0..first.len())
        .map(|i| {
            ms.iter()
                .zip(lambda.as_slice())
                .fold(HermitianMatrix::zeros(first.dim()), |acc, (m, &w)| &acc + &(m.element(i) * w))
        })
        .collect();
    Povm::with_labels(elements, first.labels().to_vec())
}

/// Convex combination on the disjoint union of outcome sets; outcome `(k, i)`
/// carries `λ_k (M_k)_i` and the label `"k:i"`.
pub fn disjoint_combine(ms: &[Povm], lambda: &ProbabilityVector) -> Result<Povm> {
    let first = ms.first().ok_or(Error::Empty("disjoint combination of zero POVMs"))?;
    if ms.len() != lambda.len() {
        return Err(Error::ShapeMismatch(format!("{} POVMs but {} weights", ms.len(), lambda.len())));
    }
    let mut elements = Vec::new();
    let mut labels = Vec::new();
    for (k, (m, &w)) in ms.iter().zip(lambda.as_slice()).enumerate() {
        m.check_dim(first.dim())?;
        for (e, label) in m.elements().iter().zip(m.labels()) {
            elements.push(e * w);
            labels.push(format!("{k}:{label}"));
        }
    }
    Povm::with_labels(elements, labels)
}

/// Splits every element into two halves.
pub fn refine_split(m: &Povm) -> Povm {
    postprocess(&StochasticMap::split(m.len()), m).expect("splitting map matches the outcome count")
}

/// Reorders outcomes: the new outcome `j` is the old outcome `perm[j]`.
pub fn permute(m: &Povm, perm: &[usize]) -> Result<Povm> {
    let mut seen = vec![false; m.len()];
    if perm.len() != m.len() || perm.iter().any(|&p| p >= m.len() || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::ShapeMismatch(format!("{perm:?} is not a permutation of {} outcomes", m.len())));
    }
    let elements = perm.iter().map(|&p| m.element(p).clone()).collect();
    let labels = perm.iter().map(|&p| m.labels()[p].clone()).collect();
    Povm::with_labels(elements, labels)
}

/// `(ΛM)_j = Σ_i Λ_{ji} M_i`.
pub fn postprocess(map: &StochasticMap, m: &Povm) -> Result<Povm> {
    if map.cols() != m.len() {
        return Err(Error::ShapeMismatch(format!("map has {} columns but the POVM has {} outcomes", map.cols(), m.len())));
    }
    let elements = (0..map.rows())
        .map(|j| (0..map.cols()).fold(HermitianMatrix::zeros(m.dim()), |acc, i| &acc + &(m.element(i) * map.get(j, i))))
        .collect();
    Povm::new(elements)
}

/// Column-stochastic matrix from `cols` source outcomes to `rows` targets.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StochasticMap {
    rows: usize,
    cols: usize,
    /// Row-major.
    entries: Vec<f64>,
}

impl StochasticMap {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::InvalidStochasticMap(format!("{} entries for a {rows}x{cols} map", entries.len())));
        }
        if let Some(x) = entries.iter().find(|x| **x < -PROB_TOLERANCE || !x.is_finite()) {
            return Err(Error::InvalidStochasticMap(format!("negative entry {x}")));
        }
        let entries: Vec<f64> = entries.into_iter().map(|x| x.max(0.0)).collect();
        for i in 0..cols {
            let s: f64 = (0..rows).map(|j| entries[j * cols + i]).sum();
            if (s - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidStochasticMap(format!("column {i} sums to {s:.12}")));
            }
        }
        Ok(Self { rows, cols, entries })
    }

    /// Builds from columns (one probability vector per source outcome).
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        let mut entries = vec![0.0; rows * cols];
        for (i, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::InvalidStochasticMap("ragged columns".into()));
            }
            for (j, &x) in c.iter().enumerate() {
                entries[j * cols + i] = x;
            }
        }
        Self::new(rows, cols, entries)
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n * n).map(|k| if k / n == k % n { 1.0 } else { 0.0 }).collect();
        Self { rows: n, cols: n, entries }
    }

    /// Merges all outcomes into one.
    pub fn merge(cols: usize) -> Self {
        Self { rows: 1, cols, entries: vec![1.0; cols] }
    }

    /// Sends outcome `i` to `2i` and `2i + 1` with probability ½ each.
    pub fn split(n: usize) -> Self {
        let mut entries = vec![0.0; 2 * n * n];
        for i in 0..n {
            entries[(2 * i) * n + i] = 0.5;
            entries[(2 * i + 1) * n + i] = 0.5;
        }
        Self { rows: 2 * n, cols: n, entries }
    }

    /// Undoes [`StochasticMap::split`]: outcomes `2i`, `2i + 1` merge back to `i`.
    pub fn pair_merge(n: usize) -> Self {
        let mut entries = vec![0.0; n * 2 * n];
        for i in 0..n {
            entries[i * 2 * n + 2 * i] = 1.0;
            entries[i * 2 * n + 2 * i + 1] = 1.0;
        }
        Self { rows: n, cols: 2 * n, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.cols + col]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn compose(&self, inner: &StochasticMap) -> Result<StochasticMap> {
        if self.cols != inner.rows {
            return Err(Error::ShapeMismatch(format!("cannot compose {}x{} after {}x{}", self.rows, self.cols, inner.rows, inner.cols)));
        }
        let mut entries = vec![0.0; self.rows * inner.cols];
        for j in 0..self.rows {
            for i in 0..inner.cols {
                entries[j * inner.cols + i] = (0..self.cols).map(|k| self.get(j, k) * inner.get(k, i)).sum();
            }
        }
        StochasticMap::new(self.rows, inner.cols, entries)
    }

    pub fn apply(&self, p: &ProbabilityVector) -> Result<ProbabilityVector> {
        if p.len() != self.cols {
            return Err(Error::ShapeMismatch(format!("map expects {} outcomes, got {}", self.cols, p.len())));
        }
        ProbabilityVector::normalized((0..self.rows).map(|j| (0..self.cols).map(|i| self.get(j, i) * p.get(i)).sum()).collect())
    }
}

/// Classical-quantum state `Σ_j |j⟩⟨j| ⊗ p_j ρ_j`.
///
/// Outcomes with weight at or below [`ZERO_WEIGHT`] carry the maximally mixed
/// state as a placeholder conditional and are flagged absent; they never
/// contribute to entropies.
#[derive(Clone, Debug)]
pub struct CqState {
    pub outcome_labels: Vec<String>,
    pub weights: ProbabilityVector,
    pub conditionals: Vec<DensityMatrix>,
    pub present: Vec<bool>,
    pub d_a: usize,
}

impl CqState {
    pub fn new(outcome_labels: Vec<String>, weights: ProbabilityVector, conditionals: Vec<DensityMatrix>, d_a: usize) -> Result<Self> {
        let n = weights.len();
        if outcome_labels.len() != n || conditionals.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "{} labels, {} weights, {} conditionals",
                outcome_labels.len(),
                n,
                conditionals.len()
            )));
        }
        let d_b = conditionals[0].dim();
        if let Some(c) = conditionals.iter().find(|c| c.dim() != d_b) {
            return Err(Error::DimensionMismatch { expected: d_b, found: c.dim() });
        }
        let present = weights.as_slice().iter().map(|&w| w > ZERO_WEIGHT).collect();
        Ok(Self { outcome_labels, weights, conditionals, present, d_a })
    }

    pub fn d_b(&self) -> usize {
        self.conditionals[0].dim()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Weighted average of the conditionals, `Σ_j p_j ρ_j`.
    pub fn average_conditional(&self) -> Result<DensityMatrix> {
        DensityMatrix::mixture(&self.conditionals, &self.weights)
    }

    /// Block-diagonal embedding on `(#outcomes · d_B)` dimensions.
    pub fn embed(&self) -> Result<DensityMatrix> {
        let d_b = self.d_b();
        let n = self.len();
        let mut m = CMatrix::zeros(n * d_b, n * d_b);
        for j in 0..n {
            let w = self.weights.get(j);
            let c = self.conditionals[j].matrix();
            for a in 0..d_b {
                for b in 0..d_b {
                    m[(j * d_b + a, j * d_b + b)] = c.get(a, b) * w;
                }
            }
        }
        DensityMatrix::new(HermitianMatrix::new(m)?)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "outcome_labels": self.outcome_labels,
            "weights": self.weights,
            "conditionals": self.conditionals.iter().map(io::state_to_json).collect::<Vec<_>>(),
            "present": self.present,
            "d_a": self.d_a,
            "d_b": self.d_b(),
        })
    }
}

/// `(Φ_M ⊗ I) ρ_AB` as a classical-quantum state.
pub fn partial_measure(m_a: &Povm, rho_ab: &DensityMatrix, d_a: usize, d_b: usize) -> Result<CqState> {
    m_a.check_dim(d_a)?;
    if rho_ab.dim() != d_a * d_b {
        return Err(Error::DimensionMismatch { expected: d_a * d_b, found: rho_ab.dim() });
    }
    let r = rho_ab.matrix().as_matrix();
    let mut raw_weights = Vec::with_capacity(m_a.len());
    let mut blocks = Vec::with_capacity(m_a.len());
    for e in m_a.elements() {
        // tr_A((M ⊗ 1) ρ)[b, b'] = Σ_{a, a'} M[a, a'] ρ[(a', b), (a, b')]
        let block = CMatrix::from_fn(d_b, d_b, |b, bp| {
            let mut acc = C64::new(0.0, 0.0);
            for a in 0..d_a {
                for ap in 0..d_a {
                    acc += e.get(a, ap) * r[(ap * d_b + b, a * d_b + bp)];
                }
            }
            acc
        });
        let block = HermitianMatrix::new(block)?;
        raw_weights.push(block.trace());
        blocks.push(block);
    }
    let weights = ProbabilityVector::normalized(raw_weights.clone())?;
    let conditionals = blocks
        .into_iter()
        .zip(&raw_weights)
        .map(|(b, &w)| if w > ZERO_WEIGHT { DensityMatrix::from_unnormalized(b) } else { Ok(DensityMatrix::maximally_mixed(d_b)) })
        .collect::<Result<Vec<_>>>()?;
    CqState::new(m_a.labels().to_vec(), weights, conditionals, d_a)
}

/// Chain rule `D(p‖p′) + Σ_j p_j D(ρ_j‖ρ′_j)`.
pub fn cq_relative_entropy(a: &CqState, b: &CqState) -> Result<ExtendedReal> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!("cq states with {} and {} outcomes", a.len(), b.len())));
    }
    if a.d_b() != b.d_b() {
        return Err(Error::DimensionMismatch { expected: a.d_b(), found: b.d_b() });
    }
    let mut total = relative_entropy_classical(&a.weights, b.weights.as_slice())?;
    for j in 0..a.len() {
        if !a.present[j] {
            continue;
        }
        let pj = a.weights.get(j);
        total = total.add(relative_entropy_quantum(&a.conditionals[j], &b.conditionals[j])?.scale(pj));
        if !total.is_finite() {
            break;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::observational_entropy;
    use crate::qmat::random::{random_density, random_povm, rng_from_seed};

    #[test]
    fn trivial_and_diagonal_readout() {
        let rho = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        assert_eq!(measure_distribution(&Povm::trivial(2), &rho).unwrap().as_slice(), &[1.0]);
        let p = measure_distribution(&Povm::computational(2), &rho).unwrap();
        assert!((p.get(0) - 0.3).abs() < 1e-15 && (p.get(1) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn convex_combine_endpoints_and_noise() {
        let mut rng = rng_from_seed(21);
        let m = random_povm(3, 2, &mut rng).unwrap();
        let n = random_povm(3, 2, &mut rng).unwrap();
        let c = convex_combine(&[m.clone(), n], &ProbabilityVector::new(vec![1.0, 0.0]).unwrap()).unwrap();
        assert!(c.element(0).max_abs_diff(m.element(0)) < 1e-15);
        let flipped = permute(&m, &[1, 0]).unwrap();
        let half = convex_combine(&[m, flipped], &ProbabilityVector::uniform(2)).unwrap();
        let id_half = HermitianMatrix::identity(3).scale(0.5);
        assert!(half.element(0).max_abs_diff(&id_half) < 1e-12);
        assert!(half.element(1).max_abs_diff(&id_half) < 1e-12);
    }

    #[test]
    fn convex_combine_shape_mismatch() {
        let r = convex_combine(&[Povm::computational(2), Povm::trivial(2)], &ProbabilityVector::uniform(2));
        assert!(matches!(r, Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn disjoint_combine_labels_and_halving() {
        let m = Povm::computational(2);
        let single = disjoint_combine(std::slice::from_ref(&m), &ProbabilityVector::uniform(1)).unwrap();
        assert_eq!(single.len(), 2);
        assert!(single.element(1).max_abs_diff(m.element(1)) < 1e-15);
        let doubled = disjoint_combine(&[m.clone(), m.clone()], &ProbabilityVector::uniform(2)).unwrap();
        assert_eq!(doubled.labels(), &["0:0", "0:1", "1:0", "1:1"]);
        assert!(doubled.element(3).max_abs_diff(&m.element(1).scale(0.5)) < 1e-15);
    }

    #[test]
    fn refine_split_trivial() {
        let r = refine_split(&Povm::trivial(2));
        assert_eq!(r.len(), 2);
        assert!(r.element(1).max_abs_diff(&HermitianMatrix::identity(2).scale(0.5)) < 1e-15);
    }

    #[test]
    fn refine_split_preserves_oe() {
        let mut rng = rng_from_seed(22);
        let m = random_povm(4, 3, &mut rng).unwrap();
        let rho = random_density(4, 2, &mut rng).unwrap();
        let a = observational_entropy(&m, &rho).unwrap().total;
        let b = observational_entropy(&refine_split(&m), &rho).unwrap().total;
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn postprocess_identity_merge_split() {
        let mut rng = rng_from_seed(23);
        let m = random_povm(3, 4, &mut rng).unwrap();
        let same = postprocess(&StochasticMap::identity(4), &m).unwrap();
        assert!(same.element(2).max_abs_diff(m.element(2)) < 1e-15);
        let merged = postprocess(&StochasticMap::merge(4), &m).unwrap();
        assert!(merged.element(0).max_abs_diff(&HermitianMatrix::identity(3)) < 1e-12);
        let split = postprocess(&StochasticMap::split(4), &m).unwrap();
        let refined = refine_split(&m);
        assert!(split.element(5).max_abs_diff(refined.element(5)) < 1e-15);
        let back = postprocess(&StochasticMap::pair_merge(4), &split).unwrap();
        assert!(back.element(1).max_abs_diff(m.element(1)) < 1e-15);
        assert!(postprocess(&StochasticMap::identity(3), &m).is_err());
    }

    #[test]
    fn stochastic_map_validation() {
        assert!(StochasticMap::new(2, 1, vec![0.4, 0.5]).is_err());
        assert!(StochasticMap::new(2, 1, vec![1.2, -0.2]).is_err());
        assert!(StochasticMap::from_columns(&[vec![0.25, 0.75]]).is_ok());
    }

    #[test]
    fn product_state_conditionals() {
        let mut rng = rng_from_seed(24);
        let a = random_density(2, 2, &mut rng).unwrap();
        let b = random_density(3, 3, &mut rng).unwrap();
        let m = random_povm(2, 3, &mut rng).unwrap();
        let cq = partial_measure(&m, &a.tensor(&b), 2, 3).unwrap();
        for c in &cq.conditionals {
            assert!(c.matrix().max_abs_diff(b.matrix()) < 1e-12);
        }
    }

    #[test]
    fn bell_state_projective() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)];
        let bell = DensityMatrix::pure(&psi).unwrap();
        let cq = partial_measure(&Povm::computational(2), &bell, 2, 2).unwrap();
        assert!((cq.weights.get(0) - 0.5).abs() < 1e-15);
        for c in &cq.conditionals {
            assert!((c.purity() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_weight_outcomes_are_flagged() {
        let rho = DensityMatrix::basis(2, 0).tensor(&DensityMatrix::basis(2, 1));
        let cq = partial_measure(&Povm::computational(2), &rho, 2, 2).unwrap();
        assert_eq!(cq.present, vec![true, false]);
        assert!(cq.conditionals[1].matrix().max_abs_diff(DensityMatrix::maximally_mixed(2).matrix()) < 1e-15);
    }

    #[test]
    fn cq_relative_entropy_degenerate_cases() {
        let mut rng = rng_from_seed(25);
        let rho = random_density(4, 4, &mut rng).unwrap();
        let m = random_povm(2, 2, &mut rng).unwrap();
        let cq = partial_measure(&m, &rho, 2, 2).unwrap();
        assert!(cq_relative_entropy(&cq, &cq).unwrap().to_f64().abs() < 1e-10);
        let c = random_density(2, 2, &mut rng).unwrap();
        let w1 = ProbabilityVector::new(vec![0.2, 0.8]).unwrap();
        let w2 = ProbabilityVector::new(vec![0.6, 0.4]).unwrap();
        let labels = vec!["a".to_string(), "b".to_string()];
        let a = CqState::new(labels.clone(), w1.clone(), vec![c.clone(), c.clone()], 2).unwrap();
        let b = CqState::new(labels, w2.clone(), vec![c.clone(), c], 2).unwrap();
        let classical = relative_entropy_classical(&w1, w2.as_slice()).unwrap().to_f64();
        assert!((cq_relative_entropy(&a, &b).unwrap().to_f64() - classical).abs() < 1e-10);
    }
}
