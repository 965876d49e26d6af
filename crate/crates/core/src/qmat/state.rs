use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::hermitian::{trace_norm, HermitianMatrix};
use super::{PROB_TOLERANCE, PSD_TOLERANCE, TRACE_TOLERANCE};
use crate::error::{Error, Result};

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    h: HermitianMatrix,
}

impl DensityMatrix {
    /// Validates positivity (eigenvalues ≥ -1e-10) and unit trace (within 1e-10).
    /// Slightly negative eigenvalues are clipped to zero and the result renormalized.
    pub fn new(h: HermitianMatrix) -> Result<Self> {
        let trace = h.trace();
        if (trace - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::TraceNotOne { trace });
        }
        let e = h.eig()?;
        if e.min() < -PSD_TOLERANCE {
            return Err(Error::NotPositive { min_eigenvalue: e.min(), tolerance: PSD_TOLERANCE });
        }
        if e.min() < 0.0 {
            let clipped = e.rebuild(|x| x.max(0.0));
            let t = clipped.trace();
            return Ok(Self { h: clipped.scale(1.0 / t) });
        }
        Ok(Self { h })
    }

    /// Normalizes a positive semidefinite matrix by its trace.
    pub fn from_unnormalized(h: HermitianMatrix) -> Result<Self> {
        let t = h.trace();
        if t <= 0.0 || !t.is_finite() {
            return Err(Error::Domain(format!("cannot normalize a matrix with trace {t}")));
        }
        Self::new(h.scale(1.0 / t))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { h: HermitianMatrix::identity(dim).scale(1.0 / dim as f64) }
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real_diagonal(probs))
    }

    pub fn pure(v: &[super::C64]) -> Result<Self> {
        Self::new(HermitianMatrix::projector(v))
    }

    /// Computational basis state `|k⟩⟨k|`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut d = vec![0.0; dim];
        d[k] = 1.0;
        Self { h: HermitianMatrix::from_real_diagonal(&d) }
    }

    /// Convex combination `Σ λ_k ρ_k`.
    pub fn mixture(states: &[DensityMatrix], weights: &ProbabilityVector) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Empty("mixture of zero states"));
        }
        if states.len() != weights.len() {
            return Err(Error::ShapeMismatch(format!("{} states but {} weights", states.len(), weights.len())));
        }
        let dim = states[0].dim();
        let mut acc = HermitianMatrix::zeros(dim);
        for (s, &w) in states.iter().zip(weights.as_slice()) {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: s.dim() });
            }
            acc = &acc + &(s.matrix() * w);
        }
        Self::new(acc)
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.h
    }

    pub fn purity(&self) -> f64 {
        self.h.inner(&self.h)
    }

    /// Spectrum with round-off negatives clipped to zero.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        Ok(self.h.eigenvalues()?.into_iter().map(|x| x.max(0.0)).collect())
    }

    pub fn partial_trace_first(&self, d_a: usize, d_b: usize) -> Result<Self> {
        Self::new(self.h.partial_trace_first(d_a, d_b)?)
    }

    pub fn partial_trace_second(&self, d_a: usize, d_b: usize) -> Result<Self> {
        Self::new(self.h.partial_trace_second(d_a, d_b)?)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Self {
        Self { h: self.h.kron(&other.h) }
    }

    pub fn transpose(&self) -> Self {
        Self { h: self.h.transpose() }
    }
}

/// `½‖ρ − σ‖₁`.
///
/// Both signs of the difference are decomposed so the result is bitwise
/// symmetric in its arguments.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    let a = trace_norm(&(rho.matrix() - sigma.matrix()))?;
    let b = trace_norm(&(sigma.matrix() - rho.matrix()))?;
    Ok(0.25 * (a + b))
}

/// Finite probability distribution.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ProbabilityVector {
    probs: Vec<f64>,
}

impl ProbabilityVector {
    /// Entries must be ≥ -1e-12 (clipped to zero) and sum to one within 1e-10.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Empty("probability vector"));
        }
        if let Some(x) = probs.iter().find(|x| !x.is_finite() || **x < -PROB_TOLERANCE) {
            return Err(Error::InvalidProbability(format!("entry {x} is negative or non-finite")));
        }
        let probs: Vec<f64> = probs.into_iter().map(|x| x.max(0.0)).collect();
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidProbability(format!("entries sum to {sum:.12}")));
        }
        Ok(Self { probs })
    }

    /// Clips tiny negatives and divides by the sum; for distributions computed
    /// from slightly incomplete measurements.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        if let Some(x) = weights.iter().find(|x| !x.is_finite() || **x < -PROB_TOLERANCE) {
            return Err(Error::InvalidProbability(format!("weight {x} is negative or non-finite")));
        }
        let clipped: Vec<f64> = weights.into_iter().map(|x| x.max(0.0)).collect();
        let sum: f64 = clipped.iter().sum();
        if sum <= 0.0 {
            return Err(Error::InvalidProbability("weights sum to zero".into()));
        }
        Self::new(clipped.into_iter().map(|x| x / sum).collect())
    }

    pub fn uniform(n: usize) -> Self {
        Self { probs: vec![1.0 / n as f64; n] }
    }

    /// Point mass on `k`.
    pub fn deterministic(n: usize, k: usize) -> Self {
        let mut probs = vec![0.0; n];
        probs[k] = 1.0;
        Self { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn total_variation(&self, other: &ProbabilityVector) -> f64 {
        0.5 * self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }
}

impl<'de> Deserialize<'de> for ProbabilityVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let probs = Vec::<f64>::deserialize(d)?;
        ProbabilityVector::new(probs).map_err(serde::de::Error::custom)
    }
}

/// Real number or `+∞`; relative entropies take this value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
}

impl ExtendedReal {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(x) => Some(*x),
            ExtendedReal::Infinite => None,
        }
    }

    /// As `f64`, mapping the infinite value to `f64::INFINITY`.
    pub fn to_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    pub fn add(self, other: ExtendedReal) -> ExtendedReal {
        match (self, other) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite(a + b),
            _ => ExtendedReal::Infinite,
        }
    }

    pub fn scale(self, s: f64) -> ExtendedReal {
        match self {
            ExtendedReal::Finite(a) => ExtendedReal::Finite(a * s),
            ExtendedReal::Infinite if s == 0.0 => ExtendedReal::Finite(0.0),
            ExtendedReal::Infinite => ExtendedReal::Infinite,
        }
    }

    pub fn min(self, other: ExtendedReal) -> ExtendedReal {
        if self.to_f64() <= other.to_f64() {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: ExtendedReal) -> ExtendedReal {
        if self.to_f64() >= other.to_f64() {
            self
        } else {
            other
        }
    }
}

impl From<f64> for ExtendedReal {
    fn from(x: f64) -> Self {
        if x == f64::INFINITY {
            ExtendedReal::Infinite
        } else {
            ExtendedReal::Finite(x)
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(x) => write!(f, "{x}"),
            ExtendedReal::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(x) => s.serialize_f64(*x),
            ExtendedReal::Infinite => s.serialize_str("inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_trace_and_negativity() {
        assert!(matches!(DensityMatrix::diagonal(&[0.5, 0.6]), Err(Error::TraceNotOne { .. })));
        assert!(matches!(DensityMatrix::diagonal(&[1.1, -0.1]), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn clips_roundoff_negatives() {
        let rho = DensityMatrix::diagonal(&[1.0 + 5e-11, -5e-11]).unwrap();
        assert!(rho.spectrum().unwrap().iter().all(|&x| x >= 0.0));
        assert!((rho.matrix().trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn trace_distance_cases() {
        let rho = DensityMatrix::diagonal(&[0.7, 0.3]).unwrap();
        assert_eq!(trace_distance(&rho, &rho).unwrap(), 0.0);
        assert!((trace_distance(&DensityMatrix::basis(2, 0), &DensityMatrix::basis(2, 1)).unwrap() - 1.0).abs() < 1e-14);
        let mm = DensityMatrix::maximally_mixed(2);
        assert!((trace_distance(&rho, &mm).unwrap() - 0.2).abs() < 1e-14);
        assert!(trace_distance(&rho, &DensityMatrix::maximally_mixed(3)).is_err());
    }

    #[test]
    fn probability_vector_validation() {
        assert!(ProbabilityVector::new(vec![0.5, 0.5 + 1e-11]).is_ok());
        assert!(ProbabilityVector::new(vec![0.6, 0.5]).is_err());
        assert!(ProbabilityVector::new(vec![1.0 + 1e-13, -1e-13]).unwrap().as_slice()[1] == 0.0);
        assert!(ProbabilityVector::new(vec![1.1, -0.1]).is_err());
        assert!(ProbabilityVector::new(vec![]).is_err());
    }

    #[test]
    fn extended_real_arithmetic() {
        let inf = ExtendedReal::Infinite;
        assert_eq!(ExtendedReal::Finite(1.0).add(inf), inf);
        assert_eq!(inf.scale(0.0), ExtendedReal::Finite(0.0));
        assert_eq!(ExtendedReal::Finite(2.0).min(inf), ExtendedReal::Finite(2.0));
        assert_eq!(serde_json::to_string(&inf).unwrap(), "\"inf\"");
    }
}
