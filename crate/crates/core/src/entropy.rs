//! Scalar entropy and relative-entropy functionals, in nats.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::povm::measure_distribution;
use crate::qmat::{DensityMatrix, ExtendedReal, HermitianMatrix, Povm, ProbabilityVector, PROB_TOLERANCE, PSD_TOLERANCE};

/// Volumes at or below this are treated as zero-trace POVM elements.
pub const ZERO_VOLUME: f64 = 1e-12;

/// Output unit. Everything is computed in nats; bits are a presentation-layer conversion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
pub enum LogBase {
    #[default]
    Nats,
    Bits,
}

impl LogBase {
    pub fn from_base(base: f64) -> Result<Self> {
        if base == 2.0 {
            Ok(LogBase::Bits)
        } else if (base - std::f64::consts::E).abs() < 1e-12 {
            Ok(LogBase::Nats)
        } else {
            Err(Error::Domain(format!("unsupported log base {base}; use 2 or e")))
        }
    }

    /// Converts a value in nats to this unit.
    pub fn convert(self, nats: f64) -> f64 {
        match self {
            LogBase::Nats => nats,
            LogBase::Bits => nats / std::f64::consts::LN_2,
        }
    }
}

/// `x log x`, zero at zero.
fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Shannon entropy of a raw nonnegative weight list.
pub(crate) fn shannon_of(p: &[f64]) -> f64 {
    -p.iter().map(|&x| xlogx(x)).sum::<f64>()
}

pub fn shannon(p: &ProbabilityVector) -> f64 {
    shannon_of(p.as_slice())
}

/// Binary entropy `h(x)`.
pub fn binary_h(x: f64) -> Result<f64> {
    if !(-PROB_TOLERANCE..=1.0 + PROB_TOLERANCE).contains(&x) {
        return Err(Error::Domain(format!("binary entropy argument {x} outside [0, 1]")));
    }
    let x = x.clamp(0.0, 1.0);
    Ok(-xlogx(x) - xlogx(1.0 - x))
}

/// `g(x) = -x log x + (1 + x) log(1 + x)`, with `g(0) = 0`.
pub fn g_func(x: f64) -> Result<f64> {
    if x < -PROB_TOLERANCE || !x.is_finite() {
        return Err(Error::Domain(format!("g argument {x} is negative")));
    }
    let x = x.max(0.0);
    Ok(-xlogx(x) + (1.0 + x) * x.ln_1p())
}

pub fn von_neumann(rho: &DensityMatrix) -> Result<f64> {
    Ok(shannon_of(&rho.spectrum()?))
}

/// Observational entropy with its Shannon + Boltzmann split.
#[derive(Clone, Debug, Serialize)]
pub struct OeBreakdown {
    pub total: f64,
    pub shannon_term: f64,
    pub boltzmann_term: f64,
    pub probs: ProbabilityVector,
    pub volumes: Vec<f64>,
}

impl OeBreakdown {
    pub fn converted(&self, base: LogBase) -> OeBreakdown {
        OeBreakdown {
            total: base.convert(self.total),
            shannon_term: base.convert(self.shannon_term),
            boltzmann_term: base.convert(self.boltzmann_term),
            ..self.clone()
        }
    }
}

/// `S_M(ρ) = -Σ p_i log(p_i / V_i)` with `p_i = tr(M_i ρ)`, `V_i = tr(M_i)`.
pub fn observational_entropy(m: &Povm, rho: &DensityMatrix) -> Result<OeBreakdown> {
    let probs = measure_distribution(m, rho)?;
    let volumes = m.volumes();
    let mut total = 0.0;
    let mut boltzmann = 0.0;
    for (i, (&p, &v)) in probs.as_slice().iter().zip(&volumes).enumerate() {
        if v <= ZERO_VOLUME {
            if p > PROB_TOLERANCE {
                return Err(Error::Domain(format!("outcome {i} has probability {p:.3e} but zero volume")));
            }
            continue;
        }
        if p <= 0.0 {
            continue;
        }
        total -= p * (p / v).ln();
        boltzmann += p * v.ln();
    }
    let shannon_term = shannon(&probs);
    Ok(OeBreakdown { total, shannon_term, boltzmann_term: boltzmann, probs, volumes })
}

/// `D(p‖q) = Σ p_i log(p_i/q_i)`; `q` need not be normalized.
pub fn relative_entropy_classical(p: &ProbabilityVector, q: &[f64]) -> Result<ExtendedReal> {
    if p.len() != q.len() {
        return Err(Error::ShapeMismatch(format!("distributions of length {} and {}", p.len(), q.len())));
    }
    if let Some(x) = q.iter().find(|x| **x < -PROB_TOLERANCE || !x.is_finite()) {
        return Err(Error::InvalidProbability(format!("reference weight {x} is negative")));
    }
    let mut acc = 0.0;
    for (&pi, &qi) in p.as_slice().iter().zip(q) {
        if pi <= 0.0 {
            continue;
        }
        if qi <= 0.0 {
            return Ok(ExtendedReal::Infinite);
        }
        acc += pi * (pi / qi).ln();
    }
    Ok(ExtendedReal::Finite(acc))
}

/// Umegaki relative entropy `tr ρ(log ρ − log σ)` with the support convention.
///
/// Infinite exactly when σ compressed to the support of ρ has an eigenvalue
/// at or below `1e-10`.
pub fn relative_entropy_quantum(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<ExtendedReal> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    let er = rho.matrix().eig()?;
    let es = sigma.matrix().eig()?;
    let n = rho.dim();
    let support: Vec<usize> = (0..n).filter(|&k| er.values[k] > PSD_TOLERANCE).collect();

    // σ compressed to supp(ρ): V† σ V.
    let k = support.len();
    let v = crate::qmat::CMatrix::from_fn(n, k, |i, j| er.vectors[(i, support[j])]);
    let compressed = HermitianMatrix::new(v.adjoint() * sigma.matrix().as_matrix() * &v)?;
    if compressed.min_eigenvalue()? <= PSD_TOLERANCE {
        return Ok(ExtendedReal::Infinite);
    }

    // Overlaps |⟨u_k|v_l⟩|².
    let overlap = er.vectors.adjoint() * &es.vectors;
    let mut cross = 0.0;
    for &a in &support {
        let r = er.values[a];
        for (l, &s) in es.values.iter().enumerate() {
            if s <= 0.0 {
                continue;
            }
            cross += r * overlap[(a, l)].norm_sqr() * s.ln();
        }
    }
    let neg_entropy: f64 = support.iter().map(|&a| xlogx(er.values[a])).sum();
    Ok(ExtendedReal::Finite(neg_entropy - cross))
}

/// Classical relative entropy between the outcome statistics of `m` on ρ and σ.
pub fn measured_relative_entropy(m: &Povm, rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<ExtendedReal> {
    let p = measure_distribution(m, rho)?;
    let q = measure_distribution(m, sigma)?;
    relative_entropy_classical(&p, q.as_slice())
}
