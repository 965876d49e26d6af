use super::hermitian::HermitianMatrix;
use super::state::DensityMatrix;
use super::{COMPLETENESS_TOLERANCE, PSD_TOLERANCE};
use crate::error::{Error, Result};

/// Finite POVM: positive semidefinite elements summing to the identity.
///
/// Elements are kept as an ordered list, duplicates allowed. Each outcome
/// carries an opaque string label (`"0"`, `"1"`, ... by default).
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    dim: usize,
    elements: Vec<HermitianMatrix>,
    labels: Vec<String>,
}

impl Povm {
    pub fn new(elements: Vec<HermitianMatrix>) -> Result<Self> {
        let labels = (0..elements.len()).map(|i| i.to_string()).collect();
        Self::with_labels(elements, labels)
    }

    pub fn with_labels(elements: Vec<HermitianMatrix>, labels: Vec<String>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Empty("POVM with no elements"));
        }
        if labels.len() != elements.len() {
            return Err(Error::ShapeMismatch(format!("{} labels for {} elements", labels.len(), elements.len())));
        }
        let dim = elements[0].dim();
        let mut sum = HermitianMatrix::zeros(dim);
        for (index, e) in elements.iter().enumerate() {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: e.dim() });
            }
            let min_eigenvalue = e.min_eigenvalue()?;
            if min_eigenvalue < -PSD_TOLERANCE {
                return Err(Error::ElementNotPositive { index, min_eigenvalue });
            }
            sum = &sum + e;
        }
        let deviation = sum.max_abs_diff(&HermitianMatrix::identity(dim));
        if deviation > COMPLETENESS_TOLERANCE {
            return Err(Error::Incomplete { deviation });
        }
        Ok(Self { dim, elements, labels })
    }

    /// The single-outcome measurement `{1}`.
    pub fn trivial(dim: usize) -> Self {
        Self { dim, elements: vec![HermitianMatrix::identity(dim)], labels: vec!["0".into()] }
    }

    /// Rank-one projective measurement in the computational basis.
    pub fn computational(dim: usize) -> Self {
        let elements = (0..dim).map(|k| DensityMatrix::basis(dim, k).matrix().clone()).collect();
        Self::new(elements).expect("computational basis is a valid POVM")
    }

    /// Rank-one projective measurement onto the eigenbasis of `h`.
    pub fn eigenbasis(h: &HermitianMatrix) -> Result<Self> {
        let e = h.eig()?;
        Self::new((0..h.dim()).map(|k| HermitianMatrix::projector(&e.vector(k))).collect())
    }

    /// Binary measurement `(P, 1 − P)` for a projector-like effect `p`.
    pub fn binary(p: &HermitianMatrix) -> Result<Self> {
        let q = &HermitianMatrix::identity(p.dim()) - p;
        Self::new(vec![p.clone(), q])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HermitianMatrix] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &HermitianMatrix {
        &self.elements[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Volumes `V_i = tr(M_i)`.
    pub fn volumes(&self) -> Vec<f64> {
        self.elements.iter().map(|e| e.trace()).collect()
    }

    /// Appends zero elements up to `outcomes` total.
    pub fn padded(&self, outcomes: usize) -> Self {
        let mut out = self.clone();
        while out.elements.len() < outcomes {
            out.labels.push(format!("pad{}", out.elements.len()));
            out.elements.push(HermitianMatrix::zeros(self.dim));
        }
        out
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: dim });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn incompleteness_is_named() {
        let e = HermitianMatrix::from_real_diagonal(&[1.0, 0.5]);
        let err = Povm::new(vec![e]).unwrap_err();
        assert!(err.to_string().contains("completeness"));
    }

    #[test]
    fn negative_element_rejected() {
        let a = HermitianMatrix::from_real_diagonal(&[1.5, 1.0]);
        let b = HermitianMatrix::from_real_diagonal(&[-0.5, 0.0]);
        assert!(matches!(Povm::new(vec![a, b]), Err(Error::ElementNotPositive { index: 1, .. })));
    }

    #[test]
    fn padding_keeps_validity() {
        let m = Povm::computational(3).padded(5);
        assert_eq!(m.len(), 5);
        assert!(Povm::new(m.elements().to_vec()).is_ok());
    }
}
