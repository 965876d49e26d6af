use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::qmat::ExtendedReal;

/// Default slack tolerance for a passing certificate.
pub const PASS_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Naive,
    Afw,
    Concavity,
    Conditional,
    SetDistance,
    Restricted,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Naive => "naive",
            BoundKind::Afw => "afw",
            BoundKind::Concavity => "concavity",
            BoundKind::Conditional => "conditional",
            BoundKind::SetDistance => "set_distance",
            BoundKind::Restricted => "restricted",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s.replace('-', "_").as_str() {
            "naive" => BoundKind::Naive,
            "afw" => BoundKind::Afw,
            "concavity" => BoundKind::Concavity,
            "conditional" => BoundKind::Conditional,
            "set_distance" => BoundKind::SetDistance,
            "restricted" => BoundKind::Restricted,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateStatus {
    Passed,
    Violated,
    /// An assumption of the bound (finite maximum variation) does not hold.
    FailedPrecondition,
}

fn float_or_tag<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_none()
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// Certificate for one continuity or concavity inequality: `lhs ≤ rhs`.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    #[serde(serialize_with = "float_or_tag")]
    pub quantity_lhs: f64,
    #[serde(serialize_with = "float_or_tag")]
    pub bound_rhs: f64,
    #[serde(serialize_with = "float_or_tag")]
    pub slack: f64,
    pub epsilon: f64,
    pub dim: usize,
    #[serde(serialize_with = "float_or_tag")]
    pub kappa: f64,
    pub bound_kind: BoundKind,
    /// Lower end of a sandwich `lower ≤ lhs ≤ rhs`, when the certificate has one.
    pub lower_bound: Option<f64>,
    pub status: CertificateStatus,
}

impl BoundReport {
    pub fn new(kind: BoundKind, lhs: f64, rhs: f64, epsilon: f64, dim: usize, kappa: f64) -> Result<Self> {
        let mut r = BoundReport {
            quantity_lhs: lhs,
            bound_rhs: rhs,
            slack: rhs - lhs,
            epsilon,
            dim,
            kappa,
            bound_kind: kind,
            lower_bound: None,
            status: CertificateStatus::Passed,
        };
        r.status = r.status_at(PASS_TOLERANCE);
        Ok(r)
    }

    /// `lower ≤ lhs ≤ rhs`; ε and κ are not meaningful here.
    pub fn sandwich(kind: BoundKind, lhs: f64, lower: f64, rhs: f64, dim: usize) -> Result<Self> {
        let mut r = Self::new(kind, lhs, rhs, 0.0, dim, f64::NAN)?;
        r.lower_bound = Some(lower);
        r.status = r.status_at(PASS_TOLERANCE);
        Ok(r)
    }

    /// Certificate for `|Z(ρ) − Z(σ)|` where either value may be infinite.
    ///
    /// Two infinite values compare equal (lhs 0); one infinite value means the
    /// finite-κ assumption failed.
    pub fn from_values(kind: BoundKind, z_rho: ExtendedReal, z_sigma: ExtendedReal, rhs: f64, epsilon: f64, dim: usize, kappa: f64) -> Result<Self> {
        match (z_rho, z_sigma) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => Self::new(kind, (a - b).abs(), rhs, epsilon, dim, kappa),
            (ExtendedReal::Infinite, ExtendedReal::Infinite) => Self::new(kind, 0.0, rhs, epsilon, dim, kappa),
            _ => {
                let mut r = Self::new(kind, f64::INFINITY, rhs, epsilon, dim, kappa)?;
                r.status = CertificateStatus::FailedPrecondition;
                Ok(r)
            }
        }
    }

    fn status_at(&self, tol: f64) -> CertificateStatus {
        if self.status == CertificateStatus::FailedPrecondition {
            return self.status;
        }
        let upper_ok = self.slack >= -tol;
        let lower_ok = self.lower_bound.is_none_or(|lo| self.quantity_lhs >= lo - tol);
        if upper_ok && lower_ok {
            CertificateStatus::Passed
        } else {
            CertificateStatus::Violated
        }
    }

    pub fn passed(&self) -> bool {
        self.status == CertificateStatus::Passed
    }

    /// Re-evaluates the status at a custom tolerance.
    pub fn passes(&self, tol: f64) -> bool {
        self.status_at(tol) == CertificateStatus::Passed
    }

    pub fn violated(&self, tol: f64) -> bool {
        self.status_at(tol) == CertificateStatus::Violated
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slack_and_status() {
        let r = BoundReport::new(BoundKind::Afw, 0.5, 0.4, 0.1, 2, 1.0).unwrap();
        assert!((r.slack + 0.1).abs() < 1e-15);
        assert_eq!(r.status, CertificateStatus::Violated);
        assert!(r.passes(0.2));
    }

    #[test]
    fn sandwich_checks_lower_end() {
        let r = BoundReport::sandwich(BoundKind::Concavity, -1e-6, 0.0, 1.0, 2).unwrap();
        assert_eq!(r.status, CertificateStatus::Violated);
    }

    #[test]
    fn infinite_values() {
        let inf = ExtendedReal::Infinite;
        let both = BoundReport::from_values(BoundKind::SetDistance, inf, inf, 0.3, 0.1, 2, 1.0).unwrap();
        assert!(both.passed());
        let mixed = BoundReport::from_values(BoundKind::SetDistance, inf, ExtendedReal::Finite(1.0), 0.3, 0.1, 2, 1.0).unwrap();
        assert_eq!(mixed.status, CertificateStatus::FailedPrecondition);
        let json = serde_json::to_value(&mixed).unwrap();
        assert_eq!(json["quantity_lhs"], "inf");
    }
}
