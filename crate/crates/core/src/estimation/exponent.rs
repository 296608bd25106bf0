//! Unstable exponents and feasibility verdicts.

use std::fmt;

use num::complex::Complex64;
use serde::Serialize;

use super::plant::PlantModel;
use super::EstimationError;
use crate::measures::Bits;

/// Log-domain tolerance used to call two rates equal.
pub const RATE_TOL: f64 = 1e-12;

/// `H_ρ = Σ log2|λ/ρ|` over eigenvalues with `|λ| ≥ ρ`, with multiplicity.
/// At `ρ = 1` this is the plain unstable exponent `H`.
pub fn unstable_exponent(eigenvalues: &[Complex64], rho: f64) -> Result<Bits, EstimationError> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(EstimationError::InvalidRho(rho));
    }
    Ok(Bits(eigenvalues.iter().map(|z| z.norm()).filter(|&m| m >= rho).map(|m| (m / rho).log2()).sum()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// `H_ρ` is strictly below a certified capacity lower bound.
    #[serde(rename = "ACHIEVABLE")]
    Achievable,
    /// `H_ρ` exceeds the known capacity, so no coder-estimator exists.
    #[serde(rename = "NECESSARY-VIOLATED")]
    NecessaryViolated,
    /// `H_ρ` equals the best known bound; the strict condition is not met.
    #[serde(rename = "BOUNDARY")]
    Boundary,
    #[serde(rename = "UNKNOWN")]
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Achievable => "ACHIEVABLE",
            Verdict::NecessaryViolated => "NECESSARY-VIOLATED",
            Verdict::Boundary => "BOUNDARY",
            Verdict::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Feasibility {
    pub verdict: Verdict,
    pub h_rho: Bits,
}

/// Compares `H_ρ` of `plant` with a capacity lower bound and, optionally,
/// the exact zero-error capacity.
///
/// `ρ` equal to the spectral radius is rejected. Larger `ρ` is allowed and
/// gives `H_ρ = 0`.
pub fn feasibility_check(
    plant: &PlantModel,
    rho: f64,
    c0_lower: Bits,
    c0_known: Option<Bits>,
) -> Result<Feasibility, EstimationError> {
    let h = unstable_exponent(plant.eigenvalues(), rho)?;
    let radius = plant.spectral_radius();
    if (rho - radius).abs() <= RATE_TOL * radius.max(1.0) {
        return Err(EstimationError::RhoAtSpectralRadius(rho));
    }
    let verdict = if h.0 < c0_lower.0 - RATE_TOL {
        Verdict::Achievable
    } else if c0_known.is_some_and(|k| h.0 > k.0 + RATE_TOL) {
        Verdict::NecessaryViolated
    } else if (h.0 - c0_known.unwrap_or(c0_lower).0).abs() <= RATE_TOL {
        Verdict::Boundary
    } else {
        Verdict::Unknown
    };
    Ok(Feasibility { verdict, h_rho: h })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reals(xs: &[f64]) -> Vec<Complex64> {
        xs.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn exponent_examples() {
        assert_eq!(unstable_exponent(&reals(&[2.0, 0.5]), 1.0).unwrap(), Bits(1.0));
        assert_eq!(unstable_exponent(&reals(&[2.0]), 0.5).unwrap(), Bits(2.0));
        let pair = [Complex64::new(0.9, 1.2), Complex64::new(0.9, -1.2)];
        assert!((unstable_exponent(&pair, 1.0).unwrap().0 - 2.0 * 1.5f64.log2()).abs() < 1e-12);
        assert!(matches!(unstable_exponent(&pair, 0.0), Err(EstimationError::InvalidRho(_))));
        assert!(matches!(unstable_exponent(&pair, -1.0), Err(EstimationError::InvalidRho(_))));
    }

    #[test]
    fn verdicts() {
        let p = PlantModel::scalar(2.0, 1.0, 0.0).unwrap();
        let pentagon = Bits(5f64.log2() / 2.0);
        assert_eq!(feasibility_check(&p, 1.0, pentagon, None).unwrap().verdict, Verdict::Achievable);
        assert_eq!(feasibility_check(&p, 1.0, Bits(0.0), Some(Bits(0.0))).unwrap().verdict, Verdict::NecessaryViolated);
        assert_eq!(feasibility_check(&p, 1.0, Bits(1.0), None).unwrap().verdict, Verdict::Boundary);
        assert_eq!(feasibility_check(&p, 1.0, Bits(1.0), Some(Bits(1.0))).unwrap().verdict, Verdict::Boundary);
        assert_eq!(feasibility_check(&p, 1.0, Bits(0.5), None).unwrap().verdict, Verdict::Unknown);
        assert!(matches!(feasibility_check(&p, 2.0, Bits(1.0), None), Err(EstimationError::RhoAtSpectralRadius(_))));
        assert_eq!(feasibility_check(&p, 3.0, Bits(0.0), Some(Bits(0.0))).unwrap().verdict, Verdict::Boundary);
    }
}
