//! The hypercuboid packing behind the converse bound.
//!
//! Each unstable axis of `[−l, l]^n` is cut into `kᵢ` equal subintervals
//! and a centred interval of half that length is kept in each. Any coder
//! meeting the convergence target must separate all `∏kᵢ` hypercuboids, so
//! `log2 ∏kᵢ` lower-bounds the maximin information it carries.

use num::complex::Complex64;
use num::{BigInt, BigRational, One, ToPrimitive};
use serde::Serialize;

use super::exact::{decimal, to_f64};
use super::EstimationError;
use crate::interval::Interval;
use crate::measures::Bits;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessPacking {
    pub eps: f64,
    pub tau: usize,
    /// Cell counts along the axes with `|λ| > ρ`, in input order.
    pub k: Vec<u64>,
    pub count: u128,
    pub bound_bits: Bits,
    /// `log2` of `(1−ε)^{dτ} |∏λᵢ|^τ / (2^d ρ^{dτ})`.
    pub closed_form_bits: Bits,
    #[serde(skip)]
    pub l: BigRational,
}

impl WitnessPacking {
    /// The kept intervals along unstable axis `axis`: centred in each of
    /// the `kᵢ` subintervals of length `2l/kᵢ`, with length `l/kᵢ`.
    pub fn axis_intervals(&self, axis: usize) -> Vec<Interval> {
        let k = BigRational::from_integer(BigInt::from(self.k[axis]));
        let two = BigRational::from_integer(BigInt::from(2));
        let width = &self.l * &two / &k;
        let quarter = &width / BigRational::from_integer(BigInt::from(4));
        (0..self.k[axis])
            .map(|s| {
                let mid = -self.l.clone() + &width * (BigRational::from_integer(BigInt::from(s)) + BigRational::new(1.into(), 2.into()));
                Interval { lo: &mid - &quarter, hi: &mid + &quarter }
            })
            .collect()
    }
}

/// Upper end of the admissible `ε` interval, `1 − max ρ/|λᵢ|` over
/// `|λᵢ| > ρ` (or 1 if there are none).
pub fn eps_upper(eigenvalues: &[Complex64], rho: f64) -> f64 {
    eigenvalues.iter().map(|z| z.norm()).filter(|&m| m > rho).map(|m| 1.0 - rho / m).fold(1.0, f64::min)
}

fn modulus(z: &Complex64) -> BigRational {
    if z.im == 0.0 {
        decimal(z.re.abs())
    } else {
        decimal(z.norm())
    }
}

pub fn necessity_witness(
    eigenvalues: &[Complex64],
    rho: f64,
    eps: f64,
    tau: usize,
    l: f64,
) -> Result<WitnessPacking, EstimationError> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(EstimationError::InvalidRho(rho));
    }
    if tau == 0 {
        return Err(EstimationError::InvalidTau);
    }
    if !(l.is_finite() && l > 0.0) {
        return Err(EstimationError::InvalidRadius(l));
    }
    let rho_q = decimal(rho);
    let unstable: Vec<BigRational> = eigenvalues.iter().map(modulus).filter(|m| *m > rho_q).collect();
    let upper = eps_upper(eigenvalues, rho);
    let out_of_range = || EstimationError::EpsOutOfRange { eps, upper };
    if !(eps.is_finite() && eps > 0.0 && eps < 1.0) {
        return Err(out_of_range());
    }
    let shrink = BigRational::one() - decimal(eps);
    let mut k = Vec::with_capacity(unstable.len());
    let mut count: u128 = 1;
    let mut closed_form = 0.0;
    for m in &unstable {
        let base = &shrink * m / &rho_q;
        if base <= BigRational::one() {
            return Err(out_of_range());
        }
        let grown = num::pow::pow(base.clone(), tau);
        let ki = grown.floor().to_integer().to_u64().ok_or(EstimationError::Overflow)?;
        count = count.checked_mul(ki as u128).ok_or(EstimationError::Overflow)?;
        closed_form += tau as f64 * to_f64(&base).log2() - 1.0;
        k.push(ki);
    }
    let bound_bits = Bits((count as f64).log2());
    Ok(WitnessPacking { eps, tau, k, count, bound_bits, closed_form_bits: Bits(closed_form), l: decimal(l) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reals(xs: &[f64]) -> Vec<Complex64> {
        xs.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn packing_examples() {
        let w = necessity_witness(&reals(&[2.0]), 1.0, 0.25, 4, 1.0).unwrap();
        assert_eq!((w.k.clone(), w.count), (vec![5], 5));
        assert!((w.bound_bits.0 - 5f64.log2()).abs() < 1e-12);

        let w = necessity_witness(&reals(&[2.0]), 1.0, 0.05, 1, 1.0).unwrap();
        assert_eq!((w.k.clone(), w.count, w.bound_bits), (vec![1], 1, Bits(0.0)));

        let w = necessity_witness(&reals(&[2.0, 3.0]), 1.0, 0.1, 2, 1.0).unwrap();
        assert_eq!((w.k.clone(), w.count), (vec![3, 7], 21));
        assert!((w.bound_bits.0 - 21f64.log2()).abs() < 1e-12);
        assert!(w.bound_bits.0 >= w.closed_form_bits.0);
    }

    #[test]
    fn eps_range() {
        assert!(matches!(necessity_witness(&reals(&[2.0]), 1.0, 0.5, 1, 1.0), Err(EstimationError::EpsOutOfRange { .. })));
        assert!(matches!(necessity_witness(&reals(&[2.0]), 1.0, 0.0, 1, 1.0), Err(EstimationError::EpsOutOfRange { .. })));
        assert!((eps_upper(&reals(&[2.0, 4.0]), 1.0) - 0.5).abs() < 1e-15);
        let stable = necessity_witness(&reals(&[0.5]), 1.0, 0.3, 3, 1.0).unwrap();
        assert_eq!((stable.count, stable.bound_bits), (1, Bits(0.0)));
    }

    #[test]
    fn kept_intervals_are_separated() {
        let w = necessity_witness(&reals(&[2.0]), 1.0, 0.25, 4, 1.0).unwrap();
        let iv = w.axis_intervals(0);
        assert_eq!(iv.len(), 5);
        let gap = BigRational::new(1.into(), 5.into());
        for pair in iv.windows(2) {
            assert_eq!(&pair[1].lo - &pair[0].hi, gap);
        }
        assert!(iv[0].lo > BigRational::from_integer((-1).into()));
    }
}
