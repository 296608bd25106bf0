//! Hartley and Rényi-0 entropies, 0-information and Klir's transmission.
//!
//! All sizes are exact (cardinalities or rational measures); conversion to
//! [`Bits`] happens last, so equality checks can be made on the exact sizes.

use std::fmt;

use num::{BigInt, BigRational, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::ensemble::{Ensemble, UvError};
use crate::interval::IntervalUnion;
use crate::value::{Value, ValueSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MeasureError {
    #[error("range is empty")]
    EmptySet,
    #[error("family has no members")]
    EmptyFamily,
    #[error("family member `{0}` is empty")]
    EmptyMember(Value),
    #[error("family label `{0}` appears twice")]
    DuplicateLabel(Value),
    #[error("family does not cover the marginal range")]
    CoverViolation,
    #[error("taxicab input `{0}` is not a pair")]
    NotAPair(Value),
    #[error(transparent)]
    Uv(#[from] UvError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// An information quantity in bits. May be `±∞`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Bits(pub f64);

impl Bits {
    pub const ZERO: Bits = Bits(0.0);

    pub fn from_count(n: usize) -> Bits {
        if n == 0 {
            Bits(f64::NEG_INFINITY)
        } else {
            Bits((n as f64).log2())
        }
    }

    /// `log2` of a nonnegative exact quantity; `−∞` at zero.
    pub fn from_rational(r: &BigRational) -> Bits {
        if r.is_zero() {
            return Bits(f64::NEG_INFINITY);
        }
        assert!(r.is_positive(), "log of a negative quantity");
        Bits(log2_bigint(r.numer()) - log2_bigint(r.denom()))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bits", self.0)
    }
}

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else if self.0 > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

fn log2_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("finite").log2();
    }
    let shift = bits - 64;
    (n >> shift).to_f64().expect("finite").log2() + shift as f64
}

/// A set whose size (cardinality or measure) is exact.
pub trait SizedSet {
    fn size(&self) -> BigRational;
}

impl SizedSet for ValueSet {
    fn size(&self) -> BigRational {
        BigRational::from_integer(self.len().into())
    }
}

impl SizedSet for IntervalUnion {
    fn size(&self) -> BigRational {
        self.measure()
    }
}

/// `H₀[X] = log|⟦X⟧|`.
pub fn hartley(set: &ValueSet) -> Result<Bits, MeasureError> {
    if set.is_empty() {
        return Err(MeasureError::EmptySet);
    }
    Ok(Bits::from_count(set.len()))
}

/// `h₀[X] = log μ⟦X⟧`; `−∞` for a null set.
pub fn renyi0(set: &IntervalUnion) -> Bits {
    Bits::from_rational(&set.measure())
}

/// Largest member size of a conditional-range family.
pub fn max_member_size<S: SizedSet>(family: &[(Value, S)]) -> Result<BigRational, MeasureError> {
    family
        .iter()
        .map(|(_, s)| s.size())
        .max()
        .ok_or(MeasureError::EmptyFamily)
}

/// Worst-case conditional entropy: the largest log-size over the family.
pub fn conditional_entropy0<S: SizedSet>(family: &[(Value, S)]) -> Result<Bits, MeasureError> {
    Ok(Bits::from_rational(&max_member_size(family)?))
}

/// Sets that can be unioned and compared, for cover checks.
pub trait CoverSet: SizedSet + Clone + PartialEq {
    fn union_with(&self, other: &Self) -> Self;
}

impl CoverSet for ValueSet {
    fn union_with(&self, other: &Self) -> Self {
        self.union(other)
    }
}

impl CoverSet for IntervalUnion {
    fn union_with(&self, other: &Self) -> Self {
        self.union(other)
    }
}

/// Exact prior-to-posterior size ratio `|⟦X⟧| / max_y |⟦X|y⟧|`.
///
/// Returns `None` when both sizes are zero (a null marginal carries no
/// uncertainty to remove); the bit value is then reported as 0.
pub fn zero_info_ratio<S: CoverSet>(marginal: &S, family: &[(Value, S)]) -> Result<Option<BigRational>, MeasureError> {
    let (first, rest) = family.split_first().ok_or(MeasureError::EmptyFamily)?;
    let union = rest.iter().fold(first.1.clone(), |acc, (_, s)| acc.union_with(s));
    if &union != marginal {
        return Err(MeasureError::CoverViolation);
    }
    let prior = marginal.size();
    let posterior = max_member_size(family)?;
    if posterior.is_zero() {
        return Ok(if prior.is_zero() { None } else { Some(BigRational::zero()) });
    }
    Ok(Some(prior / posterior))
}

/// `I₀[X;Y] = H₀[X] − H₀[X|Y]` (or the Rényi-0 analogue for interval ranges).
pub fn zero_info<S: CoverSet>(marginal: &S, family: &[(Value, S)]) -> Result<Bits, MeasureError> {
    Ok(match zero_info_ratio(marginal, family)? {
        None => Bits::ZERO,
        Some(r) if r.is_zero() => Bits(f64::INFINITY),
        Some(r) => Bits::from_rational(&r),
    })
}

/// `I₀[X;Y]` computed from an ensemble.
pub fn zero_info_of(e: &Ensemble, x: &str, y: &str) -> Result<Bits, MeasureError> {
    let fam = e.conditional_family(x, &[y])?;
    zero_info(&e.marginal_range(x)?, &fam.members)
}

/// Klir's transmission `T[X;Y] = H₀[X] + H₀[Y] − H₀[X,Y]`.
pub fn klir_transmission(e: &Ensemble, x: &str, y: &str) -> Result<Bits, MeasureError> {
    let nx = e.marginal_range(x)?.len();
    let ny = e.marginal_range(y)?.len();
    let nxy = e.joint_range(&[x, y])?.len();
    let r = BigRational::new(BigInt::from(nx * ny), BigInt::from(nxy));
    Ok(Bits::from_rational(&r))
}
