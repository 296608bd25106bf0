//! Finite unions of closed intervals with exact rational endpoints.

use std::fmt;

use num::{BigRational, Zero};

use crate::value::format_rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IntervalError {
    #[error("interval [{0}, {1}] has left endpoint above right endpoint")]
    Reversed(String, String),
}

/// A closed interval `[lo, hi]`, `lo ≤ hi`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Result<Self, IntervalError> {
        if lo > hi {
            return Err(IntervalError::Reversed(format_rational(&lo), format_rational(&hi)));
        }
        Ok(Interval { lo, hi })
    }

    pub fn len(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn meets(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

/// Normalized union: sorted, pairwise disjoint, with touching pieces merged.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntervalUnion {
    pieces: Vec<Interval>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_intervals(intervals: impl IntoIterator<Item = Interval>) -> Self {
        let mut raw: Vec<Interval> = intervals.into_iter().collect();
        raw.sort();
        let mut pieces: Vec<Interval> = Vec::with_capacity(raw.len());
        for iv in raw {
            match pieces.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => pieces.push(iv),
            }
        }
        IntervalUnion { pieces }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (BigRational, BigRational)>) -> Result<Self, IntervalError> {
        let ivs = pairs.into_iter().map(|(a, b)| Interval::new(a, b)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_intervals(ivs))
    }

    /// Convenience constructor from `(numer, denom)` endpoint pairs.
    pub fn from_ratios(pairs: &[((i64, i64), (i64, i64))]) -> Result<Self, IntervalError> {
        Self::from_pairs(pairs.iter().map(|&((a, b), (c, d))| {
            (BigRational::new(a.into(), b.into()), BigRational::new(c.into(), d.into()))
        }))
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Total Lebesgue measure.
    pub fn measure(&self) -> BigRational {
        self.pieces.iter().fold(BigRational::zero(), |acc, iv| acc + iv.len())
    }

    /// Closed-set intersection test; touching endpoints intersect.
    pub fn intersects(&self, other: &IntervalUnion) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.pieces.len() && j < other.pieces.len() {
            let (a, b) = (&self.pieces[i], &other.pieces[j]);
            if a.meets(b) {
                return true;
            }
            if a.hi < b.hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        false
    }

    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        Self::from_intervals(self.pieces.iter().chain(&other.pieces).cloned())
    }

    pub fn is_subset(&self, other: &IntervalUnion) -> bool {
        self.pieces
            .iter()
            .all(|iv| other.pieces.iter().any(|o| o.lo <= iv.lo && iv.hi <= o.hi))
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return f.write_str("∅");
        }
        for (i, iv) in self.pieces.iter().enumerate() {
            if i > 0 {
                f.write_str("∪")?;
            }
            write!(f, "[{},{}]", format_rational(&iv.lo), format_rational(&iv.hi))?;
        }
        Ok(())
    }
}
