//! Overlap and taxicab partitions, and maximin information `I*`.
//!
//! The overlap partition of a family `⟦X|Y⟧` groups points of `⟦X⟧` joined
//! by chains of pairwise-intersecting conditional ranges. The taxicab
//! partition of `⟦X,Y⟧` groups joint points joined by moves that keep one
//! coordinate fixed. Both have the same number of blocks, and `I*` is the
//! log of that number.

use std::collections::{BTreeMap, HashMap};

use petgraph::unionfind::UnionFind;

use crate::ensemble::Ensemble;
use crate::interval::IntervalUnion;
use crate::measures::{Bits, MeasureError};
use crate::value::{Value, ValueSet};

/// A range set on which overlap connectivity can be computed.
pub trait OverlapSet: Clone + Ord {
    fn is_empty_set(&self) -> bool;
    fn meets(&self, other: &Self) -> bool;
    fn merge(&self, other: &Self) -> Self;

    /// Unions member indices whose sets intersect.
    fn link_overlaps(members: &[(Value, Self)], uf: &mut UnionFind<usize>) {
        for i in 0..members.len() {
            for j in (i + 1)..members.len() {
                if members[i].1.meets(&members[j].1) {
                    uf.union(i, j);
                }
            }
        }
    }
}

impl OverlapSet for ValueSet {
    fn is_empty_set(&self) -> bool {
        self.is_empty()
    }

    fn meets(&self, other: &Self) -> bool {
        self.intersects(other)
    }

    fn merge(&self, other: &Self) -> Self {
        self.union(other)
    }

    fn link_overlaps(members: &[(Value, Self)], uf: &mut UnionFind<usize>) {
        let mut owner: HashMap<&Value, usize> = HashMap::new();
        for (i, (_, set)) in members.iter().enumerate() {
            for v in set.iter() {
                match owner.get(v) {
                    Some(&j) => {
                        uf.union(i, j);
                    }
                    None => {
                        owner.insert(v, i);
                    }
                }
            }
        }
    }
}

impl OverlapSet for IntervalUnion {
    fn is_empty_set(&self) -> bool {
        self.is_empty()
    }

    fn meets(&self, other: &Self) -> bool {
        self.intersects(other)
    }

    fn merge(&self, other: &Self) -> Self {
        self.union(other)
    }
}

/// Either kind of range, for file formats and reports.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum AbstractSet {
    Discrete(ValueSet),
    Interval(IntervalUnion),
}

impl AbstractSet {
    /// Nonempty-intersection test. Sets of different kinds never meet.
    pub fn intersects(&self, other: &AbstractSet) -> bool {
        match (self, other) {
            (AbstractSet::Discrete(a), AbstractSet::Discrete(b)) => a.intersects(b),
            (AbstractSet::Interval(a), AbstractSet::Interval(b)) => a.intersects(b),
            _ => false,
        }
    }
}

/// A partition of a ground range with the block each family label landed in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition<S> {
    pub blocks: Vec<S>,
    pub provenance: BTreeMap<Value, usize>,
}

impl<S> Partition<S> {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn bits(&self) -> Bits {
        Bits::from_count(self.blocks.len())
    }

    /// Block index holding `label`.
    pub fn block_of(&self, label: &Value) -> Option<usize> {
        self.provenance.get(label).copied()
    }
}

/// The unique partition of `⋃F` into maximal overlap-connected blocks.
///
/// Blocks are unions of family members and are returned in ascending set
/// order, so the output does not depend on the order of `family`.
pub fn overlap_partition<S: OverlapSet>(family: &[(Value, S)]) -> Result<Partition<S>, MeasureError> {
    if family.is_empty() {
        return Err(MeasureError::EmptyFamily);
    }
    let mut seen = std::collections::BTreeSet::new();
    for (label, set) in family {
        if set.is_empty_set() {
            return Err(MeasureError::EmptyMember(label.clone()));
        }
        if !seen.insert(label) {
            return Err(MeasureError::DuplicateLabel(label.clone()));
        }
    }
    let mut uf = UnionFind::new(family.len());
    S::link_overlaps(family, &mut uf);

    let mut merged: BTreeMap<usize, (S, Vec<&Value>)> = BTreeMap::new();
    for (i, (label, set)) in family.iter().enumerate() {
        let root = uf.find_mut(i);
        merged
            .entry(root)
            .and_modify(|(acc, labels)| {
                *acc = acc.merge(set);
                labels.push(label);
            })
            .or_insert_with(|| (set.clone(), vec![label]));
    }
    let mut groups: Vec<(S, Vec<&Value>)> = merged.into_values().collect();
    groups.sort_by(|a, b| a.0.cmp(&b.0));

    let mut provenance = BTreeMap::new();
    let mut blocks = Vec::with_capacity(groups.len());
    for (idx, (block, labels)) in groups.into_iter().enumerate() {
        for l in labels {
            provenance.insert(l.clone(), idx);
        }
        blocks.push(block);
    }
    Ok(Partition { blocks, provenance })
}

fn as_pair(v: &Value) -> Result<(&Value, &Value), MeasureError> {
    match v.as_tuple() {
        Some([a, b]) => Ok((a, b)),
        _ => Err(MeasureError::NotAPair(v.clone())),
    }
}

/// The unique partition of a joint range into maximal taxicab-connected blocks.
///
/// Provenance maps each joint point to its block.
pub fn taxicab_partition(joint: &ValueSet) -> Result<Partition<ValueSet>, MeasureError> {
    if joint.is_empty() {
        return Err(MeasureError::EmptySet);
    }
    let points: Vec<&Value> = joint.iter().collect();
    let mut uf = UnionFind::new(points.len());
    let mut by_x: HashMap<&Value, usize> = HashMap::new();
    let mut by_y: HashMap<&Value, usize> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        let (x, y) = as_pair(p)?;
        if let Some(&j) = by_x.get(x) {
            uf.union(i, j);
        } else {
            by_x.insert(x, i);
        }
        if let Some(&j) = by_y.get(y) {
            uf.union(i, j);
        } else {
            by_y.insert(y, i);
        }
    }
    let mut groups: BTreeMap<usize, ValueSet> = BTreeMap::new();
    for (i, p) in points.iter().enumerate() {
        groups.entry(uf.find_mut(i)).or_default().insert((*p).clone());
    }
    let mut blocks: Vec<ValueSet> = groups.into_values().collect();
    blocks.sort();
    let provenance = blocks
        .iter()
        .enumerate()
        .flat_map(|(i, b)| b.iter().map(move |p| (p.clone(), i)))
        .collect();
    Ok(Partition { blocks, provenance })
}

/// Projects a set of tuples onto coordinate `coord`.
pub fn project(block: &ValueSet, coord: usize) -> ValueSet {
    block
        .iter()
        .filter_map(|p| p.as_tuple().and_then(|t| t.get(coord)).cloned())
        .collect()
}

/// Both partitions behind `I*[X;Y]`.
#[derive(Debug, Clone)]
pub struct MaximinReport {
    /// Overlap partition of `⟦X⟧` induced by `⟦X|Y⟧`; provenance keyed by `y`.
    pub overlap: Partition<ValueSet>,
    /// Taxicab partition of `⟦X,Y⟧`.
    pub taxicab: Partition<ValueSet>,
    pub bits: Bits,
}

/// `I*[X;Y]`, computed through both the overlap partition of `⟦X|Y⟧` and
/// the taxicab partition of `⟦X,Y⟧`. A count mismatch is reported as an
/// internal error.
pub fn maximin_info(e: &Ensemble, x: &str, y: &str) -> Result<MaximinReport, MeasureError> {
    let family = e.conditional_family(x, &[y])?;
    let overlap = overlap_partition(&family.members)?;
    let taxicab = taxicab_partition(&e.joint_range(&[x, y])?)?;
    if overlap.len() != taxicab.len() {
        return Err(MeasureError::Internal(format!(
            "overlap partition has {} blocks but taxicab partition has {}",
            overlap.len(),
            taxicab.len()
        )));
    }
    let bits = overlap.bits();
    Ok(MaximinReport { overlap, taxicab, bits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::int_set;

    fn pairs(ps: &[(i64, i64)]) -> ValueSet {
        ps.iter().map(|&(a, b)| Value::pair(a.into(), b.into())).collect()
    }

    #[test]
    fn overlapping_members_merge() {
        let fam = vec![(Value::Int(0), int_set([0, 2])), (Value::Int(1), int_set([1, 2]))];
        let p = overlap_partition(&fam).unwrap();
        assert_eq!(p.blocks, vec![int_set([0, 1, 2])]);
        assert_eq!(p.block_of(&Value::Int(1)), Some(0));
        assert_eq!(p.bits(), Bits(0.0));
    }

    #[test]
    fn disjoint_members_stay_apart() {
        let fam = vec![(Value::Int(0), [Value::sym("a")].into_iter().collect()), (Value::Int(1), [Value::sym("b")].into_iter().collect())];
        let p: Partition<ValueSet> = overlap_partition(&fam).unwrap();
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn interval_blocks() {
        let iv = |lo: (i64, i64), hi: (i64, i64)| IntervalUnion::from_ratios(&[(lo, hi)]).unwrap();
        let fam = vec![
            (Value::Int(0), iv((0, 1), (1, 1))),
            (Value::Int(1), iv((1, 2), (3, 2))),
            (Value::Int(2), iv((2, 1), (3, 1))),
        ];
        let p = overlap_partition(&fam).unwrap();
        assert_eq!(p.blocks.len(), 2);
        assert_eq!(p.blocks[0].to_string(), "[0,3/2]");
        assert_eq!(p.blocks[1].to_string(), "[2,3]");
    }

    #[test]
    fn rejects_bad_families() {
        let empty: Vec<(Value, ValueSet)> = vec![];
        assert_eq!(overlap_partition(&empty), Err(MeasureError::EmptyFamily));
        let hole = vec![(Value::Int(0), ValueSet::new())];
        assert_eq!(overlap_partition(&hole), Err(MeasureError::EmptyMember(Value::Int(0))));
        let dup = vec![(Value::Int(0), int_set([1])), (Value::Int(0), int_set([2]))];
        assert_eq!(overlap_partition(&dup), Err(MeasureError::DuplicateLabel(Value::Int(0))));
    }

    #[test]
    fn taxicab_components() {
        assert_eq!(taxicab_partition(&pairs(&[(0, 0), (1, 1)])).unwrap().len(), 2);
        assert_eq!(taxicab_partition(&pairs(&[(0, 0), (0, 1), (1, 1)])).unwrap().len(), 1);
        assert_eq!(taxicab_partition(&pairs(&[(0, 5), (1, 6), (2, 7), (3, 8)])).unwrap().len(), 4);
        assert_eq!(taxicab_partition(&ValueSet::new()), Err(MeasureError::EmptySet));
        assert!(matches!(taxicab_partition(&int_set([1])), Err(MeasureError::NotAPair(_))));
    }

    #[test]
    fn identity_ensemble_gives_hartley() {
        let e = Ensemble::from_samples(
            vec!["X".into(), "Y".into()],
            (0..4).map(|i| vec![Value::Int(i), Value::Int(i)]).collect(),
        )
        .unwrap();
        let r = maximin_info(&e, "X", "Y").unwrap();
        assert_eq!(r.bits, Bits(2.0));
        assert_eq!(r.taxicab.len(), 4);
    }

    #[test]
    fn projections_of_taxicab_blocks() {
        let joint = pairs(&[(0, 0), (0, 1), (2, 3)]);
        let t = taxicab_partition(&joint).unwrap();
        assert_eq!(project(&t.blocks[0], 0), int_set([0]));
        assert_eq!(project(&t.blocks[0], 1), int_set([0, 1]));
    }
}
