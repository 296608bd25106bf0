//! Uncertain variables over a finite sample space.
//!
//! An [`Ensemble`] holds one column of [`Value`]s per named variable, one
//! entry per sample `ω`. Every range (marginal, conditional, joint) is
//! derived from the columns on demand; nothing is cached.

use std::collections::BTreeMap;

use crate::value::{Value, ValueSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UvError {
    #[error("ensemble needs at least one sample")]
    EmptyRows,
    #[error("row {row} has variables {found:?}, expected {expected:?}")]
    InconsistentNames { row: usize, expected: Vec<String>, found: Vec<String> },
    #[error("row {row} has {found} values, expected {expected}")]
    RowLength { row: usize, expected: usize, found: usize },
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("ensemble needs at least one variable")]
    NoVariables,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("conditioning event {0} has no sample")]
    EmptyCondition(String),
    #[error("need at least {need} variable names, got {got}")]
    TooFewNames { need: usize, got: usize },
}

/// Labeled family of conditional ranges `⟦X|Y⟧`, one member per realizable `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFamily {
    pub members: Vec<(Value, ValueSet)>,
}

impl SetFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn union(&self) -> ValueSet {
        self.members.iter().flat_map(|(_, s)| s.iter().cloned()).collect()
    }

    pub fn get(&self, label: &Value) -> Option<&ValueSet> {
        self.members.iter().find(|(l, _)| l == label).map(|(_, s)| s)
    }

    /// Largest member cardinality.
    pub fn max_len(&self) -> usize {
        self.members.iter().map(|(_, s)| s.len()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ensemble {
    names: Vec<String>,
    columns: Vec<Vec<Value>>,
}

impl Ensemble {
    /// Builds an ensemble from one `name → value` map per sample.
    pub fn build(rows: &[BTreeMap<String, Value>]) -> Result<Self, UvError> {
        let first = rows.first().ok_or(UvError::EmptyRows)?;
        let names: Vec<String> = first.keys().cloned().collect();
        if names.is_empty() {
            return Err(UvError::NoVariables);
        }
        let mut columns = vec![Vec::with_capacity(rows.len()); names.len()];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != names.len() || !names.iter().all(|n| row.contains_key(n)) {
                return Err(UvError::InconsistentNames {
                    row: i,
                    expected: names.clone(),
                    found: row.keys().cloned().collect(),
                });
            }
            for (col, name) in columns.iter_mut().zip(&names) {
                col.push(row[name].clone());
            }
        }
        Ok(Ensemble { names, columns })
    }

    /// Builds an ensemble from a header and row-major samples.
    pub fn from_samples(names: Vec<String>, samples: Vec<Vec<Value>>) -> Result<Self, UvError> {
        if names.is_empty() {
            return Err(UvError::NoVariables);
        }
        if samples.is_empty() {
            return Err(UvError::EmptyRows);
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(UvError::DuplicateVariable(n.clone()));
            }
        }
        let mut columns = vec![Vec::with_capacity(samples.len()); names.len()];
        for (i, row) in samples.into_iter().enumerate() {
            if row.len() != names.len() {
                return Err(UvError::RowLength { row: i, expected: names.len(), found: row.len() });
            }
            for (col, v) in columns.iter_mut().zip(row) {
                col.push(v);
            }
        }
        Ok(Ensemble { names, columns })
    }

    pub fn variables(&self) -> &[String] {
        &self.names
    }

    pub fn num_samples(&self) -> usize {
        self.columns[0].len()
    }

    /// Row-major view of sample `i`.
    pub fn sample(&self, i: usize) -> Vec<Value> {
        self.columns.iter().map(|c| c[i].clone()).collect()
    }

    pub fn column(&self, name: &str) -> Result<&[Value], UvError> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
            .ok_or_else(|| UvError::UnknownVariable(name.to_string()))
    }

    /// Adds a derived variable whose value at each sample is the tuple of `parts`.
    pub fn with_tuple_variable(&self, name: &str, parts: &[&str]) -> Result<Self, UvError> {
        if self.names.iter().any(|n| n == name) {
            return Err(UvError::DuplicateVariable(name.to_string()));
        }
        let merged = self.tuple_column(parts)?;
        let mut out = self.clone();
        out.names.push(name.to_string());
        out.columns.push(merged);
        Ok(out)
    }

    fn tuple_column(&self, names: &[&str]) -> Result<Vec<Value>, UvError> {
        let cols = names.iter().map(|n| self.column(n)).collect::<Result<Vec<_>, _>>()?;
        Ok((0..self.num_samples())
            .map(|i| Value::Tuple(cols.iter().map(|c| c[i].clone()).collect()))
            .collect())
    }

    /// Sample indices matching every `(name, value)` condition.
    fn matching(&self, cond: &[(&str, Value)]) -> Result<Vec<usize>, UvError> {
        let cols = cond
            .iter()
            .map(|(n, v)| self.column(n).map(|c| (c, v)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((0..self.num_samples()).filter(|&i| cols.iter().all(|(c, v)| &c[i] == *v)).collect())
    }

    /// `⟦X⟧`: the distinct values taken by `x`.
    pub fn marginal_range(&self, x: &str) -> Result<ValueSet, UvError> {
        Ok(self.column(x)?.iter().cloned().collect())
    }

    /// `⟦X | cond⟧`. Conditioning on an event with no sample is an error.
    pub fn conditional_range(&self, x: &str, cond: &[(&str, Value)]) -> Result<ValueSet, UvError> {
        let col = self.column(x)?;
        let idx = self.matching(cond)?;
        if idx.is_empty() {
            return Err(UvError::EmptyCondition(describe(cond)));
        }
        Ok(idx.into_iter().map(|i| col[i].clone()).collect())
    }

    /// `⟦X₁,…,X_m⟧` as a set of `m`-tuples.
    pub fn joint_range(&self, names: &[&str]) -> Result<ValueSet, UvError> {
        if names.is_empty() {
            return Err(UvError::TooFewNames { need: 1, got: 0 });
        }
        Ok(self.tuple_column(names)?.into_iter().collect())
    }

    /// `⟦X|Y⟧` with `Y` the tuple of `given`. Labels are plain values for a
    /// single conditioning variable and tuples otherwise.
    pub fn conditional_family(&self, x: &str, given: &[&str]) -> Result<SetFamily, UvError> {
        if given.is_empty() {
            return Err(UvError::TooFewNames { need: 1, got: 0 });
        }
        let xs = self.column(x)?;
        let labels: Vec<Value> = if given.len() == 1 {
            self.column(given[0])?.to_vec()
        } else {
            self.tuple_column(given)?
        };
        let mut groups: BTreeMap<Value, ValueSet> = BTreeMap::new();
        for (label, v) in labels.into_iter().zip(xs) {
            groups.entry(label).or_default().insert(v.clone());
        }
        Ok(SetFamily { members: groups.into_iter().collect() })
    }

    /// Whether the named variables are unrelated, optionally conditional on `given`.
    pub fn is_unrelated(&self, names: &[&str], given: Option<&str>) -> Result<bool, UvError> {
        if names.len() < 2 {
            return Err(UvError::TooFewNames { need: 2, got: names.len() });
        }
        let cols = names.iter().map(|n| self.column(n)).collect::<Result<Vec<_>, _>>()?;
        let product_holds = |idx: &[usize]| {
            let joint: ValueSet = idx
                .iter()
                .map(|&i| Value::Tuple(cols.iter().map(|c| c[i].clone()).collect()))
                .collect();
            let product: usize = cols
                .iter()
                .map(|c| idx.iter().map(|&i| &c[i]).collect::<std::collections::BTreeSet<_>>().len())
                .product();
            joint.len() == product
        };
        match given {
            None => Ok(product_holds(&(0..self.num_samples()).collect::<Vec<_>>())),
            Some(g) => {
                let gc = self.column(g)?;
                let mut groups: BTreeMap<&Value, Vec<usize>> = BTreeMap::new();
                for (i, v) in gc.iter().enumerate() {
                    groups.entry(v).or_default().push(i);
                }
                Ok(groups.values().all(|idx| product_holds(idx)))
            }
        }
    }

    /// `X ↔ Y ↔ Z`: `⟦X|y,z⟧ = ⟦X|y⟧` for every `(y,z) ∈ ⟦Y,Z⟧`.
    pub fn is_markov_chain(&self, x: &str, y: &str, z: &str) -> Result<bool, UvError> {
        self.column(x)?;
        for yz in self.joint_range(&[y, z])?.iter() {
            let parts = yz.as_tuple().expect("joint range holds tuples");
            let (yv, zv) = (parts[0].clone(), parts[1].clone());
            let with_z = self.conditional_range(x, &[(y, yv.clone()), (z, zv)])?;
            let without = self.conditional_range(x, &[(y, yv)])?;
            if with_z != without {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn describe(cond: &[(&str, Value)]) -> String {
    let parts: Vec<String> = cond.iter().map(|(n, v)| format!("{n}={v}")).collect();
    parts.join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::int_set;

    fn rows(names: &[&str], samples: &[&[i64]]) -> Ensemble {
        Ensemble::from_samples(
            names.iter().map(|s| s.to_string()).collect(),
            samples.iter().map(|r| r.iter().map(|&v| Value::Int(v)).collect()).collect(),
        )
        .unwrap()
    }

    /// X, Z ∈ {0,1} unrelated; Y = X if Z = 0 else 2.
    fn channel_example() -> Ensemble {
        rows(&["X", "Z", "Y"], &[&[0, 0, 0], &[0, 1, 2], &[1, 0, 1], &[1, 1, 2]])
    }

    #[test]
    fn build_from_maps() {
        let mk = |pairs: &[(&str, i64)]| -> BTreeMap<String, Value> {
            pairs.iter().map(|(n, v)| (n.to_string(), Value::Int(*v))).collect()
        };
        let e = Ensemble::build(&[mk(&[("X", 0), ("Y", 0)]), mk(&[("X", 0), ("Y", 1)]), mk(&[("X", 1), ("Y", 1)])])
            .unwrap();
        assert_eq!(e.num_samples(), 3);
        let single = Ensemble::build(&[mk(&[("X", 5)])]).unwrap();
        assert_eq!((single.num_samples(), single.variables().len()), (1, 1));
        assert_eq!(single.marginal_range("X").unwrap(), int_set([5]));
        assert!(matches!(
            Ensemble::build(&[mk(&[("X", 0)]), mk(&[("Y", 0)])]),
            Err(UvError::InconsistentNames { row: 1, .. })
        ));
        assert_eq!(Ensemble::build(&[]), Err(UvError::EmptyRows));
    }

    #[test]
    fn marginal_collapses_duplicates() {
        let e = rows(&["X"], &[&[2], &[2], &[2]]);
        assert_eq!(e.marginal_range("X").unwrap(), int_set([2]));
        assert!(matches!(e.marginal_range("Q"), Err(UvError::UnknownVariable(_))));
    }

    #[test]
    fn conditional_ranges_of_the_erasure_like_ensemble() {
        let e = channel_example();
        assert_eq!(e.conditional_range("Y", &[("X", 0.into())]).unwrap(), int_set([0, 2]));
        assert_eq!(e.conditional_range("Y", &[("X", 1.into())]).unwrap(), int_set([1, 2]));
        assert!(matches!(e.conditional_range("Y", &[("X", 7.into())]), Err(UvError::EmptyCondition(_))));
        let fam = e.conditional_family("Y", &["X"]).unwrap();
        assert_eq!(fam.members, vec![(Value::Int(0), int_set([0, 2])), (Value::Int(1), int_set([1, 2]))]);
        assert_eq!(fam.union(), e.marginal_range("Y").unwrap());
    }

    #[test]
    fn copies_and_constants() {
        let e = rows(&["X", "Y", "C"], &[&[0, 0, 9], &[1, 1, 9], &[2, 2, 9]]);
        assert_eq!(e.conditional_range("X", &[("Y", 1.into())]).unwrap(), int_set([1]));
        let fam = e.conditional_family("X", &["C"]).unwrap();
        assert_eq!(fam.members.len(), 1);
        assert_eq!(fam.members[0].1, e.marginal_range("X").unwrap());
        let fam = e.conditional_family("X", &["Y"]).unwrap();
        assert!(fam.members.iter().all(|(_, s)| s.len() == 1));
    }

    #[test]
    fn joint_ranges() {
        let e = rows(&["X", "Y"], &[&[0, 0], &[0, 1], &[1, 1]]);
        let j = e.joint_range(&["X", "Y"]).unwrap();
        let expect: ValueSet = [(0, 0), (0, 1), (1, 1)]
            .iter()
            .map(|&(a, b)| Value::pair(a.into(), b.into()))
            .collect();
        assert_eq!(j, expect);
        let single = e.joint_range(&["X"]).unwrap();
        assert_eq!(single, [0, 1].iter().map(|&v| Value::tuple([Value::Int(v)])).collect());
        let full = rows(&["A", "B"], &[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        assert_eq!(full.joint_range(&["A", "B"]).unwrap().len(), 4);
    }

    #[test]
    fn unrelatedness() {
        let full = rows(&["A", "B"], &[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        assert!(full.is_unrelated(&["A", "B"], None).unwrap());
        let tri = rows(&["X", "Y"], &[&[0, 0], &[0, 1], &[1, 1]]);
        assert!(!tri.is_unrelated(&["X", "Y"], None).unwrap());
        let copies = rows(&["X", "Y1", "Y2"], &[&[0, 0, 0], &[1, 1, 1]]);
        assert!(!copies.is_unrelated(&["Y1", "Y2"], None).unwrap());
        assert!(copies.is_unrelated(&["Y1", "Y2"], Some("X")).unwrap());
        assert!(matches!(tri.is_unrelated(&["X"], None), Err(UvError::TooFewNames { .. })));
    }

    #[test]
    fn markov_chains() {
        // Z = f(Y)
        let e = rows(&["X", "Y", "Z"], &[&[0, 0, 1], &[1, 0, 1], &[1, 1, 0], &[2, 2, 0]]);
        assert!(e.is_markov_chain("X", "Y", "Z").unwrap());
        let same = rows(&["X", "Y", "Z"], &[&[0, 0, 0], &[1, 1, 1]]);
        assert!(same.is_markov_chain("X", "Y", "Z").unwrap());
        // Y = X AND Z with X, Z unrelated bits
        let and = rows(&["X", "Y", "Z"], &[&[0, 0, 0], &[0, 0, 1], &[1, 0, 0], &[1, 1, 1]]);
        assert!(!and.is_markov_chain("X", "Y", "Z").unwrap());
        assert_eq!(
            and.conditional_range("X", &[("Y", 0.into()), ("Z", 1.into())]).unwrap(),
            int_set([0])
        );
        assert_eq!(and.conditional_range("X", &[("Y", 0.into())]).unwrap(), int_set([0, 1]));
    }

    #[test]
    fn tuple_variables() {
        let e = channel_example().with_tuple_variable("XZ", &["X", "Z"]).unwrap();
        assert_eq!(e.marginal_range("XZ").unwrap().len(), 4);
        assert!(matches!(e.with_tuple_variable("X", &["Z"]), Err(UvError::DuplicateVariable(_))));
    }
}
