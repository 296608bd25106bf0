// Shared oracles for the maximin property suites. Included by both the
// acceptance gate (seeded sampling) and the proptest suites.

use std::collections::{BTreeMap, BTreeSet};

use nsinfo::channel::Channel;
use nsinfo::ensemble::Ensemble;
use nsinfo::measures::hartley;
use nsinfo::partition::{maximin_info, overlap_partition, project};
use nsinfo::value::{Value, ValueSet};
use rand::{Rng, SeedableRng};

pub type Row = (i64, i64, i64);

pub fn xyz(rows: &[Row]) -> Ensemble {
    let samples = rows.iter().map(|&(x, y, z)| vec![Value::Int(x), Value::Int(y), Value::Int(z)]).collect();
    Ensemble::from_samples(vec!["X".into(), "Y".into(), "Z".into()], samples).unwrap()
}

fn istar(e: &Ensemble, a: &str, b: &str) -> usize {
    maximin_info(e, a, b).unwrap().overlap.len()
}

fn distinct<T: Ord + Clone>(it: impl IntoIterator<Item = T>) -> BTreeSet<T> {
    it.into_iter().collect()
}

/// Symmetry, the Hartley bound, more data, projection correspondence and
/// unrelated ⇒ I* = 0 on one ensemble.
pub fn check_ensemble(rows: &[Row]) -> Result<(), String> {
    let e = xyz(rows);
    let xy = istar(&e, "X", "Y");
    if xy != istar(&e, "Y", "X") {
        return Err(format!("asymmetric I* on {rows:?}"));
    }
    let hx = distinct(rows.iter().map(|r| r.0)).len();
    let hy = distinct(rows.iter().map(|r| r.1)).len();
    if xy > hx.min(hy) {
        return Err(format!("I* above min Hartley on {rows:?}"));
    }
    let merged = e.with_tuple_variable("YZ", &["Y", "Z"]).unwrap();
    if istar(&merged, "X", "YZ") < xy {
        return Err(format!("more data lowered I* on {rows:?}"));
    }
    let m = maximin_info(&e, "X", "Y").unwrap();
    let xs: BTreeSet<ValueSet> = m.taxicab.blocks.iter().map(|b| project(b, 0)).collect();
    let ys: BTreeSet<ValueSet> = m.taxicab.blocks.iter().map(|b| project(b, 1)).collect();
    let over_x: BTreeSet<ValueSet> = m.overlap.blocks.iter().cloned().collect();
    let over_y: BTreeSet<ValueSet> = maximin_info(&e, "Y", "X").unwrap().overlap.blocks.into_iter().collect();
    if xs != over_x || ys != over_y {
        return Err(format!("taxicab projections differ from overlap blocks on {rows:?}"));
    }
    let joint = distinct(rows.iter().map(|r| (r.0, r.1))).len();
    if joint == hx * hy && xy != 1 {
        return Err(format!("unrelated pair with I* ≠ 0 on {rows:?}"));
    }
    if (hartley(&e.marginal_range("X").unwrap()).unwrap().0 - (hx as f64).log2()).abs() > 1e-12 {
        return Err("Hartley entropy disagrees with the distinct count".into());
    }
    Ok(())
}

/// A Markov chain `X ↔ Y ↔ Z` built as `⋃_y ⟦X|y⟧ × {y} × ⟦Z|y⟧`.
pub fn markov_rows(per_y: &[(Vec<i64>, Vec<i64>)]) -> Vec<Row> {
    let mut rows = Vec::new();
    for (y, (xs, zs)) in per_y.iter().enumerate() {
        for &x in xs {
            for &z in zs {
                rows.push((x, y as i64, z));
            }
        }
    }
    rows
}

pub fn check_data_processing(rows: &[Row]) -> Result<(), String> {
    let e = xyz(rows);
    if !e.is_markov_chain("X", "Y", "Z").unwrap() {
        return Err(format!("constructed chain not recognised on {rows:?}"));
    }
    let xz = istar(&e, "X", "Z");
    if xz > istar(&e, "X", "Y") || xz > istar(&e, "Y", "Z") {
        return Err(format!("data processing violated on {rows:?}"));
    }
    Ok(())
}

/// `⟦X|y₁,y₂⟧ = ⟦X|y₁⟧ ∩ ⟦X|y₂⟧` when `Y₁, Y₂` are unrelated given `X`:
/// here the samples are `⋃_x {x} × S₁(x) × S₂(x)`.
pub fn check_split(per_x: &[(Vec<i64>, Vec<i64>)]) -> Result<(), String> {
    let mut rows = Vec::new();
    for (x, (s1, s2)) in per_x.iter().enumerate() {
        for &a in s1 {
            for &b in s2 {
                rows.push((x as i64, a, b));
            }
        }
    }
    let e = xyz(&rows);
    if !e.is_unrelated(&["Y", "Z"], Some("X")).unwrap() {
        return Err(format!("not conditionally unrelated: {rows:?}"));
    }
    for &(_, a, b) in &rows {
        let lib = e.conditional_range("X", &[("Y", Value::Int(a)), ("Z", Value::Int(b))]).unwrap();
        let given_a = distinct(rows.iter().filter(|r| r.1 == a).map(|r| r.0));
        let given_b = distinct(rows.iter().filter(|r| r.2 == b).map(|r| r.0));
        let both: BTreeSet<i64> = given_a.intersection(&given_b).copied().collect();
        let lib: BTreeSet<i64> = lib.iter().map(|v| match v {
            Value::Int(i) => *i,
            other => panic!("unexpected {other}"),
        }).collect();
        if lib != both {
            return Err(format!("split equality fails at ({a},{b}) on {rows:?}"));
        }
    }
    Ok(())
}

/// Intersection formula for block conditional ranges against direct
/// membership `y(i) ∈ T(x(i))` for every word in the range.
pub fn check_inverse(table: &[Vec<i64>], n_out: usize, range_mask: u32, tau: usize) -> Result<(), String> {
    let rows: Vec<&[i64]> = table.iter().map(|r| r.as_slice()).collect();
    let c = match Channel::from_table(n_out, &rows) {
        Ok(c) => c,
        Err(_) => return Ok(()),
    };
    let nx = table.len();
    let words: Vec<Vec<i64>> = (0..nx.pow(tau as u32))
        .map(|mut w| {
            let mut v = vec![0; tau];
            for slot in v.iter_mut().rev() {
                *slot = (w % nx) as i64;
                w /= nx;
            }
            v
        })
        .collect();
    let range: Vec<&Vec<i64>> = words.iter().enumerate().filter(|(i, _)| range_mask >> i & 1 == 1).map(|(_, w)| w).collect();
    if range.is_empty() {
        return Ok(());
    }
    let as_value = |w: &[i64]| Value::Tuple(w.iter().map(|&i| Value::Int(i)).collect());
    let range_set: ValueSet = range.iter().map(|w| as_value(w)).collect();
    for yw in 0..n_out.pow(tau as u32) {
        let mut y = vec![0i64; tau];
        let mut k = yw;
        for slot in y.iter_mut().rev() {
            *slot = (k % n_out) as i64;
            k /= n_out;
        }
        let brute: ValueSet = range
            .iter()
            .filter(|w| w.iter().zip(&y).all(|(&x, &yy)| table[x as usize].contains(&yy)))
            .map(|w| as_value(w))
            .collect();
        let y_vals: Vec<Value> = y.iter().map(|&i| Value::Int(i)).collect();
        let lib = c.block_conditional_range(&range_set, &y_vals).unwrap();
        if lib != brute {
            return Err(format!("inverse formula differs for y={y:?} on {table:?}"));
        }
    }
    Ok(())
}

/// Set partitions of `0..n` as block labels, first-occurrence normalised.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, cur: &mut Vec<usize>, blocks: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=blocks {
            cur.push(b);
            go(i + 1, n, cur, blocks.max(b + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::new(), 0, &mut out);
    out
}

/// Every overlap-isolated partition of `⋃F` has at most as many blocks as
/// the overlap partition, and only the overlap partition attains it.
/// Members are bitmasks over a ground of at most 6 points.
pub fn check_family(members: &[u8]) -> Result<(), String> {
    let members: Vec<u8> = members.iter().copied().filter(|&m| m != 0).collect();
    if members.is_empty() {
        return Ok(());
    }
    let ground: Vec<usize> = (0..8).filter(|&p| members.iter().any(|m| m >> p & 1 == 1)).collect();
    let n = ground.len();
    // Overlap connectivity of points by transitive closure.
    let mut conn = vec![vec![false; n]; n];
    for m in &members {
        for (i, &p) in ground.iter().enumerate() {
            for (j, &q) in ground.iter().enumerate() {
                if m >> p & 1 == 1 && m >> q & 1 == 1 {
                    conn[i][j] = true;
                }
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if conn[i][k] && conn[k][j] {
                    conn[i][j] = true;
                }
            }
        }
    }
    let family: Vec<(Value, ValueSet)> = members
        .iter()
        .enumerate()
        .map(|(i, m)| (Value::Int(i as i64), (0..8).filter(|p| m >> p & 1 == 1).map(|p| Value::Int(p as i64)).collect()))
        .collect();
    let lib = overlap_partition(&family).unwrap();
    let lib_blocks: BTreeSet<ValueSet> = lib.blocks.iter().cloned().collect();
    let mut best = 0;
    let mut best_blocks = Vec::new();
    for labels in set_partitions(n) {
        let isolated = (0..n).all(|i| (0..n).all(|j| labels[i] == labels[j] || !conn[i][j]));
        if !isolated {
            continue;
        }
        let count = labels.iter().max().map_or(0, |m| m + 1);
        let blocks: BTreeSet<ValueSet> = (0..count)
            .map(|b| (0..n).filter(|&i| labels[i] == b).map(|i| Value::Int(ground[i] as i64)).collect())
            .collect();
        if count > best {
            best = count;
            best_blocks = vec![blocks];
        } else if count == best {
            best_blocks.push(blocks);
        }
    }
    if best != lib.len() {
        return Err(format!("largest isolated partition has {best} blocks, overlap partition {} ({members:?})", lib.len()));
    }
    if best_blocks.len() != 1 || best_blocks[0] != lib_blocks {
        return Err(format!("maximum isolated partition is not unique or differs ({members:?})"));
    }
    Ok(())
}

fn small_set(rng: &mut rand_chacha::ChaCha8Rng, max_len: usize, values: i64) -> Vec<i64> {
    let len = rng.random_range(1..=max_len);
    let mut v: Vec<i64> = (0..len).map(|_| rng.random_range(0..values)).collect();
    v.sort();
    v.dedup();
    v
}

/// Every property check on inputs drawn from `seed`.
pub fn check_all(seed: u64) -> Result<(), String> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=6);
    let rows: Vec<Row> = (0..n).map(|_| (rng.random_range(0..3), rng.random_range(0..3), rng.random_range(0..3))).collect();
    check_ensemble(&rows)?;
    let ys = rng.random_range(1..=3);
    let per_y: Vec<(Vec<i64>, Vec<i64>)> = (0..ys).map(|_| (small_set(&mut rng, 2, 3), small_set(&mut rng, 2, 3))).collect();
    check_data_processing(&markov_rows(&per_y))?;
    let xs = rng.random_range(1..=3);
    let per_x: Vec<(Vec<i64>, Vec<i64>)> = (0..xs).map(|_| (small_set(&mut rng, 2, 3), small_set(&mut rng, 2, 3))).collect();
    check_split(&per_x)?;
    let nx: usize = rng.random_range(1..=3);
    let n_out: usize = rng.random_range(1..=3);
    let table: Vec<Vec<i64>> = (0..nx).map(|_| small_set(&mut rng, n_out, n_out as i64)).collect();
    let tau = rng.random_range(1..=2);
    let mask = rng.random_range(0..(1u32 << nx.pow(tau as u32)));
    check_inverse(&table, n_out, mask, tau)
}

pub fn check_maximality(seed: u64) -> Result<(), String> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let count = rng.random_range(1..=6);
    let members: Vec<u8> = (0..count).map(|_| rng.random_range(1..64u8)).collect();
    check_family(&members)
}
