//! Overlap partition of a family of interval unions.

use nsinfo::interval::IntervalUnion;
use nsinfo::measures::{renyi0, zero_info};
use nsinfo::partition::overlap_partition;
use nsinfo::value::Value;

fn main() {
    let family = vec![
        (Value::Int(0), IntervalUnion::from_ratios(&[((0, 1), (1, 1))]).unwrap()),
        (Value::Int(1), IntervalUnion::from_ratios(&[((1, 2), (3, 2))]).unwrap()),
        (Value::Int(2), IntervalUnion::from_ratios(&[((2, 1), (3, 1))]).unwrap()),
        // touching endpoints count as overlap
        (Value::Int(3), IntervalUnion::from_ratios(&[((3, 1), (7, 2))]).unwrap()),
    ];
    let p = overlap_partition(&family).unwrap();
    for (i, b) in p.blocks.iter().enumerate() {
        println!("block {i}: {b} (length {})", b.measure());
    }
    let marginal = family.iter().fold(IntervalUnion::empty(), |acc, (_, s)| acc.union(s));
    println!("h0 of the union = {}", renyi0(&marginal));
    println!("I0 = {}", zero_info(&marginal, &family).unwrap());
    println!("I* = {}", p.bits());
}
