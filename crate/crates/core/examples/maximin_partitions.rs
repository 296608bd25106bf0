//! Overlap and taxicab partitions behind I*.
//!
//! The joint range {(0,0),(0,1),(1,1)} is not a product, so X and Y are
//! related, yet every pair of points is taxicab connected and I* = 0.

use nsinfo::ensemble::Ensemble;
use nsinfo::partition::{maximin_info, project};
use nsinfo::value::Value;

fn show(rows: &[[i64; 2]]) {
    let samples = rows.iter().map(|r| r.iter().map(|&v| Value::Int(v)).collect()).collect();
    let e = Ensemble::from_samples(vec!["X".into(), "Y".into()], samples).unwrap();
    let m = maximin_info(&e, "X", "Y").unwrap();
    println!("joint range {}", e.joint_range(&["X", "Y"]).unwrap());
    println!("  unrelated: {}", e.is_unrelated(&["X", "Y"], None).unwrap());
    for (i, block) in m.taxicab.blocks.iter().enumerate() {
        println!("  taxicab block {i}: {block} -> x {} / y {}", project(block, 0), project(block, 1));
    }
    for (label, block) in &m.overlap.provenance {
        println!("  y = {label} identifies overlap block {}", m.overlap.blocks[*block]);
    }
    println!("  I* = {}", m.bits);
}

fn main() {
    show(&[[0, 0], [0, 1], [1, 1]]);
    show(&[[0, 0], [1, 1], [2, 2], [3, 3]]);
    show(&[[0, 0], [0, 1], [2, 2], [3, 2], [3, 3]]);
}
