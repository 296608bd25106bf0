//! Ranges and 0-information measures of a small ensemble.
//!
//! Y takes three values, but each observation of X leaves two of them
//! possible, so I₀[Y;X] = log2(3/2) while no value of Y is pinned down.

use nsinfo::ensemble::Ensemble;
use nsinfo::measures::{conditional_entropy0, hartley, klir_transmission, zero_info_of};
use nsinfo::partition::maximin_info;
use nsinfo::value::Value;

fn main() {
    let rows = [[0, 0, 0], [0, 1, 2], [1, 0, 1], [1, 1, 2]];
    let samples = rows.iter().map(|r| r.iter().map(|&v| Value::Int(v)).collect()).collect();
    let e = Ensemble::from_samples(vec!["X".into(), "Z".into(), "Y".into()], samples).unwrap();

    let y = e.marginal_range("Y").unwrap();
    println!("[[Y]] = {y}, H0[Y] = {}", hartley(&y).unwrap());
    for member in &e.conditional_family("Y", &["X"]).unwrap().members {
        println!("[[Y|X={}]] = {}", member.0, member.1);
    }
    let fam = e.conditional_family("Y", &["X"]).unwrap();
    println!("H0[Y|X] = {}", conditional_entropy0(&fam.members).unwrap());
    println!("I0[Y;X] = {}", zero_info_of(&e, "Y", "X").unwrap());
    println!("I*[Y;X] = {}", maximin_info(&e, "Y", "X").unwrap().bits);
    println!("T[X;Y]  = {}", klir_transmission(&e, "X", "Y").unwrap());
    println!("X, Z unrelated: {}", e.is_unrelated(&["X", "Z"], None).unwrap());
    println!("X <-> Y <-> Z: {}", e.is_markov_chain("X", "Y", "Z").unwrap());
}
