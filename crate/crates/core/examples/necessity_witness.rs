//! Hypercuboid packings behind the converse: any estimator meeting the
//! convergence target must tell all of these boxes apart.

use num::complex::Complex64;
use nsinfo::estimation::{eps_upper, necessity_witness};

fn main() {
    let eigs = [Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0)];
    println!("ε must lie in (0, {})", eps_upper(&eigs, 1.0));
    for tau in 1..=6 {
        let w = necessity_witness(&eigs, 1.0, 0.1, tau, 1.0).unwrap();
        println!(
            "τ = {tau}: k = {:?}, {} boxes, {:.3} bits ({:.3} per step), closed form {:.3}",
            w.k,
            w.count,
            w.bound_bits.0,
            w.bound_bits.0 / tau as f64,
            w.closed_form_bits.0
        );
    }
    let w = necessity_witness(&eigs[..1], 1.0, 0.25, 4, 1.0).unwrap();
    for iv in w.axis_intervals(0) {
        println!("  [{}, {}]", iv.lo, iv.hi);
    }
}
