//! Feasibility verdicts: compare the unstable exponent H_ρ with capacity.

use nsinfo::capacity::{c0_exact_if_certified, c0_lower_profile};
use nsinfo::channel::Channel;
use nsinfo::estimation::{feasibility_check, PlantModel};
use nsinfo::graph::SearchOptions;
use nsinfo::measures::Bits;

fn main() {
    let opts = SearchOptions::default();
    let plants = [
        ("λ = 2", PlantModel::scalar(2.0, 1.0, 0.0).unwrap()),
        ("λ = (2, 1.2)", PlantModel::diagonal(&[2.0, 1.2], 1.0, 0.0).unwrap()),
    ];
    let channels = [("pentagon", Channel::pentagon()), ("noiseless binary", Channel::noiseless(2)), ("confusion", Channel::complete_confusion(2))];
    for (pname, plant) in &plants {
        for (cname, channel) in &channels {
            let lower = Bits(c0_lower_profile(channel, 2, opts).unwrap().best_rate);
            let known = c0_exact_if_certified(channel, opts).unwrap().map(Bits);
            for rho in [0.9, 1.0] {
                let f = feasibility_check(plant, rho, lower, known).unwrap();
                println!("{pname:>12} over {cname:<16} ρ = {rho}: H_ρ = {} -> {}", f.h_rho, f.verdict);
            }
        }
    }
}
