//! A two-dimensional plant with complex eigenvalues, observed through its
//! first coordinate. The state is rebuilt from the last two outputs.

use num::BigRational;
use nsinfo::channel::{Channel, LastOutput};
use nsinfo::estimation::{build_coder_estimator, simulate_noiseless, unstable_exponent, PlantModel};
use nsinfo::graph::SearchOptions;
use nsinfo::io::parse_plant;

fn main() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/plant_rotation.json")).unwrap();
    let plant: PlantModel = parse_plant(&text).unwrap();
    println!("eigenvalues {:?}, spectral radius {:.4}", plant.eigenvalues(), plant.spectral_radius());
    println!("H_1 = {}", unstable_exponent(plant.eigenvalues(), 1.0).unwrap());
    let channel = Channel::noiseless(4);
    let coder = build_coder_estimator(&plant, &channel, 1.0, 3, SearchOptions::default()).unwrap();
    println!("τ = {}, cells {:?}", coder.tau(), coder.cells());
    let x0 = [BigRational::new(1.into(), 3.into()), BigRational::new((-1).into(), 2.into())];
    let trace = simulate_noiseless(&plant, &coder, &channel, &mut LastOutput, &x0, 24).unwrap();
    for r in trace.rows.iter().step_by(3) {
        println!("t = {:>2}: |E| = {:.6}, scaled {:.6}", r.t, r.err, r.scaled_err);
    }
}
