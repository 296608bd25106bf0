//! Bounded estimation error under bounded disturbances (ρ = 1).

use num::BigRational;
use num::ToPrimitive;
use nsinfo::channel::{Channel, LastOutput};
use nsinfo::estimation::{build_coder_estimator, simulate_disturbed, NoiseKind, PlantModel};
use nsinfo::graph::SearchOptions;

fn main() {
    let plant = PlantModel::scalar(2.0, 1.0, 0.01).unwrap();
    let channel = Channel::pentagon();
    let coder = build_coder_estimator(&plant, &channel, 1.0, 4, SearchOptions::default()).unwrap();
    let limit = coder.fixed_point_error_bound().unwrap();
    println!("asymptotic error bound {limit:.5}");
    for kind in [NoiseKind::Zero, NoiseKind::Adversarial, NoiseKind::Alternating, NoiseKind::Uniform] {
        let x0 = [BigRational::new((-9).into(), 10.into())];
        let trace = simulate_disturbed(&plant, &coder, &channel, &mut LastOutput, &x0, kind.build(1).as_mut(), 100).unwrap();
        let tail = trace.rows[40..].iter().map(|r| r.err).fold(0.0, f64::max);
        let bound = trace.bound_exact.last().unwrap().to_f64().unwrap();
        println!("{kind:?}: max |E(t)| for t ≥ 40 is {tail:.5} (live-box bound at t = 100: {bound:.5})");
    }
}
