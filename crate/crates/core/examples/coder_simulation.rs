//! The coder-estimator for λ = 2 over the pentagon at ρ = 0.95.
//!
//! Two channel uses give 5 codewords, enough for 5 cells against a growth
//! of (2/0.95)² ≈ 4.43, so the scaled error shrinks by 4.43/5 per epoch.

use num::BigRational;
use nsinfo::channel::{Channel, LastOutput, PolicyKind};
use nsinfo::estimation::{build_coder_estimator, grid_sweep, linspace, simulate_noiseless, PlantModel};
use nsinfo::graph::SearchOptions;
use num::ToPrimitive;

fn main() {
    let plant = PlantModel::scalar(2.0, 1.0, 0.0).unwrap();
    let channel = Channel::pentagon();
    let coder = build_coder_estimator(&plant, &channel, 0.95, 4, SearchOptions::default()).unwrap();
    println!("τ = {}, {} codewords, cells {:?}, contraction {:.4}", coder.tau(), coder.codebook().len(), coder.cells(), coder.contraction());

    let x0 = [BigRational::new(73.into(), 100.into())];
    let trace = simulate_noiseless(&plant, &coder, &channel, &mut LastOutput, &x0, 20).unwrap();
    print!("{}", trace.to_csv());

    let sweep = grid_sweep(&plant, &coder, &channel, PolicyKind::Adversarial, None, 0, &linspace(&BigRational::from_integer(1.into()), 25), 40).unwrap();
    for (k, (s, b)) in sweep.epoch_sup(coder.tau()).iter().zip(coder.box_schedule(21)).enumerate().step_by(4) {
        println!("epoch {k:>2}: sup scaled error {:.5}, box half-width {:.5}", s.to_f64().unwrap(), b[0].to_f64().unwrap());
    }
}
