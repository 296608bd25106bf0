//! Zero-error capacity profile of the pentagon channel.
//!
//! α(C₅) = 2 and α(C₅ ⊠ C₅) = 5, so two uses carry log2 5 bits: more than
//! twice what one use can.

use nsinfo::capacity::{c0_exact_if_certified, c0_lower_profile};
use nsinfo::channel::Channel;
use nsinfo::graph::{clique_cover_number_upper, SearchOptions};

fn main() {
    let opts = SearchOptions::default();
    for (name, c) in [
        ("pentagon", Channel::pentagon()),
        ("noiseless binary", Channel::noiseless(2)),
        ("binary erasure", Channel::binary_erasure()),
        ("complete confusion", Channel::complete_confusion(2)),
    ] {
        let g = c.confusability_graph();
        println!("{name}: {} inputs, {} confusable pairs, clique cover ≤ {}", g.len(), g.edge_count(), clique_cover_number_upper(&g));
        let profile = c0_lower_profile(&c, 3, opts).unwrap();
        print!("{}", profile.to_csv());
        match c0_exact_if_certified(&c, opts).unwrap() {
            Some(c0) => println!("C0 = {c0} (certified)\n"),
            None => println!("C0 ≥ {:.5}\n", profile.best_rate),
        }
    }
}
