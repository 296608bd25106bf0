//! A maximum block code for the pentagon, decoded through every output.

use nsinfo::capacity::codebook_witness;
use nsinfo::channel::{Channel, LastOutput, SeededUniform};
use nsinfo::graph::SearchOptions;

fn main() {
    let c = Channel::pentagon();
    let w = codebook_witness(&c, 2, SearchOptions::default()).unwrap();
    println!("{} codewords, I* of the block channel = {} ({} overlap blocks)", w.codebook.len(), w.maximin, w.overlap_blocks);
    let mut uniform = SeededUniform::new(3);
    for (i, word) in w.codebook.words.iter().enumerate() {
        let x = word.as_tuple().unwrap();
        let worst = c.transmit(x, &mut LastOutput).unwrap();
        let random = c.transmit(x, &mut uniform).unwrap();
        println!(
            "{word}: outputs {}; decoded {:?} / {:?}",
            c.block_outputs(x).unwrap(),
            w.codebook.decode(&c, &worst),
            w.codebook.decode(&c, &random)
        );
        assert_eq!(w.codebook.decode(&c, &worst), Some(i));
    }
}
