//! Zero-error codebooks and certified lower bounds on zero-error capacity.
//!
//! A length-`τ` codebook is valid iff no output word can come from two of
//! its codewords, i.e. iff it is an independent set of the `τ`-fold strong
//! power of the confusability graph. The profile reports
//! `log2 α(G^{⊠τ}) / τ` for each `τ`; every entry is a lower bound on `C₀`.

use serde::Serialize;

use crate::channel::Channel;
use crate::graph::{clique_cover_number_upper, Graph, GraphError, SearchOptions, DEFAULT_POWER_CAP};
use crate::measures::{Bits, MeasureError};
use crate::partition::{maximin_info, overlap_partition};
use crate::value::{Value, ValueSet};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CapacityError {
    #[error("block length must be at least 1")]
    ZeroBlockLength,
    #[error("search failed at block length {tau}: {source}")]
    Search {
        tau: usize,
        /// Rows completed before the failure.
        partial: CapacityProfile,
        #[source]
        source: GraphError,
    },
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("maximin check failed: codebook of {codebook} words gave {blocks} overlap blocks")]
    MaximinMismatch { codebook: usize, blocks: usize },
    #[error("exhaustive search over {0} input words is too large")]
    TooManyWords(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileRecord {
    pub tau: usize,
    pub alpha: usize,
    pub rate_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct CapacityProfile {
    pub records: Vec<ProfileRecord>,
    pub best_rate: f64,
}

impl CapacityProfile {
    fn push(&mut self, tau: usize, alpha: usize) {
        let rate_bits = (alpha as f64).log2() / tau as f64;
        self.records.push(ProfileRecord { tau, alpha, rate_bits });
        if self.records.len() == 1 || rate_bits > self.best_rate {
            self.best_rate = rate_bits;
        }
    }

    pub fn alpha(&self, tau: usize) -> Option<usize> {
        self.records.iter().find(|r| r.tau == tau).map(|r| r.alpha)
    }

    /// `α(m+n) ≥ α(m)·α(n)` for every pair of recorded lengths.
    pub fn is_superadditive(&self) -> bool {
        self.records.iter().all(|a| {
            self.records.iter().all(|b| match self.alpha(a.tau + b.tau) {
                Some(ab) => ab as u128 >= a.alpha as u128 * b.alpha as u128,
                None => true,
            })
        })
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["tau", "alpha", "rate_bits"]).expect("in-memory write");
        for r in &self.records {
            w.write_record([r.tau.to_string(), r.alpha.to_string(), r.rate_bits.to_string()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }
}

/// A maximum zero-error codebook of block length `τ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    pub tau: usize,
    /// Codewords as `τ`-tuples, in lexicographic order.
    pub words: Vec<Value>,
}

impl Codebook {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn as_set(&self) -> ValueSet {
        self.words.iter().cloned().collect()
    }

    /// Unique codeword consistent with a received output word, if any.
    pub fn decode(&self, channel: &Channel, received: &[Value]) -> Option<usize> {
        let rev = channel.reverse_map();
        let mut hits = self.words.iter().enumerate().filter(|(_, w)| {
            w.as_tuple()
                .expect("codewords are tuples")
                .iter()
                .zip(received)
                .all(|(x, y)| rev.get(y).is_some_and(|r| r.contains(x)))
        });
        let first = hits.next()?.0;
        if hits.next().is_some() {
            return None;
        }
        Some(first)
    }
}

fn power(channel: &Channel, tau: usize) -> Result<Graph, GraphError> {
    channel.confusability_graph().strong_power(tau, DEFAULT_POWER_CAP)
}

/// Largest zero-error codebook for block length `τ`.
pub fn max_codebook(channel: &Channel, tau: usize, opts: SearchOptions) -> Result<Codebook, GraphError> {
    assert!(tau >= 1, "block length must be at least 1");
    let g = power(channel, tau)?;
    let set = g.max_independent_set(opts)?;
    let words = set.vertices.iter().map(|&i| g.vertices()[i].clone()).collect();
    Ok(Codebook { tau, words })
}

/// `α(G^{⊠τ})` and the per-symbol rate for `τ = 1..=t_max`.
pub fn c0_lower_profile(channel: &Channel, t_max: usize, opts: SearchOptions) -> Result<CapacityProfile, CapacityError> {
    if t_max == 0 {
        return Err(CapacityError::ZeroBlockLength);
    }
    let mut profile = CapacityProfile::default();
    for tau in 1..=t_max {
        match max_codebook(channel, tau, opts) {
            Ok(cb) => profile.push(tau, cb.len()),
            Err(source) => return Err(CapacityError::Search { tau, partial: profile, source }),
        }
    }
    Ok(profile)
}

/// `C₀` when a greedy clique cover of the confusability graph certifies it:
/// if the cover has `α(G)` cliques then `α(G^{⊠τ}) = α(G)^τ` for all `τ`.
pub fn c0_exact_if_certified(channel: &Channel, opts: SearchOptions) -> Result<Option<f64>, GraphError> {
    let g = channel.confusability_graph();
    let alpha = g.max_independent_set(opts)?.size();
    Ok((clique_cover_number_upper(&g) == alpha).then(|| (alpha as f64).log2()))
}

/// A maximum codebook together with the maximin information it carries
/// when used as the whole input range.
#[derive(Debug, Clone)]
pub struct CodebookWitness {
    pub codebook: Codebook,
    pub overlap_blocks: usize,
    pub maximin: Bits,
}

/// Builds `F*`, routes the input ensemble `⟦X(0:τ−1)⟧ = F*` through the block
/// channel and checks that `I*[X;Y] = log2|F*|`.
pub fn codebook_witness(channel: &Channel, tau: usize, opts: SearchOptions) -> Result<CodebookWitness, CapacityError> {
    if tau == 0 {
        return Err(CapacityError::ZeroBlockLength);
    }
    let codebook = max_codebook(channel, tau, opts)
        .map_err(|source| CapacityError::Search { tau, partial: CapacityProfile::default(), source })?;
    let ensemble = channel.block_ensemble(&codebook.as_set()).expect("codewords come from the input alphabet");
    let report = maximin_info(&ensemble, "X", "Y")?;
    if report.overlap.len() != codebook.len() || report.overlap.blocks.iter().any(|b| b.len() != 1) {
        return Err(CapacityError::MaximinMismatch { codebook: codebook.len(), blocks: report.overlap.len() });
    }
    Ok(CodebookWitness { codebook, overlap_blocks: report.overlap.len(), maximin: report.bits })
}

/// Number of overlap blocks of `⟦X(0:τ−1)|Y(0:τ−1)⟧` when the input range is `range`.
pub fn block_overlap_count(channel: &Channel, range: &ValueSet, tau: usize) -> Result<usize, CapacityError> {
    let outputs: Vec<&ValueSet> = std::iter::repeat_n(channel.outputs(), tau).collect();
    let mut family = Vec::new();
    for y in ValueSet::product(outputs) {
        let word = y.as_tuple().expect("tuple").to_vec();
        let cond = channel.block_conditional_range(range, &word).expect("lengths agree");
        if !cond.is_empty() {
            family.push((y, cond));
        }
    }
    Ok(overlap_partition(&family)?.len())
}

/// Largest overlap-block count over every nonempty input range `⊆ 𝐗^τ`,
/// with a range attaining it. Exhaustive: `2^{|𝐗|^τ}` ranges.
pub fn peak_maximin_exhaustive(channel: &Channel, tau: usize) -> Result<(usize, ValueSet), CapacityError> {
    if tau == 0 {
        return Err(CapacityError::ZeroBlockLength);
    }
    let inputs: Vec<&ValueSet> = std::iter::repeat_n(channel.inputs(), tau).collect();
    let words: Vec<Value> = ValueSet::product(inputs).into_iter().collect();
    if words.len() > 20 {
        return Err(CapacityError::TooManyWords(words.len()));
    }
    let mut best = (0, ValueSet::new());
    for mask in 1u32..(1 << words.len()) {
        if (mask.count_ones() as usize) <= best.0 {
            continue;
        }
        let range: ValueSet = words.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, w)| w.clone()).collect();
        let blocks = block_overlap_count(channel, &range, tau)?;
        if blocks > best.0 {
            best = (blocks, range);
        }
    }
    Ok(best)
}
