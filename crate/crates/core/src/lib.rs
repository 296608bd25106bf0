//! Nonstochastic information theory on finite and interval ranges.
//!
//! Uncertain variables are modelled by [`ensemble::Ensemble`], a table of
//! samples from which every marginal, joint and conditional range is
//! derived. On top of that sit Hartley and Rényi-0 measures
//! ([`measures`]), maximin information through overlap and taxicab
//! partitions ([`partition`]), uncertain channels and their zero-error
//! codebooks ([`channel`], [`graph`], [`capacity`]), and state estimation of
//! linear plants over such channels ([`estimation`]).
//!
//! ```
//! use nsinfo::capacity::c0_lower_profile;
//! use nsinfo::channel::Channel;
//! use nsinfo::graph::SearchOptions;
//!
//! let p = c0_lower_profile(&Channel::pentagon(), 2, SearchOptions::default()).unwrap();
//! assert_eq!(p.alpha(2), Some(5));
//! ```

// Errors carry the offending values; they are rare and not on hot paths.
#![allow(clippy::result_large_err)]

pub mod capacity;
pub mod channel;
pub mod cli;
pub mod ensemble;
pub mod estimation;
pub mod graph;
pub mod interval;
pub mod io;
pub mod measures;
pub mod partition;
pub mod value;
