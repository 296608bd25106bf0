//! State estimation of linear plants over uncertain channels.
//!
//! A plant can be estimated with `ρ`-exponentially converging error over a
//! channel iff its unstable exponent `H_ρ` is below the channel's
//! zero-error capacity. This module computes `H_ρ`, turns capacity bounds
//! into verdicts, builds and simulates a coder-estimator that achieves the
//! rate, and produces the packing behind the converse.

mod coder;
pub mod exact;
mod exponent;
mod plant;
mod sim;
mod witness;

pub use coder::{build_coder_estimator, CoderEstimator, UncertaintyBox};
pub use exponent::{feasibility_check, unstable_exponent, Feasibility, Verdict, RATE_TOL};
pub use plant::{JordanBlock, PlantModel};
pub use sim::{
    grid_sweep, linspace, simulate_disturbed, simulate_noiseless, AlternatingNoise, GridSweep, MaxNoise, NoiseKind,
    NoisePolicy, Trace, TraceRow, UniformNoise, ZeroNoise,
};
pub use witness::{eps_upper, necessity_witness, WitnessPacking};

use crate::channel::ChannelError;
use crate::graph::GraphError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EstimationError {
    #[error("ρ must be a positive finite number, got {0}")]
    InvalidRho(f64),
    #[error("ρ = {0} equals the spectral radius of A")]
    RhoAtSpectralRadius(f64),
    #[error("disturbed plants need ρ = 1, got {0}")]
    NoiseRequiresUnitRho(f64),
    #[error("{0}")]
    Shape(String),
    #[error("initial radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("noise bound must be nonnegative and finite, got {0}")]
    InvalidNoiseBound(f64),
    #[error("eigenvalues inconsistent with A: {0}")]
    EigenvalueMismatch(String),
    #[error("(G, A) is not observable: observability matrix has rank {rank} < {n}")]
    Unobservable { rank: usize, n: usize },
    #[error("unsupported structure of A: {0}")]
    UnsupportedStructure(String),
    #[error("no block length up to {tau_max} gives a codebook with rate above H_ρ = {h_rho}")]
    Infeasible { tau_max: usize, h_rho: f64 },
    #[error("codebook has {available} words but {needed} cells were requested")]
    CodebookTooSmall { needed: usize, available: usize },
    #[error("box recursion does not contract, so noise bound {c} cannot be tolerated (critical bound {critical_c})")]
    ContractionInsufficient { c: f64, critical_c: f64 },
    #[error("initial state has norm {norm} outside the ball of radius {l}")]
    OutsideBall { norm: f64, l: f64 },
    #[error("ε = {eps} outside the admissible interval (0, {upper})")]
    EpsOutOfRange { eps: f64, upper: f64 },
    #[error("block length must be at least 1")]
    InvalidTau,
    #[error("cell count overflows")]
    Overflow,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
