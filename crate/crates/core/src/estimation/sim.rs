//! Closed-loop simulation of a plant, channel and coder-estimator.
//!
//! All state, noise and estimate arithmetic is exact. Trace rows carry
//! floats for output; the exact scaled errors and bounds are kept alongside.

use std::fmt::Write as _;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::coder::CoderEstimator;
use super::exact::{max_abs, sub, to_f64};
use super::plant::PlantModel;
use super::EstimationError;
use crate::channel::{Channel, ChannelPolicy, PolicyKind};
use crate::value::Value;

/// Supplies process noise `V(t)` and measurement noise `W(t)` with
/// components in `[−c, c]`.
pub trait NoisePolicy {
    fn process(&mut self, t: usize, n: usize, c: &BigRational) -> Vec<BigRational>;
    fn measurement(&mut self, t: usize, p: usize, c: &BigRational) -> Vec<BigRational>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroNoise;

impl NoisePolicy for ZeroNoise {
    fn process(&mut self, _t: usize, n: usize, _c: &BigRational) -> Vec<BigRational> {
        vec![BigRational::zero(); n]
    }

    fn measurement(&mut self, _t: usize, p: usize, _c: &BigRational) -> Vec<BigRational> {
        vec![BigRational::zero(); p]
    }
}

/// `+c` in every component, always.
#[derive(Debug, Clone, Copy, Default)]
pub struct MaxNoise;

impl NoisePolicy for MaxNoise {
    fn process(&mut self, _t: usize, n: usize, c: &BigRational) -> Vec<BigRational> {
        vec![c.clone(); n]
    }

    fn measurement(&mut self, _t: usize, p: usize, c: &BigRational) -> Vec<BigRational> {
        vec![c.clone(); p]
    }
}

/// `+c` on even steps, `−c` on odd steps.
#[derive(Debug, Clone, Copy, Default)]
pub struct AlternatingNoise;

impl NoisePolicy for AlternatingNoise {
    fn process(&mut self, t: usize, n: usize, c: &BigRational) -> Vec<BigRational> {
        vec![if t.is_multiple_of(2) { c.clone() } else { -c.clone() }; n]
    }

    fn measurement(&mut self, t: usize, p: usize, c: &BigRational) -> Vec<BigRational> {
        vec![if t.is_multiple_of(2) { c.clone() } else { -c.clone() }; p]
    }
}

/// Uniform on a grid of `2^21 + 1` points in `[−c, c]`, seeded.
#[derive(Debug, Clone)]
pub struct UniformNoise(ChaCha8Rng);

const UNIFORM_STEPS: i64 = 1 << 20;

impl UniformNoise {
    pub fn new(seed: u64) -> Self {
        UniformNoise(ChaCha8Rng::seed_from_u64(seed))
    }

    fn draw(&mut self, len: usize, c: &BigRational) -> Vec<BigRational> {
        (0..len)
            .map(|_| {
                let k = self.0.random_range(-UNIFORM_STEPS..=UNIFORM_STEPS);
                c * BigRational::new(BigInt::from(k), BigInt::from(UNIFORM_STEPS))
            })
            .collect()
    }
}

impl NoisePolicy for UniformNoise {
    fn process(&mut self, _t: usize, n: usize, c: &BigRational) -> Vec<BigRational> {
        self.draw(n, c)
    }

    fn measurement(&mut self, _t: usize, p: usize, c: &BigRational) -> Vec<BigRational> {
        self.draw(p, c)
    }
}

/// Named noise policies for command-line use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    Zero,
    /// Always `+c`.
    Adversarial,
    Alternating,
    Uniform,
}

impl NoiseKind {
    pub fn build(self, seed: u64) -> Box<dyn NoisePolicy> {
        match self {
            NoiseKind::Zero => Box::new(ZeroNoise),
            NoiseKind::Adversarial => Box::new(MaxNoise),
            NoiseKind::Alternating => Box::new(AlternatingNoise),
            NoiseKind::Uniform => Box::new(UniformNoise::new(seed)),
        }
    }
}

impl FromStr for NoiseKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zero" => Ok(NoiseKind::Zero),
            "adversarial" | "max" => Ok(NoiseKind::Adversarial),
            "alternating" => Ok(NoiseKind::Alternating),
            "uniform" => Ok(NoiseKind::Uniform),
            other => Err(format!("unknown noise policy '{other}' (expected zero, adversarial, alternating, uniform)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: usize,
    pub state: Vec<f64>,
    pub estimate: Vec<f64>,
    /// `‖X(t) − X̂(t)‖∞`.
    pub err: f64,
    /// `ρ^{−t}‖X(t) − X̂(t)‖∞`.
    pub scaled_err: f64,
}

#[derive(Debug, Clone)]
pub struct Trace {
    pub rows: Vec<TraceRow>,
    pub tau: usize,
    /// Exact `ρ^{−t}‖E(t)‖∞` per row.
    pub scaled_exact: Vec<BigRational>,
    /// Exact worst-case bound on `ρ^{−t}‖E(t)‖∞` from the live box.
    pub bound_exact: Vec<BigRational>,
}

impl Trace {
    /// CSV with header `t,state…,estimate…,err,scaled_err`.
    pub fn to_csv(&self) -> String {
        let n = self.rows.first().map_or(0, |r| r.state.len());
        let names = |prefix: &str| -> Vec<String> {
            if n == 1 {
                vec![prefix.to_string()]
            } else {
                (0..n).map(|i| format!("{prefix}_{i}")).collect()
            }
        };
        let mut out = String::new();
        let header: Vec<String> = std::iter::once("t".to_string())
            .chain(names("state"))
            .chain(names("estimate"))
            .chain(["err".to_string(), "scaled_err".to_string()])
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for r in &self.rows {
            let mut fields = vec![r.t.to_string()];
            fields.extend(r.state.iter().map(|x| x.to_string()));
            fields.extend(r.estimate.iter().map(|x| x.to_string()));
            fields.push(r.err.to_string());
            fields.push(r.scaled_err.to_string());
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }

    /// Exact scaled errors at epoch boundaries `t = kτ`.
    pub fn epoch_scaled(&self) -> Vec<BigRational> {
        self.scaled_exact.iter().step_by(self.tau).cloned().collect()
    }

    pub fn initial_scaled(&self) -> f64 {
        self.rows.first().map_or(0.0, |r| r.scaled_err)
    }

    pub fn final_scaled(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.scaled_err)
    }
}

/// Runs the closed loop without disturbances.
pub fn simulate_noiseless(
    plant: &PlantModel,
    coder: &CoderEstimator,
    channel: &Channel,
    policy: &mut dyn ChannelPolicy,
    x0: &[BigRational],
    t_end: usize,
) -> Result<Trace, EstimationError> {
    run(plant, coder, channel, policy, &mut ZeroNoise, &BigRational::zero(), x0, t_end)
}

/// Runs the closed loop with process and measurement noise bounded by the
/// plant's `c`. Requires `ρ = 1`.
pub fn simulate_disturbed(
    plant: &PlantModel,
    coder: &CoderEstimator,
    channel: &Channel,
    policy: &mut dyn ChannelPolicy,
    x0: &[BigRational],
    noise: &mut dyn NoisePolicy,
    t_end: usize,
) -> Result<Trace, EstimationError> {
    if coder.rho() != 1.0 {
        return Err(EstimationError::NoiseRequiresUnitRho(coder.rho()));
    }
    if coder.contraction() >= 1.0 && plant.c() > 0.0 {
        return Err(EstimationError::ContractionInsufficient { c: plant.c(), critical_c: 0.0 });
    }
    run(plant, coder, channel, policy, noise, &plant.c_exact(), x0, t_end)
}

#[allow(clippy::too_many_arguments)]
fn run(
    plant: &PlantModel,
    coder: &CoderEstimator,
    channel: &Channel,
    policy: &mut dyn ChannelPolicy,
    noise: &mut dyn NoisePolicy,
    c: &BigRational,
    x0: &[BigRational],
    t_end: usize,
) -> Result<Trace, EstimationError> {
    plant.check_initial(x0)?;
    if coder.dim() != plant.dim() || coder.outputs() != plant.outputs() {
        return Err(EstimationError::Shape("coder was built for a different plant".into()));
    }
    if plant.c() > coder.noise_bound() {
        return Err(EstimationError::Shape(format!(
            "plant noise bound {} exceeds the coder's design bound {}",
            plant.c(),
            coder.noise_bound()
        )));
    }
    let n = plant.dim();
    let tau = coder.tau();
    let a = coder.a();
    let g = coder.g();
    let rho = coder.rho_exact();
    let words = &coder.codebook().words;

    let mut x = x0.to_vec();
    let mut outputs: Vec<Vec<BigRational>> = Vec::new();
    let mut live = coder.initial_box();
    let mut rho_t = BigRational::one();
    let mut rho_epoch = BigRational::one();
    let mut pred = live.center.clone();
    let mut sent_word: Option<(usize, Vec<usize>)> = None;
    let mut word: &[Value] = &[];
    let mut received: Vec<Value> = Vec::with_capacity(tau);

    let mut trace = Trace { rows: Vec::with_capacity(t_end + 1), tau, scaled_exact: Vec::new(), bound_exact: Vec::new() };
    for t in 0..=t_end {
        let (k, r) = (t / tau, t % tau);
        let w = noise.measurement(t, plant.outputs(), c);
        outputs.push(g.mul_vec(&x).into_iter().zip(w).map(|(y, w)| y + w).collect());

        if r == 0 {
            rho_epoch = rho_t.clone();
            let scaled: Vec<BigRational> = x.iter().map(|v| v / &rho_t).collect();
            if !live.contains(&scaled) {
                return Err(EstimationError::Internal(format!("state left the live box at t={t}")));
            }
            pred = live.center.clone();
            let number = if coder.is_informative(k) {
                let window: Vec<BigRational> = outputs[t + 1 - n..=t].iter().flatten().cloned().collect();
                let x_rec: Vec<BigRational> = coder.recon().mul_vec(&window).iter().map(|v| v / &rho_t).collect();
                let idx = coder.quantize(&live, &x_rec);
                let m = coder.cell_number(&idx);
                sent_word = Some((m, idx));
                m
            } else {
                sent_word = None;
                0
            };
            word = words[number].as_tuple().expect("codewords are tuples");
            received.clear();
        }

        let estimate: Vec<BigRational> = pred.iter().map(|v| v * &rho_epoch).collect();
        let e = sub(&x, &estimate);
        let err = max_abs(&e);
        let scaled = &err / &rho_t;
        let bound = coder.offset_bound(&live.half, r).into_iter().max().unwrap_or_else(BigRational::zero);
        trace.rows.push(TraceRow {
            t,
            state: x.iter().map(to_f64).collect(),
            estimate: estimate.iter().map(to_f64).collect(),
            err: to_f64(&err),
            scaled_err: to_f64(&scaled),
        });
        trace.scaled_exact.push(scaled);
        trace.bound_exact.push(bound);
        if t == t_end {
            break;
        }

        let symbol = &word[r];
        let admissible = channel.transition(symbol)?;
        let y = policy.choose(t, symbol, admissible);
        if !admissible.contains(&y) {
            return Err(crate::channel::ChannelError::PolicyOutOfRange { t, input: symbol.clone(), output: y }.into());
        }
        received.push(y);
        if r + 1 == tau {
            let decoded = coder
                .codebook()
                .decode(channel, &received)
                .ok_or_else(|| EstimationError::Internal(format!("codeword ending at t={t} did not decode uniquely")))?;
            live = match &sent_word {
                Some((m, idx)) => {
                    if decoded != *m {
                        return Err(EstimationError::Internal(format!("decoded {decoded}, sent {m} at t={t}")));
                    }
                    let cell = coder.cell_indices(decoded);
                    debug_assert_eq!(&cell, idx);
                    coder.next_box(&live, Some(&cell))
                }
                None => coder.next_box(&live, None),
            };
        }

        let v = noise.process(t, n, c);
        x = a.mul_vec(&x).into_iter().zip(v).map(|(s, v)| s + v).collect();
        pred = a.mul_vec(&pred);
        rho_t *= rho;
    }
    Ok(trace)
}

/// `count` equally spaced points from `−l` to `l` inclusive, exactly.
pub fn linspace(l: &BigRational, count: usize) -> Vec<BigRational> {
    assert!(count >= 2, "need at least two grid points");
    let step = l * BigRational::from_integer(BigInt::from(2)) / BigRational::from_integer(BigInt::from(count - 1));
    (0..count).map(|i| -l.clone() + &step * BigRational::from_integer(BigInt::from(i))).collect()
}

/// Per-time supremum of the scaled error over a grid of initial states,
/// with the worst-case bound from the live box.
#[derive(Debug, Clone)]
pub struct GridSweep {
    pub sup_scaled: Vec<BigRational>,
    pub bound: Vec<BigRational>,
    pub runs: usize,
}

impl GridSweep {
    /// `sup` of the scaled error at epoch boundaries.
    pub fn epoch_sup(&self, tau: usize) -> Vec<BigRational> {
        self.sup_scaled.iter().step_by(tau).cloned().collect()
    }
}

/// Sweeps initial states `x0 = (v, …, v)` over `grid`, with a fresh channel
/// and noise policy per run.
#[allow(clippy::too_many_arguments)]
pub fn grid_sweep(
    plant: &PlantModel,
    coder: &CoderEstimator,
    channel: &Channel,
    policy: PolicyKind,
    noise: Option<NoiseKind>,
    seed: u64,
    grid: &[BigRational],
    t_end: usize,
) -> Result<GridSweep, EstimationError> {
    let mut sup = vec![BigRational::zero(); t_end + 1];
    let mut bound = Vec::new();
    for v in grid {
        let x0 = vec![v.clone(); plant.dim()];
        let mut pol = policy.build(seed);
        let trace = match noise {
            None => simulate_noiseless(plant, coder, channel, pol.as_mut(), &x0, t_end)?,
            Some(kind) => simulate_disturbed(plant, coder, channel, pol.as_mut(), &x0, kind.build(seed).as_mut(), t_end)?,
        };
        for (s, e) in sup.iter_mut().zip(trace.scaled_exact) {
            if e > *s {
                *s = e;
            }
        }
        bound = trace.bound_exact;
    }
    Ok(GridSweep { sup_scaled: sup, bound, runs: grid.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{FirstOutput, LastOutput, SeededUniform};
    use crate::estimation::coder::build_coder_estimator;
    use crate::estimation::exact::decimal;
    use crate::graph::SearchOptions;

    fn pentagon_setup(rho: f64, c: f64) -> (PlantModel, CoderEstimator, Channel) {
        let plant = PlantModel::scalar(2.0, 1.0, c).unwrap();
        let channel = Channel::pentagon();
        let coder = build_coder_estimator(&plant, &channel, rho, 4, SearchOptions::default()).unwrap();
        (plant, coder, channel)
    }

    #[test]
    fn pentagon_run_decays() {
        let (plant, coder, channel) = pentagon_setup(0.95, 0.0);
        let trace = simulate_noiseless(&plant, &coder, &channel, &mut LastOutput, &[decimal(0.73)], 40).unwrap();
        assert_eq!(trace.rows.len(), 41);
        assert!(trace.rows[40].scaled_err < trace.rows[2].scaled_err);
        for (s, b) in trace.scaled_exact.iter().zip(&trace.bound_exact) {
            assert!(s <= b);
        }
    }

    #[test]
    fn zero_state_has_zero_error() {
        let (plant, coder, channel) = pentagon_setup(0.95, 0.0);
        let trace = simulate_noiseless(&plant, &coder, &channel, &mut FirstOutput, &[decimal(0.0)], 20).unwrap();
        assert!(trace.scaled_exact.iter().all(|e| e.is_zero()));
    }

    #[test]
    fn binary_envelope() {
        let plant = PlantModel::scalar(1.5, 1.0, 0.0).unwrap();
        let channel = Channel::noiseless(2);
        let coder = build_coder_estimator(&plant, &channel, 1.0, 3, SearchOptions::default()).unwrap();
        for x0 in linspace(&decimal(1.0), 11) {
            let trace = simulate_noiseless(&plant, &coder, &channel, &mut FirstOutput, &[x0], 12).unwrap();
            for row in &trace.rows {
                assert!(row.err <= 0.75f64.powi(row.t as i32) + 1e-15);
            }
        }
    }

    #[test]
    fn disturbed_with_zero_bound_matches_noiseless() {
        let (plant, coder, channel) = pentagon_setup(1.0, 0.0);
        let a = simulate_noiseless(&plant, &coder, &channel, &mut LastOutput, &[decimal(0.3)], 30).unwrap();
        let b = simulate_disturbed(&plant, &coder, &channel, &mut LastOutput, &[decimal(0.3)], &mut MaxNoise, 30).unwrap();
        assert_eq!(a.rows, b.rows);
    }

    #[test]
    fn disturbed_stays_bounded() {
        let (plant, coder, channel) = pentagon_setup(1.0, 0.01);
        let fp = coder.fixed_point_error_bound().unwrap();
        for kind in [NoiseKind::Zero, NoiseKind::Adversarial, NoiseKind::Alternating, NoiseKind::Uniform] {
            let mut pol = SeededUniform::new(3);
            let trace =
                simulate_disturbed(&plant, &coder, &channel, &mut pol, &[decimal(-0.9)], kind.build(7).as_mut(), 80).unwrap();
            let tail = trace.rows[40..].iter().map(|r| r.err).fold(0.0, f64::max);
            assert!(tail <= fp * 1.05, "{kind:?}: {tail} > {fp}");
        }
    }

    #[test]
    fn rejects_outside_ball() {
        let (plant, coder, channel) = pentagon_setup(0.95, 0.0);
        let err = simulate_noiseless(&plant, &coder, &channel, &mut FirstOutput, &[decimal(1.5)], 5).unwrap_err();
        assert!(matches!(err, EstimationError::OutsideBall { .. }));
    }

    #[test]
    fn csv_header() {
        let (plant, coder, channel) = pentagon_setup(0.95, 0.0);
        let trace = simulate_noiseless(&plant, &coder, &channel, &mut FirstOutput, &[decimal(0.5)], 2).unwrap();
        let csv = trace.to_csv();
        assert!(csv.starts_with("t,state,estimate,err,scaled_err\n0,0.5,0,0.5,0.5\n"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn two_dimensional_output_feedback() {
        let a = vec![vec![1.2, 0.0], vec![0.0, 0.5]];
        let g = vec![vec![1.0, 1.0]];
        let plant = PlantModel::new(a, g, None, None, 1.0, 0.0).unwrap();
        let channel = Channel::noiseless(3);
        let coder = build_coder_estimator(&plant, &channel, 1.0, 2, SearchOptions::default()).unwrap();
        let x0 = [decimal(0.7), decimal(-0.2)];
        let trace = simulate_noiseless(&plant, &coder, &channel, &mut FirstOutput, &x0, 40).unwrap();
        assert!(trace.final_scaled() < 1e-2);
    }

    #[test]
    fn grid_points() {
        let g = linspace(&decimal(1.0), 5);
        assert_eq!(g, vec![decimal(-1.0), decimal(-0.5), decimal(0.0), decimal(0.5), decimal(1.0)]);
    }
}
