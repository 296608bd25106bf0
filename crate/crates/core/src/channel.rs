//! Stationary memoryless uncertain channels.
//!
//! A channel is a set-valued transition map `T: 𝐗 → 2^𝐘` applied
//! independently to each input symbol. Block behaviour follows from the
//! product structure `⟦Y(0:t)|x(0:t)⟧ = T(x(0)) × ⋯ × T(x(t))`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ensemble::Ensemble;
use crate::graph::Graph;
use crate::value::{Value, ValueSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChannelError {
    #[error("no transition row for input `{0}`")]
    MissingInput(Value),
    #[error("transition row for `{0}` is not a declared input")]
    ExtraInput(Value),
    #[error("input `{0}` has an empty output set")]
    EmptyOutputs(Value),
    #[error("input `{input}` maps to undeclared output `{output}`")]
    UnknownOutput { input: Value, output: Value },
    #[error("output `{0}` is not reachable from any input")]
    UnreachableOutput(Value),
    #[error("input `{0}` is outside the channel alphabet")]
    UnknownInput(Value),
    #[error("sequence length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("policy chose `{output}` at t={t}, which is not in T({input})")]
    PolicyOutOfRange { t: usize, input: Value, output: Value },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Channel {
    inputs: ValueSet,
    outputs: ValueSet,
    transition: BTreeMap<Value, ValueSet>,
}

/// `R(y) = {x : y ∈ T(x)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReverseMap(pub BTreeMap<Value, ValueSet>);

impl ReverseMap {
    pub fn get(&self, y: &Value) -> Option<&ValueSet> {
        self.0.get(y)
    }

    /// Adjoint of the adjoint: rebuilds the forward transition map.
    pub fn invert(&self) -> BTreeMap<Value, ValueSet> {
        let mut out: BTreeMap<Value, ValueSet> = BTreeMap::new();
        for (y, xs) in &self.0 {
            for x in xs.iter() {
                out.entry(x.clone()).or_default().insert(y.clone());
            }
        }
        out
    }
}

impl Channel {
    pub fn new(inputs: ValueSet, outputs: ValueSet, transition: BTreeMap<Value, ValueSet>) -> Result<Self, ChannelError> {
        for x in transition.keys() {
            if !inputs.contains(x) {
                return Err(ChannelError::ExtraInput(x.clone()));
            }
        }
        let mut reached = ValueSet::new();
        for x in inputs.iter() {
            let ys = transition.get(x).ok_or_else(|| ChannelError::MissingInput(x.clone()))?;
            if ys.is_empty() {
                return Err(ChannelError::EmptyOutputs(x.clone()));
            }
            for y in ys.iter() {
                if !outputs.contains(y) {
                    return Err(ChannelError::UnknownOutput { input: x.clone(), output: y.clone() });
                }
                reached.insert(y.clone());
            }
        }
        if let Some(y) = outputs.iter().find(|y| !reached.contains(y)) {
            return Err(ChannelError::UnreachableOutput(y.clone()));
        }
        Ok(Channel { inputs, outputs, transition })
    }

    /// Builds a channel over integer alphabets `0..n_in`, `0..n_out`.
    pub fn from_table(n_out: usize, rows: &[&[i64]]) -> Result<Self, ChannelError> {
        let inputs = (0..rows.len() as i64).map(Value::Int).collect();
        let outputs = (0..n_out as i64).map(Value::Int).collect();
        let transition = rows
            .iter()
            .enumerate()
            .map(|(x, ys)| (Value::Int(x as i64), ys.iter().map(|&y| Value::Int(y)).collect()))
            .collect();
        Channel::new(inputs, outputs, transition)
    }

    /// Every input received intact.
    pub fn noiseless(n: usize) -> Self {
        let rows: Vec<Vec<i64>> = (0..n as i64).map(|i| vec![i]).collect();
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        Channel::from_table(n, &refs).expect("valid")
    }

    /// Every input may produce every output.
    pub fn complete_confusion(n: usize) -> Self {
        let all: Vec<i64> = (0..n as i64).collect();
        let refs: Vec<&[i64]> = (0..n).map(|_| all.as_slice()).collect();
        Channel::from_table(n, &refs).expect("valid")
    }

    /// `T(i) = {i, i+1 mod n}`; confusability graph is the `n`-cycle.
    pub fn cyclic(n: usize) -> Self {
        let rows: Vec<Vec<i64>> = (0..n as i64).map(|i| vec![i, (i + 1) % n as i64]).collect();
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        Channel::from_table(n, &refs).expect("valid")
    }

    pub fn pentagon() -> Self {
        Channel::cyclic(5)
    }

    /// Binary erasure: `T(0) = {0,e}`, `T(1) = {1,e}`.
    pub fn binary_erasure() -> Self {
        let e = Value::sym("e");
        let inputs = [0, 1].into_iter().map(Value::Int).collect();
        let outputs = [Value::Int(0), Value::Int(1), e.clone()].into_iter().collect();
        let transition = BTreeMap::from([
            (Value::Int(0), [Value::Int(0), e.clone()].into_iter().collect()),
            (Value::Int(1), [Value::Int(1), e].into_iter().collect()),
        ]);
        Channel::new(inputs, outputs, transition).expect("valid")
    }

    pub fn inputs(&self) -> &ValueSet {
        &self.inputs
    }

    pub fn outputs(&self) -> &ValueSet {
        &self.outputs
    }

    pub fn transition(&self, x: &Value) -> Result<&ValueSet, ChannelError> {
        self.transition.get(x).ok_or_else(|| ChannelError::UnknownInput(x.clone()))
    }

    pub fn transitions(&self) -> &BTreeMap<Value, ValueSet> {
        &self.transition
    }

    pub fn reverse_map(&self) -> ReverseMap {
        let mut rev: BTreeMap<Value, ValueSet> = self.outputs.iter().map(|y| (y.clone(), ValueSet::new())).collect();
        for (x, ys) in &self.transition {
            for y in ys.iter() {
                rev.get_mut(y).expect("declared output").insert(x.clone());
            }
        }
        ReverseMap(rev)
    }

    /// `⟦X(0:t)|y(0:t)⟧ = ⟦X(0:t)⟧ ∩ R(y(0)) × ⋯ × R(y(t))`.
    pub fn block_conditional_range(&self, input_range: &ValueSet, y_seq: &[Value]) -> Result<ValueSet, ChannelError> {
        let rev = self.reverse_map();
        let empty = ValueSet::new();
        let sets: Vec<&ValueSet> = y_seq.iter().map(|y| rev.get(y).unwrap_or(&empty)).collect();
        let mut out = ValueSet::new();
        for x in input_range.iter() {
            let word = x.as_tuple().unwrap_or(std::slice::from_ref(x));
            if word.len() != y_seq.len() {
                return Err(ChannelError::LengthMismatch { expected: y_seq.len(), found: word.len() });
            }
            if word.iter().zip(&sets).all(|(xi, r)| r.contains(xi)) {
                out.insert(x.clone());
            }
        }
        Ok(out)
    }

    /// `T(x(0)) × ⋯ × T(x(t))` for one input word.
    pub fn block_outputs(&self, word: &[Value]) -> Result<ValueSet, ChannelError> {
        let sets = word.iter().map(|x| self.transition(x)).collect::<Result<Vec<_>, _>>()?;
        Ok(ValueSet::product(sets))
    }

    /// Ensemble with variables `X` (input word) and `Y` (output word), one
    /// sample per realizable pair, for input words ranging over `input_range`.
    pub fn block_ensemble(&self, input_range: &ValueSet) -> Result<Ensemble, ChannelError> {
        let mut samples = Vec::new();
        for x in input_range.iter() {
            let word = x.as_tuple().unwrap_or(std::slice::from_ref(x));
            for y in self.block_outputs(word)? {
                samples.push(vec![x.clone(), y]);
            }
        }
        Ok(Ensemble::from_samples(vec!["X".into(), "Y".into()], samples).expect("nonempty input range"))
    }

    /// Inputs are adjacent iff their output sets intersect.
    pub fn confusability_graph(&self) -> Graph {
        let xs: Vec<&Value> = self.inputs.iter().collect();
        let mut edges = Vec::new();
        for i in 0..xs.len() {
            for j in (i + 1)..xs.len() {
                if self.transition[xs[i]].intersects(&self.transition[xs[j]]) {
                    edges.push((i, j));
                }
            }
        }
        Graph::new(xs.into_iter().cloned().collect(), &edges).expect("valid edges")
    }

    /// Passes `inputs` through the channel, letting `policy` pick each output.
    pub fn transmit(&self, inputs: &[Value], policy: &mut dyn ChannelPolicy) -> Result<Vec<Value>, ChannelError> {
        inputs
            .iter()
            .enumerate()
            .map(|(t, x)| {
                let ys = self.transition(x)?;
                let y = policy.choose(t, x, ys);
                if !ys.contains(&y) {
                    return Err(ChannelError::PolicyOutOfRange { t, input: x.clone(), output: y });
                }
                Ok(y)
            })
            .collect()
    }
}

/// Chooses which admissible output the channel produces.
pub trait ChannelPolicy {
    fn choose(&mut self, t: usize, input: &Value, outputs: &ValueSet) -> Value;
}

/// Smallest admissible output.
#[derive(Debug, Clone, Copy, Default)]
pub struct FirstOutput;

impl ChannelPolicy for FirstOutput {
    fn choose(&mut self, _t: usize, _x: &Value, outputs: &ValueSet) -> Value {
        outputs.first().expect("nonempty").clone()
    }
}

/// Largest admissible output.
#[derive(Debug, Clone, Copy, Default)]
pub struct LastOutput;

impl ChannelPolicy for LastOutput {
    fn choose(&mut self, _t: usize, _x: &Value, outputs: &ValueSet) -> Value {
        outputs.last().expect("nonempty").clone()
    }
}

/// Uniform choice from a seeded generator.
#[derive(Debug, Clone)]
pub struct SeededUniform(ChaCha8Rng);

impl SeededUniform {
    pub fn new(seed: u64) -> Self {
        SeededUniform(ChaCha8Rng::seed_from_u64(seed))
    }
}

impl ChannelPolicy for SeededUniform {
    fn choose(&mut self, _t: usize, _x: &Value, outputs: &ValueSet) -> Value {
        let i = self.0.random_range(0..outputs.len());
        outputs.iter().nth(i).expect("in range").clone()
    }
}

/// Caller-supplied adversary receiving `(t, x(t), T(x(t)))`.
pub struct Adversary<F>(pub F);

impl<F: FnMut(usize, &Value, &ValueSet) -> Value> ChannelPolicy for Adversary<F> {
    fn choose(&mut self, t: usize, x: &Value, outputs: &ValueSet) -> Value {
        (self.0)(t, x, outputs)
    }
}

/// Named policies for command-line use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    First,
    /// Always the largest admissible output.
    Adversarial,
    Uniform,
}

impl PolicyKind {
    pub fn build(self, seed: u64) -> Box<dyn ChannelPolicy> {
        match self {
            PolicyKind::First => Box::new(FirstOutput),
            PolicyKind::Adversarial => Box::new(LastOutput),
            PolicyKind::Uniform => Box::new(SeededUniform::new(seed)),
        }
    }
}

impl std::str::FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "first" => Ok(PolicyKind::First),
            "adversarial" => Ok(PolicyKind::Adversarial),
            "uniform" => Ok(PolicyKind::Uniform),
            other => Err(format!("unknown channel policy `{other}` (first|adversarial|uniform)")),
        }
    }
}
