//! JSON file formats for ensembles, set families, channels and plants.
//!
//! Values follow one rule everywhere: integer JSON numbers are integers,
//! strings are parsed as integers, `p/q` or decimals when they can be and
//! are symbols otherwise, and arrays are tuples. Non-integer JSON numbers
//! are rejected in value positions so nothing is silently rounded.

use std::collections::BTreeMap;

use num::complex::Complex64;
use num::BigRational;
use serde::Deserialize;
use serde_json::{json, Value as Json};

use crate::channel::{Channel, ChannelError};
use crate::ensemble::{Ensemble, UvError};
use crate::estimation::{EstimationError, PlantModel};
use crate::interval::{IntervalError, IntervalUnion};
use crate::value::{Value, ValueError, ValueSet};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error(transparent)]
    Uv(#[from] UvError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Json(e.to_string())
    }
}

fn values(items: &[Json]) -> Result<Vec<Value>, FormatError> {
    Ok(items.iter().map(Value::from_json).collect::<Result<_, _>>()?)
}

fn value_set(items: &[Json]) -> Result<ValueSet, FormatError> {
    Ok(values(items)?.into_iter().collect())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EnsembleFile {
    variables: Vec<String>,
    samples: Vec<Vec<Json>>,
}

/// `{"variables": [...], "samples": [[...], ...]}`, one row per sample.
pub fn parse_ensemble(text: &str) -> Result<Ensemble, FormatError> {
    let file: EnsembleFile = serde_json::from_str(text)?;
    let rows = file.samples.iter().map(|r| values(r)).collect::<Result<Vec<_>, _>>()?;
    Ok(Ensemble::from_samples(file.variables, rows)?)
}

pub fn ensemble_to_json(e: &Ensemble) -> Json {
    let samples: Vec<Json> =
        (0..e.num_samples()).map(|i| Json::Array(e.sample(i).iter().map(Value::to_json).collect())).collect();
    json!({ "variables": e.variables(), "samples": samples })
}

/// A set family with labelled members, over a discrete or interval ground.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyFile {
    Discrete(Vec<(Value, ValueSet)>),
    Interval(Vec<(Value, IntervalUnion)>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    ground: String,
    members: Vec<RawMember>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMember {
    label: Json,
    set: Vec<Json>,
}

fn rational(j: &Json) -> Result<BigRational, FormatError> {
    Value::from_json(j)?
        .as_rational()
        .ok_or_else(|| FormatError::Invalid(format!("expected a number, got {j}")))
}

fn interval_union(items: &[Json]) -> Result<IntervalUnion, FormatError> {
    let pairs = items
        .iter()
        .map(|it| match it.as_array().map(Vec::as_slice) {
            Some([lo, hi]) => Ok((rational(lo)?, rational(hi)?)),
            _ => Err(FormatError::Invalid(format!("expected [lo, hi], got {it}"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(IntervalUnion::from_pairs(pairs)?)
}

/// `{"ground": "discrete"|"interval", "members": [{"label": v, "set": [...]}]}`.
/// Interval sets are lists of `[lo, hi]` pairs with integer or `"p/q"` ends.
pub fn parse_family(text: &str) -> Result<FamilyFile, FormatError> {
    let raw: RawFamily = serde_json::from_str(text)?;
    match raw.ground.as_str() {
        "discrete" => Ok(FamilyFile::Discrete(
            raw.members
                .iter()
                .map(|m| Ok((Value::from_json(&m.label)?, value_set(&m.set)?)))
                .collect::<Result<_, FormatError>>()?,
        )),
        "interval" => Ok(FamilyFile::Interval(
            raw.members
                .iter()
                .map(|m| Ok((Value::from_json(&m.label)?, interval_union(&m.set)?)))
                .collect::<Result<_, FormatError>>()?,
        )),
        other => Err(FormatError::Invalid(format!("unknown ground '{other}' (expected discrete or interval)"))),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelFile {
    inputs: Vec<Json>,
    outputs: Vec<Json>,
    transition: BTreeMap<String, Vec<Json>>,
}

/// `{"inputs": [...], "outputs": [...], "transition": {"x": [y, ...]}}`.
/// Transition keys are parsed as bare tokens.
pub fn parse_channel(text: &str) -> Result<Channel, FormatError> {
    let file: ChannelFile = serde_json::from_str(text)?;
    let transition = file
        .transition
        .iter()
        .map(|(k, ys)| Ok((Value::parse_token(k)?, value_set(ys)?)))
        .collect::<Result<BTreeMap<_, _>, FormatError>>()?;
    Ok(Channel::new(value_set(&file.inputs)?, value_set(&file.outputs)?, transition)?)
}

pub fn channel_to_json(c: &Channel) -> Json {
    let transition: serde_json::Map<String, Json> = c
        .transitions()
        .iter()
        .map(|(x, ys)| (x.to_string(), Json::Array(ys.iter().map(Value::to_json).collect())))
        .collect();
    json!({
        "inputs": c.inputs().iter().map(Value::to_json).collect::<Vec<_>>(),
        "outputs": c.outputs().iter().map(Value::to_json).collect::<Vec<_>>(),
        "transition": transition,
    })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawEigen {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PlantFile {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    #[serde(rename = "G")]
    g: Vec<Vec<f64>>,
    #[serde(default)]
    eigenvalues: Option<Vec<RawEigen>>,
    #[serde(default)]
    blocks: Option<Vec<usize>>,
    l: f64,
    #[serde(default)]
    c: f64,
}

/// `{"A": [[...]], "G": [[...]], "eigenvalues": [2, [0.9, 1.2], ...],
/// "blocks": [1, 2], "l": 1, "c": 0}`; `eigenvalues`, `blocks` and `c`
/// are optional.
pub fn parse_plant(text: &str) -> Result<PlantModel, FormatError> {
    let file: PlantFile = serde_json::from_str(text)?;
    let eigenvalues = file.eigenvalues.map(|es| {
        es.into_iter()
            .map(|e| match e {
                RawEigen::Real(re) => Complex64::new(re, 0.0),
                RawEigen::Complex([re, im]) => Complex64::new(re, im),
            })
            .collect()
    });
    Ok(PlantModel::new(file.a, file.g, eigenvalues, file.blocks, file.l, file.c)?)
}
