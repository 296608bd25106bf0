//! The `nsinfo` command line.
//!
//! Exit codes: 0 success, 1 a run that did not converge, 2 user or parse
//! error, 3 internal invariant failure, 4 search budget exceeded (partial
//! results are still written), 5 infeasible configuration.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use num::BigRational;
use serde_json::{json, Value as Json};
use sha2::{Digest, Sha256};

use crate::capacity::{c0_exact_if_certified, c0_lower_profile, codebook_witness, CapacityError, CapacityProfile};
use crate::channel::{Channel, PolicyKind};
use crate::ensemble::UvError;
use crate::estimation::{
    build_coder_estimator, feasibility_check, necessity_witness, simulate_disturbed, simulate_noiseless, EstimationError,
    NoiseKind, PlantModel, Verdict,
};
use crate::graph::{GraphError, SearchOptions};
use crate::io::{parse_channel, parse_ensemble, parse_family, parse_plant, FamilyFile, FormatError};
use crate::measures::{conditional_entropy0, hartley, klir_transmission, zero_info_of, Bits, MeasureError};
use crate::partition::{maximin_info, overlap_partition, Partition};
use crate::value::{parse_rational, Value, ValueSet};

#[derive(Debug, Parser)]
#[command(name = "nsinfo", version, about = "Nonstochastic information, zero-error capacity and state estimation")]
pub struct Cli {
    /// Seed for randomized channel and noise policies.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Information measures and partitions of an ensemble or set family.
    Info(InfoArgs),
    /// Zero-error capacity lower-bound profile of a channel.
    Channel(ChannelArgs),
    /// Feasibility verdict for estimating a plant over a channel.
    EstimateCheck(CheckArgs),
    /// Simulate the coder-estimator and write a CSV trace.
    EstimateRun(RunArgs),
    /// Hypercuboid packing counts for the converse bound.
    Witness(WitnessArgs),
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    /// Ensemble file.
    #[arg(required_unless_present = "family")]
    pub ensemble: Option<PathBuf>,
    #[arg(long, requires = "ensemble")]
    pub x: Option<String>,
    #[arg(long, requires = "ensemble")]
    pub y: Option<String>,
    /// Also report Hartley entropies, 0-information and Klir transmission.
    #[arg(long)]
    pub all_measures: bool,
    /// Set-family file; prints its overlap partition instead.
    #[arg(long, conflicts_with = "ensemble")]
    pub family: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    pub channel: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub tmax: usize,
    /// Print the profile as CSV instead of JSON.
    #[arg(long)]
    pub csv: bool,
    /// Write the confusability graph as adjacency lists.
    #[arg(long)]
    pub graph_out: Option<PathBuf>,
    /// Include a maximum codebook at `--tmax` with its maximin check.
    #[arg(long)]
    pub witness: bool,
    /// Time budget per independent-set search, in milliseconds.
    #[arg(long)]
    pub budget_ms: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub plant: PathBuf,
    pub channel: PathBuf,
    #[arg(long)]
    pub rho: f64,
    /// Largest block length searched for codebooks.
    #[arg(long, default_value_t = 4)]
    pub tmax: usize,
    /// Known zero-error capacity in bits, if not certified automatically.
    #[arg(long)]
    pub c0_known: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub plant: PathBuf,
    pub channel: PathBuf,
    #[arg(long)]
    pub rho: f64,
    /// Initial state: one value for every coordinate, or comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: String,
    #[arg(long = "T")]
    pub t_end: usize,
    /// Channel policy: first, adversarial or uniform.
    #[arg(long, default_value = "adversarial")]
    pub policy: PolicyKind,
    /// Disturbance bound, overriding the plant file.
    #[arg(long)]
    pub noise: Option<f64>,
    /// Noise policy: zero, adversarial, alternating or uniform.
    #[arg(long, default_value = "adversarial")]
    pub noise_policy: NoiseKind,
    #[arg(long, default_value_t = 4)]
    pub tmax: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    /// Eigenvalue moduli, comma-separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub eigs: Vec<f64>,
    #[arg(long)]
    pub rho: f64,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub tau: usize,
    #[arg(long, default_value_t = 1.0)]
    pub l: f64,
}

/// A failed command, classified by exit code.
#[derive(Debug)]
pub enum CliError {
    User(String),
    Internal(String),
    Budget(String),
    Infeasible(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::User(_) => 2,
            CliError::Internal(_) => 3,
            CliError::Budget(_) => 4,
            CliError::Infeasible(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::User(m) | CliError::Internal(m) | CliError::Budget(m) | CliError::Infeasible(m) => m,
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Estimation(inner) => inner.into(),
            other => CliError::User(other.to_string()),
        }
    }
}

impl From<MeasureError> for CliError {
    fn from(e: MeasureError) -> Self {
        match e {
            MeasureError::Internal(_) => CliError::Internal(e.to_string()),
            other => CliError::User(other.to_string()),
        }
    }
}

impl From<UvError> for CliError {
    fn from(e: UvError) -> Self {
        CliError::User(e.to_string())
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::BudgetExceeded { .. } | GraphError::TooLarge { .. } => CliError::Budget(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<CapacityError> for CliError {
    fn from(e: CapacityError) -> Self {
        match e {
            CapacityError::Search { source, .. } => source.into(),
            CapacityError::Measure(m) => m.into(),
            CapacityError::MaximinMismatch { .. } => CliError::Internal(e.to_string()),
            other => CliError::User(other.to_string()),
        }
    }
}

impl From<EstimationError> for CliError {
    fn from(e: EstimationError) -> Self {
        match e {
            EstimationError::Infeasible { .. } | EstimationError::ContractionInsufficient { .. } => {
                CliError::Infeasible(e.to_string())
            }
            EstimationError::Internal(_) => CliError::Internal(e.to_string()),
            EstimationError::Graph(g) => g.into(),
            other => CliError::User(other.to_string()),
        }
    }
}

struct Input {
    path: PathBuf,
    text: String,
    sha256: String,
}

impl Input {
    fn read(path: &Path) -> Result<Input, CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::User(format!("cannot read {}: {e}", path.display())))?;
        let sha256 = hex::encode(Sha256::digest(&bytes));
        let text = String::from_utf8(bytes).map_err(|_| CliError::User(format!("{} is not UTF-8", path.display())))?;
        Ok(Input { path: path.to_path_buf(), text, sha256 })
    }

    fn provenance(&self) -> Json {
        json!({ "path": self.path.display().to_string(), "sha256": self.sha256 })
    }

    fn comment(&self) -> String {
        format!("# input {} sha256 {}", self.path.display(), self.sha256)
    }
}

/// Where a command's main output goes.
struct Sink<'a> {
    out: Option<&'a Path>,
    stdout: &'a mut dyn Write,
}

impl Sink<'_> {
    fn emit(&mut self, text: &str) -> Result<(), CliError> {
        match self.out {
            Some(p) => fs::write(p, text).map_err(|e| CliError::User(format!("cannot write {}: {e}", p.display()))),
            None => self.stdout.write_all(text.as_bytes()).map_err(|e| CliError::Internal(e.to_string())),
        }
    }

    fn emit_json(&mut self, v: &Json) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Internal(e.to_string()))?;
        s.push('\n');
        self.emit(&s)
    }
}

fn bits(b: Bits) -> Json {
    serde_json::to_value(b).expect("bits serialize")
}

fn set_json(s: &ValueSet) -> Json {
    Json::Array(s.iter().map(Value::to_json).collect())
}

fn provenance_json<S>(p: &Partition<S>) -> Json {
    Json::Object(p.provenance.iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
}

fn search_options(budget_ms: Option<u64>) -> SearchOptions {
    SearchOptions { budget: budget_ms.map(Duration::from_millis), ..SearchOptions::default() }
}

fn cmd_info(args: &InfoArgs, sink: &mut Sink) -> Result<(), CliError> {
    if let Some(path) = &args.family {
        let input = Input::read(path)?;
        let report = match parse_family(&input.text)? {
            FamilyFile::Discrete(members) => {
                let p = overlap_partition(&members)?;
                json!({
                    "ground": "discrete",
                    "blocks": p.blocks.iter().map(set_json).collect::<Vec<_>>(),
                    "provenance": provenance_json(&p),
                    "bits": bits(p.bits()),
                    "input": input.provenance(),
                })
            }
            FamilyFile::Interval(members) => {
                let p = overlap_partition(&members)?;
                json!({
                    "ground": "interval",
                    "blocks": p.blocks.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
                    "provenance": provenance_json(&p),
                    "bits": bits(p.bits()),
                    "input": input.provenance(),
                })
            }
        };
        return sink.emit_json(&report);
    }

    let path = args.ensemble.as_ref().expect("clap requires an ensemble without --family");
    let input = Input::read(path)?;
    let e = parse_ensemble(&input.text)?;
    let (x, y) = match (&args.x, &args.y) {
        (Some(x), Some(y)) => (x.as_str(), y.as_str()),
        _ => return Err(CliError::User("--x and --y are required with an ensemble".into())),
    };
    let m = maximin_info(&e, x, y)?;
    let mut report = json!({
        "Istar": bits(m.bits),
        "overlap_blocks": m.overlap.blocks.iter().map(set_json).collect::<Vec<_>>(),
        "taxicab_blocks": m.taxicab.blocks.iter().map(set_json).collect::<Vec<_>>(),
        "provenance": provenance_json(&m.overlap),
        "input": input.provenance(),
    });
    if args.all_measures {
        let extra = json!({
            "H0_x": bits(hartley(&e.marginal_range(x)?)?),
            "H0_y": bits(hartley(&e.marginal_range(y)?)?),
            "H0_x_given_y": bits(conditional_entropy0(&e.conditional_family(x, &[y])?.members)?),
            "I0_xy": bits(zero_info_of(&e, y, x)?),
            "I0_yx": bits(zero_info_of(&e, x, y)?),
            "T_klir": bits(klir_transmission(&e, x, y)?),
        });
        report.as_object_mut().expect("object").extend(extra.as_object().expect("object").clone());
    }
    sink.emit_json(&report)
}

fn profile_json(profile: &CapacityProfile) -> Json {
    Json::Array(
        profile.records.iter().map(|r| json!({ "tau": r.tau, "alpha": r.alpha, "rate_bits": r.rate_bits })).collect(),
    )
}

fn cmd_channel(args: &ChannelArgs, sink: &mut Sink, stderr: &mut dyn Write) -> Result<(), CliError> {
    let input = Input::read(&args.channel)?;
    let channel = parse_channel(&input.text)?;
    if args.tmax == 0 {
        return Err(CliError::User("--tmax must be at least 1".into()));
    }
    let opts = search_options(args.budget_ms);
    if let Some(p) = &args.graph_out {
        fs::write(p, channel.confusability_graph().adjacency_text())
            .map_err(|e| CliError::User(format!("cannot write {}: {e}", p.display())))?;
    }
    let (profile, failure) = match c0_lower_profile(&channel, args.tmax, opts) {
        Ok(p) => (p, None),
        Err(CapacityError::Search { partial, source, .. }) => (partial, Some(CliError::from(source))),
        Err(e) => return Err(e.into()),
    };
    if args.csv {
        let _ = writeln!(stderr, "{}", input.comment());
        sink.emit(&profile.to_csv())?;
    } else {
        let mut report = json!({
            "profile": profile_json(&profile),
            "best_rate_bits": if profile.records.is_empty() { Json::Null } else { json!(profile.best_rate) },
            "complete": failure.is_none(),
            "input": input.provenance(),
        });
        if failure.is_none() {
            let exact = c0_exact_if_certified(&channel, opts)?;
            report["c0_certified_bits"] = exact.map_or(Json::Null, |b| json!(b));
            if args.witness {
                let w = codebook_witness(&channel, args.tmax, opts)?;
                report["witness"] = json!({
                    "tau": w.codebook.tau,
                    "codewords": w.codebook.words.iter().map(Value::to_json).collect::<Vec<_>>(),
                    "overlap_blocks": w.overlap_blocks,
                    "maximin_bits": bits(w.maximin),
                });
            }
        }
        sink.emit_json(&report)?;
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn load_pair(plant: &Path, channel: &Path) -> Result<(Input, PlantModel, Input, Channel), CliError> {
    let pin = Input::read(plant)?;
    let p = parse_plant(&pin.text)?;
    let cin = Input::read(channel)?;
    let c = parse_channel(&cin.text)?;
    Ok((pin, p, cin, c))
}

fn cmd_estimate_check(args: &CheckArgs, sink: &mut Sink) -> Result<(), CliError> {
    let (pin, plant, cin, channel) = load_pair(&args.plant, &args.channel)?;
    if args.tmax == 0 {
        return Err(CliError::User("--tmax must be at least 1".into()));
    }
    let opts = SearchOptions::default();
    // Completed block lengths still give a certified bound when a longer one
    // is too large to search exactly.
    let profile = match c0_lower_profile(&channel, args.tmax, opts) {
        Ok(p) => p,
        Err(CapacityError::Search { partial, source: GraphError::TooLarge { .. }, .. }) if !partial.records.is_empty() => partial,
        Err(e) => return Err(e.into()),
    };
    let searched = profile.records.len();
    let known = match args.c0_known {
        Some(k) => Some(Bits(k)),
        None => c0_exact_if_certified(&channel, opts)?.map(Bits),
    };
    let lower = Bits(profile.best_rate);
    let f = feasibility_check(&plant, args.rho, lower, known)?;
    let (tau, size) = if f.verdict == Verdict::Achievable {
        match build_coder_estimator(&plant, &channel, args.rho, searched, opts) {
            Ok(c) => (json!(c.tau()), json!(c.codebook().len())),
            Err(EstimationError::Infeasible { .. } | EstimationError::UnsupportedStructure(_)) => (Json::Null, Json::Null),
            Err(e) => return Err(e.into()),
        }
    } else {
        (Json::Null, Json::Null)
    };
    sink.emit_json(&json!({
        "verdict": f.verdict.to_string(),
        "H_rho_bits": bits(f.h_rho),
        "c0_lower_bits": bits(lower),
        "c0_known_bits": known.map_or(Json::Null, bits),
        "tau": tau,
        "codebook_size": size,
        "tmax_searched": searched,
        "inputs": [pin.provenance(), cin.provenance()],
    }))
}

fn parse_x0(text: &str, n: usize) -> Result<Vec<BigRational>, CliError> {
    let parts = text
        .split(',')
        .map(|s| match parse_rational(s.trim()) {
            Some(Ok(r)) => Ok(r),
            _ => Err(CliError::User(format!("cannot read '{s}' as a number"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    match parts.len() {
        1 => Ok(vec![parts[0].clone(); n]),
        k if k == n => Ok(parts),
        k => Err(CliError::User(format!("--x0 has {k} entries, plant has {n}"))),
    }
}

fn cmd_estimate_run(args: &RunArgs, seed: u64, sink: &mut Sink, stderr: &mut dyn Write) -> Result<bool, CliError> {
    let (pin, mut plant, cin, channel) = load_pair(&args.plant, &args.channel)?;
    if let Some(c) = args.noise {
        plant = plant.with_noise(c)?;
    }
    let x0 = parse_x0(&args.x0, plant.dim())?;
    plant.check_initial(&x0)?;
    let coder = build_coder_estimator(&plant, &channel, args.rho, args.tmax, SearchOptions::default())?;
    let mut policy = args.policy.build(seed);
    let trace = if plant.c() > 0.0 {
        let mut noise = args.noise_policy.build(seed);
        simulate_disturbed(&plant, &coder, &channel, policy.as_mut(), &x0, noise.as_mut(), args.t_end)?
    } else {
        simulate_noiseless(&plant, &coder, &channel, policy.as_mut(), &x0, args.t_end)?
    };
    let _ = writeln!(stderr, "{}", pin.comment());
    let _ = writeln!(stderr, "{}", cin.comment());
    let _ = writeln!(stderr, "# tau {} codebook {} cells {:?}", coder.tau(), coder.codebook().len(), coder.cells());
    sink.emit(&trace.to_csv())?;
    let first = &trace.scaled_exact[0];
    let last = trace.scaled_exact.last().expect("at least one row");
    Ok(last < first || (num::Zero::is_zero(first) && num::Zero::is_zero(last)))
}

fn cmd_witness(args: &WitnessArgs, sink: &mut Sink) -> Result<(), CliError> {
    let eigs: Vec<_> = args.eigs.iter().map(|&m| num::complex::Complex64::new(m, 0.0)).collect();
    let w = necessity_witness(&eigs, args.rho, args.eps, args.tau, args.l)?;
    sink.emit_json(&json!({
        "k": w.k,
        "count": w.count,
        "bound_bits": bits(w.bound_bits),
        "closed_form_bits": bits(w.closed_form_bits),
        "eps": w.eps,
        "tau": w.tau,
    }))
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let out = match &cli.command {
        Command::Info(a) => a.out.as_deref(),
        Command::Channel(a) => a.out.as_deref(),
        Command::EstimateCheck(a) => a.out.as_deref(),
        Command::EstimateRun(a) => a.out.as_deref(),
        Command::Witness(_) => None,
    };
    let mut sink = Sink { out, stdout };
    let result = match &cli.command {
        Command::Info(a) => cmd_info(a, &mut sink).map(|_| true),
        Command::Channel(a) => cmd_channel(a, &mut sink, stderr).map(|_| true),
        Command::EstimateCheck(a) => cmd_estimate_check(a, &mut sink).map(|_| true),
        Command::EstimateRun(a) => cmd_estimate_run(a, cli.seed, &mut sink, stderr),
        Command::Witness(a) => cmd_witness(a, &mut sink).map(|_| true),
    };
    match result {
        Ok(true) => 0,
        Ok(false) => {
            let _ = writeln!(stderr, "final scaled error is not below the initial one");
            1
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.code()
        }
    }
}
