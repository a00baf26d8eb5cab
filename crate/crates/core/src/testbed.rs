//! Randomized benchmark harness: generates random bpas, combines them over a
//! number of steps, applies each reduction method, and measures the decision
//! errors against the exact (unreduced) result. Fully deterministic for a
//! given configuration, including under parallel execution.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;

use crate::approx::ApproxMethod;
use crate::bpa::Bpa;
use crate::error::EvidenceError;
use crate::frame::Frame;
use crate::metrics::{error_triple, ErrorTriple};
use crate::set::FocalSet;

/// Name of the generator recorded in report metadata.
pub const RNG_NAME: &str = "chacha8";

/// Parameters of the random bpa generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenConfig {
    pub frame_size: usize,
    pub focal_count: usize,
    pub seed: u64,
    /// Rate of the exponential draw behind each stick-breaking fraction.
    pub lambda: f64,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig {
            frame_size: 32,
            focal_count: 8,
            seed: 0,
            lambda: 1.0,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), EvidenceError> {
        let fail = |msg: String| Err(EvidenceError::InvalidParameter(msg));
        if self.frame_size == 0 || self.frame_size > 64 {
            return fail(format!(
                "frame_size must be in 1..=64, got {}",
                self.frame_size
            ));
        }
        let distinct_subsets = (1u128 << self.frame_size) - 1;
        if self.focal_count == 0 || self.focal_count as u128 > distinct_subsets {
            return fail(format!(
                "focal_count must be in 1..={distinct_subsets}, got {}",
                self.focal_count
            ));
        }
        if !self.lambda.is_finite() || self.lambda <= 0.0 {
            return fail(format!("lambda must be positive, got {}", self.lambda));
        }
        Ok(())
    }
}

/// Deterministic per-trial generator: one master seed, one ChaCha stream per
/// trial index, so trials are independent and order-insensitive.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Draws a random bpa: masses come from stick-breaking with exponential draws
/// (each fraction `1 - exp(-lambda * X)` is uniform on (0,1) for `X ~
/// Exp(lambda)`), the last focal set receiving the remainder so the total is
/// 1 by construction; focal sets are uniform random nonempty subsets, redrawn
/// on collision.
pub fn gen_random_bpa<R: Rng + ?Sized>(cfg: &GenConfig, rng: &mut R) -> Result<Bpa, EvidenceError> {
    cfg.validate()?;
    let frame = Frame::of_size(cfg.frame_size)?;
    Ok(gen_with_frame(cfg, &frame, rng))
}

fn gen_with_frame<R: Rng + ?Sized>(cfg: &GenConfig, frame: &Frame, rng: &mut R) -> Bpa {
    let exp = Exp::new(cfg.lambda).expect("validated lambda");
    let mask = frame.mask();
    let mut entries: BTreeMap<FocalSet, f64> = BTreeMap::new();
    let mut rest = 1.0f64;
    for _ in 0..cfg.focal_count - 1 {
        // Degenerate roundings (mass of 0, or all of `rest`) are redrawn so
        // every entry stays strictly positive.
        let mass = loop {
            let x: f64 = exp.sample(rng);
            let fraction = 1.0 - (-cfg.lambda * x).exp();
            let mass = fraction * rest;
            if mass > 0.0 && mass < rest {
                break mass;
            }
        };
        let set = fresh_subset(rng, mask, &entries);
        entries.insert(set, mass);
        rest -= mass;
    }
    let set = fresh_subset(rng, mask, &entries);
    entries.insert(set, rest);
    Bpa::from_parts_unpruned(frame.clone(), entries)
}

fn fresh_subset<R: Rng + ?Sized>(
    rng: &mut R,
    mask: u64,
    used: &BTreeMap<FocalSet, f64>,
) -> FocalSet {
    loop {
        let bits = rng.random::<u64>() & mask;
        if bits == 0 {
            continue;
        }
        let set = FocalSet::from_bits(bits);
        if !used.contains_key(&set) {
            return set;
        }
    }
}

/// A reduction method with the name it carries in reports.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedMethod {
    pub name: String,
    pub method: ApproxMethod,
}

impl NamedMethod {
    pub fn new(name: impl Into<String>, method: ApproxMethod) -> NamedMethod {
        NamedMethod {
            name: name.into(),
            method,
        }
    }
}

/// The canonical benchmark suite, in report order.
pub fn default_method_suite() -> Vec<NamedMethod> {
    vec![
        NamedMethod::new("D1_8", ApproxMethod::D1 { k: 8 }),
        NamedMethod::new("D1_30", ApproxMethod::D1 { k: 30 }),
        NamedMethod::new("Summ_8", ApproxMethod::Summarize { k: 8 }),
        NamedMethod::new("Summ_30", ApproxMethod::Summarize { k: 30 }),
        NamedMethod::new("Bayes", ApproxMethod::Bayesian),
        NamedMethod::new(
            "klx_01",
            ApproxMethod::Klx {
                k: 1,
                l: None,
                x: 0.01,
            },
        ),
        NamedMethod::new(
            "klx_30",
            ApproxMethod::Klx {
                k: 1,
                l: Some(30),
                x: 1.0,
            },
        ),
    ]
}

/// Looks a method up by its canonical suite name.
pub fn method_by_name(name: &str) -> Option<ApproxMethod> {
    default_method_suite()
        .into_iter()
        .find(|nm| nm.name == name)
        .map(|nm| nm.method)
}

/// What each method approximates at every step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackMode {
    /// Each method re-combines its own previous approximation with the fresh
    /// bpa, so approximation error compounds across steps.
    Cumulative,
    /// Each method approximates the exact accumulated bpa directly.
    FromExact,
}

impl fmt::Display for TrackMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrackMode::Cumulative => write!(f, "cumulative"),
            TrackMode::FromExact => write!(f, "from-exact"),
        }
    }
}

impl FromStr for TrackMode {
    type Err = String;

    fn from_str(s: &str) -> Result<TrackMode, String> {
        match s {
            "cumulative" => Ok(TrackMode::Cumulative),
            "from-exact" => Ok(TrackMode::FromExact),
            other => Err(format!(
                "unknown track mode `{other}` (expected `cumulative` or `from-exact`)"
            )),
        }
    }
}

/// Full benchmark configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub gen: GenConfig,
    pub methods: Vec<NamedMethod>,
    /// Combination steps per trial.
    pub combinations: usize,
    pub trials: usize,
    pub track: TrackMode,
    /// Run trials on the rayon pool. Results are identical either way.
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> ExperimentConfig {
        ExperimentConfig {
            gen: GenConfig::default(),
            methods: default_method_suite(),
            combinations: 5,
            trials: 1000,
            track: TrackMode::Cumulative,
            parallel: true,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), EvidenceError> {
        self.gen.validate()?;
        let fail = |msg: &str| Err(EvidenceError::InvalidParameter(msg.into()));
        if self.combinations == 0 {
            return fail("combinations must be at least 1");
        }
        if self.trials == 0 {
            return fail("trials must be at least 1");
        }
        if self.methods.is_empty() {
            return fail("at least one method is required");
        }
        for nm in &self.methods {
            nm.method.validate()?;
        }
        Ok(())
    }
}

/// One method's measurement at one combination step of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub method: String,
    pub step: usize,
    /// Focal count of the exact accumulated bpa after this step.
    pub n_original: usize,
    /// Focal count of the method's output at this step.
    pub n_approx: usize,
    pub errors: ErrorTriple,
}

/// Mean/min/max of one quantity over the completed trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    fn from_values<I: IntoIterator<Item = f64>>(values: I) -> Option<Summary> {
        let mut count = 0usize;
        let mut sum = 0.0;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for v in values {
            count += 1;
            sum += v;
            min = min.min(v);
            max = max.max(v);
        }
        if count == 0 {
            return None;
        }
        Some(Summary {
            mean: sum / count as f64,
            min,
            max,
        })
    }
}

/// Aggregates for one (method, step) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct StatRow {
    pub method: String,
    pub step: usize,
    /// Completed trials feeding this row.
    pub trials: usize,
    pub n_original: Summary,
    pub n_approx: Summary,
    pub error1: Summary,
    pub error2: Summary,
    pub error3: Summary,
}

/// Aggregated results of a run. Rows are ordered by method (configuration
/// order), then step.
#[derive(Debug, Clone, PartialEq)]
pub struct RunStats {
    pub rows: Vec<StatRow>,
    pub completed_trials: usize,
    /// Trials discarded because some combination was totally conflicting.
    pub aborted_trials: usize,
}

/// Everything a run produces: the per-record stream plus the aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub records: Vec<TrialRecord>,
    pub stats: RunStats,
}

/// Runs the benchmark. Records arrive in (trial, step, method) order; trials
/// hitting total conflict in any track are dropped entirely and counted in
/// [`RunStats::aborted_trials`].
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, EvidenceError> {
    cfg.validate()?;
    let frame = Frame::of_size(cfg.gen.frame_size)?;
    let outcomes: Vec<Option<Vec<TrialRecord>>> = if cfg.parallel {
        (0..cfg.trials)
            .into_par_iter()
            .map(|trial| run_trial(cfg, &frame, trial))
            .collect()
    } else {
        (0..cfg.trials)
            .map(|trial| run_trial(cfg, &frame, trial))
            .collect()
    };
    let aborted_trials = outcomes.iter().filter(|o| o.is_none()).count();
    let completed_trials = cfg.trials - aborted_trials;
    let records: Vec<TrialRecord> = outcomes.into_iter().flatten().flatten().collect();
    let stats = aggregate(cfg, &records, completed_trials, aborted_trials);
    Ok(ExperimentOutput { records, stats })
}

fn run_trial(cfg: &ExperimentConfig, frame: &Frame, trial: usize) -> Option<Vec<TrialRecord>> {
    let mut rng = trial_rng(cfg.gen.seed, trial as u64);
    let mut exact = gen_with_frame(&cfg.gen, frame, &mut rng);
    let mut tracks: Vec<Bpa> = match cfg.track {
        TrackMode::Cumulative => vec![exact.clone(); cfg.methods.len()],
        TrackMode::FromExact => Vec::new(),
    };
    let mut records = Vec::with_capacity(cfg.combinations * cfg.methods.len());
    for step in 1..=cfg.combinations {
        let fresh = gen_with_frame(&cfg.gen, frame, &mut rng);
        exact = exact.combine(&fresh).ok()?;
        let p0 = exact.pignistic();
        for (idx, nm) in cfg.methods.iter().enumerate() {
            let input = match cfg.track {
                TrackMode::Cumulative => tracks[idx].combine(&fresh).ok()?,
                TrackMode::FromExact => exact.clone(),
            };
            let reduced = nm.method.apply(&input);
            let papp = reduced.pignistic();
            let errors = error_triple(&p0, &papp).expect("same frame");
            records.push(TrialRecord {
                trial,
                method: nm.name.clone(),
                step,
                n_original: exact.focal_count(),
                n_approx: reduced.focal_count(),
                errors,
            });
            if cfg.track == TrackMode::Cumulative {
                tracks[idx] = reduced;
            }
        }
    }
    Some(records)
}

fn aggregate(
    cfg: &ExperimentConfig,
    records: &[TrialRecord],
    completed_trials: usize,
    aborted_trials: usize,
) -> RunStats {
    let mut rows = Vec::new();
    for nm in &cfg.methods {
        for step in 1..=cfg.combinations {
            let cell: Vec<&TrialRecord> = records
                .iter()
                .filter(|r| r.step == step && r.method == nm.name)
                .collect();
            let summary =
                |f: &dyn Fn(&TrialRecord) -> f64| Summary::from_values(cell.iter().map(|r| f(r)));
            let (Some(n_original), Some(n_approx), Some(error1), Some(error2), Some(error3)) = (
                summary(&|r| r.n_original as f64),
                summary(&|r| r.n_approx as f64),
                summary(&|r| r.errors.error1),
                summary(&|r| r.errors.error2 as f64),
                summary(&|r| r.errors.error3 as f64),
            ) else {
                continue;
            };
            rows.push(StatRow {
                method: nm.name.clone(),
                step,
                trials: cell.len(),
                n_original,
                n_approx,
                error1,
                error2,
                error3,
            });
        }
    }
    RunStats {
        rows,
        completed_trials,
        aborted_trials,
    }
}
