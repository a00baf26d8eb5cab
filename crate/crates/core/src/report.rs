//! Text interfaces of the benchmark: the `key = value` run configuration and
//! the two CSV reports (per-record stream and per-(method, step) aggregates).
//! All output is deterministic for a given run.

use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::testbed::{
    default_method_suite, method_by_name, ExperimentConfig, NamedMethod, RunStats, TrialRecord,
    RNG_NAME,
};

/// Formats a value with six significant digits, without scientific notation.
pub fn fmt_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    debug_assert!(x.is_finite());
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (5 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Counts (and min/max of counts) are integral; print them without decimals.
fn fmt_count(x: f64) -> String {
    format!("{x}")
}

pub const TRIALS_CSV_HEADER: &str = "method,step,trial,n_original,n_approx,error1,error2,error3";

/// Per-record CSV: one row per (trial, step, method) measurement, in record
/// order.
pub fn trials_csv(records: &[TrialRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(TRIALS_CSV_HEADER);
    out.push('\n');
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.method,
            r.step,
            r.trial,
            r.n_original,
            r.n_approx,
            fmt_sig6(r.errors.error1),
            r.errors.error2,
            r.errors.error3
        )
        .expect("writing to String cannot fail");
    }
    out
}

pub const STATS_CSV_HEADER: &str = "method,step,trials,\
orig_mean,orig_min,orig_max,approx_mean,approx_min,approx_max,\
error1_mean,error1_min,error1_max,error2_mean,error2_min,error2_max,\
error3_mean,error3_min,error3_max";

/// Aggregate CSV: a metadata comment line (seed, generator, track mode,
/// version, shape of the run), a header, then one row per (method, step).
pub fn stats_csv(cfg: &ExperimentConfig, stats: &RunStats) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "# seed={} rng={} track={} version={} frame_size={} focal_count={} lambda={} \
         combinations={} trials={} completed={} aborted={}",
        cfg.gen.seed,
        RNG_NAME,
        cfg.track,
        env!("CARGO_PKG_VERSION"),
        cfg.gen.frame_size,
        cfg.gen.focal_count,
        cfg.gen.lambda,
        cfg.combinations,
        cfg.trials,
        stats.completed_trials,
        stats.aborted_trials
    )
    .expect("writing to String cannot fail");
    out.push_str(STATS_CSV_HEADER);
    out.push('\n');
    for row in &stats.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            row.method,
            row.step,
            row.trials,
            fmt_sig6(row.n_original.mean),
            fmt_count(row.n_original.min),
            fmt_count(row.n_original.max),
            fmt_sig6(row.n_approx.mean),
            fmt_count(row.n_approx.min),
            fmt_count(row.n_approx.max),
            fmt_sig6(row.error1.mean),
            fmt_sig6(row.error1.min),
            fmt_sig6(row.error1.max),
            fmt_sig6(row.error2.mean),
            fmt_count(row.error2.min),
            fmt_count(row.error2.max),
            fmt_sig6(row.error3.mean),
            fmt_count(row.error3.min),
            fmt_count(row.error3.max)
        )
        .expect("writing to String cannot fail");
    }
    out
}

/// Problem in a run configuration file; `line` is 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("config line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

/// Parses a comma-separated method list. Each entry is a canonical suite name;
/// `default` expands to the whole suite.
pub fn parse_method_list(value: &str) -> Result<Vec<NamedMethod>, String> {
    let mut out = Vec::new();
    for name in value.split(',') {
        let name = name.trim();
        if name.is_empty() {
            return Err("empty method name".to_string());
        }
        if name == "default" {
            out.extend(default_method_suite());
            continue;
        }
        match method_by_name(name) {
            Some(method) => out.push(NamedMethod::new(name, method)),
            None => {
                let known: Vec<String> = default_method_suite()
                    .into_iter()
                    .map(|nm| nm.name)
                    .collect();
                return Err(format!(
                    "unknown method `{name}` (expected `default` or one of: {})",
                    known.join(", ")
                ));
            }
        }
    }
    Ok(out)
}

/// Parses a `key = value` run configuration. Unspecified keys keep their
/// defaults; unknown keys are rejected. `#` starts a comment.
pub fn parse_experiment_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    parse_experiment_config_onto(text, ExperimentConfig::default())
}

/// [`parse_experiment_config`] with explicit fallback values for keys the
/// text does not set.
pub fn parse_experiment_config_onto(
    text: &str,
    base: ExperimentConfig,
) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = base;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fail = |message: String| -> ConfigError {
            ConfigError {
                line: line_no,
                message,
            }
        };
        let Some((key, value)) = line.split_once('=') else {
            return Err(fail("expected `key = value`".to_string()));
        };
        let key = key.trim();
        let value = value.trim();
        fn number<T: std::str::FromStr>(
            key: &str,
            value: &str,
            fail: &dyn Fn(String) -> ConfigError,
        ) -> Result<T, ConfigError> {
            value
                .parse()
                .map_err(|_| fail(format!("invalid value `{value}` for `{key}`")))
        }
        match key {
            "frame_size" => cfg.gen.frame_size = number(key, value, &fail)?,
            "focal_count" => cfg.gen.focal_count = number(key, value, &fail)?,
            "seed" => cfg.gen.seed = number(key, value, &fail)?,
            "lambda" => cfg.gen.lambda = number(key, value, &fail)?,
            "combinations" => cfg.combinations = number(key, value, &fail)?,
            "trials" => cfg.trials = number(key, value, &fail)?,
            "track" => cfg.track = value.parse().map_err(fail)?,
            "parallel" => cfg.parallel = number(key, value, &fail)?,
            "methods" => cfg.methods = parse_method_list(value).map_err(fail)?,
            unknown => return Err(fail(format!("unknown config key `{unknown}`"))),
        }
    }
    Ok(cfg)
}

/// Human-readable echo of a configuration, parseable by
/// [`parse_experiment_config`].
pub fn format_experiment_config(cfg: &ExperimentConfig) -> String {
    let methods: Vec<&str> = cfg.methods.iter().map(|nm| nm.name.as_str()).collect();
    format!(
        "frame_size = {}\nfocal_count = {}\nseed = {}\nlambda = {}\n\
         combinations = {}\ntrials = {}\ntrack = {}\nparallel = {}\nmethods = {}\n",
        cfg.gen.frame_size,
        cfg.gen.focal_count,
        cfg.gen.seed,
        cfg.gen.lambda,
        cfg.combinations,
        cfg.trials,
        cfg.track,
        cfg.parallel,
        methods.join(",")
    )
}

impl fmt::Display for NamedMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.name, self.method)
    }
}
