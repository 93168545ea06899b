//! Randomized suite runner and reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inequalities::{robustness_of, InequalityCheck, Robustness, Status, CHECK_IDS};

use super::gen::OperatorKind;
use super::registry::{checker_info, evaluate, gen_instance, uses_symmetric, Setting, SpaceFamily, TrialConfig};

pub const REPORT_VERSION: u32 = 1;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// FNV-1a over bytes.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one trial; independent of scheduling.
pub fn trial_seed(master: u64, id: &str, family: SpaceFamily, dim: usize, trial: usize) -> u64 {
    let tag = fnv1a(format!("{id}/{}/{dim}/{trial}", family.name()).as_bytes());
    splitmix(master ^ splitmix(tag))
}

/// One trial of one checker, fully determined by its seed.
pub fn run_trial(
    id: &str,
    config: &TrialConfig,
    family: SpaceFamily,
    dim: usize,
    trial: usize,
    kind_override: Option<OperatorKind>,
) -> Result<InequalityCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(config.seed, id, family, dim, trial));
    let setting = Setting::build(family, dim, config, uses_symmetric(id, trial), &mut rng)?;
    let inst = gen_instance(id, config, dim, setting.dsum.dims(), trial, kind_override, &mut rng)?;
    evaluate(id, &setting, &inst)
}

/// Per-checker summary over all trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckAggregate {
    pub robustness: Robustness,
    pub trials: usize,
    pub pass: usize,
    pub suspect: usize,
    pub fail: usize,
    /// Trials that errored; they are also counted in `fail`.
    pub errors: usize,
    pub min_slack: f64,
    pub mean_slack: f64,
    pub max_ratio: f64,
    /// FNV-1a digest of the witness attaining `max_ratio`.
    pub witness_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_error: Option<String>,
    /// The first FAIL or SUSPECT check, kept for diagnosis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<InequalityCheck>,
}

impl CheckAggregate {
    fn new(robustness: Robustness) -> Self {
        Self {
            robustness,
            trials: 0,
            pass: 0,
            suspect: 0,
            fail: 0,
            errors: 0,
            min_slack: f64::INFINITY,
            mean_slack: 0.0,
            max_ratio: 0.0,
            witness_digest: String::new(),
            first_error: None,
            first_violation: None,
        }
    }

    fn record(&mut self, outcome: &Result<InequalityCheck>) {
        self.trials += 1;
        match outcome {
            Err(e) => {
                self.fail += 1;
                self.errors += 1;
                self.first_error.get_or_insert_with(|| e.to_string());
            }
            Ok(check) => {
                match check.status {
                    Status::Pass => self.pass += 1,
                    Status::Suspect => self.suspect += 1,
                    Status::Fail => self.fail += 1,
                }
                if check.status != Status::Pass && self.first_violation.is_none() {
                    self.first_violation = Some(check.clone());
                }
                let slack = check.slack;
                self.min_slack = self.min_slack.min(slack);
                // running mean over successful trials
                let ok = (self.trials - self.errors) as f64;
                self.mean_slack += (slack - self.mean_slack) / ok;
                let ratio = check.ratio();
                if ratio > self.max_ratio || self.witness_digest.is_empty() {
                    self.max_ratio = self.max_ratio.max(ratio);
                    let json = serde_json::to_string(&check.witness).unwrap_or_default();
                    self.witness_digest = format!("{:016x}", fnv1a(json.as_bytes()));
                }
            }
        }
    }

    /// Replaces the infinite placeholder when no trial produced a check, so
    /// the aggregate stays representable in JSON.
    fn finish(&mut self) {
        if !self.min_slack.is_finite() {
            self.min_slack = 0.0;
        }
    }

    pub fn status(&self) -> Status {
        if self.fail > 0 {
            Status::Fail
        } else if self.suspect > 0 {
            Status::Suspect
        } else {
            Status::Pass
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: u32,
    pub seed: u64,
    pub config: TrialConfig,
    pub checks: BTreeMap<String, CheckAggregate>,
    pub wall_ms: u64,
}

impl Report {
    pub fn totals(&self) -> (usize, usize, usize) {
        self.checks
            .values()
            .fold((0, 0, 0), |(p, s, f), a| (p + a.pass, s + a.suspect, f + a.fail))
    }

    /// 0 when everything passed, 2 when something is SUSPECT but nothing
    /// failed, 1 on any FAIL.
    pub fn exit_code(&self) -> i32 {
        match self.checks.values().map(CheckAggregate::status).max() {
            Some(Status::Fail) => 1,
            Some(Status::Suspect) => 2,
            _ => 0,
        }
    }
}

/// Runs `ids` over every family, dimension and trial of `config`.
pub fn run_suite(config: &TrialConfig, ids: &[&str]) -> Result<Report> {
    config.validate()?;
    if ids.is_empty() {
        return Err(Error::BadConfig("no checkers selected".into()));
    }
    for id in ids {
        checker_info(id)?;
    }
    let start = Instant::now();
    let mut tasks = Vec::new();
    for &id in ids {
        for &family in &config.families {
            for &dim in &config.dims {
                for trial in 0..config.trials {
                    tasks.push((id, family, dim, trial));
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .map_err(|e| Error::BadConfig(format!("thread pool: {e}")))?;
    let outcomes: Vec<Result<InequalityCheck>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(id, family, dim, trial)| run_trial(id, config, family, dim, trial, None))
            .collect()
    });

    let mut checks = BTreeMap::new();
    for (&(id, ..), outcome) in tasks.iter().zip(&outcomes) {
        checks
            .entry(id.to_string())
            .or_insert_with(|| CheckAggregate::new(robustness_of(id).expect("validated id")))
            .record(outcome);
    }
    checks.values_mut().for_each(CheckAggregate::finish);
    Ok(Report {
        version: REPORT_VERSION,
        seed: config.seed,
        config: config.clone(),
        checks,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

/// Resolves a suite name or comma-separated id list.
pub fn resolve_checks(spec: &str) -> Result<Vec<&'static str>> {
    match spec {
        "all" => Ok(CHECK_IDS.to_vec()),
        _ => spec
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                CHECK_IDS
                    .iter()
                    .copied()
                    .find(|id| *id == s)
                    .ok_or_else(|| Error::UnknownChecker(s.to_string()))
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    CsvSummary,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" | "csv-summary" => Ok(Self::CsvSummary),
            other => Err(Error::BadConfig(format!("unknown report format `{other}`"))),
        }
    }
}

pub const CSV_HEADER: &str =
    "check_id,robustness,trials,pass,suspect,fail,min_slack,mean_slack,max_ratio,witness_digest";

pub fn render_report(report: &Report, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        ReportFormat::CsvSummary => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for (id, a) in &report.checks {
                let robustness = match a.robustness {
                    Robustness::PointwiseRobust => "pointwise-robust",
                    Robustness::SupEstimated => "sup-estimated",
                };
                writeln!(
                    out,
                    "{id},{robustness},{},{},{},{},{:e},{:e},{:e},{}",
                    a.trials, a.pass, a.suspect, a.fail, a.min_slack, a.mean_slack, a.max_ratio, a.witness_digest
                )
                .expect("writing to a String");
            }
            Ok(out)
        }
    }
}

pub fn write_report(report: &Report, path: &Path, format: ReportFormat) -> Result<()> {
    std::fs::write(path, render_report(report, format)?)?;
    Ok(())
}

/// Short human-readable table.
pub fn summary_table(report: &Report) -> String {
    let mut out = format!(
        "{:<14} {:<17} {:>7} {:>7} {:>7} {:>5} {:>13} {:>10}\n",
        "check", "robustness", "trials", "pass", "suspect", "fail", "min slack", "max ratio"
    );
    for (id, a) in &report.checks {
        let robustness = match a.robustness {
            Robustness::PointwiseRobust => "pointwise-robust",
            Robustness::SupEstimated => "sup-estimated",
        };
        let _ = writeln!(
            out,
            "{id:<14} {robustness:<17} {:>7} {:>7} {:>7} {:>5} {:>13.4e} {:>10.6}",
            a.trials, a.pass, a.suspect, a.fail, a.min_slack, a.max_ratio
        );
        if let Some(e) = &a.first_error {
            let _ = writeln!(out, "  error: {e}");
        }
    }
    let (p, s, f) = report.totals();
    let _ = writeln!(out, "total: {p} pass, {s} suspect, {f} fail in {} ms", report.wall_ms);
    out
}
