//! Experiment configurations, reports and their CSV form.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{format_bits, hamming};
use crate::error::{invalid, Result};
use crate::model::Temperature;
use crate::neuroram::{clock_trace_check, geometry, IndexInstance, NeuroRam};
use crate::rng::{derive_seed, Streams};
use crate::similarity::Similarity;
use crate::transforms::{distribution_equivalence, random_network};
use crate::vc::{baum_product_bound, count_dichotomies, random_architecture, random_samples};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    IndexingExhaustive,
    IndexingSampled,
    Clock,
    Similarity,
    Equivalence,
    Vc,
}

impl std::str::FromStr for ExperimentKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| invalid(format!("unknown experiment kind `{s}`")))
    }
}

fn default_eps() -> f64 {
    0.25
}
fn default_c() -> f64 {
    2.0
}
fn default_trials() -> u64 {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub n: usize,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_c")]
    pub c: f64,
    /// `"p/q"`; defaults to the builder default for `n`.
    #[serde(default)]
    pub lambda: Option<String>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    /// Number of random cases for sampled kinds.
    #[serde(default)]
    pub cases: Option<usize>,
    /// Pass threshold on the per-row success rate.
    #[serde(default)]
    pub min_rate: Option<f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, n: usize, trials: u64, seed: u64) -> Self {
        Self {
            kind,
            n,
            eps: default_eps(),
            c: default_c(),
            lambda: None,
            trials,
            seed,
            cases: None,
            min_rate: None,
            output: None,
        }
    }

    pub fn temperature(&self) -> Result<Temperature> {
        match &self.lambda {
            Some(s) => s.parse(),
            None => Temperature::default_for(self.n.max(2)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub case: String,
    pub truth: String,
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
}

impl ReportRow {
    fn new(case: String, truth: impl ToString, trials: u64, successes: u64) -> Self {
        Self {
            case,
            truth: truth.to_string(),
            trials,
            successes,
            rate: if trials == 0 { 1.0 } else { successes as f64 / trials as f64 },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportSummary {
    pub rows: usize,
    pub min_rate: f64,
    pub mean_rate: f64,
    pub wall_time_s: f64,
    /// Kind-specific values, such as estimated probabilities.
    pub extra: BTreeMap<String, f64>,
    pub passed: bool,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub rows: Vec<ReportRow>,
    pub summary: ReportSummary,
}

impl ExperimentReport {
    /// Rows as CSV with header `case,truth,trials,successes,rate`.
    /// Timing is left out so the bytes depend only on config and seed.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv writes utf-8"))
    }
}

fn random_bits(rng: &mut impl Rng, n: usize) -> Vec<bool> {
    (0..n).map(|_| rng.random_bool(0.5)).collect()
}

fn indexing_rows(cfg: &ExperimentConfig, instances: Vec<IndexInstance>) -> Result<Vec<ReportRow>> {
    let ram = NeuroRam::new(cfg.n, false, cfg.temperature()?)?;
    instances
        .iter()
        .enumerate()
        .map(|(k, inst)| {
            let ok = ram.success_count(inst, cfg.trials, derive_seed(cfg.seed, 1, k as u64))?;
            let case = format!("x={} y={}", format_bits(&inst.x), format_bits(&inst.y));
            Ok(ReportRow::new(case, u8::from(inst.truth()), cfg.trials, ok))
        })
        .collect()
}

fn exhaustive_instances(n: usize) -> Result<Vec<IndexInstance>> {
    let (_, log_n) = geometry(n)?;
    if n > 4 {
        return Err(invalid(format!(
            "exhaustive indexing enumerates 2^n * n cases; use n = 4, got {n}"
        )));
    }
    let mut out = Vec::new();
    for xv in 0..1u64 << n {
        for yv in 0..1u64 << log_n {
            let x = crate::bits::bin(xv, n)?;
            let y = crate::bits::bin(yv, log_n)?;
            out.push(IndexInstance::new(x, y)?);
        }
    }
    Ok(out)
}

fn sampled_instances(cfg: &ExperimentConfig) -> Result<Vec<IndexInstance>> {
    let (_, log_n) = geometry(cfg.n)?;
    let mut rng = Streams::new(cfg.seed).stream(0);
    (0..cfg.cases.unwrap_or(200))
        .map(|_| {
            let x = random_bits(&mut rng, cfg.n);
            let y = random_bits(&mut rng, log_n);
            IndexInstance::new(x, y)
        })
        .collect()
}

fn clock_rows(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let ram = NeuroRam::new(cfg.n, false, cfg.temperature()?)?;
    let (_, log_n) = geometry(cfg.n)?;
    let ok = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<bool> {
            let mut rng = Streams::new(derive_seed(cfg.seed, 2, t)).stream(0);
            let mut x = random_bits(&mut rng, cfg.n);
            if !x.contains(&true) {
                x[rng.random_range(0..cfg.n)] = true;
            }
            let inst = IndexInstance::new(x, random_bits(&mut rng, log_n))?;
            let clamps = ram.clamps(&inst)?;
            Ok(clock_trace_check(&ram.net, &ram.layout, &clamps, derive_seed(cfg.seed, 3, t)).passes())
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|&b| b)
        .count() as u64;
    Ok(vec![ReportRow::new("clock pattern".into(), "-", cfg.trials, ok)])
}

fn similarity_rows(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let s = Similarity::new(cfg.n, cfg.eps, cfg.c, cfg.temperature()?)?;
    let mut rng = Streams::new(cfg.seed).stream(0);
    let base = random_bits(&mut rng, cfg.n);
    let far_count = (cfg.eps * cfg.n as f64).ceil() as usize;
    let mut far = base.clone();
    let mut positions: Vec<usize> = (0..cfg.n).collect();
    rand::seq::SliceRandom::shuffle(positions.as_mut_slice(), &mut rng);
    for &p in &positions[..far_count] {
        far[p] = !far[p];
    }
    let complement: Vec<bool> = base.iter().map(|b| !b).collect();
    let cases = [("equal", &base, false), ("far", &far, true), ("complement", &complement, true)];
    cases
        .iter()
        .enumerate()
        .map(|(k, (label, other, truth))| {
            let pos = s.positives(&base, other, cfg.trials, derive_seed(cfg.seed, 4, k as u64))?;
            let ok = if *truth { pos } else { cfg.trials - pos };
            let case = format!("{label} hamming={}", hamming(&base, other));
            Ok(ReportRow::new(case, u8::from(*truth), cfg.trials, ok))
        })
        .collect()
}

/// Pass criteria on the equivalence kind.
pub const EQUIVALENCE_TOLERANCE: f64 = 0.01;

fn equivalence_rows(
    cfg: &ExperimentConfig,
    extra: &mut BTreeMap<String, f64>,
    failures: &mut Vec<String>,
) -> Result<Vec<ReportRow>> {
    let lambda = match &cfg.lambda {
        Some(s) => s.parse()?,
        None => Temperature::new(1, 4)?,
    };
    let net = random_network(3, 2, cfg.seed, lambda);
    let input = [true, false, true];
    let r = distribution_equivalence(&net, &input, 3, cfg.trials, cfg.seed)?;
    extra.insert("p_snn".into(), r.p_snn);
    extra.insert("p_circuit".into(), r.p_circuit);
    extra.insert("delta".into(), r.delta);
    extra.insert("threshold".into(), r.threshold);
    if r.delta > EQUIVALENCE_TOLERANCE || !r.within_threshold {
        failures.push(format!(
            "equivalence: |delta| = {:.5}, threshold = {:.5}",
            r.delta, r.threshold
        ));
    }
    let hits = |p: f64| (p * cfg.trials as f64).round() as u64;
    Ok(vec![
        ReportRow::new("recurrent".into(), "-", cfg.trials, hits(r.p_snn)),
        ReportRow::new("circuit".into(), "-", cfg.trials, hits(r.p_circuit)),
    ])
}

fn vc_rows(cfg: &ExperimentConfig, failures: &mut Vec<String>) -> Result<Vec<ReportRow>> {
    let cases = cfg.cases.unwrap_or(50);
    let mut rows = Vec::with_capacity(cases);
    for k in 0..cases as u64 {
        let mut rng = Streams::new(derive_seed(cfg.seed, 5, k)).stream(0);
        let m = rng.random_range(1..=3);
        let d = rng.random_range(1..=4);
        let z = rng.random_range(0..=6usize.min(1 << d));
        let arch = random_architecture(m, d, derive_seed(cfg.seed, 6, k));
        let samples = random_samples(d, z, derive_seed(cfg.seed, 7, k))?;
        let c = count_dichotomies(&arch, &samples)?;
        let bound = baum_product_bound(&c.per_gate);
        let bound_u64 = u64::try_from(bound).unwrap_or(u64::MAX);
        if c.count > u128::from(bound_u64) {
            failures.push(format!("vc case {k}: count above product bound"));
        }
        if z >= 2 && m >= 2 && c.count > (z as u128).pow(m as u32) {
            failures.push(format!("vc case {k}: count above z^m"));
        }
        let case = format!("m={m} d={d} z={z}");
        rows.push(ReportRow::new(case, "-", bound_u64, c.count as u64));
    }
    Ok(rows)
}

/// Runs the configured experiment; also writes the CSV when `output` is set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mut extra = BTreeMap::new();
    let mut failures = Vec::new();
    let default_min = match cfg.kind {
        ExperimentKind::Equivalence | ExperimentKind::Vc => None,
        _ => Some(0.99),
    };
    let rows = match cfg.kind {
        ExperimentKind::IndexingExhaustive => indexing_rows(cfg, exhaustive_instances(cfg.n)?)?,
        ExperimentKind::IndexingSampled => indexing_rows(cfg, sampled_instances(cfg)?)?,
        ExperimentKind::Clock => clock_rows(cfg)?,
        ExperimentKind::Similarity => similarity_rows(cfg)?,
        ExperimentKind::Equivalence => equivalence_rows(cfg, &mut extra, &mut failures)?,
        ExperimentKind::Vc => vc_rows(cfg, &mut failures)?,
    };
    if let Some(min) = cfg.min_rate.or(default_min) {
        for r in rows.iter().filter(|r| r.rate < min) {
            failures.push(format!("{}: rate {:.4} below {min}", r.case, r.rate));
        }
    }
    let rates: Vec<f64> = rows.iter().map(|r| r.rate).collect();
    let summary = ReportSummary {
        rows: rows.len(),
        min_rate: rates.iter().copied().fold(f64::INFINITY, f64::min),
        mean_rate: rates.iter().sum::<f64>() / rates.len().max(1) as f64,
        wall_time_s: start.elapsed().as_secs_f64(),
        extra,
        passed: failures.is_empty(),
        failures,
    };
    let report = ExperimentReport {
        kind: cfg.kind,
        rows,
        summary,
    };
    if let Some(path) = &cfg.output {
        std::fs::write(path, report.to_csv()?)?;
    }
    Ok(report)
}
