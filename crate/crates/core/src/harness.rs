//! Seeded experiment driver.
//!
//! Trial `i` of an experiment draws everything (graph and algorithm choices)
//! from stream `i` of the master seed, so reports are reproducible whatever the
//! scheduling. Wall-clock timings are kept in a separate list, which leaves the
//! trial records byte-identical across runs.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{analyze, drift, merge_histograms, HistogramRow};
use crate::configmodel::{sample_no_loops, DegreeSequence, DEFAULT_MAX_RETRIES};
use crate::construct::{kappa, resolve_to_original, unwind, DeficiencyLedger, Matching};
use crate::error::{integrity, invalid, Result};
use crate::exactmatch::max_matching;
use crate::multigraph::{MultiGraph, VertexId};
use crate::reduce::{run, ReduceTrace, StopReason, StopRule};
use crate::rng::{trial_rng, Ks1Rng};

pub const SCHEMA_VERSION: u32 = 1;

/// Thresholds frozen after pilot runs; copied into every report.
pub mod thresholds {
    pub const DEFICIT_FRACTION: f64 = 0.9;
    pub const HYBRID_FRACTION: f64 = 0.95;
    /// Largest tolerated share of hybrid trials stopped by the safety floor.
    pub const ANOMALY_FRACTION_MAX: f64 = 0.05;
    pub const ORACLE_PERFECT_FRACTION: f64 = 0.95;
    pub const DRIFT_MEAN_MAX: f64 = -0.2;
    pub const DRIFT_MIN_SAMPLES: usize = 500;
    pub const GOOD_DELTA_MAX: u64 = 2;
    pub const SCALING_RATIO_MAX: f64 = 6.0;
    pub const ACTIONS_PER_VERTEX: usize = 3;
}

/// ⌈n^{2/3}⌉, computed exactly.
pub fn default_omega(n: usize) -> usize {
    let target = (n as u128) * (n as u128);
    let mut w = (n as f64).powf(2.0 / 3.0).round() as u128;
    while w > 0 && (w - 1).pow(3) >= target {
        w -= 1;
    }
    while w.pow(3) < target {
        w += 1;
    }
    (w as usize).max(1)
}

/// 2·log₂ n.
pub fn deficit_bound(n: usize) -> f64 {
    2.0 * (n.max(1) as f64).log2()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Full,
    Hybrid { omega: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub sample: f64,
    pub reduce: f64,
    pub exact: f64,
    pub unwind: f64,
}

impl PhaseTimings {
    pub fn algorithm(&self) -> f64 {
        self.reduce + self.exact + self.unwind
    }
}

/// Everything one REDUCE + (exact) + CONSTRUCT pass produced.
#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub trace: ReduceTrace,
    pub matching: Matching,
    pub ledger: DeficiencyLedger,
    /// κ(G, M) recomputed on the input graph.
    pub kappa: usize,
    /// Matched pairs of input vertices.
    pub pairs: Vec<(VertexId, VertexId)>,
    /// Independent recheck of the deficiency identity at every level.
    pub identity_holds: bool,
    pub timings: PhaseTimings,
}

/// Runs the pipeline on `g0`. Full mode reduces to the empty graph; hybrid mode
/// stops at the first qualifying snapshot and matches it exactly.
pub fn run_pipeline(g0: &MultiGraph, rng: &mut Ks1Rng, mode: Mode) -> Result<PipelineRun> {
    let mut timings = PhaseTimings::default();
    let mut g = g0.clone();
    let t = Instant::now();
    let rule = match mode {
        Mode::Full => StopRule::RunToEmpty,
        Mode::Hybrid { omega } => StopRule::SnapshotWindow { omega },
    };
    let trace = run(&mut g, rng, rule)?;
    timings.reduce = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let mj = if g.is_empty() { Matching::empty() } else { max_matching(&g) };
    timings.exact = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let (matching, ledger) = unwind(&trace, trace.stop_level(), &g, &mj)?;
    timings.unwind = t.elapsed().as_secs_f64();

    let pairs = revalidate(g0, &matching)?;
    let kappa = kappa(g0, &matching)?;
    let identity_holds = identity_holds(&trace, &ledger, kappa);
    Ok(PipelineRun { trace, matching, ledger, kappa, pairs, identity_holds, timings })
}

/// Disjointness and membership of the matching in the input edge list.
fn revalidate(g0: &MultiGraph, m: &Matching) -> Result<Vec<(VertexId, VertexId)>> {
    m.validate(g0)?;
    let pairs = resolve_to_original(m, g0)?;
    for (&e, &(a, b)) in m.edges().iter().zip(&pairs) {
        if g0.endpoints(e) != (a, b) && g0.endpoints(e) != (b, a) {
            return Err(integrity(format!("matched edge {e} is not the input edge {a} {b}")));
        }
    }
    Ok(pairs)
}

/// κ_i = R₀(i..j) + R₂b(i..j) + κ_j at every level, counted from the trace
/// rather than from the unwinder's own counters.
fn identity_holds(trace: &ReduceTrace, ledger: &DeficiencyLedger, kappa_0: usize) -> bool {
    let j = trace.stop_level();
    if ledger.kappa_by_level.len() != j + 1 || ledger.kappa_by_level[0] != kappa_0 {
        return false;
    }
    let total_r0 = trace.r0(j);
    let total_r2b = trace.r2b(j);
    if ledger.r0 != total_r0 || ledger.r2b != total_r2b {
        return false;
    }
    let mut bad_after = 0usize;
    for level in (0..=j).rev() {
        if ledger.kappa_by_level[level] != bad_after + ledger.kappa_j {
            return false;
        }
        if level > 0 {
            let a = &trace.actions[level - 1];
            if matches!(a, crate::reduce::Action::Vertex0Removal { .. }) || a.is_bad_contraction() {
                bad_after += 1;
            }
        }
    }
    true
}

/// Parameters shared by all experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub deg4_frac: f64,
    /// Hybrid window override; `None` means ⌈n^{2/3}⌉.
    pub omega: Option<usize>,
    /// Sizes for the scaling experiment, ascending.
    pub sizes: Vec<usize>,
}

impl Params {
    pub fn new(n: usize, trials: usize, seed: u64) -> Self {
        Params { n, trials, seed, deg4_frac: 0.0, omega: None, sizes: Vec::new() }
    }

    pub fn with_deg4_frac(mut self, p: f64) -> Self {
        self.deg4_frac = p;
        self
    }

    fn degree_sequence(&self, n: usize) -> Result<(DegreeSequence, bool)> {
        if n == 0 {
            return Err(invalid("n must be positive"));
        }
        DegreeSequence::with_deg4_fraction(n, self.deg4_frac)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StopLabel {
    Empty,
    Found,
    Floor,
}

impl From<StopReason> for StopLabel {
    fn from(s: StopReason) -> Self {
        match s {
            StopReason::Empty => StopLabel::Empty,
            StopReason::SnapshotFound { .. } => StopLabel::Found,
            StopReason::SafetyFloor { .. } => StopLabel::Floor,
        }
    }
}

/// Timing-free record of one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    pub n: usize,
    pub seed: u64,
    /// ChaCha stream index under `seed`.
    pub stream: u64,
    pub degree_adjusted: bool,
    pub sample_retries: usize,
    pub kappa: usize,
    pub r0: usize,
    pub r2b: usize,
    pub kappa_j: usize,
    pub matching_size: usize,
    /// ν(G) when the exact matcher was run on the input.
    pub nu: Option<usize>,
    pub stop: StopLabel,
    pub actions: usize,
    pub snapshots: usize,
    pub identity_holds: bool,
    /// κ(G, M) = κ(Γ_h, M_h), only for non-anomalous hybrid trials.
    pub window_identity_holds: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub drift: Option<TrialDrift>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialDrift {
    pub initial_ex4: u64,
    pub conditional_count: usize,
    pub conditional_sum: i64,
    pub max_abs_delta_good: Option<u64>,
    pub good_over_bound: usize,
    pub histogram: Vec<HistogramRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// `false` when the check had too little data to apply.
    pub applicable: bool,
    pub passed: bool,
}

impl Check {
    fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Check { name: name.into(), value, threshold, applicable: true, passed: value >= threshold }
    }

    fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Check { name: name.into(), value, threshold, applicable: true, passed: value <= threshold }
    }

    fn not_applicable(mut self) -> Self {
        self.applicable = false;
        self.passed = true;
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub min: usize,
    pub median: usize,
    pub p90: usize,
    pub max: usize,
}

impl Quantiles {
    /// Nearest-rank quantiles; `None` for an empty sample.
    pub fn of(values: &[usize]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_unstable();
        let rank = |q: f64| v[((q * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1];
        Some(Quantiles { min: v[0], median: rank(0.5), p90: rank(0.9), max: v[v.len() - 1] })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeTiming {
    pub n: usize,
    pub median_seconds: f64,
    pub max_actions_per_vertex: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub from_n: usize,
    pub to_n: usize,
    pub ratio: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub trials: usize,
    pub kappa: Option<Quantiles>,
    pub identity_violations: usize,
    pub anomalies: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fraction_within_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fraction_perfect: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_identity_violations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_oracle_gap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fraction_nu_perfect: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub scaling: Vec<SizeTiming>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub ratios: Vec<Ratio>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drift_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drift_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_abs_delta_good: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub histogram: Vec<HistogramRow>,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub experiment: String,
    pub code_version: String,
    pub params: Params,
    pub thresholds: Thresholds,
    pub trials: Vec<TrialRecord>,
    /// Wall-clock phases, parallel to `trials`.
    pub timings: Vec<PhaseTimings>,
    pub aggregates: Aggregates,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub deficit_fraction: f64,
    pub hybrid_fraction: f64,
    pub anomaly_fraction_max: f64,
    pub oracle_perfect_fraction: f64,
    pub drift_mean_max: f64,
    pub drift_min_samples: usize,
    pub good_delta_max: u64,
    pub scaling_ratio_max: f64,
    pub actions_per_vertex: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        use thresholds::*;
        Thresholds {
            deficit_fraction: DEFICIT_FRACTION,
            hybrid_fraction: HYBRID_FRACTION,
            anomaly_fraction_max: ANOMALY_FRACTION_MAX,
            oracle_perfect_fraction: ORACLE_PERFECT_FRACTION,
            drift_mean_max: DRIFT_MEAN_MAX,
            drift_min_samples: DRIFT_MIN_SAMPLES,
            good_delta_max: GOOD_DELTA_MAX,
            scaling_ratio_max: SCALING_RATIO_MAX,
            actions_per_vertex: ACTIONS_PER_VERTEX,
        }
    }
}

impl ExperimentReport {
    fn new(experiment: &str, params: &Params) -> Self {
        ExperimentReport {
            schema_version: SCHEMA_VERSION,
            experiment: experiment.into(),
            code_version: env!("CARGO_PKG_VERSION").into(),
            params: params.clone(),
            thresholds: Thresholds::default(),
            trials: Vec::new(),
            timings: Vec::new(),
            aggregates: Aggregates::default(),
        }
    }

    /// True when every applicable check passed.
    pub fn passed(&self) -> bool {
        self.aggregates.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn histogram_csv(&self) -> String {
        crate::analysis::histogram_csv(&self.aggregates.histogram)
    }

    fn fill_common(&mut self) {
        let a = &mut self.aggregates;
        a.trials = self.trials.len();
        a.kappa = Quantiles::of(&self.trials.iter().map(|t| t.kappa).collect::<Vec<_>>());
        a.identity_violations = self.trials.iter().filter(|t| !t.identity_holds).count();
        a.anomalies = self.trials.iter().filter(|t| t.stop == StopLabel::Floor).count();
        a.checks.push(Check::at_most("identity_violations", a.identity_violations as f64, 0.0));
    }
}

struct Trial {
    record: TrialRecord,
    timings: PhaseTimings,
}

struct Sampled {
    g: MultiGraph,
    rng: Ks1Rng,
    adjusted: bool,
    retries: usize,
    sample_seconds: f64,
}

fn sample_trial(params: &Params, n: usize, index: usize) -> Result<Sampled> {
    let (d, adjusted) = params.degree_sequence(n)?;
    let mut rng = trial_rng(params.seed, index as u64);
    let t = Instant::now();
    let s = sample_no_loops(&d, &mut rng, DEFAULT_MAX_RETRIES)?;
    let retries = s.retries;
    let g = s.into_graph(n)?;
    Ok(Sampled { g, rng, adjusted, retries, sample_seconds: t.elapsed().as_secs_f64() })
}

fn one_trial(params: &Params, n: usize, index: usize, mode: Mode, oracle: bool, analyse: bool) -> Result<Trial> {
    let Sampled { g, mut rng, adjusted, retries, sample_seconds } = sample_trial(params, n, index)?;
    let run = run_pipeline(&g, &mut rng, mode)?;
    let nu = oracle.then(|| max_matching(&g).len());
    let anomaly = run.trace.stop.is_anomaly();
    let window_identity_holds = match mode {
        Mode::Hybrid { .. } if !anomaly => Some(run.kappa == run.ledger.kappa_j),
        _ => None,
    };
    let drift = if analyse { Some(trial_drift(&g, &run.trace)?) } else { None };
    let mut timings = run.timings;
    timings.sample = sample_seconds;
    let record = TrialRecord {
        index,
        n,
        seed: params.seed,
        stream: index as u64,
        degree_adjusted: adjusted,
        sample_retries: retries,
        kappa: run.kappa,
        r0: run.ledger.r0,
        r2b: run.ledger.r2b,
        kappa_j: run.ledger.kappa_j,
        matching_size: run.matching.len(),
        nu,
        stop: run.trace.stop.into(),
        actions: run.trace.actions.len(),
        snapshots: run.trace.snapshots.len(),
        identity_holds: run.identity_holds,
        window_identity_holds,
        drift,
    };
    Ok(Trial { record, timings })
}

fn trial_drift(g0: &MultiGraph, trace: &ReduceTrace) -> Result<TrialDrift> {
    let a = analyze(g0, trace, 64)?;
    let d = drift(trace);
    let good_over_bound = a
        .classified()
        .filter(|(r, t)| t.is_good() && r.delta_ex4.unsigned_abs() > thresholds::GOOD_DELTA_MAX)
        .count();
    Ok(TrialDrift {
        initial_ex4: d.series.first().copied().unwrap_or(0),
        conditional_count: d.conditional_count,
        conditional_sum: d.conditional_sum,
        max_abs_delta_good: a.max_abs_delta_good(),
        good_over_bound,
        histogram: a.histogram(),
    })
}

fn run_trials(params: &Params, mode: Mode, oracle: bool, analyse: bool) -> Result<Vec<Trial>> {
    (0..params.trials)
        .into_par_iter()
        .map(|i| one_trial(params, params.n, i, mode, oracle, analyse))
        .collect()
}

fn attach(report: &mut ExperimentReport, trials: Vec<Trial>) {
    for t in trials {
        report.trials.push(t.record);
        report.timings.push(t.timings);
    }
}

fn fraction(count: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        count as f64 / total as f64
    }
}

/// Full mode: fraction of trials with κ ≤ 2·log₂ n.
pub fn exp_deficit(params: &Params) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("deficit", params);
    attach(&mut report, run_trials(params, Mode::Full, false, false)?);
    report.fill_common();
    if !report.trials.is_empty() {
        let bound = deficit_bound(params.n);
        let ok = report.trials.iter().filter(|t| t.kappa as f64 <= bound).count();
        let f = fraction(ok, report.trials.len());
        report.aggregates.fraction_within_bound = Some(f);
        report.aggregates.checks.push(Check::at_least("fraction_within_bound", f, thresholds::DEFICIT_FRACTION));
    }
    Ok(report)
}

/// Hybrid mode: reduce into the snapshot window, match exactly, unwind.
pub fn exp_hybrid(params: &Params) -> Result<ExperimentReport> {
    let omega = params.omega.unwrap_or_else(|| default_omega(params.n));
    let mut report = ExperimentReport::new("hybrid", params);
    report.params.omega = Some(omega);
    attach(&mut report, run_trials(params, Mode::Hybrid { omega }, false, false)?);
    report.fill_common();
    if !report.trials.is_empty() {
        let parity = params.n % 2;
        let perfect = report.trials.iter().filter(|t| t.kappa == parity).count();
        let f = fraction(perfect, report.trials.len());
        let violations = report.trials.iter().filter(|t| t.window_identity_holds == Some(false)).count();
        let a = &mut report.aggregates;
        let anomaly_share = fraction(a.anomalies, report.trials.len());
        a.checks.push(Check::at_most("anomaly_fraction", anomaly_share, thresholds::ANOMALY_FRACTION_MAX));
        a.fraction_perfect = Some(f);
        a.window_identity_violations = Some(violations);
        a.checks.push(Check::at_least("fraction_perfect", f, thresholds::HYBRID_FRACTION));
        a.checks.push(Check::at_most("window_identity_violations", violations as f64, 0.0));
    }
    Ok(report)
}

/// Full mode against the exact matcher on the input graph.
pub fn exp_oracle(params: &Params) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("oracle", params);
    attach(&mut report, run_trials(params, Mode::Full, true, false)?);
    report.fill_common();
    if !report.trials.is_empty() {
        let gap = report
            .trials
            .iter()
            .map(|t| t.nu.unwrap_or(0).saturating_sub(t.matching_size))
            .max()
            .unwrap_or(0);
        let perfect = report.trials.iter().filter(|t| t.nu == Some(params.n / 2)).count();
        let f = fraction(perfect, report.trials.len());
        let a = &mut report.aggregates;
        a.max_oracle_gap = Some(gap);
        a.fraction_nu_perfect = Some(f);
        a.checks.push(Check::at_most("max_oracle_gap", gap as f64, deficit_bound(params.n)));
        a.checks.push(Check::at_least("fraction_nu_perfect", f, thresholds::ORACLE_PERFECT_FRACTION));
    }
    Ok(report)
}

/// Full-mode runs with hyperaction classification and excess drift.
pub fn exp_drift(params: &Params) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("drift", params);
    attach(&mut report, run_trials(params, Mode::Full, false, true)?);
    report.fill_common();
    let drifts: Vec<&TrialDrift> = report.trials.iter().filter_map(|t| t.drift.as_ref()).collect();
    let samples: usize = drifts.iter().map(|d| d.conditional_count).sum();
    let sum: i64 = drifts.iter().map(|d| d.conditional_sum).sum();
    let over: usize = drifts.iter().map(|d| d.good_over_bound).sum();
    let a = &mut report.aggregates;
    a.drift_samples = Some(samples);
    a.max_abs_delta_good = drifts.iter().filter_map(|d| d.max_abs_delta_good).max();
    a.histogram = merge_histograms(drifts.iter().flat_map(|d| d.histogram.iter()));
    let mean = (samples > 0).then(|| sum as f64 / samples as f64);
    a.drift_mean = mean;
    let check = Check::at_most("drift_mean", mean.unwrap_or(0.0), thresholds::DRIFT_MEAN_MAX);
    a.checks.push(if samples >= thresholds::DRIFT_MIN_SAMPLES { check } else { check.not_applicable() });
    a.checks.push(Check::at_most("good_over_bound", over as f64, 0.0));
    Ok(report)
}

/// Sequential full-mode timing per size; trials within a size share the
/// master seed and use stream `i`.
pub fn exp_scaling(params: &Params) -> Result<ExperimentReport> {
    if params.sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("scaling sizes must be strictly ascending"));
    }
    let mut report = ExperimentReport::new("scaling", params);
    let mut per_size = Vec::new();
    for &n in &params.sizes {
        let mut times = Vec::with_capacity(params.trials);
        let mut max_ratio = 0f64;
        for i in 0..params.trials {
            let t = one_trial(params, n, i, Mode::Full, false, false)?;
            times.push(t.timings.reduce + t.timings.unwind);
            max_ratio = max_ratio.max(t.record.actions as f64 / n as f64);
            report.trials.push(t.record);
            report.timings.push(t.timings);
        }
        times.sort_by(f64::total_cmp);
        if let Some(&median) = times.get(times.len().saturating_sub(1) / 2) {
            per_size.push(SizeTiming { n, median_seconds: median, max_actions_per_vertex: max_ratio });
        }
    }
    report.fill_common();
    let a = &mut report.aggregates;
    for w in per_size.windows(2) {
        let ratio = w[1].median_seconds / w[0].median_seconds.max(f64::MIN_POSITIVE);
        a.ratios.push(Ratio { from_n: w[0].n, to_n: w[1].n, ratio });
    }
    let worst_actions = per_size.iter().map(|s| s.max_actions_per_vertex).fold(0.0, f64::max);
    if !per_size.is_empty() {
        a.checks.push(Check::at_most(
            "max_actions_per_vertex",
            worst_actions,
            thresholds::ACTIONS_PER_VERTEX as f64,
        ));
    }
    for r in &a.ratios {
        // Only a fourfold size step is compared against the linear allowance.
        if r.to_n == 4 * r.from_n {
            a.checks.push(Check::at_most("time_ratio", r.ratio, thresholds::SCALING_RATIO_MAX));
        }
    }
    a.scaling = per_size;
    Ok(report)
}
