//! Experiment driver: replays a chunked stream through one of the training
//! strategies, re-evaluates the grand quantile loss after every update,
//! tracks gradient-evaluation cost, and emits machine-readable reports.
//!
//! Conventions (echoed into every JSON report):
//!
//! * One optimizer step per forecast origin, in stream order, single pass.
//! * The schedule counter is global across chunk boundaries for online runs
//!   and restarts on each offline retrain.
//! * `ql_grand` after an update is the mean over held-out chunks of that
//!   chunk's summed pinball loss divided by its forecast-origin count.
//! * Divergence never aborts a run; rows keep flowing with the flag set.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::losses::{total_quantile_loss, QuantileSet};
use crate::models::{
    forward, init_params, LossContext, ModelObjective, ModelSpec, ParamVector,
};
use crate::numeric::Rng;
use crate::optim::{Method, OnlineOptimizer, OptimizerConfig};
use crate::regret::{regret_report, RegretReport, Trajectory};
use crate::stream::{chunk_stream, encode_features, load_csv, synth_series, Chunk, SeriesPoint, SynthParams, FEATURE_DIM};

/// Weights at the start of a run are uniform in `[-INIT_SCALE, INIT_SCALE]`.
pub const INIT_SCALE: f64 = 0.1;

/// Whether arriving chunks update the current model or trigger a full
/// retrain from scratch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Offline,
    Online,
}

/// Where the series comes from; `chunk_hours` sets the arrival granularity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    Csv {
        path: PathBuf,
        chunk_hours: usize,
    },
    Synth {
        params: SynthParams,
        chunk_hours: usize,
    },
}

impl DataSource {
    pub fn chunk_hours(&self) -> usize {
        match self {
            DataSource::Csv { chunk_hours, .. } | DataSource::Synth { chunk_hours, .. } => {
                *chunk_hours
            }
        }
    }
}

fn default_quantiles() -> QuantileSet {
    QuantileSet::new(vec![0.1, 0.5, 0.9]).expect("default quantiles are valid")
}

/// Full description of one experiment run.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub optimizer: OptimizerConfig,
    pub strategy: Strategy,
    pub train_chunks: usize,
    pub test_chunks: usize,
    #[serde(default = "default_quantiles")]
    pub quantiles: QuantileSet,
    pub seed: u64,
    pub data: DataSource,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.model
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        self.optimizer
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        if self.train_chunks < 1 || self.test_chunks < 1 {
            return Err(Error::Config(
                "train_chunks and test_chunks must both be >= 1".into(),
            ));
        }
        if self.quantiles.len() != self.model.quantile_count {
            return Err(Error::Config(format!(
                "model declares {} quantile heads but the config lists {} quantiles",
                self.model.quantile_count,
                self.quantiles.len()
            )));
        }
        if self.model.feature_dim != FEATURE_DIM {
            return Err(Error::Config(format!(
                "the stream encoder emits {FEATURE_DIM} features per step; model.feature_dim is {}",
                self.model.feature_dim
            )));
        }
        if self.strategy == Strategy::Offline && self.optimizer.method != Method::Sgd {
            return Err(Error::Config(
                "the offline strategy retrains with plain sgd; set optimizer.method = \"sgd\"".into(),
            ));
        }
        if self.data.chunk_hours() < 1 {
            return Err(Error::Config("chunk_hours must be >= 1".into()));
        }
        Ok(())
    }
}

/// Fixed modelling conventions, echoed into reports so runs are
/// self-describing.
#[derive(Clone, Debug, Serialize)]
pub struct Conventions {
    pub ql_grand: &'static str,
    pub step_granularity: &'static str,
    pub schedule_counter: &'static str,
    pub early_window: &'static str,
    pub calendar: &'static str,
    pub divergence: &'static str,
    pub init_scale: f64,
}

pub const CONVENTIONS: Conventions = Conventions {
    ql_grand: "per held-out chunk: summed pinball loss over the grid and origins, divided by the chunk's origin count; then averaged over chunks",
    step_granularity: "one optimizer step per forecast origin, in stream order, single pass per arrival",
    schedule_counter: "learning-rate step counter is global across arrivals for online runs and restarts on each offline retrain",
    early_window: "smoothed rules divide by the full window normalizer while filling; missing steps contribute zero",
    calendar: "hour-of-day, day-of-week, and flat 30-day months derived from the hour index",
    divergence: "non-finite values propagate; rows are flagged and the run continues",
    init_scale: INIT_SCALE,
};

/// One per-update metrics row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpdateRow {
    pub update_index: u64,
    pub ql_grand: f64,
    pub wall_time_s: f64,
    pub cum_grad_evals: u64,
    pub diverged: bool,
}

/// Everything a run produces.
#[derive(Clone, Debug, Serialize)]
pub struct MetricsReport {
    pub config: ExperimentConfig,
    pub conventions: Conventions,
    pub rows: Vec<UpdateRow>,
    pub regret: RegretReport,
}

impl MetricsReport {
    pub fn final_ql_grand(&self) -> f64 {
        self.rows.last().map(|r| r.ql_grand).unwrap_or(f64::NAN)
    }
}

fn materialize_series(config: &ExperimentConfig) -> Result<Vec<SeriesPoint>> {
    let mut root = Rng::new(config.seed);
    let data_seed = root.next_u64();
    match &config.data {
        DataSource::Csv { path, .. } => load_csv(path),
        DataSource::Synth { params, .. } => synth_series(params, data_seed),
    }
}

/// Forecast origins of a chunk: each origin needs `window` hours of history
/// somewhere in the series and all `horizons` targets inside its own chunk.
fn chunk_origins(chunk: &Chunk, window: usize, horizons: usize) -> Vec<usize> {
    let start = chunk.start_hour() as usize;
    let end = chunk.end_hour() as usize;
    (start..=end)
        .filter(|&t| t >= window && t + horizons - 1 <= end)
        .collect()
}

fn context_at(
    series: &[SeriesPoint],
    origin: usize,
    spec: &ModelSpec,
    quantiles: &QuantileSet,
    step_index: u64,
) -> Result<LossContext> {
    let features = encode_features(series, origin, spec.input_window)?;
    let targets = (0..spec.horizons)
        .map(|k| series[origin + k].value)
        .collect();
    Ok(LossContext {
        features,
        targets,
        quantiles: quantiles.clone(),
        step_index,
    })
}

/// Mean over test chunks of per-chunk origin-normalized total pinball loss.
/// Pure in the model snapshot and test data; chunk order is fixed by index.
fn ql_grand(
    params: &ParamVector,
    series: &[SeriesPoint],
    test: &[Chunk],
    quantiles: &QuantileSet,
) -> Result<f64> {
    let spec = &params.layout;
    let mut chunk_means = Vec::with_capacity(test.len());
    for chunk in test {
        let origins = chunk_origins(chunk, spec.input_window, spec.horizons);
        let mut total = 0.0;
        for &t in &origins {
            let ctx = context_at(series, t, spec, quantiles, 0)?;
            let prediction = forward(params, &ctx)?;
            total += total_quantile_loss(&ctx.targets, &prediction)?;
        }
        chunk_means.push(total / origins.len() as f64);
    }
    Ok(chunk_means.iter().sum::<f64>() / chunk_means.len() as f64)
}

/// Run one experiment to completion.
///
/// Online: each arriving chunk is consumed with one optimizer step per
/// forecast origin. Offline: each arrival re-initializes from the run seed
/// and makes one pass over everything observed so far. After every step the
/// grand quantile loss over the held-out chunks is recorded.
pub fn run_experiment(config: &ExperimentConfig) -> Result<MetricsReport> {
    config.validate()?;
    let series = materialize_series(config)?;
    let chunks = chunk_stream(&series, config.data.chunk_hours())?;
    let needed = config.train_chunks + config.test_chunks;
    if chunks.len() < needed {
        return Err(Error::Data(format!(
            "need {needed} chunks (train {} + test {}), stream provides {}",
            config.train_chunks,
            config.test_chunks,
            chunks.len()
        )));
    }
    let train = &chunks[..config.train_chunks];
    let test = &chunks[config.train_chunks..needed];
    for chunk in test {
        if chunk_origins(chunk, config.model.input_window, config.model.horizons).is_empty() {
            return Err(Error::Data(format!(
                "test chunk {} has no forecast origins for window {} and {} horizons",
                chunk.index, config.model.input_window, config.model.horizons
            )));
        }
    }

    let mut root = Rng::new(config.seed);
    let _data_seed = root.next_u64(); // consumed by materialize_series
    let mut init_rng = root.split();
    let initial = init_params(&config.model, &mut init_rng, INIT_SCALE)?;

    let mut params = initial.clone();
    let mut optimizer: OnlineOptimizer<ModelObjective> =
        OnlineOptimizer::new(config.optimizer.clone())?;
    let mut trajectory: Trajectory<ModelObjective> = Trajectory::new();
    let mut rows: Vec<UpdateRow> = Vec::new();
    let mut cum_grad_evals = 0u64;
    let mut update_index = 0u64;

    let mut run_pass = |chunks_now: &[Chunk],
                        params: &mut ParamVector,
                        optimizer: &mut OnlineOptimizer<ModelObjective>,
                        trajectory: &mut Trajectory<ModelObjective>,
                        rows: &mut Vec<UpdateRow>|
     -> Result<()> {
        for chunk in chunks_now {
            for &origin in &chunk_origins(chunk, config.model.input_window, config.model.horizons)
            {
                let step_index = optimizer.steps_taken() + 1;
                let ctx = context_at(&series, origin, &config.model, &config.quantiles, step_index)?;
                let objective = ModelObjective::new(config.model.clone(), ctx)?;
                let out = optimizer.step(&params.data, objective.clone())?;
                trajectory.push(params.data.clone(), objective, out.own_gradient)?;
                params.data = out.params;

                update_index += 1;
                cum_grad_evals += out.receipt.grad_evals;
                let ql = ql_grand(params, &series, test, &config.quantiles)?;
                rows.push(UpdateRow {
                    update_index,
                    ql_grand: ql,
                    wall_time_s: out.receipt.wall_time_s,
                    cum_grad_evals,
                    diverged: !ql.is_finite(),
                });
            }
        }
        Ok(())
    };

    match config.strategy {
        Strategy::Online => {
            run_pass(train, &mut params, &mut optimizer, &mut trajectory, &mut rows)?;
        }
        Strategy::Offline => {
            for arrival in 0..train.len() {
                params = initial.clone();
                optimizer = OnlineOptimizer::new(config.optimizer.clone())?;
                run_pass(
                    &train[..=arrival],
                    &mut params,
                    &mut optimizer,
                    &mut trajectory,
                    &mut rows,
                )?;
            }
        }
    }

    let regret = regret_report(&trajectory, config.optimizer.window, config.optimizer.alpha)?;
    Ok(MetricsReport {
        config: config.clone(),
        conventions: CONVENTIONS,
        rows,
        regret,
    })
}

/// The four training setups the comparison grid can include.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompareMethod {
    Offline,
    Sgd,
    Hts,
    Pts,
}

impl CompareMethod {
    fn apply(self, config: &mut ExperimentConfig) {
        match self {
            CompareMethod::Offline => {
                config.strategy = Strategy::Offline;
                config.optimizer.method = Method::Sgd;
            }
            CompareMethod::Sgd => {
                config.strategy = Strategy::Online;
                config.optimizer.method = Method::Sgd;
            }
            CompareMethod::Hts => {
                config.strategy = Strategy::Online;
                config.optimizer.method = Method::Hts;
            }
            CompareMethod::Pts => {
                config.strategy = Strategy::Online;
                config.optimizer.method = Method::Pts;
            }
        }
    }
}

/// Grid description for [`compare_methods`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    pub base: ExperimentConfig,
    pub etas: Vec<f64>,
    pub methods: Vec<CompareMethod>,
    pub seeds: Vec<u64>,
}

/// Final accuracy of one grid cell.
#[derive(Clone, Debug, Serialize)]
pub struct CompareRun {
    pub method: CompareMethod,
    pub eta: f64,
    pub seed: u64,
    pub final_ql_grand: f64,
    pub diverged: bool,
}

/// Stability of one method for one seed: max minus min of final accuracy
/// across the learning-rate grid; any non-finite run counts as infinite.
#[derive(Clone, Debug, Serialize)]
pub struct MethodSpread {
    pub method: CompareMethod,
    pub seed: u64,
    pub spread: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MethodMeanSpread {
    pub method: CompareMethod,
    pub mean_spread: f64,
}

/// Output of the learning-rate stability comparison.
#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    pub etas: Vec<f64>,
    pub seeds: Vec<u64>,
    pub runs: Vec<CompareRun>,
    pub spreads: Vec<MethodSpread>,
    pub mean_spreads: Vec<MethodMeanSpread>,
}

impl StabilityReport {
    pub fn spread_for(&self, method: CompareMethod, seed: u64) -> Option<f64> {
        self.spreads
            .iter()
            .find(|s| s.method == method && s.seed == seed)
            .map(|s| s.spread)
    }
}

/// Spread convention: max minus min, with any non-finite entry forcing +inf.
pub fn spread_of(finals: &[f64]) -> f64 {
    if finals.iter().any(|v| !v.is_finite()) {
        return f64::INFINITY;
    }
    let max = finals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = finals.iter().cloned().fold(f64::INFINITY, f64::min);
    max - min
}

/// Run the full method x eta x seed grid (in parallel; results are merged in
/// grid order so completion order never shows) and summarize spreads.
pub fn compare_methods(
    base: &ExperimentConfig,
    etas: &[f64],
    methods: &[CompareMethod],
    seeds: &[u64],
) -> Result<StabilityReport> {
    if etas.is_empty() || methods.is_empty() || seeds.is_empty() {
        return Err(Error::Config(
            "compare grid needs at least one eta, one method, and one seed".into(),
        ));
    }
    let mut grid = Vec::new();
    for &method in methods {
        for &seed in seeds {
            for &eta in etas {
                let mut config = base.clone();
                method.apply(&mut config);
                config.optimizer.eta = eta;
                config.seed = seed;
                config.output = None;
                grid.push((method, eta, seed, config));
            }
        }
    }
    let runs: Result<Vec<CompareRun>> = grid
        .par_iter()
        .map(|(method, eta, seed, config)| {
            let report = run_experiment(config)?;
            let final_ql = report.final_ql_grand();
            Ok(CompareRun {
                method: *method,
                eta: *eta,
                seed: *seed,
                final_ql_grand: final_ql,
                diverged: !final_ql.is_finite(),
            })
        })
        .collect();
    let runs = runs?;

    let mut spreads = Vec::new();
    let mut mean_spreads = Vec::new();
    for &method in methods {
        let mut per_seed = Vec::new();
        for &seed in seeds {
            let finals: Vec<f64> = runs
                .iter()
                .filter(|r| r.method == method && r.seed == seed)
                .map(|r| r.final_ql_grand)
                .collect();
            let spread = spread_of(&finals);
            per_seed.push(spread);
            spreads.push(MethodSpread {
                method,
                seed,
                spread,
            });
        }
        mean_spreads.push(MethodMeanSpread {
            method,
            mean_spread: per_seed.iter().sum::<f64>() / per_seed.len() as f64,
        });
    }
    Ok(StabilityReport {
        etas: etas.to_vec(),
        seeds: seeds.to_vec(),
        runs,
        spreads,
        mean_spreads,
    })
}

/// Output format for reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Csv,
    Json,
}

pub const METRICS_CSV_HEADER: &str = "update_index,ql_grand,wall_time_s,cum_grad_evals,diverged";

/// Per-update rows as CSV, mirroring the in-memory rows exactly.
pub fn metrics_to_csv(report: &MetricsReport) -> String {
    let mut out = String::from(METRICS_CSV_HEADER);
    out.push('\n');
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.update_index, r.ql_grand, r.wall_time_s, r.cum_grad_evals, r.diverged
        ));
    }
    out
}

/// Parse rows back out of the metrics CSV format.
pub fn parse_metrics_csv(content: &str) -> Result<Vec<UpdateRow>> {
    let mut lines = content.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end() == METRICS_CSV_HEADER => {}
        Some((_, header)) => {
            return Err(Error::Parse {
                line: 1,
                message: format!("unexpected metrics header '{header}'"),
            })
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "empty metrics file".into(),
            })
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim_end().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim_end().split(',').collect();
        if fields.len() != 5 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 5 fields, got {}", fields.len()),
            });
        }
        let parse_err = |what: &str, e: String| Error::Parse {
            line: line_no,
            message: format!("bad {what}: {e}"),
        };
        rows.push(UpdateRow {
            update_index: fields[0]
                .parse()
                .map_err(|e: std::num::ParseIntError| parse_err("update_index", e.to_string()))?,
            ql_grand: fields[1]
                .parse()
                .map_err(|e: std::num::ParseFloatError| parse_err("ql_grand", e.to_string()))?,
            wall_time_s: fields[2]
                .parse()
                .map_err(|e: std::num::ParseFloatError| parse_err("wall_time_s", e.to_string()))?,
            cum_grad_evals: fields[3]
                .parse()
                .map_err(|e: std::num::ParseIntError| parse_err("cum_grad_evals", e.to_string()))?,
            diverged: fields[4]
                .parse()
                .map_err(|e: std::str::ParseBoolError| parse_err("diverged", e.to_string()))?,
        });
    }
    Ok(rows)
}

pub fn metrics_to_json(report: &MetricsReport) -> Result<String> {
    serde_json::to_string_pretty(report)
        .map_err(|e| Error::Data(format!("report serialization failed: {e}")))
}

/// Write a run report to `path` in the chosen format.
pub fn emit_report(report: &MetricsReport, path: &Path, format: ReportFormat) -> Result<()> {
    let content = match format {
        ReportFormat::Csv => metrics_to_csv(report),
        ReportFormat::Json => metrics_to_json(report)?,
    };
    std::fs::write(path, content).map_err(|e| Error::io(path, e))
}

/// Stability-report serialization: CSV carries the per-run rows, JSON the
/// full report including spreads.
pub fn stability_to_csv(report: &StabilityReport) -> String {
    let mut out = String::from("method,eta,seed,final_ql_grand,diverged\n");
    for r in &report.runs {
        let method = match r.method {
            CompareMethod::Offline => "offline",
            CompareMethod::Sgd => "sgd",
            CompareMethod::Hts => "hts",
            CompareMethod::Pts => "pts",
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            method, r.eta, r.seed, r.final_ql_grand, r.diverged
        ));
    }
    out
}

pub fn emit_stability_report(
    report: &StabilityReport,
    path: &Path,
    format: ReportFormat,
) -> Result<()> {
    let content = match format {
        ReportFormat::Csv => stability_to_csv(report),
        ReportFormat::Json => serde_json::to_string_pretty(report)
            .map_err(|e| Error::Data(format!("report serialization failed: {e}")))?,
    };
    std::fs::write(path, content).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests;
