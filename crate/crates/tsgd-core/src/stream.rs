//! Time-series ingestion, calendar feature encoding, synthetic seasonal-load
//! generation, and chunked arrival simulation.
//!
//! The calendar is simplified: hour-of-day is `h % 24`, day-of-week is
//! `(h / 24) % 7`, and months are flat 30-day blocks, `(h / 720) % 12`.
//! Feature rows are `[load value, 24 hour one-hots, 7 day one-hots,
//! 12 month one-hots]`, 44 entries per time step.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::FeatureMatrix;
use crate::numeric::Rng;

/// One hourly observation. `hour` doubles as the index into the series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesPoint {
    pub hour: u64,
    pub value: f64,
}

/// A contiguous slice of the series, simulating one arrival interval.
#[derive(Clone, Debug, PartialEq)]
pub struct Chunk {
    pub index: usize,
    pub points: Vec<SeriesPoint>,
}

impl Chunk {
    pub fn start_hour(&self) -> u64 {
        self.points[0].hour
    }

    pub fn end_hour(&self) -> u64 {
        self.points[self.points.len() - 1].hour
    }
}

/// Features per time step: value + hour/day/month one-hot blocks.
pub const FEATURE_DIM: usize = 1 + 24 + 7 + 12;

const HOURS_PER_DAY: u64 = 24;
const HOURS_PER_WEEK: u64 = 168;
const HOURS_PER_MONTH: u64 = 720; // flat 30-day months

/// Parameters of the synthetic seasonal-load generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthParams {
    pub length_hours: usize,
    #[serde(default)]
    pub base: f64,
    #[serde(default)]
    pub daily_amp: f64,
    #[serde(default)]
    pub weekly_amp: f64,
    #[serde(default)]
    pub trend: f64,
    #[serde(default)]
    pub noise_sd: f64,
}

/// Load a `hour,value` CSV. Hours must start at 0 and be consecutive;
/// values must be finite.
pub fn load_csv(path: &Path) -> Result<Vec<SeriesPoint>> {
    let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&content)
}

fn parse_csv(content: &str) -> Result<Vec<SeriesPoint>> {
    let mut lines = content.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end() == "hour,value" => {}
        Some((_, header)) => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header 'hour,value', got '{header}'"),
            })
        }
        None => return Err(Error::Integrity("empty series: file has no content".into())),
    }

    let mut points = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let (hour_str, value_str) = line.split_once(',').ok_or_else(|| Error::Parse {
            line: line_no,
            message: "expected two comma-separated fields".into(),
        })?;
        let hour: u64 = hour_str.trim().parse().map_err(|e| Error::Parse {
            line: line_no,
            message: format!("bad hour '{hour_str}': {e}"),
        })?;
        let value: f64 = value_str.trim().parse().map_err(|e| Error::Parse {
            line: line_no,
            message: format!("bad value '{value_str}': {e}"),
        })?;
        let expected = points.len() as u64;
        if hour != expected {
            return Err(Error::Integrity(format!(
                "hour {hour} at line {line_no} breaks the consecutive index (expected {expected})"
            )));
        }
        if !value.is_finite() {
            return Err(Error::Integrity(format!(
                "non-finite value at line {line_no}"
            )));
        }
        points.push(SeriesPoint { hour, value });
    }
    if points.is_empty() {
        return Err(Error::Integrity("empty series: no data rows".into()));
    }
    Ok(points)
}

/// Serialize a series in the canonical `hour,value` format (LF endings).
pub fn series_to_csv(series: &[SeriesPoint]) -> String {
    let mut out = String::from("hour,value\n");
    for p in series {
        let _ = writeln!(out, "{},{}", p.hour, p.value);
    }
    out
}

pub fn write_csv(path: &Path, series: &[SeriesPoint]) -> Result<()> {
    std::fs::write(path, series_to_csv(series)).map_err(|e| Error::io(path, e))
}

/// Deterministic seasonal generator:
/// `base + daily*sin(2pi h/24) + weekly*sin(2pi h/168) + trend*h + N(0, sd)`.
///
/// Sinusoid phases are taken modulo their period, so the noiseless components
/// are exactly periodic.
pub fn synth_series(params: &SynthParams, seed: u64) -> Result<Vec<SeriesPoint>> {
    if params.length_hours < 1 {
        return Err(Error::Domain("synthetic series length must be >= 1".into()));
    }
    if !(params.noise_sd >= 0.0) {
        return Err(Error::Domain(format!(
            "noise_sd must be >= 0, got {}",
            params.noise_sd
        )));
    }
    let mut rng = Rng::new(seed);
    let series = (0..params.length_hours as u64)
        .map(|h| {
            let daily_phase = (h % HOURS_PER_DAY) as f64 / HOURS_PER_DAY as f64;
            let weekly_phase = (h % HOURS_PER_WEEK) as f64 / HOURS_PER_WEEK as f64;
            let value = params.base
                + params.daily_amp * (std::f64::consts::TAU * daily_phase).sin()
                + params.weekly_amp * (std::f64::consts::TAU * weekly_phase).sin()
                + params.trend * h as f64
                + rng.normal(0.0, params.noise_sd);
            SeriesPoint { hour: h, value }
        })
        .collect();
    Ok(series)
}

/// Encode the `window` hours strictly before forecast origin `t` as a
/// `window x 44` feature matrix, oldest hour first.
pub fn encode_features(series: &[SeriesPoint], t: usize, window: usize) -> Result<FeatureMatrix> {
    if t < window {
        return Err(Error::Domain(format!(
            "insufficient history: origin {t} needs {window} hours of lookback"
        )));
    }
    if t > series.len() {
        return Err(Error::Domain(format!(
            "origin {t} lies beyond the series of length {}",
            series.len()
        )));
    }
    let mut data = Vec::with_capacity(window * FEATURE_DIM);
    for p in &series[t - window..t] {
        let h = p.hour;
        let mut row = [0.0; FEATURE_DIM];
        row[0] = p.value;
        row[1 + (h % HOURS_PER_DAY) as usize] = 1.0;
        row[1 + 24 + ((h / HOURS_PER_DAY) % 7) as usize] = 1.0;
        row[1 + 24 + 7 + ((h / HOURS_PER_MONTH) % 12) as usize] = 1.0;
        data.extend_from_slice(&row);
    }
    FeatureMatrix::new(window, FEATURE_DIM, data)
}

/// Split the series into consecutive chunks of `chunk_hours`; the final
/// partial chunk is retained.
pub fn chunk_stream(series: &[SeriesPoint], chunk_hours: usize) -> Result<Vec<Chunk>> {
    if chunk_hours < 1 {
        return Err(Error::Domain("chunk_hours must be >= 1".into()));
    }
    Ok(series
        .chunks(chunk_hours)
        .enumerate()
        .map(|(index, points)| Chunk {
            index,
            points: points.to_vec(),
        })
        .collect())
}
