//! Scratch calibration runs (deleted once constants are frozen).

use tsgd_core::harness::*;
use tsgd_core::losses::QuantileSet;
use tsgd_core::models::{ModelKind, ModelSpec};
use tsgd_core::optim::{Method, OptimizerConfig, Schedule};
use tsgd_core::stream::SynthParams;

fn stability_base(seed: u64, window: usize, chunk_hours: usize, noise: f64) -> ExperimentConfig {
    stability_base_h(seed, window, chunk_hours, noise, 2)
}

fn stability_base_h(
    seed: u64,
    window: usize,
    chunk_hours: usize,
    noise: f64,
    horizons: usize,
) -> ExperimentConfig {
    ExperimentConfig {
        model: ModelSpec {
            kind: ModelKind::Linear,
            input_window: 24,
            feature_dim: 44,
            hidden_dim: 1,
            horizons,
            quantile_count: 3,
        },
        optimizer: OptimizerConfig {
            method: Method::Sgd,
            eta: 0.01,
            window,
            alpha: 0.99,
            schedule: Schedule::InverseSqrt,
        },
        strategy: Strategy::Online,
        train_chunks: 5,
        test_chunks: 2,
        quantiles: QuantileSet::new(vec![0.1, 0.5, 0.9]).unwrap(),
        seed,
        data: DataSource::Synth {
            params: SynthParams {
                length_hours: chunk_hours * 7,
                base: 0.0,
                daily_amp: 1.0,
                weekly_amp: 0.3,
                trend: 0.0,
                noise_sd: noise,
            },
            chunk_hours,
        },
        output: None,
    }
}

#[test]
#[ignore]
fn calibrate_eta0() {
    for (w, chunk_hours, noise, horizons) in [
        (50usize, 48usize, 1.5f64, 24usize),
        (50, 48, 0.5, 24),
        (20, 48, 1.5, 24),
        (50, 36, 1.5, 12),
    ] {
        for eta0 in [0.0001, 0.0003, 0.001] {
            let etas: Vec<f64> = [1.0, 3.0, 5.0, 9.0].iter().map(|m| m * eta0).collect();
            println!("=== w={w} chunk={chunk_hours} noise={noise} h={horizons} eta0={eta0}");
            for seed in [1u64, 2, 3] {
                let report = compare_methods(
                    &stability_base_h(seed, w, chunk_hours, noise, horizons),
                    &etas,
                    &[CompareMethod::Sgd, CompareMethod::Pts],
                    &[seed],
                )
                .unwrap();
                let sgd = report.spread_for(CompareMethod::Sgd, seed).unwrap();
                let pts = report.spread_for(CompareMethod::Pts, seed).unwrap();
                println!(
                    "  seed {seed}: sgd {sgd:.4} pts {pts:.4}  -> {}",
                    if pts < sgd { "PTS WINS" } else { "sgd wins" }
                );
            }
        }
    }
}

#[test]
#[ignore]
fn calibrate_offline_vs_online() {
    // Noiseless stream; check offline <= min(online) + 5% at a tuned eta.
    for eta in [0.005, 0.01, 0.02] {
        let mut base = stability_base(1, 20, 72, 0.0);
        base.optimizer.eta = eta;
        let report = compare_methods(
            &base,
            &[eta],
            &[
                CompareMethod::Offline,
                CompareMethod::Sgd,
                CompareMethod::Hts,
                CompareMethod::Pts,
            ],
            &[1],
        )
        .unwrap();
        println!("eta={eta}:");
        for r in &report.runs {
            println!("  {:?} -> {}", r.method, r.final_ql_grand);
        }
    }
}
