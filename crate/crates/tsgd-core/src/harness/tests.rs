use super::*;
use crate::models::ModelKind;
use crate::optim::Schedule;

fn linear_spec(window: usize, horizons: usize, quantile_count: usize) -> ModelSpec {
    ModelSpec {
        kind: ModelKind::Linear,
        input_window: window,
        feature_dim: FEATURE_DIM,
        hidden_dim: 1,
        horizons,
        quantile_count,
    }
}

fn synth_source(length: usize, noise_sd: f64, chunk_hours: usize) -> DataSource {
    DataSource::Synth {
        params: SynthParams {
            length_hours: length,
            base: 5.0,
            daily_amp: 1.0,
            weekly_amp: 0.3,
            trend: 0.0,
            noise_sd,
        },
        chunk_hours,
    }
}

fn base_config(method: Method, eta: f64, window: usize) -> ExperimentConfig {
    ExperimentConfig {
        model: linear_spec(4, 2, 3),
        optimizer: OptimizerConfig {
            method,
            eta,
            window,
            alpha: 0.99,
            schedule: Schedule::InverseSqrt,
        },
        strategy: Strategy::Online,
        train_chunks: 3,
        test_chunks: 2,
        quantiles: QuantileSet::new(vec![0.1, 0.5, 0.9]).unwrap(),
        seed: 7,
        data: synth_source(48 * 5, 0.1, 48),
        output: None,
    }
}

fn rows_match(a: &[UpdateRow], b: &[UpdateRow], tol: f64) {
    assert_eq!(a.len(), b.len());
    for (ra, rb) in a.iter().zip(b) {
        assert_eq!(ra.update_index, rb.update_index);
        assert_eq!(ra.cum_grad_evals, rb.cum_grad_evals);
        assert_eq!(ra.diverged, rb.diverged);
        assert!(
            (ra.ql_grand - rb.ql_grand).abs() <= tol,
            "update {}: {} vs {}",
            ra.update_index,
            ra.ql_grand,
            rb.ql_grand
        );
    }
}

/// On a noiseless constant stream a linear median model converges fast; the
/// learning rate here was picked empirically and frozen.
#[test]
fn constant_stream_linear_model_converges() {
    let config = ExperimentConfig {
        model: linear_spec(2, 1, 1),
        optimizer: OptimizerConfig {
            method: Method::Sgd,
            eta: 0.025,
            window: 1,
            alpha: 0.99,
            schedule: Schedule::InverseSqrt,
        },
        strategy: Strategy::Online,
        train_chunks: 2,
        test_chunks: 1,
        quantiles: QuantileSet::new(vec![0.5]).unwrap(),
        seed: 11,
        data: DataSource::Synth {
            params: SynthParams {
                length_hours: 72,
                base: 5.0,
                daily_amp: 0.0,
                weekly_amp: 0.0,
                trend: 0.0,
                noise_sd: 0.0,
            },
            chunk_hours: 24,
        },
        output: None,
    };
    let report = run_experiment(&config).unwrap();
    assert!(report.rows.len() >= 20);
    let initial = report.rows[0].ql_grand;
    let hit = report.rows[..20]
        .iter()
        .position(|r| r.ql_grand < 0.1 * initial)
        .unwrap_or_else(|| {
            panic!(
                "never reached 10% of initial {initial} within 20 updates: {:?}",
                report.rows[..20]
                    .iter()
                    .map(|r| r.ql_grand)
                    .collect::<Vec<_>>()
            )
        });
    for pair in report.rows[..=hit].windows(2) {
        assert!(
            pair[1].ql_grand <= pair[0].ql_grand,
            "ql_grand must decrease monotonically down to the threshold"
        );
    }
}

#[test]
fn pts_window_one_reproduces_sgd_rows() {
    let sgd = run_experiment(&base_config(Method::Sgd, 0.05, 1)).unwrap();
    let pts = run_experiment(&base_config(Method::Pts, 0.05, 1)).unwrap();
    rows_match(&sgd.rows, &pts.rows, 1e-12);
}

#[test]
fn zero_eta_freezes_parameters() {
    let report = run_experiment(&base_config(Method::Sgd, 0.0, 1)).unwrap();
    let first = report.rows[0].ql_grand;
    assert!(report.rows.iter().all(|r| r.ql_grand == first));
}

#[test]
fn cost_accounting_identity() {
    let updates = |cfg: &ExperimentConfig| run_experiment(cfg).unwrap().rows;

    for method in [Method::Sgd, Method::Pts] {
        let rows = updates(&base_config(method, 0.02, 5));
        for r in &rows {
            assert_eq!(r.cum_grad_evals, r.update_index, "{method:?}");
        }
    }
    let rows = updates(&base_config(Method::Hts, 0.02, 5));
    let mut expected = 0;
    for r in &rows {
        expected += r.update_index.min(5);
        assert_eq!(r.cum_grad_evals, expected);
    }
}

#[test]
fn identical_runs_are_identical_reports() {
    let a = run_experiment(&base_config(Method::Pts, 0.05, 8)).unwrap();
    let b = run_experiment(&base_config(Method::Pts, 0.05, 8)).unwrap();
    rows_match(&a.rows, &b.rows, 0.0);
    assert_eq!(a.regret.hazan_total, b.regret.hazan_total);
    assert_eq!(a.regret.proposed_total, b.regret.proposed_total);
    assert_eq!(a.regret.hazan_per_step, b.regret.hazan_per_step);
}

#[test]
fn regret_report_is_populated() {
    let report = run_experiment(&base_config(Method::Pts, 0.05, 6)).unwrap();
    assert_eq!(report.regret.steps as usize, report.rows.len());
    assert_eq!(report.regret.window, 6);
    assert!(report.regret.hazan_total >= 0.0);
    assert!(report.regret.proposed_total >= 0.0);
    assert_eq!(report.regret.hazan_per_step.len(), report.rows.len());
}

#[test]
fn offline_final_matches_online_sgd_final() {
    // The last offline retrain replays exactly the online single pass with a
    // fresh schedule, so the final iterates coincide.
    let mut online = base_config(Method::Sgd, 0.05, 1);
    online.data = synth_source(48 * 5, 0.0, 48);
    let mut offline = online.clone();
    offline.strategy = Strategy::Offline;
    let a = run_experiment(&online).unwrap();
    let b = run_experiment(&offline).unwrap();
    assert!(b.rows.len() > a.rows.len());
    assert_eq!(a.final_ql_grand(), b.final_ql_grand());
}

#[test]
fn config_validation_errors() {
    let mut bad = base_config(Method::Hts, 0.05, 4);
    bad.strategy = Strategy::Offline;
    assert!(matches!(run_experiment(&bad), Err(Error::Config(_))));

    let mut bad = base_config(Method::Sgd, 0.05, 1);
    bad.model.feature_dim = 10;
    assert!(matches!(run_experiment(&bad), Err(Error::Config(_))));

    let mut bad = base_config(Method::Sgd, 0.05, 1);
    bad.model.quantile_count = 2;
    assert!(matches!(run_experiment(&bad), Err(Error::Config(_))));

    let mut bad = base_config(Method::Sgd, 0.05, 1);
    bad.train_chunks = 0;
    assert!(matches!(run_experiment(&bad), Err(Error::Config(_))));

    let mut bad = base_config(Method::Sgd, -0.1, 1);
    assert!(matches!(run_experiment(&bad), Err(Error::Config(_))));
    bad.optimizer.eta = 0.05;
    bad.optimizer.alpha = 0.0;
    assert!(matches!(run_experiment(&bad), Err(Error::Config(_))));
}

#[test]
fn insufficient_chunks_is_a_data_error() {
    let mut config = base_config(Method::Sgd, 0.05, 1);
    config.train_chunks = 10;
    assert!(matches!(run_experiment(&config), Err(Error::Data(_))));
}

#[test]
fn csv_source_runs_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("series.csv");
    let series = crate::stream::synth_series(
        &SynthParams {
            length_hours: 48 * 5,
            base: 5.0,
            daily_amp: 1.0,
            weekly_amp: 0.0,
            trend: 0.0,
            noise_sd: 0.2,
        },
        123,
    )
    .unwrap();
    crate::stream::write_csv(&path, &series).unwrap();
    let mut config = base_config(Method::Pts, 0.05, 4);
    config.data = DataSource::Csv {
        path: path.clone(),
        chunk_hours: 48,
    };
    let a = run_experiment(&config).unwrap();
    let b = run_experiment(&config).unwrap();
    rows_match(&a.rows, &b.rows, 0.0);

    config.data = DataSource::Csv {
        path: dir.path().join("missing.csv"),
        chunk_hours: 48,
    };
    assert!(matches!(run_experiment(&config), Err(Error::Io { .. })));
}

#[test]
fn empty_run_yields_header_only_csv() {
    // No train chunk reaches the lookback window, but later test chunks do:
    // zero updates is a legitimate run.
    let mut config = base_config(Method::Sgd, 0.05, 1);
    config.model.input_window = 200;
    config.train_chunks = 4;
    config.test_chunks = 2;
    config.data = synth_source(50 * 6, 0.0, 50);
    let report = run_experiment(&config).unwrap();
    assert!(report.rows.is_empty());
    assert_eq!(metrics_to_csv(&report), format!("{METRICS_CSV_HEADER}\n"));
    assert_eq!(report.regret.steps, 0);
    assert!(report.final_ql_grand().is_nan());
}

#[test]
fn metrics_csv_round_trip() {
    let report = run_experiment(&base_config(Method::Hts, 0.05, 3)).unwrap();
    let csv = metrics_to_csv(&report);
    let parsed = parse_metrics_csv(&csv).unwrap();
    assert_eq!(parsed, report.rows);

    assert!(matches!(
        parse_metrics_csv("bogus\n1,2,3,4,true\n"),
        Err(Error::Parse { line: 1, .. })
    ));
    assert!(matches!(
        parse_metrics_csv(&format!("{METRICS_CSV_HEADER}\n1,2,3\n")),
        Err(Error::Parse { line: 2, .. })
    ));
}

#[test]
fn emit_report_writes_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_experiment(&base_config(Method::Pts, 0.05, 2)).unwrap();
    let csv_path = dir.path().join("report.csv");
    let json_path = dir.path().join("report.json");
    emit_report(&report, &csv_path, ReportFormat::Csv).unwrap();
    emit_report(&report, &json_path, ReportFormat::Json).unwrap();
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with(METRICS_CSV_HEADER));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), report.rows.len());
    assert!(json["config"]["optimizer"]["eta"].as_f64().unwrap() > 0.0);
    assert!(json["conventions"]["ql_grand"].is_string());
    assert!(json["regret"]["hazan_total"].is_number());
}

#[test]
fn spread_convention() {
    assert_eq!(spread_of(&[2.0]), 0.0);
    assert_eq!(spread_of(&[1.0, 3.0, 2.0]), 2.0);
    assert!(spread_of(&[1.0, f64::NAN]).is_infinite());
    assert!(spread_of(&[1.0, f64::INFINITY]).is_infinite());
}

#[test]
fn compare_single_eta_has_zero_spread() {
    let base = base_config(Method::Sgd, 0.05, 4);
    let report = compare_methods(
        &base,
        &[0.05],
        &[CompareMethod::Sgd, CompareMethod::Pts],
        &[1, 2],
    )
    .unwrap();
    assert_eq!(report.runs.len(), 4);
    for s in &report.spreads {
        assert_eq!(s.spread, 0.0);
    }
    for m in &report.mean_spreads {
        assert_eq!(m.mean_spread, 0.0);
    }
}

#[test]
fn compare_grid_is_merged_in_grid_order() {
    let base = base_config(Method::Sgd, 0.05, 4);
    let report = compare_methods(
        &base,
        &[0.02, 0.05],
        &[CompareMethod::Pts, CompareMethod::Sgd],
        &[3],
    )
    .unwrap();
    let keys: Vec<(CompareMethod, f64)> = report.runs.iter().map(|r| (r.method, r.eta)).collect();
    assert_eq!(
        keys,
        vec![
            (CompareMethod::Pts, 0.02),
            (CompareMethod::Pts, 0.05),
            (CompareMethod::Sgd, 0.02),
            (CompareMethod::Sgd, 0.05),
        ]
    );
    let csv = stability_to_csv(&report);
    assert!(csv.starts_with("method,eta,seed,final_ql_grand,diverged\n"));
    assert_eq!(csv.lines().count(), 5);

    assert!(matches!(
        compare_methods(&base, &[], &[CompareMethod::Sgd], &[1]),
        Err(Error::Config(_))
    ));
}
