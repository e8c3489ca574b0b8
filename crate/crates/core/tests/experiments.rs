use mazer::experiments::{run_experiment, validate_config, ExperimentConfig, ExperimentError, ExperimentId};
use mazer::scattering::meza_dressed;
use serde_json::json;

fn config(id: ExperimentId, overrides: serde_json::Value) -> ExperimentConfig {
    ExperimentConfig::from_overrides(id, &overrides).unwrap()
}

#[test]
fn every_default_config_validates_cleanly() {
    for id in ExperimentId::ALL {
        let c = ExperimentConfig::defaults(id);
        let diagnostics = validate_config(&c);
        assert!(diagnostics.is_empty(), "{id}: {diagnostics:?}");
    }
}

#[test]
fn analytic_runs_are_deterministic() {
    let c = config(ExperimentId::Fig3b, json!({"sweep": {"points": 25}}));
    let a = run_experiment(&c).unwrap();
    let b = run_experiment(&c).unwrap();
    assert_eq!(a.data_section(), b.data_section());
    assert_eq!(a.rows.len(), 25);
    assert_eq!(a.columns.len(), 1 + 2 * 3);
}

#[test]
fn uncoupled_custom_experiment_transmits_everything() {
    let c = config(
        ExperimentId::Custom,
        json!({"lambda0": 0.0, "dk_fractions": [0.0, 0.1], "sweep": {"points": 15}}),
    );
    let table = run_experiment(&c).unwrap();
    for col in table.columns.iter().filter(|c| c.starts_with("P_trans")) {
        for p in table.column(col).unwrap() {
            assert!((p - 1.0).abs() < 1e-12, "{col}: {p}");
        }
    }
    for col in table.columns.iter().filter(|c| c.starts_with("S_")) {
        assert!(table.column(col).unwrap().iter().all(|s| s.abs() < 1e-12));
    }
}

#[test]
fn plane_wave_curve_matches_direct_evaluation() {
    let c = config(ExperimentId::Fig1, json!({"sweep": {"points": 12}}));
    let table = run_experiment(&c).unwrap();
    let k = table.column("k0").unwrap();
    let p = table.column("P_trans_dk0_vacuum").unwrap();
    for (k, p) in k.iter().zip(&p) {
        let direct = meza_dressed(*k, 0, 1.0, 50.0).unwrap().to_bare().transmission_probability();
        assert!((p - direct).abs() < 1e-14);
    }
}

#[test]
fn sech_transmission_approaches_one_half_for_long_modes() {
    let c = config(ExperimentId::Fig5, json!({"sweep": {"points": 20}}));
    let table = run_experiment(&c).unwrap();
    let p = table.column("P_trans_dk0_vacuum").unwrap();
    let s = table.column("S_dk0_vacuum").unwrap();
    assert!((p.last().unwrap() - 0.5).abs() < 0.05);
    assert!((s.last().unwrap() - 1.0).abs() < 0.05);
}

#[test]
fn meza_length_sweep_has_resonance_maxima() {
    let c = config(ExperimentId::Fig2, json!({}));
    let table = run_experiment(&c).unwrap();
    let l = table.column("L").unwrap();
    let p = table.column("P_trans_dk0_vacuum").unwrap();
    let maxima: Vec<f64> = (1..p.len() - 1)
        .filter(|&i| p[i] > p[i - 1] && p[i] >= p[i + 1])
        .map(|i| l[i])
        .collect();
    assert!(maxima.len() >= 5, "{maxima:?}");
    let spread = table.column("P_trans_dk0.5_vacuum").unwrap();
    let swing = |v: &[f64]| v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min);
    assert!(swing(&spread[20..]) < swing(&p[20..]));
}

#[test]
fn metadata_records_configuration() {
    let c = config(ExperimentId::Fig4, json!({"sweep": {"points": 5}}));
    let table = run_experiment(&c).unwrap();
    let keys: Vec<&str> = table.metadata.iter().map(|(k, _)| k.as_str()).collect();
    for key in ["experiment", "config", "runtime_seconds"] {
        assert!(keys.contains(&key), "{keys:?}");
    }
    let (_, cfg) = table.metadata.iter().find(|(k, _)| k == "config").unwrap();
    let round: ExperimentConfig = serde_json::from_str(cfg).unwrap();
    assert_eq!(round, c);
}

#[test]
fn invalid_parameters_are_config_errors() {
    let c = config(ExperimentId::Fig1, json!({"lambda0": -1.0}));
    let err = run_experiment(&c).unwrap_err();
    assert!(matches!(err, ExperimentError::Config(_)));
    assert_eq!(err.exit_code(), 1);
    let c = config(ExperimentId::Custom, json!({"profile": "gaussian"}));
    assert!(!validate_config(&c).is_empty());
}

#[test]
fn unconverged_propagation_reports_the_point() {
    let c = config(
        ExperimentId::Fig6,
        json!({
            "sweep": {"start": 2.0, "stop": 2.0, "points": 1},
            "detunings": [0.0],
            "propagation": {"t_max": 50.0}
        }),
    );
    match run_experiment(&c).unwrap_err() {
        e @ ExperimentError::Convergence { .. } => {
            assert_eq!(e.exit_code(), 2);
            let ExperimentError::Convergence { point, partial, .. } = e else { unreachable!() };
            assert!(point.contains("L=2"), "{point}");
            assert!(partial.is_some());
        }
        other => panic!("expected a convergence error, got {other:?}"),
    }
}
