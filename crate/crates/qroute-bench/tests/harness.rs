//! Harness-level contracts: determinism of runs and written artifacts,
//! aggregate math against an independent oracle, record schema stability.

use std::collections::HashSet;

use qroute_bench::config::{
    Connectivity, ExperimentConfig, NoiseConfig, RouterKind, SabreKnobs, SweepMode,
};
use qroute_bench::runner::{
    aggregate, read_aggregates_csv, read_records_csv, run_experiment, write_outputs,
};

fn tiny_config() -> ExperimentConfig {
    ExperimentConfig {
        connectivity: Connectivity::Path,
        mode: SweepMode::QubitSweep {
            qubit_counts: vec![6],
            gate_factor: 5,
        },
        circuits_per_point: 1,
        routers: vec![RouterKind::Basic],
        noise: NoiseConfig::default(),
        base_seed: 9,
        sabre: SabreKnobs::default(),
    }
}

#[test]
fn single_run_yields_one_record_and_one_row() {
    let output = run_experiment(&tiny_config()).unwrap();
    assert_eq!(output.records.len(), 1);
    assert_eq!(output.aggregates.len(), 1);
    let row = &output.aggregates[0];
    assert_eq!(row.runs, 1);
    assert_eq!(row.swaps_per_gate_std, 0.0);
    assert_eq!(row.swaps_per_gate_mean, output.records[0].s as f64 / 30.0);
}

#[test]
fn reruns_write_byte_identical_outputs() {
    let config = ExperimentConfig {
        mode: SweepMode::QubitSweep {
            qubit_counts: vec![6, 8],
            gate_factor: 5,
        },
        circuits_per_point: 3,
        routers: vec![RouterKind::Basic, RouterKind::Naive],
        ..tiny_config()
    };
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for dir in &dirs {
        let output = run_experiment(&config).unwrap();
        write_outputs(dir.path(), &config, &output).unwrap();
    }
    for name in [
        "config.json",
        "records.csv",
        "aggregate.csv",
        "records_path_basic.jsonl",
        "records_path_naive.jsonl",
    ] {
        let a = std::fs::read(dirs[0].path().join(name)).unwrap();
        let b = std::fs::read(dirs[1].path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs across reruns");
    }
}

#[test]
fn aggregates_recompute_from_written_records() {
    let config = ExperimentConfig {
        circuits_per_point: 4,
        routers: vec![RouterKind::BasicDecay, RouterKind::Naive],
        ..tiny_config()
    };
    let dir = tempfile::tempdir().unwrap();
    let output = run_experiment(&config).unwrap();
    write_outputs(dir.path(), &config, &output).unwrap();

    // Rebuild the aggregate table from the raw JSON lines alone.
    let mut records = Vec::new();
    for router in ["basic-decay", "naive"] {
        let text =
            std::fs::read_to_string(dir.path().join(format!("records_path_{router}.jsonl")))
                .unwrap();
        for line in text.lines() {
            records.push(serde_json::from_str(line).unwrap());
        }
    }
    let recomputed = aggregate(&records);
    let from_csv = aggregate(&read_records_csv(&dir.path().join("records.csv")).unwrap());
    assert_eq!(recomputed.len(), from_csv.len());
    let written = read_aggregates_csv(&dir.path().join("aggregate.csv")).unwrap();
    assert_eq!(recomputed.len(), written.len());
    for (a, b) in recomputed.iter().zip(&written) {
        assert_eq!(a.connectivity, b.connectivity);
        assert_eq!(a.heuristic, b.heuristic);
        assert_eq!(a.n, b.n);
        assert!((a.swaps_per_gate_mean - b.swaps_per_gate_mean).abs() < 1e-9);
        assert!((a.depth_per_gate_mean - b.depth_per_gate_mean).abs() < 1e-9);
        assert!((a.log_fidelity_mean - b.log_fidelity_mean).abs() < 1e-9);
        assert!((a.fidelity_mean - b.fidelity_mean).abs() < 1e-9);
    }
}

#[test]
fn aggregate_matches_two_pass_oracle() {
    let config = ExperimentConfig {
        circuits_per_point: 50,
        ..tiny_config()
    };
    let output = run_experiment(&config).unwrap();
    let values: Vec<f64> = output
        .records
        .iter()
        .map(|r| r.s as f64 / r.g as f64)
        .collect();
    // Two-pass mean/variance oracle.
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    let row = &output.aggregates[0];
    assert!((row.swaps_per_gate_mean - mean).abs() < 1e-12);
    assert!((row.swaps_per_gate_std - var.sqrt()).abs() < 1e-12);
}

#[test]
fn aggregate_hand_example() {
    // Two records with S/G of 1 and 3: mean 2, sample std sqrt(2).
    let base = run_experiment(&tiny_config()).unwrap().records[0].clone();
    let mut r1 = base.clone();
    r1.s = r1.g;
    let mut r2 = base;
    r2.s = 3 * r2.g;
    r2.seed ^= 1;
    let rows = aggregate(&[r1, r2]);
    assert_eq!(rows.len(), 1);
    assert!((rows[0].swaps_per_gate_mean - 2.0).abs() < 1e-12);
    assert!((rows[0].swaps_per_gate_std - 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn records_use_the_closed_heuristic_vocabulary() {
    let config = ExperimentConfig {
        routers: RouterKind::ALL.to_vec(),
        ..tiny_config()
    };
    let dir = tempfile::tempdir().unwrap();
    let output = run_experiment(&config).unwrap();
    write_outputs(dir.path(), &config, &output).unwrap();
    let allowed: HashSet<&str> = [
        "basic",
        "lookahead",
        "lookahead-decay",
        "basic-decay",
        "naive",
    ]
    .into();
    let text = std::fs::read_to_string(dir.path().join("records_path_basic.jsonl")).unwrap();
    for line in text.lines() {
        let value: serde_json::Value = serde_json::from_str(line).unwrap();
        for field in [
            "n",
            "g",
            "s",
            "depth_original",
            "depth_routed",
            "g_tilde",
            "fidelity",
            "log_fidelity",
            "heuristic",
            "connectivity",
            "seed",
        ] {
            assert!(value.get(field).is_some(), "missing field {field}");
        }
        assert!(allowed.contains(value["heuristic"].as_str().unwrap()));
        assert_eq!(value["connectivity"], "path");
    }
}

#[test]
fn gate_sweep_reproduces_duplicate_points() {
    let config = ExperimentConfig {
        mode: SweepMode::GateSweep {
            num_qubits: 6,
            gate_counts: vec![30, 30, 60],
        },
        ..tiny_config()
    };
    let output = run_experiment(&config).unwrap();
    // Duplicate G values share child seeds, so their rows coincide.
    let g30: Vec<_> = output.records.iter().filter(|r| r.g == 30).collect();
    assert_eq!(g30.len(), 2);
    assert_eq!(g30[0], g30[1]);
}

#[test]
fn config_validation_rejects_bad_setups() {
    let mut config = tiny_config();
    config.circuits_per_point = 0;
    assert!(config.validate().is_err());

    let mut config = tiny_config();
    config.routers = vec![RouterKind::Basic, RouterKind::Basic];
    assert!(config.validate().is_err());

    let mut config = tiny_config();
    config.mode = SweepMode::QubitSweep {
        qubit_counts: vec![1],
        gate_factor: 10,
    };
    assert!(config.validate().is_err());

    let mut config = tiny_config();
    config.noise.tqg_fidelity = 1.5;
    assert!(config.validate().is_err());
}

#[test]
fn paired_routers_share_circuits_and_layouts() {
    // Identical (N, index) across routers implies identical G and identical
    // depth_original; the naive and sabre rows must agree on both.
    let config = ExperimentConfig {
        circuits_per_point: 3,
        routers: vec![RouterKind::Basic, RouterKind::Naive],
        ..tiny_config()
    };
    let output = run_experiment(&config).unwrap();
    let basic: Vec<_> = output
        .records
        .iter()
        .filter(|r| r.heuristic == RouterKind::Basic)
        .collect();
    let naive: Vec<_> = output
        .records
        .iter()
        .filter(|r| r.heuristic == RouterKind::Naive)
        .collect();
    assert_eq!(basic.len(), naive.len());
    for (a, b) in basic.iter().zip(&naive) {
        assert_eq!(a.seed, b.seed);
        assert_eq!(a.g, b.g);
        assert_eq!(a.depth_original, b.depth_original);
    }
}
