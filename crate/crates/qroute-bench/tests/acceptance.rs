//! Acceptance suite: one test per criterion of the benchmark contract, each
//! printing a PASS line with its measured numbers (run with `--nocapture`
//! to see them).
//!
//! The shared ensembles follow the measurement protocol: 50 random circuits
//! per device size with G = 10 N and a shared random initial layout per
//! (size, index), sizes 10..100, all five routers.  The gate-count sweep
//! uses 20 circuits per point.

use std::sync::LazyLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qroute_bench::config::{
    Connectivity, ExperimentConfig, NoiseConfig, RouterKind, SabreKnobs, SweepMode,
};
use qroute_bench::crossover::{crossover_grid, CrossoverGrid};
use qroute_bench::runner::{RunOutput, run_experiment};
use qroute_core::connectivity::{
    all_pairs_distances, analytic_mean_path, build_path, build_square,
    count_shortest_paths_square, mean_shortest_path, LatticeKind,
};
use qroute_core::fitting::{fit, CurveModel, FitKind};
use qroute_core::generate::{random_circuit, GenSpec};
use qroute_core::layout::Layout;
use qroute_core::metrics::NoiseParams;
use qroute_core::naive::route_naive;
use qroute_core::sabre::{route, HeuristicConfig, Variant};
use qroute_core::verify::verify_routed;

const BASE_SEED: u64 = 1;
const QUBIT_GRID: [usize; 10] = [10, 20, 30, 40, 50, 60, 70, 80, 90, 100];

fn ensemble(connectivity: Connectivity, circuits: usize) -> RunOutput {
    let config = ExperimentConfig {
        connectivity,
        mode: SweepMode::QubitSweep {
            qubit_counts: QUBIT_GRID.to_vec(),
            gate_factor: 10,
        },
        circuits_per_point: circuits,
        routers: RouterKind::ALL.to_vec(),
        noise: NoiseConfig::default(),
        base_seed: BASE_SEED,
        sabre: SabreKnobs::default(),
    };
    run_experiment(&config).expect("ensemble run")
}

fn gate_sweep(connectivity: Connectivity) -> RunOutput {
    let config = ExperimentConfig {
        connectivity,
        mode: SweepMode::GateSweep {
            num_qubits: 100,
            gate_counts: vec![200, 500, 1000, 2000],
        },
        circuits_per_point: 20,
        routers: RouterKind::ALL.to_vec(),
        noise: NoiseConfig::default(),
        base_seed: BASE_SEED,
        sabre: SabreKnobs::default(),
    };
    run_experiment(&config).expect("gate sweep run")
}

static PATH_DATA: LazyLock<RunOutput> = LazyLock::new(|| ensemble(Connectivity::Path, 50));
static SQUARE_DATA: LazyLock<RunOutput> = LazyLock::new(|| ensemble(Connectivity::Square, 50));
static GSWEEP_PATH: LazyLock<RunOutput> = LazyLock::new(|| gate_sweep(Connectivity::Path));
static GSWEEP_SQUARE: LazyLock<RunOutput> = LazyLock::new(|| gate_sweep(Connectivity::Square));

fn mean_of(data: &RunOutput, heuristic: RouterKind, n: usize, column: fn(&qroute_bench::runner::AggregateRow) -> f64) -> f64 {
    let row = data
        .aggregates
        .iter()
        .find(|r| r.heuristic == heuristic && r.n == n)
        .unwrap_or_else(|| panic!("no aggregate for {heuristic} at N = {n}"));
    column(row)
}

fn swap_points(data: &RunOutput, heuristic: RouterKind) -> Vec<(f64, f64)> {
    QUBIT_GRID
        .iter()
        .map(|&n| (n as f64, mean_of(data, heuristic, n, |r| r.swaps_per_gate_mean)))
        .collect()
}

fn depth_points(data: &RunOutput, heuristic: RouterKind) -> Vec<(f64, f64)> {
    QUBIT_GRID
        .iter()
        .map(|&n| (n as f64, mean_of(data, heuristic, n, |r| r.depth_per_gate_mean)))
        .collect()
}

fn pass(id: u32, name: &str, details: String) {
    println!("criterion {id:02} ({name}): PASS - {details}");
}

#[test]
fn criterion_01_analytic_mean_path_formulas() {
    for n in 2..=64 {
        let measured =
            mean_shortest_path(&all_pairs_distances(&build_path(n).unwrap()).unwrap());
        let analytic = analytic_mean_path(LatticeKind::Path, n).unwrap();
        assert!(
            (measured - analytic).abs() < 1e-12,
            "path n = {n}: measured {measured}, closed form {analytic}"
        );
    }
    for side in 2..=12 {
        let n = side * side;
        let measured =
            mean_shortest_path(&all_pairs_distances(&build_square(n).unwrap()).unwrap());
        let analytic = analytic_mean_path(LatticeKind::Square, n).unwrap();
        assert!(
            (measured - analytic).abs() < 1e-12,
            "square n = {n}: measured {measured}, closed form {analytic}"
        );
    }
    pass(
        1,
        "analytic distance formulas",
        "path n=2..64 matches (n+1)/3 and full grids n<=144 match 2*sqrt(n)/3 to 1e-12".into(),
    );
}

#[test]
fn criterion_02_shortest_path_counting() {
    // Exhaustive enumeration on the real 5x5 lattice by descending BFS
    // distance, versus the binomial formula.
    let graph = build_square(25).unwrap();
    let dist = all_pairs_distances(&graph).unwrap();
    let coords = graph.coords().unwrap();
    let at = |c: (u32, u32)| coords.iter().position(|&p| p == c).unwrap() as u32;
    fn walk(
        graph: &qroute_core::connectivity::CouplingGraph,
        dist: &qroute_core::connectivity::DistanceMatrix,
        cur: u32,
        dst: u32,
    ) -> u64 {
        if cur == dst {
            return 1;
        }
        graph
            .neighbors(cur)
            .iter()
            .filter(|&&nb| dist.get(nb, dst) == dist.get(cur, dst) - 1)
            .map(|&nb| walk(graph, dist, nb, dst))
            .sum()
    }
    for dr in 0..=4u32 {
        for dc in 0..=4u32 {
            let enumerated = walk(&graph, &dist, at((0, 0)), at((dr, dc)));
            let formula = count_shortest_paths_square(dr, dc);
            assert_eq!(formula, enumerated as u128, "dr = {dr}, dc = {dc}");
        }
    }
    pass(
        2,
        "shortest-path counting",
        "binomial(dr+dc, dr) equals exhaustive enumeration for all dr, dc <= 4".into(),
    );
}

#[test]
fn criterion_03_routing_correctness_property() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    for case in 0..500 {
        let n = rng.random_range(2..=12);
        let g = rng.random_range(0..=60);
        let circuit = random_circuit(&GenSpec {
            num_qubits: n,
            num_gates: g,
            seed: rng.random(),
        })
        .unwrap();
        let graph = if rng.random_bool(0.5) {
            build_path(n).unwrap()
        } else {
            build_square(n).unwrap()
        };
        let layout = Layout::random(n, &mut rng);
        let seed = rng.random();
        let result = match case % 5 {
            0 => route(&circuit, &graph, &layout, &HeuristicConfig::new(Variant::Basic), seed),
            1 => route(&circuit, &graph, &layout, &HeuristicConfig::new(Variant::Lookahead), seed),
            2 => route(
                &circuit,
                &graph,
                &layout,
                &HeuristicConfig::new(Variant::LookaheadDecay),
                seed,
            ),
            3 => route(
                &circuit,
                &graph,
                &layout,
                &HeuristicConfig::new(Variant::BasicDecay),
                seed,
            ),
            _ => route_naive(&circuit, &graph, &layout),
        }
        .expect("routing failed");
        verify_routed(&circuit, &graph, &result)
            .unwrap_or_else(|e| panic!("replay failure on case {case}: {e}"));
    }
    pass(
        3,
        "routing correctness",
        "500 random instances (N <= 12, G <= 60, all routers) replay cleanly".into(),
    );
}

#[test]
fn criterion_04_swap_scaling_path() {
    let result = fit(FitKind::Swap1d, &swap_points(&PATH_DATA, RouterKind::Basic)).unwrap();
    let CurveModel::SwapPower { amplitude, .. } = result.model else {
        panic!("wrong fit kind")
    };
    assert!(
        result.r_squared >= 0.999,
        "r^2 = {} below 0.999",
        result.r_squared
    );
    assert!(
        (0.22..=0.34).contains(&amplitude),
        "A = {amplitude} outside [0.22, 0.34]"
    );
    // Absolute level check at N = 100 against the reference-curve value
    // 0.282 * 100 - 1.18.
    let at_100 = mean_of(&PATH_DATA, RouterKind::Basic, 100, |r| r.swaps_per_gate_mean);
    let reference = 0.282 * 100.0 - 1.18;
    assert!(
        (at_100 - reference).abs() / reference < 0.15,
        "mean S/G at N = 100 is {at_100:.2}, over 15% from {reference:.2}"
    );
    pass(
        4,
        "swap scaling, path",
        format!(
            "A = {amplitude:.4} in [0.22, 0.34], r^2 = {:.5} >= 0.999; S/G at N=100 is {at_100:.2} (reference {reference:.2})",
            result.r_squared
        ),
    );
}

#[test]
fn criterion_05_swap_scaling_square() {
    let result = fit(FitKind::Swap2d, &swap_points(&SQUARE_DATA, RouterKind::Basic)).unwrap();
    let CurveModel::SwapPower { amplitude, .. } = result.model else {
        panic!("wrong fit kind")
    };
    assert!(
        result.r_squared >= 0.99,
        "r^2 = {} below 0.99",
        result.r_squared
    );
    assert!(
        (0.44..=0.66).contains(&amplitude),
        "A = {amplitude} outside [0.44, 0.66]"
    );
    pass(
        5,
        "swap scaling, square",
        format!("A = {amplitude:.4} in [0.44, 0.66], r^2 = {:.5} >= 0.99", result.r_squared),
    );
}

#[test]
fn criterion_06_depth_scaling_path() {
    let mut amplitudes = Vec::new();
    for heuristic in [RouterKind::Basic, RouterKind::BasicDecay] {
        let result = fit(FitKind::Depth1d, &depth_points(&PATH_DATA, heuristic)).unwrap();
        let CurveModel::DepthLog1d { amplitude } = result.model else {
            panic!("wrong fit kind")
        };
        assert!(
            result.r_squared >= 0.95,
            "{heuristic}: r^2 = {} below 0.95",
            result.r_squared
        );
        assert!(
            (0.22..=0.37).contains(&amplitude),
            "{heuristic}: A = {amplitude} outside [0.22, 0.37]"
        );
        amplitudes.push((heuristic, amplitude, result.r_squared));
    }
    let basic = mean_of(&PATH_DATA, RouterKind::Basic, 100, |r| r.depth_per_gate_mean);
    let lookahead = mean_of(&PATH_DATA, RouterKind::Lookahead, 100, |r| {
        r.depth_per_gate_mean
    });
    assert!(
        lookahead >= 2.0 * basic,
        "lookahead depth {lookahead:.3} under 2x basic {basic:.3} at N = 100"
    );
    pass(
        6,
        "depth scaling, path",
        format!(
            "basic A = {:.4} (r^2 = {:.4}), basic-decay A = {:.4} (r^2 = {:.4}); lookahead/basic depth at N=100 = {:.2}x >= 2x",
            amplitudes[0].1, amplitudes[0].2, amplitudes[1].1, amplitudes[1].2, lookahead / basic
        ),
    );
}

#[test]
fn criterion_07_depth_scaling_square() {
    let mut fits = Vec::new();
    for heuristic in [RouterKind::Basic, RouterKind::BasicDecay] {
        let result = fit(FitKind::Depth2d, &depth_points(&SQUARE_DATA, heuristic)).unwrap();
        assert!(
            result.r_squared >= 0.90,
            "{heuristic}: r^2 = {} below 0.90",
            result.r_squared
        );
        fits.push((heuristic, result.r_squared));
    }
    // Monotone decrease within one ensemble standard deviation over 30..100.
    for heuristic in [RouterKind::Basic, RouterKind::BasicDecay] {
        let sizes: Vec<usize> = QUBIT_GRID.iter().copied().filter(|&n| n >= 30).collect();
        for pair in sizes.windows(2) {
            let mean_lo = mean_of(&SQUARE_DATA, heuristic, pair[0], |r| r.depth_per_gate_mean);
            let std_lo = mean_of(&SQUARE_DATA, heuristic, pair[0], |r| r.depth_per_gate_std);
            let mean_hi = mean_of(&SQUARE_DATA, heuristic, pair[1], |r| r.depth_per_gate_mean);
            assert!(
                mean_hi <= mean_lo + std_lo,
                "{heuristic}: depth rose from {mean_lo:.4} (std {std_lo:.4}) to {mean_hi:.4} between N = {} and {}",
                pair[0],
                pair[1]
            );
        }
    }
    pass(
        7,
        "depth scaling, square",
        format!(
            "basic r^2 = {:.4}, basic-decay r^2 = {:.4}, both >= 0.90; D/G decreases monotonically (within 1 std) over N = 30..100",
            fits[0].1, fits[1].1
        ),
    );
}

#[test]
fn criterion_08_heuristic_pairing() {
    let mut worst_gap: f64 = 0.0;
    for data in [&*PATH_DATA, &*SQUARE_DATA] {
        for (plain, decayed) in [
            (RouterKind::Basic, RouterKind::BasicDecay),
            (RouterKind::Lookahead, RouterKind::LookaheadDecay),
        ] {
            for &n in &QUBIT_GRID {
                let a = mean_of(data, plain, n, |r| r.swaps_per_gate_mean);
                let b = mean_of(data, decayed, n, |r| r.swaps_per_gate_mean);
                let gap = (a - b).abs() / a;
                worst_gap = worst_gap.max(gap);
                assert!(
                    gap <= 0.02,
                    "{plain} vs {decayed} at N = {n}: swap gap {:.2}% over 2%",
                    gap * 100.0
                );
            }
        }
    }
    let mut reductions = Vec::new();
    for &n in QUBIT_GRID.iter().filter(|&&n| n >= 30) {
        let basic = mean_of(&SQUARE_DATA, RouterKind::Basic, n, |r| r.depth_per_gate_mean);
        let decay = mean_of(&SQUARE_DATA, RouterKind::BasicDecay, n, |r| {
            r.depth_per_gate_mean
        });
        assert!(
            decay <= basic,
            "basic-decay depth {decay:.4} above basic {basic:.4} at N = {n}"
        );
        reductions.push(1.0 - decay / basic);
    }
    let avg = reductions.iter().sum::<f64>() / reductions.len() as f64;
    assert!(
        (0.01..=0.08).contains(&avg),
        "average square depth reduction {:.2}% outside [1%, 8%]",
        avg * 100.0
    );
    pass(
        8,
        "heuristic pairing",
        format!(
            "worst per-N swap gap {:.2}% <= 2%; basic-decay never deeper than basic for N >= 30; average square depth reduction {:.2}% in [1%, 8%]",
            worst_gap * 100.0,
            avg * 100.0
        ),
    );
}

fn paper_noise_crossover(data: &RunOutput) -> Option<u32> {
    let noise = NoiseParams::default();
    let grid = CrossoverGrid {
        tqg_fidelities: vec![noise.tqg_fidelity],
        idling_fidelities: vec![noise.idling_fidelity()],
        n_lo: 10,
        n_hi: 100,
    };
    crossover_grid(
        &data.records,
        RouterKind::BasicDecay,
        RouterKind::LookaheadDecay,
        &grid,
    )
    .unwrap()[0]
        .crossover_n
}

#[test]
fn criterion_09_fidelity_crossover() {
    let square = paper_noise_crossover(&SQUARE_DATA).expect("no square crossover found");
    assert!(
        (30..=80).contains(&square),
        "square crossover N* = {square} outside [30, 80]"
    );
    let path = paper_noise_crossover(&PATH_DATA).expect("no path crossover found");
    assert!(
        (20..=60).contains(&path),
        "path crossover N* = {path} outside [20, 60]"
    );
    pass(
        9,
        "fidelity crossover",
        format!("basic-decay overtakes lookahead-decay at N* = {square} (square, in [30, 80]) and N* = {path} (path, in [20, 60])"),
    );
}

#[test]
fn criterion_10_crossover_grid_monotonicity() {
    let grid = CrossoverGrid {
        tqg_fidelities: vec![0.9998, 0.9999, 0.99995],
        idling_fidelities: vec![0.99993, 0.99995, 0.99999],
        n_lo: 10,
        n_hi: 100,
    };
    let cells = crossover_grid(
        &SQUARE_DATA.records,
        RouterKind::BasicDecay,
        RouterKind::LookaheadDecay,
        &grid,
    )
    .unwrap();
    let mut summary = Vec::new();
    for &f in &grid.tqg_fidelities {
        let mut previous = 0;
        for &fi in &grid.idling_fidelities {
            let cell = cells
                .iter()
                .find(|c| c.tqg_fidelity == f && c.idling_fidelity == fi)
                .unwrap();
            let n = cell.crossover_n.unwrap_or_else(|| {
                panic!("no crossover at f = {f}, f_idling = {fi}")
            });
            assert!(
                (30..=100).contains(&n),
                "crossover {n} outside [30, 100] at f = {f}, f_idling = {fi}"
            );
            assert!(
                n >= previous,
                "crossover shrank from {previous} to {n} as f_idling rose at f = {f}"
            );
            previous = n;
            summary.push(n);
        }
    }
    pass(
        10,
        "crossover grid",
        format!("N* non-decreasing in f_idling per row, all in [30, 100]: {summary:?}"),
    );
}

#[test]
fn criterion_11_gate_count_linearity() {
    let mut worst: f64 = 0.0;
    for data in [&*GSWEEP_PATH, &*GSWEEP_SQUARE] {
        for router in RouterKind::ALL {
            for column in [
                (|r: &qroute_bench::runner::AggregateRow| r.swaps_per_gate_mean) as fn(&_) -> f64,
                |r| r.depth_per_gate_mean,
            ] {
                let value = |g: usize| {
                    column(
                        data.aggregates
                            .iter()
                            .find(|r| r.heuristic == router && r.g == g)
                            .unwrap(),
                    )
                };
                let rel = (value(2000) - value(1000)).abs() / value(1000);
                worst = worst.max(rel);
                assert!(
                    rel < 0.10,
                    "{router}: ratio moved {:.1}% between G = 1000 and 2000",
                    rel * 100.0
                );
            }
        }
    }
    pass(
        11,
        "G-linearity",
        format!(
            "S/G and D/G move {:.2}% at most between the two largest G values (< 10%)",
            worst * 100.0
        ),
    );
}

#[test]
fn criterion_12_fitter_exactness() {
    let grid: Vec<f64> = (1..=20).map(|i| 10.0 * i as f64).collect();
    // Swap-count curve parameters for the path, per router.
    for (a, c) in [
        (0.282, -1.18),
        (0.282, -1.22),
        (0.255, -2.00),
        (0.257, -2.04),
        (0.283, -1.93),
        (0.334, -0.755),
    ] {
        let data: Vec<(f64, f64)> = grid.iter().map(|&n| (n, a * n + c)).collect();
        let result = fit(FitKind::Swap1d, &data).unwrap();
        let CurveModel::SwapPower { amplitude, offset, .. } = result.model else {
            panic!()
        };
        assert!((amplitude - a).abs() / a < 1e-6, "A = {amplitude} vs {a}");
        assert!((offset - c).abs() / c.abs() < 1e-6, "C = {offset} vs {c}");
    }
    // Square swap curves.
    for (a, c) in [
        (0.549, -1.10),
        (0.549, -1.11),
        (0.466, -1.16),
        (0.435, -1.00),
        (0.650, -0.961),
    ] {
        let data: Vec<(f64, f64)> = grid.iter().map(|&n| (n, a * n.sqrt() + c)).collect();
        let result = fit(FitKind::Swap2d, &data).unwrap();
        let CurveModel::SwapPower { amplitude, offset, .. } = result.model else {
            panic!()
        };
        assert!((amplitude - a).abs() / a < 1e-6);
        assert!((offset - c).abs() / c.abs() < 1e-6);
    }
    // Logarithmic depth curves; the offset construction pins value 1 at N=2.
    for a in [0.293, 0.276] {
        let data: Vec<(f64, f64)> = grid
            .iter()
            .map(|&n| (n, a * n.ln() + (1.0 - a * std::f64::consts::LN_2)))
            .collect();
        let result = fit(FitKind::Depth1d, &data).unwrap();
        let CurveModel::DepthLog1d { amplitude } = result.model else {
            panic!()
        };
        assert!((amplitude - a).abs() / a < 1e-6);
        assert!((result.model.predict(2.0) - 1.0).abs() < 1e-12);
    }
    for (a, c) in [(1.22, 0.152), (1.15, 0.156)] {
        let data: Vec<(f64, f64)> = grid
            .iter()
            .map(|&n| (n, a * n.ln() / n.sqrt() + c))
            .collect();
        let result = fit(FitKind::Depth2d, &data).unwrap();
        let CurveModel::DepthLog2d { amplitude, offset } = result.model else {
            panic!()
        };
        assert!((amplitude - a).abs() / a < 1e-6);
        assert!((offset - c).abs() / c < 1e-6);
    }
    // Fidelity curve with an exponent off the initializer's search grid.
    let (scale, rate_log, exponent) = (0.85f64, -0.004f64, 1.3f64);
    let data: Vec<(f64, f64)> = grid
        .iter()
        .map(|&n| (n, scale.ln() + rate_log * n.powf(exponent)))
        .collect();
    let result = fit(FitKind::Fidelity, &data).unwrap();
    let CurveModel::FidelityExp {
        scale: a,
        base,
        exponent: d,
        ..
    } = result.model
    else {
        panic!()
    };
    assert!((a - scale).abs() / scale < 1e-6);
    assert!((base.ln() - rate_log).abs() / rate_log.abs() < 1e-6);
    assert!((d - exponent).abs() / exponent < 1e-6);
    pass(
        12,
        "fitter exactness",
        "all four model families recover noiseless synthesis parameters to rel. error < 1e-6; depth-1d curve equals 1 at N = 2".into(),
    );
}

#[test]
fn criterion_13_naive_baseline_ordering() {
    for (label, data) in [("path", &*PATH_DATA), ("square", &*SQUARE_DATA)] {
        for &n in QUBIT_GRID.iter().filter(|&&n| n >= 20) {
            let naive = mean_of(data, RouterKind::Naive, n, |r| r.swaps_per_gate_mean);
            for router in [
                RouterKind::Basic,
                RouterKind::Lookahead,
                RouterKind::LookaheadDecay,
                RouterKind::BasicDecay,
            ] {
                let sabre = mean_of(data, router, n, |r| r.swaps_per_gate_mean);
                assert!(
                    naive >= sabre,
                    "{label} N = {n}: naive {naive:.3} under {router} {sabre:.3}"
                );
            }
        }
    }
    pass(
        13,
        "naive baseline ordering",
        "naive mean S/G >= every SABRE variant at every N >= 20 on both connectivities".into(),
    );
}
