//! Experiment configuration: sweep shape, router list, noise model, seeds.

use serde::{Deserialize, Serialize};

use qroute_core::metrics::NoiseParams;
use qroute_core::sabre::{HeuristicConfig, Variant};
use qroute_core::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Connectivity {
    Path,
    Square,
}

impl Connectivity {
    pub fn name(self) -> &'static str {
        match self {
            Connectivity::Path => "path",
            Connectivity::Square => "square",
        }
    }

    pub fn build(self, n: usize) -> Result<qroute_core::connectivity::CouplingGraph> {
        match self {
            Connectivity::Path => qroute_core::connectivity::build_path(n),
            Connectivity::Square => qroute_core::connectivity::build_square(n),
        }
    }
}

impl std::str::FromStr for Connectivity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "path" => Ok(Connectivity::Path),
            "square" => Ok(Connectivity::Square),
            other => Err(Error::InvalidConfig(format!("unknown connectivity {other}"))),
        }
    }
}

impl std::fmt::Display for Connectivity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// The routers under benchmark: the four SABRE variants plus the naive
/// sequential baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RouterKind {
    Basic,
    Lookahead,
    LookaheadDecay,
    BasicDecay,
    Naive,
}

impl RouterKind {
    pub const ALL: [RouterKind; 5] = [
        RouterKind::Basic,
        RouterKind::Lookahead,
        RouterKind::LookaheadDecay,
        RouterKind::BasicDecay,
        RouterKind::Naive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RouterKind::Basic => "basic",
            RouterKind::Lookahead => "lookahead",
            RouterKind::LookaheadDecay => "lookahead-decay",
            RouterKind::BasicDecay => "basic-decay",
            RouterKind::Naive => "naive",
        }
    }

    /// SABRE variant behind this router; `None` for the naive baseline.
    pub fn variant(self) -> Option<Variant> {
        match self {
            RouterKind::Basic => Some(Variant::Basic),
            RouterKind::Lookahead => Some(Variant::Lookahead),
            RouterKind::LookaheadDecay => Some(Variant::LookaheadDecay),
            RouterKind::BasicDecay => Some(Variant::BasicDecay),
            RouterKind::Naive => None,
        }
    }
}

impl std::str::FromStr for RouterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RouterKind::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown heuristic {s}")))
    }
}

impl std::fmt::Display for RouterKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// What varies across the sweep: the device size (with G = factor * N) or
/// the gate count at a fixed device size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    QubitSweep {
        qubit_counts: Vec<usize>,
        gate_factor: usize,
    },
    GateSweep {
        num_qubits: usize,
        gate_counts: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub connectivity: Connectivity,
    pub mode: SweepMode,
    pub circuits_per_point: usize,
    pub routers: Vec<RouterKind>,
    #[serde(flatten)]
    pub noise: NoiseConfig,
    pub base_seed: u64,
    #[serde(flatten)]
    pub sabre: SabreKnobs,
}

/// Serializable mirror of [`NoiseParams`] for config snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub tqg_fidelity: f64,
    pub tqg_duration: f64,
    pub t1: f64,
    pub swap_gate_cost: u32,
}

impl From<NoiseParams> for NoiseConfig {
    fn from(p: NoiseParams) -> Self {
        Self {
            tqg_fidelity: p.tqg_fidelity,
            tqg_duration: p.tqg_duration,
            t1: p.t1,
            swap_gate_cost: p.swap_gate_cost,
        }
    }
}

impl From<NoiseConfig> for NoiseParams {
    fn from(c: NoiseConfig) -> Self {
        Self {
            tqg_fidelity: c.tqg_fidelity,
            tqg_duration: c.tqg_duration,
            t1: c.t1,
            swap_gate_cost: c.swap_gate_cost,
        }
    }
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseParams::default().into()
    }
}

/// SABRE knobs shared by every heuristic in a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SabreKnobs {
    pub lookahead_weight: f64,
    pub extended_set_size: usize,
    pub decay_delta: f64,
    pub decay_reset_interval: usize,
}

impl Default for SabreKnobs {
    fn default() -> Self {
        let d = HeuristicConfig::new(Variant::Basic);
        Self {
            lookahead_weight: d.lookahead_weight,
            extended_set_size: d.extended_set_size,
            decay_delta: d.decay_delta,
            decay_reset_interval: d.decay_reset_interval,
        }
    }
}

impl SabreKnobs {
    pub fn heuristic_config(&self, variant: Variant) -> HeuristicConfig {
        HeuristicConfig {
            variant,
            lookahead_weight: self.lookahead_weight,
            extended_set_size: self.extended_set_size,
            decay_delta: self.decay_delta,
            decay_reset_interval: self.decay_reset_interval,
            stall_limit: None,
        }
    }
}

impl ExperimentConfig {
    /// Paper-protocol defaults: N = 10, 20, ..., 200, fifty circuits with
    /// G = 10 N, all five routers.
    pub fn paper_defaults(connectivity: Connectivity) -> Self {
        Self {
            connectivity,
            mode: SweepMode::QubitSweep {
                qubit_counts: (1..=20).map(|i| 10 * i).collect(),
                gate_factor: 10,
            },
            circuits_per_point: 50,
            routers: RouterKind::ALL.to_vec(),
            noise: NoiseConfig::default(),
            base_seed: 1,
            sabre: SabreKnobs::default(),
        }
    }

    /// The (point, gate-count) pairs of the sweep: (N, G) per grid point.
    pub fn points(&self) -> Vec<(usize, usize)> {
        match &self.mode {
            SweepMode::QubitSweep {
                qubit_counts,
                gate_factor,
            } => qubit_counts.iter().map(|&n| (n, gate_factor * n)).collect(),
            SweepMode::GateSweep {
                num_qubits,
                gate_counts,
            } => gate_counts.iter().map(|&g| (*num_qubits, g)).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let points = self.points();
        if points.is_empty() {
            return Err(Error::InvalidConfig("no sweep points".into()));
        }
        for &(n, g) in &points {
            if n < 2 {
                return Err(Error::InvalidConfig(format!(
                    "qubit count {n} below the 2-qubit minimum"
                )));
            }
            if n >= (1 << 30) || g >= (1 << 30) {
                return Err(Error::InvalidConfig(
                    "sweep point exceeds the seed-derivation domain".into(),
                ));
            }
        }
        if self.circuits_per_point == 0 {
            return Err(Error::InvalidConfig("need at least one circuit per point".into()));
        }
        if self.circuits_per_point >= (1 << 30) {
            return Err(Error::InvalidConfig(
                "circuit count exceeds the seed-derivation domain".into(),
            ));
        }
        if self.routers.is_empty() {
            return Err(Error::InvalidConfig("no routers selected".into()));
        }
        let mut seen = self.routers.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != self.routers.len() {
            return Err(Error::InvalidConfig("duplicate router in list".into()));
        }
        NoiseParams::from(self.noise).validate()?;
        self.sabre
            .heuristic_config(Variant::LookaheadDecay)
            .validate()?;
        Ok(())
    }
}
