//! Qubit-routing engine and benchmark primitives.
//!
//! The crate covers the full pipeline from random two-qubit-gate circuits to
//! fitted scaling laws: circuit IR and dependency structure ([`circuit`]),
//! device connectivities and shortest-path analysis ([`connectivity`]),
//! seeded circuit generation ([`generate`]), SABRE-style SWAP insertion with
//! four heuristic variants ([`sabre`]) next to a naive baseline ([`naive`]),
//! execution-fidelity metrics ([`metrics`]) and the scaling-curve fits with
//! crossover search ([`fitting`]).  [`verify`] replays routed circuits as an
//! independent correctness check.

pub mod circuit;
pub mod connectivity;
pub mod error;
pub mod fitting;
pub mod generate;
pub mod layout;
pub mod metrics;
pub mod naive;
pub mod sabre;
pub mod verify;

pub use error::{Error, Result};
