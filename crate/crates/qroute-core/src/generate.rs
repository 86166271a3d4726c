//! Random benchmark circuits: uniformly sampled two-qubit-gate sequences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::Circuit;
use crate::error::{Error, Result};

/// Parameters for one random circuit draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSpec {
    pub num_qubits: usize,
    pub num_gates: usize,
    pub seed: u64,
}

/// Draw a circuit of exactly `num_gates` gates whose unordered qubit pairs
/// are uniform over all N(N-1)/2 pairs, independently per gate.
///
/// The stream is ChaCha8 (rand_chacha 0.9) seeded from the 64-bit seed, with
/// a fixed draw order of two bounded integers per gate, so the output is a
/// pure function of the spec and reproduces across platforms.
pub fn random_circuit(spec: &GenSpec) -> Result<Circuit> {
    if spec.num_qubits < 2 {
        return Err(Error::InvalidCircuit(format!(
            "random circuits need at least 2 qubits, got {}",
            spec.num_qubits
        )));
    }
    let n = spec.num_qubits as u32;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut pairs = Vec::with_capacity(spec.num_gates);
    for _ in 0..spec.num_gates {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        pairs.push((a.min(b), a.max(b)));
    }
    Circuit::new(spec.num_qubits, pairs)
}
