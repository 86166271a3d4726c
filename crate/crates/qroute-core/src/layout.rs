//! Logical-to-physical qubit assignments.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// Bijection between logical and physical qubits, kept in both directions.
/// SWAP gates mutate it by exchanging the occupants of two physical qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    log_to_phys: Vec<u32>,
    phys_to_log: Vec<u32>,
}

impl Layout {
    pub fn identity(n: usize) -> Self {
        let ids: Vec<u32> = (0..n as u32).collect();
        Self {
            log_to_phys: ids.clone(),
            phys_to_log: ids,
        }
    }

    /// Uniformly random bijection drawn from the given stream.
    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        let mut log_to_phys: Vec<u32> = (0..n as u32).collect();
        log_to_phys.shuffle(rng);
        Self::from_log_to_phys(log_to_phys).expect("shuffled identity stays bijective")
    }

    pub fn from_log_to_phys(log_to_phys: Vec<u32>) -> Result<Self> {
        let n = log_to_phys.len();
        let mut phys_to_log = vec![u32::MAX; n];
        for (logical, &phys) in log_to_phys.iter().enumerate() {
            if phys as usize >= n {
                return Err(Error::InvalidLayout(format!(
                    "physical qubit {phys} out of range for {n} qubits"
                )));
            }
            if phys_to_log[phys as usize] != u32::MAX {
                return Err(Error::InvalidLayout(format!(
                    "physical qubit {phys} assigned twice"
                )));
            }
            phys_to_log[phys as usize] = logical as u32;
        }
        Ok(Self {
            log_to_phys,
            phys_to_log,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.log_to_phys.len()
    }

    /// Physical position of a logical qubit.
    #[inline]
    pub fn phys_of(&self, logical: u32) -> u32 {
        self.log_to_phys[logical as usize]
    }

    /// Logical occupant of a physical qubit.
    #[inline]
    pub fn logical_at(&self, phys: u32) -> u32 {
        self.phys_to_log[phys as usize]
    }

    /// Exchange the logical occupants of two physical qubits.
    pub fn apply_swap(&mut self, a: u32, b: u32) {
        let la = self.phys_to_log[a as usize];
        let lb = self.phys_to_log[b as usize];
        self.phys_to_log[a as usize] = lb;
        self.phys_to_log[b as usize] = la;
        self.log_to_phys[la as usize] = b;
        self.log_to_phys[lb as usize] = a;
    }

    pub fn as_log_to_phys(&self) -> &[u32] {
        &self.log_to_phys
    }
}
