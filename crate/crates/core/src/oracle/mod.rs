//! Brute-force ground truth at tiny scale: rainbow bases, exact `t(ℬ)`, exact `τ_η`, and the
//! exhaustive harnesses that check the exchange and cascade statements.

mod enumerate;
pub mod harness;
mod packing;
mod tau;

use std::time::{Duration, Instant};

use thiserror::Error;

pub use enumerate::{enumerate_rainbow_bases, enumerate_ris, UniverseIndex};
pub use packing::{brute_force_t, brute_force_t_with, naive_t, PackingOrder};
pub use tau::{brute_force_tau_eta, collections_with_signature};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("budget exceeded: {what} is {value}, cap is {cap}")]
    TooLarge {
        what: &'static str,
        value: usize,
        cap: usize,
    },
    #[error("budget exceeded: wall-clock cap of {0:?} reached")]
    Timeout(Duration),
    #[error("budget exceeded: node cap of {0} reached")]
    NodeCap(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_n: usize,
    pub max_universe: usize,
    pub wall: Duration,
    pub max_nodes: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            max_n: 5,
            max_universe: 36,
            wall: Duration::from_secs(60),
            max_nodes: 200_000_000,
        }
    }
}

impl OracleBudget {
    pub fn check(&self, universe: &crate::rainbow::Universe) -> Result<(), OracleError> {
        if universe.n() > self.max_n {
            return Err(OracleError::TooLarge {
                what: "rank",
                value: universe.n(),
                cap: self.max_n,
            });
        }
        let size = universe.size();
        let cap = self.max_universe.min(64);
        if size > cap {
            return Err(OracleError::TooLarge {
                what: "coloured universe",
                value: size,
                cap,
            });
        }
        Ok(())
    }

    pub(crate) fn meter(&self) -> Meter {
        Meter {
            start: Instant::now(),
            wall: self.wall,
            cap: self.max_nodes,
            nodes: 0,
        }
    }
}

/// Node and wall-clock accounting for one search.
pub(crate) struct Meter {
    start: Instant,
    wall: Duration,
    cap: u64,
    nodes: u64,
}

impl Meter {
    pub fn tick(&mut self) -> Result<(), OracleError> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(OracleError::NodeCap(self.cap));
        }
        if self.nodes.is_multiple_of(4096) && self.start.elapsed() > self.wall {
            return Err(OracleError::Timeout(self.wall));
        }
        Ok(())
    }
}
