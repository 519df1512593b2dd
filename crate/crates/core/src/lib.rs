//! Modular Collatz digraphs and the tools around them.

pub mod arith;
pub mod backtrace;
pub mod duality;
pub mod error;
pub mod gamma;
pub mod group;
pub mod parity;
pub mod sufficiency;

#[cfg(test)]
mod pipeline_tests;

pub use arith::{Nat, RedFraction, Residue};
pub use backtrace::{BacktraceOutcome, FeasibleVector, GreedyTrace};
pub use duality::{DualityResult, DualityWitness, FoldReport, UnfoldConvention};
pub use error::{Error, Result};
pub use gamma::{Color, ColoredDigraph, Cycle, CycleReport, Edge};
pub use group::{AffineMap, GroupStructure};
pub use parity::{ParityBits, ResidueMap2n};
pub use sufficiency::{CheckConfig, Criterion, Outcome, ResidueSet, SufficiencyVerdict};
