use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_red_fraction, check_strong, CheckConfig, Outcome, ResidueSet, SufficiencyVerdict};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Strong,
    Forward,
    Backward,
    Cycle,
}

impl Criterion {
    pub const ALL: [Criterion; 4] = [
        Criterion::Strong,
        Criterion::Forward,
        Criterion::Backward,
        Criterion::Cycle,
    ];

    pub fn evaluate(self, set: &ResidueSet, config: &CheckConfig) -> Result<SufficiencyVerdict> {
        match self {
            Criterion::Strong => check_strong(set, config),
            _ => check_red_fraction(set, config),
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Strong => "strong",
            Criterion::Forward => "forward",
            Criterion::Backward => "backward",
            Criterion::Cycle => "cycle",
        })
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strong" => Ok(Criterion::Strong),
            "forward" => Ok(Criterion::Forward),
            "backward" => Ok(Criterion::Backward),
            "cycle" => Ok(Criterion::Cycle),
            other => Err(Error::Parse(format!("unknown criterion {other:?}"))),
        }
    }
}

/// Residues that are nodes of `Gamma~_d`.
pub fn eligible_residues(d: u64) -> Vec<u64> {
    (0..d).filter(|r| d % 3 != 0 || r % 3 != 0).collect()
}

/// Every `k`-subset of eligible residues mod `d` that passes `criterion`,
/// in lexicographic order whatever the thread count.
pub fn search(
    d: u64,
    k: usize,
    criterion: Criterion,
    config: &CheckConfig,
) -> Result<Vec<SufficiencyVerdict>> {
    if d < 2 {
        return Err(Error::Precondition(format!("search needs a modulus of at least 2, got {d}")));
    }
    if k == 0 {
        return Err(Error::EmptyResidueSet);
    }
    let subsets: Vec<Vec<u64>> = eligible_residues(d).into_iter().combinations(k).collect();
    let verdicts = subsets
        .into_par_iter()
        .map(|s| criterion.evaluate(&ResidueSet::new(d, s)?, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(verdicts
        .into_iter()
        .filter(|v| v.outcome(criterion) == Some(Outcome::Pass))
        .collect())
}
