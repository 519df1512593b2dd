//! Reference rows of the four published tables, one string per row.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CheckConfig, Criterion, Outcome, ResidueSet};
use crate::error::{Error, Result};

pub const STRONG: &[&str] = &[
    "0 mod 2", "1 mod 2", "1 mod 3", "2 mod 3", "0,3 mod 4", "1 mod 4", "2 mod 4", "0,1 mod 5",
    "0,2 mod 5", "1,3 mod 5", "2,3 mod 5", "1,4 mod 6", "1,5 mod 6", "2 mod 6", "4,5 mod 6",
    "0,1,3 mod 7", "0,1,5 mod 7", "0,1,6 mod 7", "1,2,6 mod 7", "2,3 mod 7", "2,5 mod 7",
    "3,4 mod 7", "4,5 mod 7", "4,6 mod 7", "0,1,3 mod 8", "0,1,6 mod 8", "1,4 mod 8", "1,5 mod 8",
    "2,3 mod 8", "2,4,7 mod 8", "2,5,7 mod 8", "2,6 mod 8", "3,4 mod 8", "3,5 mod 8", "4,6 mod 8",
    "5,6 mod 8", "1,4 mod 9", "1,8 mod 9", "2 mod 9", "4,5 mod 9", "4,7 mod 9", "5,8 mod 9",
    "7,8 mod 9", "0,1,4 mod 10", "0,1,6 mod 10", "0,1,8 mod 10", "0,2,4 mod 10", "0,2,6 mod 10",
    "0,2,7 mod 10", "0,2,8 mod 10", "0,4,7 mod 10", "0,6,7 mod 10", "0,7,8 mod 10", "1,3,4 mod 10",
    "1,3,6 mod 10", "1,3,8 mod 10", "1,4,5 mod 10", "1,5,6 mod 10", "1,5,8 mod 10", "2,3,4 mod 10",
    "2,3,6 mod 10", "2,3,7 mod 10", "2,3,8 mod 10", "2,4,5 mod 10", "2,5,6 mod 10", "2,5,7 mod 10",
    "2,5,8 mod 10", "3,4,7 mod 10", "3,6,7 mod 10", "3,7,8 mod 10", "4,5,7 mod 10", "5,6,7 mod 10",
    "5,7,8 mod 10", "0,1,5 mod 11", "0,1,8 mod 11", "0,1,9 mod 11", "0,2,5 mod 11", "0,2,8 mod 11",
    "0,4,5 mod 11", "0,4,8 mod 11", "0,4,9 mod 11", "1,2,7 mod 11", "1,3,5 mod 11", "1,3,8 mod 11",
    "1,3,9 mod 11", "1,3,10 mod 11", "1,5,7 mod 11", "1,7,8 mod 11", "1,7,9 mod 11",
    "2,3,5 mod 11", "2,3,7 mod 11", "2,3,8 mod 11", "2,3,9 mod 11", "2,3,10 mod 11",
    "2,5,7 mod 11", "2,6,7 mod 11", "2,7,8 mod 11", "3,4,5 mod 11", "3,4,8 mod 11", "3,4,9 mod 11",
    "3,4,10 mod 11", "3,6,10 mod 11", "4,7 mod 11", "5,6 mod 11", "6,8 mod 11", "6,9 mod 11",
    "1,5 mod 12", "1,7,10 mod 12", "1,8,11 mod 12", "2,4,11 mod 12", "2,5 mod 12", "2,8 mod 12",
    "2,10 mod 12", "4,5 mod 12", "4,7,10 mod 12", "5,8 mod 12", "7,8 mod 12", "1,3,4 mod 13",
    "1,4,6 mod 13", "1,8,11 mod 13", "2,3,7 mod 13", "2,6,7 mod 13", "3,4,9 mod 13",
    "3,4,10 mod 13", "3,7,10 mod 13", "3,10,11 mod 13", "4,6,9 mod 13", "4,6,10 mod 13",
    "4,8,9 mod 13", "6,7,10 mod 13", "6,10,11 mod 13", "7,8,9 mod 13", "8,9,11 mod 13",
    "8,10,11 mod 13", "3,4,10 mod 14", "4,5,6 mod 14", "4,5,12 mod 14", "4,6,11 mod 14",
    "4,11,12 mod 14", "6,7,8 mod 14", "6,8,9 mod 14", "7,8,12 mod 14", "8,9,12 mod 14",
    "1,5,7 mod 15", "1,5,11 mod 15", "1,5,13 mod 15", "1,5,14 mod 15", "1,7,8 mod 15",
    "1,8,13 mod 15", "1,8,14 mod 15", "1,10,11 mod 15", "1,10,13 mod 15", "2,5,7 mod 15",
    "2,5,11 mod 15", "2,5,13 mod 15", "2,5,14 mod 15", "2,7,8 mod 15", "2,7,10 mod 15",
    "2,8,13 mod 15", "2,8,14 mod 15", "2,10,11 mod 15", "2,10,13 mod 15", "2,10,14 mod 15",
    "4,5,11 mod 15", "4,10,11 mod 15", "8,11 mod 15", "1,8 mod 18", "2,8 mod 18", "2,11 mod 18",
    "7,8 mod 18", "8,10 mod 18", "8,14 mod 18", "10,11 mod 18", "5,11 mod 21",
];

pub const FORWARD: &[&str] = &[
    "3 mod 4", "5 mod 6", "0,3 mod 7", "0,5 mod 7", "1,7 mod 8", "3 mod 8", "6 mod 8", "4 mod 9",
    "8 mod 9", "1,3,9 mod 10", "1,5,9 mod 10", "3,7,9 mod 10", "5,7,9 mod 10", "1,2,5 mod 11",
    "1,2,8 mod 11", "1,5,9 mod 11", "1,8,9 mod 11", "4,5 mod 11", "4,8 mod 11", "2,11 mod 12",
    "5 mod 12", "7,10 mod 12", "7,11 mod 12", "0,1,3 mod 13", "0,1,6 mod 13", "0,2,3 mod 13",
    "0,2,6 mod 13", "0,3,9 mod 13", "0,3,10 mod 13", "0,6,9 mod 13", "0,6,10 mod 13",
    "0,8,9 mod 13", "1,3,7 mod 13", "1,3,11 mod 13", "1,6,7 mod 13", "1,6,11 mod 13",
    "2,3,4 mod 13", "2,3,11 mod 13", "2,4,6 mod 13", "2,6,11 mod 13", "2,8,11 mod 13",
    "3,7,9 mod 13", "3,9,11 mod 13", "6,7,9 mod 13", "6,9,11 mod 13", "3,6,7 mod 14",
    "3,6,9 mod 14", "3,7,10 mod 14", "3,7,12 mod 14", "3,7,13 mod 14", "3,9,10 mod 14",
    "3,9,12 mod 14", "3,9,13 mod 14", "4,5,13 mod 14", "4,11,13 mod 14", "5,6,7 mod 14",
    "5,6,9 mod 14", "5,7,12 mod 14", "5,7,13 mod 14", "5,9,12 mod 14", "5,9,13 mod 14",
    "6,7,11 mod 14", "6,9,11 mod 14", "7,8,13 mod 14", "7,11,12 mod 14", "7,11,13 mod 14",
    "8,9,13 mod 14", "9,11,12 mod 14", "9,11,13 mod 14", "5,11 mod 15", "1,3,7 mod 16",
    "1,3,9 mod 16", "1,3,14 mod 16", "2,7,12 mod 16", "2,11,12 mod 16", "2,12,14 mod 16",
    "3,11 mod 16", "6,7 mod 16", "6,14 mod 16", "7,9 mod 16", "7,11 mod 16", "9,12 mod 16",
    "9,14 mod 16", "9,15 mod 16", "11,14 mod 16", "11,15 mod 16", "4,13 mod 18", "5,11,16 mod 18",
    "8 mod 18", "11,17 mod 18", "13,17 mod 18", "7,9,15 mod 20", "7,15,18 mod 20",
    "7,15,19 mod 20", "9,11,15 mod 20", "11,15,18 mod 20", "11,15,19 mod 20", "5,14 mod 21",
    "10,14,17 mod 21", "13,14,17 mod 21", "14,17,20 mod 21", "3,10,17 mod 22", "3,17,20 mod 22",
    "3,17,21 mod 22", "4,15,19 mod 22", "5,16,17 mod 22", "8,17,19 mod 22", "12,13,19 mod 22",
    "4,17,22 mod 24", "5,17 mod 24", "7,17,20 mod 24", "7,17,22 mod 24", "7,19,20 mod 24",
    "7,19,22 mod 24", "7,19,23 mod 24", "11,14 mod 24", "11,17 mod 24", "11,19 mod 24",
    "14,20 mod 24", "14,22 mod 24", "14,23 mod 24", "17,23 mod 24", "8,17,23 mod 27",
    "8,17,25 mod 27", "10,11,13 mod 27", "10,11,26 mod 27", "10,17 mod 27", "13,17 mod 27",
    "13,22 mod 27", "17,26 mod 27", "20 mod 27", "22,26 mod 27",
];

pub const BACKWARD: &[&str] = &[
    "2,4 mod 8", "2,5 mod 8", "1,4,10 mod 12", "1,8 mod 12", "1,3,4 mod 16", "1,3,5 mod 16",
    "1,3,8 mod 16", "1,3,10 mod 16", "1,4,12 mod 16", "1,5,13 mod 16", "1,8,13 mod 16",
    "2,3,10 mod 16", "2,4,12 mod 16", "2,5,12 mod 16", "2,5,13 mod 16", "2,8,12 mod 16",
    "2,8,13 mod 16", "2,10,12 mod 16", "1,4,10 mod 18", "2,4 mod 18", "1,4,20 mod 24",
    "1,5,13 mod 24", "1,8,20 mod 24", "2,4,20 mod 24", "2,5 mod 24", "2,8,20 mod 24",
];

pub const CYCLE: &[&str] = &[
    "1,3 mod 16", "2,12 mod 16",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Table {
    Strong,
    Forward,
    Backward,
    Cycle,
}

impl Table {
    pub const ALL: [Table; 4] = [Table::Strong, Table::Forward, Table::Backward, Table::Cycle];

    /// Tables are numbered 1 to 4 in the order strong, forward, backward,
    /// cycle.
    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Table::Strong),
            2 => Ok(Table::Forward),
            3 => Ok(Table::Backward),
            4 => Ok(Table::Cycle),
            _ => Err(Error::Parse(format!("no table numbered {n}; expected 1 to 4"))),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Table::Strong => 1,
            Table::Forward => 2,
            Table::Backward => 3,
            Table::Cycle => 4,
        }
    }

    pub fn criterion(self) -> Criterion {
        match self {
            Table::Strong => Criterion::Strong,
            Table::Forward => Criterion::Forward,
            Table::Backward => Criterion::Backward,
            Table::Cycle => Criterion::Cycle,
        }
    }

    pub fn raw_rows(self) -> &'static [&'static str] {
        match self {
            Table::Strong => STRONG,
            Table::Forward => FORWARD,
            Table::Backward => BACKWARD,
            Table::Cycle => CYCLE,
        }
    }

    pub fn rows(self) -> Vec<ResidueSet> {
        self.raw_rows()
            .iter()
            .map(|r| r.parse().expect("reference rows are well formed"))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowResult {
    pub set: ResidueSet,
    pub outcome: Outcome,
}

/// Runs the table's criterion on every reference row, in table order.
pub fn reproduce_table(table: Table, config: &CheckConfig) -> Result<Vec<RowResult>> {
    let criterion = table.criterion();
    table
        .rows()
        .into_par_iter()
        .map(|set| {
            let v = criterion.evaluate(&set, config)?;
            Ok(RowResult {
                outcome: v.outcome(criterion).unwrap_or(Outcome::Undetermined),
                set,
            })
        })
        .collect()
}
