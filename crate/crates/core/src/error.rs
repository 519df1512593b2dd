use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("modulus must be positive, got {0}")]
    InvalidModulus(u64),

    #[error("{value} is not coprime to {modulus}")]
    NotCoprime { value: u64, modulus: u64 },

    #[error("residue {residue} is out of range for modulus {modulus}")]
    ResidueOutOfRange { residue: u64, modulus: u64 },

    #[error("residue {residue} is divisible by 3 and is not a node of the pruned graph mod {modulus}")]
    DivisibleByThree { residue: u64, modulus: u64 },

    #[error("residue set is empty")]
    EmptyResidueSet,

    #[error("node {0} is not in the graph")]
    UnknownNode(u64),

    #[error("relabeling is not a bijection on the node set")]
    NotBijective,

    #[error("sequence of length {len} is shorter than window {window}")]
    TooShort { len: usize, window: usize },

    #[error("{what} exceeded its budget of {budget}")]
    BudgetExceeded { what: &'static str, budget: u64 },

    #[error("precision 2^{exponent} is outside the supported range 1..={max}")]
    Precision { exponent: u32, max: u32 },

    #[error("invalid parity bit {0}; expected 0 or 1")]
    InvalidBit(u8),

    #[error("back-tracing step {position} is not admissible")]
    Inadmissible { position: usize },

    #[error("{0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}
