use std::collections::BTreeMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{eval_backtrace, BacktraceOutcome, FeasibleVector};
use crate::arith::{euler_phi, factorize, gcd, mod_inverse, mult_order, nat_mod, split_six, Nat, Residue};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_LENGTH: usize = 16;
/// Largest modulus the search will track residues under.
pub const DEFAULT_STATE_BUDGET: u64 = 1 << 27;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BacktraceSolution {
    pub vector: FeasibleVector,
    #[serde(with = "crate::arith::nat_string")]
    pub value: Nat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `d = p^r`, `p > 3`, with 2 a primitive root and the target prime to `p`.
    PrimitiveRoot,
    /// `d` prime to 6: `(d - 1) f`.
    Coprime,
    /// `d = 2^n 3^m b`: `2(b - 1) f + n + 1`.
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthBound {
    pub kind: BoundKind,
    pub value: u64,
}

fn three_halves_order(b: u64) -> Result<u64> {
    if b == 1 {
        return Ok(1);
    }
    mult_order(Residue::new(3 * mod_inverse(2, b)? % b, b)?)
}

fn two_is_primitive_root(d: u64) -> Result<bool> {
    let f = factorize(d);
    if f.len() != 1 || f[0].0 <= 3 {
        return Ok(false);
    }
    Ok(mult_order(Residue::new(2, d)?)? == euler_phi(d))
}

/// How many `T1^-1` steps are enough to reach `a mod d`.
pub fn length_bound(d: u64, a: u64) -> Result<LengthBound> {
    if d == 0 {
        return Err(Error::InvalidModulus(d));
    }
    if two_is_primitive_root(d)? && gcd(a, d) == 1 {
        return Ok(LengthBound { kind: BoundKind::PrimitiveRoot, value: 1 });
    }
    let (n, _, b) = split_six(d);
    let f = three_halves_order(b)?;
    if d == b {
        Ok(LengthBound { kind: BoundKind::Coprime, value: (b - 1) * f })
    } else {
        Ok(LengthBound { kind: BoundKind::General, value: 2 * (b - 1) * f + n as u64 + 1 })
    }
}

struct Bitset(Vec<u64>);

impl Bitset {
    fn new(n: u128) -> Self {
        Bitset(vec![0; (n as usize).div_ceil(64)])
    }

    /// Sets bit `i`, returning whether it was already set.
    fn test_and_set(&mut self, i: u128) -> bool {
        let (w, b) = ((i / 64) as usize, i % 64);
        let was = self.0[w] >> b & 1 == 1;
        self.0[w] |= 1 << b;
        was
    }
}

/// One layer of the search: `z' -> (z, doublings)`.
type Layer = BTreeMap<u128, (u128, u32)>;

/// Search with exactly `len` applications of `T1^-1`.
///
/// After `i` of them only `z mod 3d 3^(len - i)` matters: the remaining
/// steps each divide by 3 once and the final test needs `z mod 3d`.
fn search_len(x: &Nat, a: u64, d: u64, len: usize) -> Option<FeasibleVector> {
    let d3 = 3 * d as u128;
    let modulus = |i: usize| d3 * 3u128.pow((len - i) as u32);
    let mut layers: Vec<Layer> = Vec::with_capacity(len + 1);
    let x0 = {
        let m = modulus(0);
        let r = x % Nat::from(m);
        u128::try_from(r).expect("reduced below a u128 modulus")
    };
    layers.push(BTreeMap::from([(x0, (0, 0))]));
    for i in 0..len {
        let (n_here, n_next) = (modulus(i), modulus(i + 1));
        let mut seen = Bitset::new(n_here);
        let mut next = Layer::new();
        for &z in layers[i].keys() {
            let (mut w, mut j) = (z, 0u32);
            while !seen.test_and_set(w) {
                if w % 3 == 2 {
                    let z2 = ((2 * w - 1) / 3) % n_next;
                    if z2 % 3 != 0 {
                        next.entry(z2).or_insert((z, j));
                    }
                }
                w = 2 * w % n_here;
                j += 1;
            }
        }
        if next.is_empty() {
            return None;
        }
        layers.push(next);
    }
    let mut seen = Bitset::new(d3);
    for &z in layers[len].keys() {
        let (mut w, mut j) = (z, 0u32);
        while !seen.test_and_set(w) {
            if w % d as u128 == a as u128 && w % 3 != 0 {
                let mut entries = vec![j];
                let mut cur = z;
                for layer in layers[1..].iter().rev() {
                    let (parent, k) = layer[&cur];
                    entries.push(k);
                    cur = parent;
                }
                return Some(FeasibleVector::new(entries).expect("nonempty"));
            }
            w = 2 * w % d3;
            j += 1;
        }
    }
    None
}

/// A shortest back-tracing vector `s` (fewest `T1^-1` steps) with
/// `v_s(x) = a mod d` and `v_s(x)` prime to 3, or `None` if there is none
/// with at most `max_len` steps.
pub fn find_backtrace_to_class(
    x: &Nat,
    a: u64,
    d: u64,
    max_len: usize,
    state_budget: u64,
) -> Result<Option<BacktraceSolution>> {
    if d == 0 {
        return Err(Error::InvalidModulus(d));
    }
    if a >= d {
        return Err(Error::ResidueOutOfRange { residue: a, modulus: d });
    }
    if *x == Nat::from(0u32) || x.is_multiple_of(&Nat::from(3u32)) {
        return Err(Error::Precondition(format!("back tracing needs x > 0 prime to 3, got {x}")));
    }
    if d % 3 == 0 && a % 3 == 0 {
        return Err(Error::DivisibleByThree { residue: a, modulus: d });
    }
    for len in 0..=max_len {
        let big = (3 * d as u128).checked_mul(3u128.checked_pow(len as u32).unwrap_or(u128::MAX));
        match big {
            Some(m) if m <= state_budget as u128 => {}
            _ => {
                return Err(Error::BudgetExceeded {
                    what: "back-tracing state space",
                    budget: state_budget,
                })
            }
        }
        if let Some(vector) = search_len(x, a, d, len) {
            let value = match eval_backtrace(x, &vector)? {
                BacktraceOutcome::Admissible { value } => value,
                BacktraceOutcome::Inadmissible { position, .. } => {
                    return Err(Error::Inadmissible { position })
                }
            };
            if nat_mod(&value, d) != a || nat_mod(&value, 3) == 0 {
                return Err(Error::Precondition(format!("{vector} does not reach {a} mod {d}")));
            }
            return Ok(Some(BacktraceSolution { vector, value }));
        }
    }
    Ok(None)
}
