use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{t1_inverse, FeasibleVector};
use crate::arith::{t_step_u128, Nat};
use crate::error::{Error, Result};
use crate::parity::ParityBits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Classification {
    /// The trace came back to `x` after `period` steps: a `T`-cycle through `x`.
    PeriodicWitness { period: usize },
    /// The trace hit a multiple of 3 at `position`, after which only
    /// doubling is possible.
    EventuallyZeroConsistent { position: usize },
    Undetermined,
}

/// The vector whose back tracing takes one step per bit, `T1^-1` on a 1
/// and doubling on a 0. Bit `i` is step `i`, so the zeros before the first
/// 1 become the last entry.
pub fn vector_from_bits(bits: &ParityBits) -> FeasibleVector {
    let mut entries = vec![0u32];
    for &b in bits.bits() {
        if b == 1 {
            entries.push(0);
        } else {
            *entries.last_mut().expect("nonempty") += 1;
        }
    }
    entries.reverse();
    FeasibleVector::new(entries).expect("nonempty")
}

/// Follows `v` backwards from `x`, one step per bit.
pub fn classify_parity_vector(v: &ParityBits, x: &Nat) -> Result<Classification> {
    if *x == Nat::from(0u32) {
        return Err(Error::Precondition("back tracing starts from a positive integer".into()));
    }
    let three = Nat::from(3u32);
    let mut cur = x.clone();
    let mut periodic = None;
    let mut zero_at = cur.is_multiple_of(&three).then_some(0);
    for (i, &b) in v.bits().iter().enumerate() {
        cur = if b == 1 {
            t1_inverse(&cur).ok_or(Error::Inadmissible { position: i })?
        } else {
            &cur << 1usize
        };
        if periodic.is_none() && cur == *x {
            periodic = Some(i + 1);
        }
        if zero_at.is_none() && cur.is_multiple_of(&three) {
            zero_at = Some(i + 1);
        }
    }
    Ok(match (periodic, zero_at) {
        (Some(period), _) => Classification::PeriodicWitness { period },
        (None, Some(position)) => Classification::EventuallyZeroConsistent { position },
        (None, None) => Classification::Undetermined,
    })
}

/// Steps until the `T`-orbit of `x` first meets `2 mod 9`. `None` if it
/// reaches 1 first (for `x > 1`), overflows, or takes more than `max_steps`.
pub fn first_two_mod_nine(x: u64, max_steps: u64) -> Option<u64> {
    let mut cur = x as u128;
    for i in 0..=max_steps {
        if cur % 9 == 2 {
            return Some(i);
        }
        if cur == 1 && x > 1 {
            return None;
        }
        cur = t_step_u128(cur)?;
    }
    None
}

/// Every `x` in `1..=limit` whose orbit does not meet `2 mod 9` before 1.
pub fn sweep_two_mod_nine(limit: u64) -> Vec<u64> {
    let mut bad: Vec<u64> = (1..=limit)
        .into_par_iter()
        .filter(|&x| first_two_mod_nine(x, 100_000).is_none())
        .collect();
    bad.sort_unstable();
    bad
}
