use std::cmp::Ordering;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::t1_inverse;
use crate::arith::{cmp_log_ratio, LogBase, Nat, RedFraction};
use crate::error::{Error, Result};
use crate::parity::ParityBits;

/// `values[0] = x`, and `bits[i] = 1` when `values[i + 1] = T1^-1(values[i])`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyTrace {
    #[serde(with = "crate::arith::nat_string::vec")]
    pub values: Vec<Nat>,
    pub bits: ParityBits,
}

/// Take `T1^-1` whenever it lands on a value prime to 3, else double.
fn greedy_step(a: &Nat) -> (Nat, bool) {
    if let Some(z) = t1_inverse(a) {
        if !z.is_multiple_of(&Nat::from(3u32)) {
            return (z, true);
        }
    }
    (a << 1usize, false)
}

/// The greedy rule seen mod 9: it takes `T1^-1` exactly at `a = 2, 8 mod 9`.
pub fn greedy_takes_t1_mod9(a: &Nat) -> bool {
    let r = a % 9u32;
    r == Nat::from(2u32) || r == Nat::from(8u32)
}

fn check_start(x: &Nat) -> Result<()> {
    if *x == Nat::from(0u32) {
        return Err(Error::Precondition("greedy back tracing needs x > 0".into()));
    }
    Ok(())
}

pub fn greedy_backtrace(x: &Nat, steps: usize) -> Result<GreedyTrace> {
    check_start(x)?;
    let mut values = Vec::with_capacity(steps + 1);
    let mut bits = ParityBits::default();
    values.push(x.clone());
    for _ in 0..steps {
        let (next, one) = greedy_step(values.last().expect("nonempty"));
        bits.push(one);
        values.push(next);
    }
    Ok(GreedyTrace { values, bits })
}

/// Just the bits, without keeping the values.
pub fn greedy_bits(x: &Nat, steps: usize) -> Result<ParityBits> {
    check_start(x)?;
    let mut cur = x.clone();
    let mut bits = ParityBits::default();
    for _ in 0..steps {
        let (next, one) = greedy_step(&cur);
        bits.push(one);
        cur = next;
    }
    Ok(bits)
}

/// Every prefix that ends in a 1 has at least a quarter ones.
pub fn ones_fraction_holds(bits: &ParityBits) -> bool {
    let mut ones = 0usize;
    bits.bits().iter().enumerate().all(|(i, &b)| {
        if b == 0 {
            return true;
        }
        ones += 1;
        4 * ones >= i + 1
    })
}

/// From the first position `n0` where the trace is smallest, every window
/// `bits[n0 .. n0 + k]` with `r` ones has `3^r <= 2^(k+1)`.
pub fn density_upper_holds(trace: &GreedyTrace) -> bool {
    let n0 = trace
        .values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let log2_3 = 3f64.log2();
    let mut r = 0u64;
    for (k, &b) in trace.bits.bits()[n0..].iter().enumerate() {
        r += b as u64;
        let k = k as u64 + 1;
        let gap = (k + 1) as f64 - r as f64 * log2_3;
        let ok = if gap.abs() > 1e-6 {
            gap > 0.0
        } else {
            let frac = RedFraction::new(r, k + 1).expect("r <= k");
            cmp_log_ratio(frac, &LogBase::Three) != Ordering::Greater
        };
        if !ok {
            return false;
        }
    }
    true
}
