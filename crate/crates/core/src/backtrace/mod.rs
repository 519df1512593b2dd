//! Running `T` backwards.
//!
//! A feasible vector `s = (s_0, ..., s_k)` stands for
//! `v_s = T0^-s_0 . T1^-1 . T0^-s_1 . ... . T1^-1 . T0^-s_k`, applied right to
//! left: double `s_k` times, apply `T1^-1(y) = (2y - 1)/3`, double `s_(k-1)`
//! times, and so on. `T1^-1` needs `y = 2 mod 3`; when every application
//! lands on an integer, `s` is admissible for the starting value.

mod classify;
mod greedy;
mod search;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{mod_inverse, mult_order, Nat, Residue};
use crate::error::{Error, Result};
use crate::group::AffineMap;

pub use classify::{
    classify_parity_vector, first_two_mod_nine, sweep_two_mod_nine, vector_from_bits,
    Classification,
};
pub use greedy::{
    density_upper_holds, greedy_backtrace, greedy_bits, greedy_takes_t1_mod9, ones_fraction_holds,
    GreedyTrace,
};
pub use search::{
    find_backtrace_to_class, length_bound, BacktraceSolution, BoundKind, LengthBound,
    DEFAULT_MAX_LENGTH, DEFAULT_STATE_BUDGET,
};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeasibleVector(Vec<u32>);

impl FeasibleVector {
    /// Needs at least one entry.
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Precondition("a feasible vector has at least one entry".into()));
        }
        Ok(Self(entries))
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// Number of `T1^-1` steps.
    pub fn length(&self) -> usize {
        self.0.len() - 1
    }

    /// Total number of `T` steps: `l(s) + sum(s_i)`.
    pub fn norm(&self) -> u64 {
        self.length() as u64 + self.0.iter().map(|&s| s as u64).sum::<u64>()
    }
}

impl fmt::Display for FeasibleVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for FeasibleVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let entries = inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad vector entry {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum BacktraceOutcome {
    Admissible {
        #[serde(with = "crate::arith::nat_string")]
        value: Nat,
    },
    /// The `position`-th application of `T1^-1` (counting from 0) met
    /// `value`, which is not `2 mod 3`.
    Inadmissible {
        position: usize,
        #[serde(with = "crate::arith::nat_string")]
        value: Nat,
    },
}

impl BacktraceOutcome {
    pub fn value(&self) -> Option<&Nat> {
        match self {
            BacktraceOutcome::Admissible { value } => Some(value),
            BacktraceOutcome::Inadmissible { .. } => None,
        }
    }
}

/// `T1^-1(y) = (2y - 1)/3` when that is an integer.
pub fn t1_inverse(y: &Nat) -> Option<Nat> {
    let (q, r) = (y * 2u32 - 1u32).div_rem(&Nat::from(3u32));
    (r == Nat::from(0u32)).then_some(q)
}

pub fn eval_backtrace(x: &Nat, s: &FeasibleVector) -> Result<BacktraceOutcome> {
    if *x == Nat::from(0u32) {
        return Err(Error::Precondition("back tracing starts from a positive integer".into()));
    }
    let entries = s.entries();
    let mut cur = x << entries[entries.len() - 1] as usize;
    for (position, &k) in entries[..entries.len() - 1].iter().rev().enumerate() {
        match t1_inverse(&cur) {
            Some(next) => cur = next << k as usize,
            None => return Ok(BacktraceOutcome::Inadmissible { position, value: cur }),
        }
    }
    Ok(BacktraceOutcome::Admissible { value: cur })
}

/// The unique class mod `3^l(s)` of starting values for which `s` is
/// admissible, found by trying every residue.
pub fn admissible_class(s: &FeasibleVector) -> Result<Residue> {
    let m = s.length() as u32;
    if m == 0 {
        return Err(Error::Precondition("a vector of length 0 is admissible everywhere".into()));
    }
    let modulus = 3u64
        .checked_pow(m)
        .ok_or_else(|| Error::Precondition(format!("3^{m} does not fit in 64 bits")))?;
    let mut hits = (1..=modulus)
        .filter(|&x| matches!(eval_backtrace(&Nat::from(x), s), Ok(BacktraceOutcome::Admissible { .. })));
    let first = hits.next().ok_or_else(|| Error::Precondition(format!("no admissible class for {s}")))?;
    if hits.next().is_some() {
        return Err(Error::Precondition(format!("more than one admissible class for {s}")));
    }
    Residue::new(first, modulus)
}

/// `{ y : T^k(y) = x }`, optionally keeping only `y` prime to 3.
pub fn level_set(x: &Nat, k: usize, prime_to_three: bool) -> BTreeSet<Nat> {
    let mut level = BTreeSet::from([x.clone()]);
    for _ in 0..k {
        let mut next = BTreeSet::new();
        for y in &level {
            next.insert(y << 1usize);
            if let Some(z) = t1_inverse(y) {
                if z > Nat::from(0u32) {
                    next.insert(z);
                }
            }
        }
        level = next;
    }
    if prime_to_three {
        level.retain(|y| (y % 3u32) != Nat::from(0u32));
    }
    level
}

/// `v_s` as an affine map of `Z/b`.
pub fn backtrace_affine(s: &FeasibleVector, b: u64) -> Result<AffineMap> {
    let t0_inv = AffineMap::t0(b)?.inverse();
    let t1_inv = AffineMap::t1(b)?.inverse();
    let entries = s.entries();
    let mut acc = t0_inv.pow(entries[entries.len() - 1] as u64);
    for &k in entries[..entries.len() - 1].iter().rev() {
        acc = t0_inv.pow(k as u64).compose(&t1_inv).compose(&acc);
    }
    Ok(acc)
}

/// `(2, 0, ..., 0, e - 1, e - 1)` with `f - 2` zeros, where `e = ord(2)` and
/// `f = ord(3/2)` mod `b`. Its back-tracing map adds 1 mod `b`.
pub fn increment_vector(b: u64) -> Result<FeasibleVector> {
    if b <= 1 || b % 2 == 0 || b % 3 == 0 {
        return Err(Error::Precondition(format!("need b > 1 prime to 6, got {b}")));
    }
    let e = mult_order(Residue::new(2, b)?)? as u32;
    let three_halves = 3 * mod_inverse(2, b)? % b;
    let f = mult_order(Residue::new(three_halves, b)?)? as usize;
    let mut entries = vec![2];
    entries.extend(std::iter::repeat_n(0, f - 2));
    entries.extend([e - 1, e - 1]);
    FeasibleVector::new(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{gcd, nat, t_step};
    use proptest::prelude::*;

    fn fv(s: &str) -> FeasibleVector {
        s.parse().unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(
            eval_backtrace(&nat(5), &fv("(0,0)")).unwrap(),
            BacktraceOutcome::Admissible { value: nat(3) }
        );
        assert_eq!(
            eval_backtrace(&nat(5), &fv("(0,1)")).unwrap(),
            BacktraceOutcome::Inadmissible { position: 0, value: nat(10) }
        );
        assert_eq!(eval_backtrace(&nat(1), &fv("(7)")).unwrap().value(), Some(&nat(128)));
        assert!(eval_backtrace(&nat(0), &fv("(1)")).is_err());
    }

    #[test]
    fn vector_bookkeeping() {
        let s = fv("(2,3,3)");
        assert_eq!((s.length(), s.norm()), (2, 10));
        assert_eq!(s.to_string(), "(2,3,3)");
        assert!(FeasibleVector::new(vec![]).is_err());
        assert!("(1,x)".parse::<FeasibleVector>().is_err());
    }

    #[test]
    fn admissible_class_examples() {
        assert_eq!(admissible_class(&fv("(0,0)")).unwrap(), Residue::new(2, 3).unwrap());
        // two T1^-1 in a row: x = 2 mod 3 and (2x - 1)/3 = 2 mod 3
        assert_eq!(admissible_class(&fv("(0,0,0)")).unwrap(), Residue::new(8, 9).unwrap());
        assert!(admissible_class(&fv("(4)")).is_err());
    }

    /// Every vector with entries below `cap` and the given length.
    fn all_vectors(len: usize, cap: u32) -> Vec<FeasibleVector> {
        let mut out = vec![vec![]];
        for _ in 0..=len {
            out = out
                .into_iter()
                .flat_map(|v: Vec<u32>| {
                    (0..cap).map(move |k| {
                        let mut w = v.clone();
                        w.push(k);
                        w
                    })
                })
                .collect();
        }
        out.into_iter().map(|v| FeasibleVector::new(v).unwrap()).collect()
    }

    #[test]
    fn exactly_one_class_per_vector() {
        for len in 1..=5 {
            let cap = if len <= 3 { 4 } else { 2 };
            for s in all_vectors(len, cap) {
                let c = admissible_class(&s).unwrap();
                assert_ne!(c.value() % 3, 0, "{s}");
            }
        }
    }

    #[test]
    fn level_set_examples() {
        assert_eq!(level_set(&nat(7), 0, false), BTreeSet::from([nat(7)]));
        assert_eq!(level_set(&nat(1), 1, false), BTreeSet::from([nat(2)]));
        assert_eq!(level_set(&nat(2), 1, false), BTreeSet::from([nat(1), nat(4)]));
        assert_eq!(level_set(&nat(2), 2, false), BTreeSet::from([nat(2), nat(8)]));
        assert_eq!(level_set(&nat(4), 2, false), BTreeSet::from([nat(5), nat(16)]));
        assert_eq!(level_set(&nat(1), 3, true), BTreeSet::from([nat(2), nat(8)]));
        assert_eq!(level_set(&nat(3), 1, true), BTreeSet::new());
    }

    #[test]
    fn level_sets_map_forward_exactly() {
        for x in 1..60u64 {
            for k in 0..8 {
                for y in level_set(&nat(x), k, false) {
                    let mut cur = y.clone();
                    for _ in 0..k {
                        cur = t_step(&cur);
                    }
                    assert_eq!(cur, nat(x));
                }
            }
        }
        // and nothing is missed below a bound
        let k = 6;
        let found = level_set(&nat(5), k, false);
        for y in 1..2000u64 {
            let mut cur = nat(y);
            for _ in 0..k {
                cur = t_step(&cur);
            }
            assert_eq!(cur == nat(5), found.contains(&nat(y)), "y = {y}");
        }
    }

    #[test]
    fn increment_vector_examples() {
        assert_eq!(increment_vector(5).unwrap(), fv("(2,3,3)"));
        assert_eq!(increment_vector(7).unwrap().length(), 6);
        assert!(increment_vector(1).is_err());
        assert!(increment_vector(9).is_err());
    }

    #[test]
    fn increment_vector_adds_one() {
        for b in (5..400u64).filter(|b| gcd(*b, 6) == 1) {
            let s = increment_vector(b).unwrap();
            let f = backtrace_affine(&s, b).unwrap();
            assert_eq!(f, AffineMap::p(b).unwrap(), "b = {b}");
            assert!(f.pow(b).is_identity());
        }
    }

    #[test]
    fn affine_form_agrees_with_exact_evaluation() {
        let b = 35;
        let s = fv("(1,0,2,1)");
        let map = backtrace_affine(&s, b).unwrap();
        for x in 1..400u64 {
            if let BacktraceOutcome::Admissible { value } = eval_backtrace(&nat(x), &s).unwrap() {
                assert_eq!(value % b, nat(map.apply(x % b)));
            }
        }
    }

    proptest! {
        #[test]
        fn admissible_values_return_under_t(x in 1u64..10_000, raw in proptest::collection::vec(0u32..5, 1..8)) {
            let s = FeasibleVector::new(raw).unwrap();
            prop_assume!(s.norm() <= 20);
            if let BacktraceOutcome::Admissible { value } = eval_backtrace(&nat(x), &s).unwrap() {
                let mut cur = value;
                for _ in 0..s.norm() {
                    cur = t_step(&cur);
                }
                prop_assert_eq!(cur, nat(x));
            }
        }

        #[test]
        fn admissibility_depends_only_on_the_class(x in 1u64..100_000, raw in proptest::collection::vec(0u32..4, 2..6)) {
            let s = FeasibleVector::new(raw).unwrap();
            let class = admissible_class(&s).unwrap();
            let admissible = eval_backtrace(&nat(x), &s).unwrap().value().is_some();
            prop_assert_eq!(admissible, x % class.modulus() == class.value());
        }
    }
}
