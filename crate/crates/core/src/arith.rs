//! Exact integer and modular arithmetic, plus the Collatz map and its
//! conjugate `E`.
//!
//! Orbit values are arbitrary precision ([`Nat`]). Residues and moduli are
//! `u64`; every product of two residues is formed in `u128`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision nonnegative integer.
pub type Nat = BigUint;

/// A congruence class `value mod modulus` with `0 <= value < modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    /// Reduces `value` into `[0, modulus)`.
    pub fn new(value: u64, modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidModulus(modulus));
        }
        Ok(Self {
            value: value % modulus,
            modulus,
        })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

/// `red_count` red arrows out of `total_count` arrows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RedFraction {
    red_count: u64,
    total_count: u64,
}

impl RedFraction {
    pub fn new(red_count: u64, total_count: u64) -> Result<Self> {
        if total_count == 0 {
            return Err(Error::Precondition("red fraction needs a positive total".into()));
        }
        if red_count > total_count {
            return Err(Error::Precondition(format!(
                "red count {red_count} exceeds total {total_count}"
            )));
        }
        Ok(Self {
            red_count,
            total_count,
        })
    }

    pub fn red_count(&self) -> u64 {
        self.red_count
    }

    pub fn total_count(&self) -> u64 {
        self.total_count
    }

    /// Mediant `(a + c) / (b + e)`: the fraction of red arrows on the
    /// concatenation of two closed walks.
    pub fn mediant(&self, other: &RedFraction) -> RedFraction {
        RedFraction {
            red_count: self.red_count + other.red_count,
            total_count: self.total_count + other.total_count,
        }
    }

    /// Exact rational comparison, no division.
    pub fn cmp_fraction(&self, other: &RedFraction) -> Ordering {
        let lhs = self.red_count as u128 * other.total_count as u128;
        let rhs = other.red_count as u128 * self.total_count as u128;
        lhs.cmp(&rhs)
    }

    /// For display only; never used in a verdict.
    pub fn approx(&self) -> f64 {
        self.red_count as f64 / self.total_count as f64
    }
}

impl fmt::Display for RedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.red_count, self.total_count)
    }
}

/// Denominator base `B` of a threshold `ln 2 / ln B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LogBase {
    /// `B = 3`, the threshold `ln 2 / ln 3 ~ 0.6309`.
    Three,
    /// `B = 3 + 1/m`.
    ThreePlusInverse(Nat),
}

impl LogBase {
    /// `B = 3 + 2^-exponent`.
    pub fn three_plus_inverse_pow2(exponent: u32) -> Self {
        LogBase::ThreePlusInverse(Nat::one() << exponent as usize)
    }
}

/// Three-way comparison of `r/n` against `ln 2 / ln B`.
///
/// `r/n < ln2/lnB` iff `B^r < 2^n`; for `B = (3m+1)/m` this is
/// `(3m+1)^r < 2^n m^r`. Everything is integer powering.
pub fn cmp_log_ratio(fraction: RedFraction, base: &LogBase) -> Ordering {
    let r = fraction.red_count;
    let n = fraction.total_count;
    let two_pow_n = Nat::one() << n as usize;
    match base {
        LogBase::Three => pow_big(&Nat::from(3u32), r).cmp(&two_pow_n),
        LogBase::ThreePlusInverse(m) => {
            let lhs = pow_big(&(m * 3u32 + 1u32), r);
            let rhs = two_pow_n * pow_big(m, r);
            lhs.cmp(&rhs)
        }
    }
}

fn pow_big(base: &Nat, exp: u64) -> Nat {
    num_traits::pow::pow(base.clone(), exp as usize)
}

/// One step of `T`: `x/2` for even `x`, `(3x+1)/2` for odd `x`.
pub fn t_step(x: &Nat) -> Nat {
    if x.is_even() {
        x >> 1usize
    } else {
        (x * 3u32 + 1u32) >> 1usize
    }
}

/// `[x, T(x), ..., T^steps(x)]`.
pub fn t_orbit(x: &Nat, steps: usize) -> Vec<Nat> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut cur = x.clone();
    out.push(cur.clone());
    for _ in 0..steps {
        cur = t_step(&cur);
        out.push(cur.clone());
    }
    out
}

/// `T` on machine integers; `None` on overflow.
pub fn t_step_u128(x: u128) -> Option<u128> {
    if x % 2 == 0 {
        Some(x / 2)
    } else {
        x.checked_mul(3)?.checked_add(1).map(|y| y / 2)
    }
}

/// One step of `E = P T P^-1`: `3x/2` for even `x`, `(x+1)/2` for odd `x`.
pub fn e_step(x: &Nat) -> Nat {
    if x.is_even() {
        (x >> 1usize) * 3u32
    } else {
        (x + 1u32) >> 1usize
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`.
pub fn mod_inverse(a: u64, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::InvalidModulus(m));
    }
    if m == 1 {
        return Ok(0);
    }
    let eg = (a as i128 % m as i128).extended_gcd(&(m as i128));
    if eg.gcd != 1 {
        return Err(Error::NotCoprime { value: a, modulus: m });
    }
    Ok(eg.x.rem_euclid(m as i128) as u64)
}

/// Smallest `k >= 1` with `a^k = 1 (mod m)`.
pub fn mult_order(a: Residue) -> Result<u64> {
    let m = a.modulus();
    if m == 1 {
        return Ok(1);
    }
    if gcd(a.value(), m) != 1 {
        return Err(Error::NotCoprime {
            value: a.value(),
            modulus: m,
        });
    }
    let mut k = 1u64;
    let mut acc = a.value();
    while acc != 1 {
        acc = mul_mod(acc, a.value(), m);
        k += 1;
    }
    Ok(k)
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Splits `d = 2^n * 3^m * b` with `gcd(b, 6) = 1`, returned as `(n, m, b)`.
pub fn split_six(mut d: u64) -> (u32, u32, u64) {
    let mut n = 0;
    let mut m = 0;
    while d > 0 && d % 2 == 0 {
        d /= 2;
        n += 1;
    }
    while d > 0 && d % 3 == 0 {
        d /= 3;
        m += 1;
    }
    (n, m, d)
}

/// `x mod m` for a big integer.
pub fn nat_mod(x: &Nat, m: u64) -> u64 {
    (x % m).to_u64().unwrap_or(0)
}

pub fn nat(x: u64) -> Nat {
    Nat::from(x)
}

pub fn is_zero(x: &Nat) -> bool {
    x.is_zero()
}

/// Serde for [`Nat`] as a decimal string.
pub mod nat_string {
    use super::Nat;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Nat, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(x)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Nat, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }

    pub mod vec {
        use super::Nat;
        use serde::ser::SerializeSeq;
        use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(xs: &[Nat], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&x.to_string())?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Nat>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|s| s.parse().map_err(D::Error::custom))
                .collect()
        }
    }
}
