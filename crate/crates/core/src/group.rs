//! The groups `G_b` generated by `T0` and `T1` acting on `Z/b`.
//!
//! With `b` prime to 6, `T0(x) = x/2` and `T1(x) = (3x+1)/2` are affine
//! permutations of `Z/b`, and so are `P(x) = x + 1` and the branches of
//! `E = P T P^-1`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{factorize, gcd, lcm, mod_inverse, mul_mod, mult_order, Residue};
use crate::error::{Error, Result};

/// `x -> scale * x + shift` over `Z/modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AffineMap {
    scale: u64,
    shift: u64,
    modulus: u64,
}

impl AffineMap {
    pub fn new(scale: u64, shift: u64, modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidModulus(0));
        }
        let scale = scale % modulus;
        if gcd(scale, modulus) != 1 && modulus > 1 {
            return Err(Error::NotCoprime { value: scale, modulus });
        }
        Ok(Self {
            scale,
            shift: shift % modulus,
            modulus,
        })
    }

    pub fn identity(modulus: u64) -> Result<Self> {
        Self::new(1, 0, modulus)
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn shift(&self) -> u64 {
        self.shift
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn apply(&self, x: u64) -> u64 {
        (mul_mod(self.scale, x % self.modulus, self.modulus) + self.shift) % self.modulus
    }

    /// `self` after `other`: `x -> self(other(x))`.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        debug_assert_eq!(self.modulus, other.modulus);
        let m = self.modulus;
        AffineMap {
            scale: mul_mod(self.scale, other.scale, m),
            shift: (mul_mod(self.scale, other.shift, m) + self.shift) % m,
            modulus: m,
        }
    }

    pub fn inverse(&self) -> AffineMap {
        let m = self.modulus;
        let inv = mod_inverse(self.scale, m).expect("scale is a unit");
        AffineMap {
            scale: inv,
            shift: mul_mod(inv, (m - self.shift) % m, m),
            modulus: m,
        }
    }

    pub fn pow(&self, mut k: u64) -> AffineMap {
        let mut base = *self;
        let mut acc = AffineMap {
            scale: 1 % self.modulus,
            shift: 0,
            modulus: self.modulus,
        };
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            k >>= 1;
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.scale == 1 % self.modulus && self.shift == 0
    }

    /// Smallest `k >= 1` with `self^k` the identity, by repeated composition.
    pub fn order(&self) -> u64 {
        let mut k = 1;
        let mut cur = *self;
        while !cur.is_identity() {
            cur = cur.compose(self);
            k += 1;
        }
        k
    }

    /// `T0(x) = x/2`.
    pub fn t0(b: u64) -> Result<Self> {
        check_b(b)?;
        Self::new(mod_inverse(2, b)?, 0, b)
    }

    /// `T1(x) = (3x+1)/2`.
    pub fn t1(b: u64) -> Result<Self> {
        check_b(b)?;
        let inv2 = mod_inverse(2, b)?;
        Self::new(3 * inv2, inv2, b)
    }

    /// `P(x) = x + 1`.
    pub fn p(b: u64) -> Result<Self> {
        check_b(b)?;
        Self::new(1, 1, b)
    }

    /// `E0(x) = 3x/2`.
    pub fn e0(b: u64) -> Result<Self> {
        check_b(b)?;
        Self::new(3 * mod_inverse(2, b)?, 0, b)
    }

    /// `E1(x) = (x+1)/2`.
    pub fn e1(b: u64) -> Result<Self> {
        check_b(b)?;
        let inv2 = mod_inverse(2, b)?;
        Self::new(inv2, inv2, b)
    }
}

impl fmt::Display for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x -> {}x + {} mod {}", self.scale, self.shift, self.modulus)
    }
}

fn check_b(b: u64) -> Result<()> {
    if b == 0 {
        return Err(Error::InvalidModulus(0));
    }
    for p in [2, 3] {
        if b % p == 0 {
            return Err(Error::NotCoprime { value: p, modulus: b });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePowerFactor {
    pub prime: u64,
    pub exponent: u32,
    /// Order of 2 mod `prime^exponent`.
    pub s: u64,
    /// Order of 3 mod `prime^exponent`.
    pub t: u64,
    /// `lcm(s, t)`.
    pub a: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupStructure {
    pub b: u64,
    pub factors: Vec<PrimePowerFactor>,
    /// `b * prod(a_i)`.
    pub predicted_order: u64,
    /// Size of the multiplicative subgroup generated by 2 and 3 mod `b`.
    pub scale_subgroup_order: u64,
    /// `b * scale_subgroup_order`: `G_b` contains every translation, so it
    /// splits as translations times the group of scales it realizes.
    pub order: u64,
}

/// Size of the subgroup of `(Z/b)^*` generated by `gens`.
pub fn unit_subgroup_order(gens: &[u64], b: u64) -> u64 {
    if b == 1 {
        return 1;
    }
    let mut seen = BTreeSet::from([1u64]);
    let mut queue = VecDeque::from([1u64]);
    while let Some(x) = queue.pop_front() {
        for &g in gens {
            let y = mul_mod(x, g, b);
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    seen.len() as u64
}

pub fn gb_structure(b: u64) -> Result<GroupStructure> {
    check_b(b)?;
    let factors: Vec<PrimePowerFactor> = factorize(b)
        .into_iter()
        .map(|(p, e)| {
            let q = p.pow(e);
            let s = mult_order(Residue::new(2, q)?)?;
            let t = mult_order(Residue::new(3, q)?)?;
            Ok(PrimePowerFactor {
                prime: p,
                exponent: e,
                s,
                t,
                a: lcm(s, t),
            })
        })
        .collect::<Result<_>>()?;
    let predicted_order = factors.iter().fold(b, |acc, f| acc * f.a);
    let scale_subgroup_order = unit_subgroup_order(&[2, 3], b);
    Ok(GroupStructure {
        b,
        factors,
        predicted_order,
        scale_subgroup_order,
        order: b * scale_subgroup_order,
    })
}

/// Default cap on `b` for [`affine_closure`].
pub const DEFAULT_CLOSURE_LIMIT: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Closure {
    pub order: u64,
    /// In breadth-first discovery order.
    pub elements: Vec<AffineMap>,
}

/// Every element of `G_b`, found by breadth-first search from the identity
/// over `T0`, `T1` and their inverses.
pub fn affine_closure(b: u64, limit: u64) -> Result<Closure> {
    check_b(b)?;
    if b > limit {
        return Err(Error::BudgetExceeded {
            what: "affine closure modulus",
            budget: limit,
        });
    }
    let t0 = AffineMap::t0(b)?;
    let t1 = AffineMap::t1(b)?;
    let gens = [t0, t1, t0.inverse(), t1.inverse()];
    let id = AffineMap::identity(b)?;
    // AGL(1, b) has at most b^2 elements; index them as scale * b + shift
    let slot = |m: &AffineMap| (m.scale * b + m.shift) as usize;
    let mut seen = vec![false; (b * b) as usize];
    seen[slot(&id)] = true;
    let mut elements = vec![id];
    let mut head = 0;
    while head < elements.len() {
        let x = elements[head];
        head += 1;
        for g in &gens {
            let y = g.compose(&x);
            if !std::mem::replace(&mut seen[slot(&y)], true) {
                elements.push(y);
            }
        }
    }
    Ok(Closure {
        order: elements.len() as u64,
        elements,
    })
}

/// `(ord(2 mod b), ord(3/2 mod b))`.
pub fn generator_orders(b: u64) -> Result<(u64, u64)> {
    check_b(b)?;
    let inv2 = mod_inverse(2, b)?;
    Ok((
        mult_order(Residue::new(2, b)?)?,
        mult_order(Residue::new(mul_mod(3, inv2, b), b)?)?,
    ))
}

/// `T0^-2 T1 T0 T1^-1 T0 = P` and `E1^-2 E0 E1 E0^-1 E1 = P`, composed right
/// to left.
pub fn verify_p_identity(b: u64) -> Result<bool> {
    let word = |a: AffineMap, c: AffineMap| {
        a.inverse()
            .pow(2)
            .compose(&c)
            .compose(&a)
            .compose(&c.inverse())
            .compose(&a)
    };
    let p = AffineMap::p(b)?;
    let t_form = word(AffineMap::t0(b)?, AffineMap::t1(b)?);
    let e_form = word(AffineMap::e1(b)?, AffineMap::e0(b)?);
    Ok(t_form == p && e_form == p)
}
