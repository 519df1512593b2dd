//! Parity vectors and the induced maps on `Z/2^n`.
//!
//! `Phi^-1` sends `x` to the parities of its `T`-orbit. The first `n`
//! parities depend only on `x mod 2^n`, and every 0/1 word of length `n`
//! arises from exactly one residue, so `Phi` is a bijection at each finite
//! precision. `Omega = Phi V Phi^-1` and `H_k = Phi M_k Phi^-1` are built
//! from it.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{Nat, t_step};
use crate::error::{Error, Result};

/// Largest supported precision: residues mod `2^MAX_EXPONENT` fit in `u64`.
pub const MAX_EXPONENT: u32 = 63;

/// A finite 0/1 word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct ParityBits(Vec<u8>);

impl ParityBits {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidBit(b));
        }
        Ok(Self(bits))
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        Self(bits.into_iter().map(u8::from).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![1; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Option<u8> {
        self.0.get(i).copied()
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(u8::from(bit));
    }

    /// Longest run of consecutive zeros.
    pub fn max_zero_run(&self) -> usize {
        let mut best = 0;
        let mut cur = 0;
        for &b in &self.0 {
            if b == 0 {
                cur += 1;
                best = best.max(cur);
            } else {
                cur = 0;
            }
        }
        best
    }
}

impl TryFrom<Vec<u8>> for ParityBits {
    type Error = Error;
    fn try_from(v: Vec<u8>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ParityBits> for Vec<u8> {
    fn from(v: ParityBits) -> Self {
        v.0
    }
}

impl fmt::Display for ParityBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for ParityBits {
    type Err = Error;

    /// Accepts `"1010"` or `"1,0,1,0"`.
    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Parse(format!("unexpected character {other:?} in bit string"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Self(bits))
    }
}

fn check_exponent(n: u32) -> Result<()> {
    if n == 0 || n > MAX_EXPONENT {
        return Err(Error::Precision {
            exponent: n,
            max: MAX_EXPONENT,
        });
    }
    Ok(())
}

fn low_mask(n: u32) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// First `n` parities of the `T`-orbit of `x`.
pub fn parity_vector(x: &Nat, n: usize) -> ParityBits {
    let mut cur = x.clone();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(u8::from(cur.bit(0)));
        cur = t_step(&cur);
    }
    ParityBits(out)
}

/// First `n` parities for the canonical lift of `x mod 2^n`.
///
/// Uses `u128`: starting below `2^63`, 63 steps of `T` stay below `2^101`.
pub fn parity_vector_mod(x: u64, n: u32) -> Result<ParityBits> {
    check_exponent(n)?;
    let mut cur = (x & low_mask(n)) as u128;
    let mut out = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let bit = (cur & 1) as u8;
        out.push(bit);
        cur = if bit == 0 { cur >> 1 } else { (3 * cur + 1) >> 1 };
    }
    Ok(ParityBits(out))
}

/// The residue mod `2^len(v)` whose first `len(v)` parities are `v`.
///
/// Bit lifting: once bits `0..i` of `x` are fixed, the parity of `T^i(x)`
/// is known, and setting bit `i` of `x` flips it (it adds `3^r`, which is
/// odd, to `T^i(x)`). So each bit of `x` is forced in turn.
pub fn phi_mod(v: &ParityBits) -> Result<u64> {
    let n = v.len() as u32;
    check_exponent(n)?;
    let mut x = 0u64;
    for (i, &want) in v.bits().iter().enumerate() {
        let mut cur = x as u128;
        for _ in 0..i {
            cur = if cur & 1 == 0 { cur >> 1 } else { (3 * cur + 1) >> 1 };
        }
        if (cur & 1) as u8 != want {
            x |= 1u64 << i;
        }
    }
    Ok(x)
}

/// `V`: flips every bit.
pub fn bit_complement(v: &ParityBits) -> ParityBits {
    ParityBits(v.0.iter().map(|b| 1 - b).collect())
}

/// `M_k`: sums each window of `k` consecutive bits mod 2. `M_2` is the
/// discrete derivative `D`.
pub fn mk_map(v: &ParityBits, k: usize) -> Result<ParityBits> {
    if k < 2 {
        return Err(Error::Precondition(format!("window must be at least 2, got {k}")));
    }
    if v.len() < k {
        return Err(Error::TooShort {
            len: v.len(),
            window: k,
        });
    }
    Ok(ParityBits(
        v.0.windows(k)
            .map(|w| w.iter().fold(0, |acc, b| acc ^ b))
            .collect(),
    ))
}

/// `Omega(x) mod 2^n`.
pub fn omega_mod(x: u64, n: u32) -> Result<u64> {
    phi_mod(&bit_complement(&parity_vector_mod(x, n)?))
}

/// `H_k(x)`, taking `x mod 2^(n+k-1)` to a residue mod `2^n`.
pub fn h_mk_mod(x: u64, n: u32, k: u32) -> Result<u64> {
    if k < 2 {
        return Err(Error::Precondition(format!("window must be at least 2, got {k}")));
    }
    check_exponent(n)?;
    let source = n + k - 1;
    check_exponent(source)?;
    phi_mod(&mk_map(&parity_vector_mod(x, source)?, k as usize)?)
}

/// A tabulated map `Z/2^source -> Z/2^target`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueMap2n {
    source_exp: u32,
    target_exp: u32,
    table: Vec<u64>,
}

/// Tables are capped so they fit comfortably in memory.
pub const MAX_TABLE_EXPONENT: u32 = 24;

impl ResidueMap2n {
    fn build(source_exp: u32, target_exp: u32, f: impl Fn(u64) -> Result<u64> + Sync) -> Result<Self> {
        if source_exp > MAX_TABLE_EXPONENT {
            return Err(Error::Precision {
                exponent: source_exp,
                max: MAX_TABLE_EXPONENT,
            });
        }
        let table = (0..1u64 << source_exp)
            .into_par_iter()
            .map(&f)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            source_exp,
            target_exp,
            table,
        })
    }

    /// `Omega` on `Z/2^n`.
    pub fn omega(n: u32) -> Result<Self> {
        check_exponent(n)?;
        Self::build(n, n, |x| omega_mod(x, n))
    }

    /// `H_k` from `Z/2^(n+k-1)` onto `Z/2^n`.
    pub fn h_mk(n: u32, k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::Precondition(format!("window must be at least 2, got {k}")));
        }
        Self::build(n + k - 1, n, |x| h_mk_mod(x, n, k))
    }

    /// `self` followed by `after`.
    pub fn then(&self, after: &ResidueMap2n) -> Result<Self> {
        if after.source_exp != self.target_exp {
            return Err(Error::Precondition(format!(
                "cannot compose a map into 2^{} with a map from 2^{}",
                self.target_exp, after.source_exp
            )));
        }
        Ok(Self {
            source_exp: self.source_exp,
            target_exp: after.target_exp,
            table: self.table.iter().map(|&y| after.table[y as usize]).collect(),
        })
    }

    pub fn source_exp(&self) -> u32 {
        self.source_exp
    }

    pub fn target_exp(&self) -> u32 {
        self.target_exp
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    pub fn apply(&self, x: u64) -> u64 {
        self.table[(x & low_mask(self.source_exp)) as usize]
    }

    /// All inputs mapping into `targets`, ascending.
    pub fn preimage(&self, targets: &[u64]) -> Vec<u64> {
        let mut hit = vec![false; 1usize << self.target_exp];
        for &t in targets {
            if let Some(slot) = hit.get_mut(t as usize) {
                *slot = true;
            }
        }
        (0..self.table.len() as u64)
            .filter(|&x| hit[self.table[x as usize] as usize])
            .collect()
    }

    /// Number of inputs over each output residue.
    pub fn fiber_sizes(&self) -> Vec<usize> {
        let mut counts = vec![0usize; 1usize << self.target_exp];
        for &y in &self.table {
            counts[y as usize] += 1;
        }
        counts
    }

    pub fn is_permutation(&self) -> bool {
        self.source_exp == self.target_exp && self.fiber_sizes().iter().all(|&c| c == 1)
    }

    pub fn is_involution(&self) -> bool {
        self.source_exp == self.target_exp
            && self
                .table
                .iter()
                .enumerate()
                .all(|(x, &y)| self.table[y as usize] == x as u64)
    }

    /// Two columns, `input,output`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("input,output\n");
        for (x, y) in self.table.iter().enumerate() {
            out.push_str(&format!("{x},{y}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::nat;
    use proptest::prelude::*;

    fn bits(s: &str) -> ParityBits {
        s.parse().unwrap()
    }

    /// Inverse of `parity_vector_mod` by trying every residue.
    fn phi_by_search(v: &ParityBits) -> u64 {
        let n = v.len() as u32;
        (0..1u64 << n)
            .find(|&x| &parity_vector_mod(x, n).unwrap() == v)
            .expect("every word has a preimage")
    }

    #[test]
    fn parity_vector_examples() {
        assert_eq!(parity_vector(&nat(1), 4), bits("1010"));
        assert_eq!(parity_vector(&nat(7), 6), bits("111010"));
        assert_eq!(parity_vector(&nat(8), 3), bits("000"));
    }

    #[test]
    fn modular_and_exact_parities_agree() {
        for n in 1..=12u32 {
            for x in 0..1u64 << n {
                let lift = if x == 0 { 1u64 << n } else { x };
                assert_eq!(parity_vector_mod(x, n).unwrap(), parity_vector(&nat(lift), n as usize));
            }
        }
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_mod(&bits("1010")).unwrap(), 1);
        assert_eq!(phi_mod(&ParityBits::zeros(9)).unwrap(), 0);
        assert_eq!(phi_mod(&ParityBits::ones(8)).unwrap(), 255);
        assert_eq!(phi_by_search(&ParityBits::ones(8)), 255);
        assert_eq!(phi_by_search(&bits("1010")), 1);
    }

    #[test]
    fn phi_matches_exhaustive_search() {
        for n in 1..=10u32 {
            for x in 0..1u64 << n {
                let v = parity_vector_mod(x, n).unwrap();
                assert_eq!(phi_mod(&v).unwrap(), phi_by_search(&v));
            }
        }
    }

    #[test]
    fn phi_round_trip_at_sixteen_bits() {
        let n = 16;
        let ok = (0..1u64 << n)
            .into_par_iter()
            .all(|x| phi_mod(&parity_vector_mod(x, n).unwrap()).unwrap() == x);
        assert!(ok);
    }

    #[test]
    fn precision_limits() {
        assert!(parity_vector_mod(1, 0).is_err());
        assert!(parity_vector_mod(1, 64).is_err());
        assert!(phi_mod(&ParityBits::zeros(64)).is_err());
        assert_eq!(phi_mod(&ParityBits::ones(63)).unwrap(), (1u64 << 63) - 1);
    }

    #[test]
    fn bit_complement_examples() {
        assert_eq!(bit_complement(&bits("100100100")), bits("011011011"));
        assert_eq!(bit_complement(&ParityBits::default()), ParityBits::default());
        assert_eq!(bit_complement(&bit_complement(&bits("0110"))), bits("0110"));
    }

    #[test]
    fn mk_examples() {
        assert_eq!(mk_map(&bits("1001"), 2).unwrap(), bits("101"));
        assert_eq!(mk_map(&bits("1111"), 2).unwrap(), bits("000"));
        assert_eq!(mk_map(&bits("10110"), 3).unwrap(), bits("000"));
        assert_eq!(
            mk_map(&bits("1"), 2),
            Err(Error::TooShort { len: 1, window: 2 })
        );
        assert!(mk_map(&bits("1010"), 1).is_err());
    }

    #[test]
    fn parse_rejects_junk() {
        assert!("10x1".parse::<ParityBits>().is_err());
        assert_eq!(ParityBits::new(vec![0, 2]), Err(Error::InvalidBit(2)));
        assert_eq!("1,0,1".parse::<ParityBits>().unwrap(), bits("101"));
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega_mod(1, 4).unwrap(), 2);
        assert_eq!(omega_mod(3, 4).unwrap(), 12);
        assert_eq!(omega_mod(0, 5).unwrap(), 31);
    }

    #[test]
    fn omega_is_a_parity_flipping_involution() {
        for n in 1..=12 {
            let om = ResidueMap2n::omega(n).unwrap();
            assert!(om.is_permutation(), "n = {n}");
            assert!(om.is_involution(), "n = {n}");
            assert!(om.table().iter().enumerate().all(|(x, y)| (x as u64 ^ y) & 1 == 1));
        }
    }

    #[test]
    fn h_preimages_under_the_window_sum() {
        let h = ResidueMap2n::h_mk(2, 2).unwrap();
        assert_eq!(h.preimage(&[1]), vec![5, 6]);
        assert_eq!(h.preimage(&[2]), vec![3, 4]);
        let h = ResidueMap2n::h_mk(3, 2).unwrap();
        assert_eq!(h.preimage(&[3, 4]), vec![7, 8, 9, 10]);
    }

    #[test]
    fn h_fibers_are_uniform() {
        for n in 1..=8 {
            for k in 2..=4 {
                let h = ResidueMap2n::h_mk(n, k).unwrap();
                let want = 1usize << (k - 1);
                assert!(h.fiber_sizes().iter().all(|&c| c == want), "n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn r_is_constant_on_omega_pairs() {
        for n in 1..=10 {
            let om = ResidueMap2n::omega(n + 1).unwrap();
            let r = ResidueMap2n::h_mk(n, 2).unwrap();
            for x in 0..1u64 << (n + 1) {
                assert_eq!(r.apply(x), r.apply(om.apply(x)), "n = {n}, x = {x}");
            }
        }
    }

    #[test]
    fn csv_export() {
        let om = ResidueMap2n::omega(2).unwrap();
        assert_eq!(om.to_csv(), "input,output\n0,3\n1,2\n2,1\n3,0\n");
    }

    #[test]
    fn composition_checks_precisions() {
        let h = ResidueMap2n::h_mk(2, 2).unwrap();
        let om2 = ResidueMap2n::omega(2).unwrap();
        let om3 = ResidueMap2n::omega(3).unwrap();
        assert!(h.then(&om2).is_ok());
        assert!(h.then(&om3).is_err());
    }

    proptest! {
        #[test]
        fn parity_vectors_are_solenoidal(n in 1u32..=12, x in 0u64..4096, t in 1u64..1_000_000) {
            let x = x & ((1 << n) - 1);
            let lifted = nat(x) + (nat(t) << n as usize);
            prop_assert_eq!(parity_vector(&lifted, n as usize), parity_vector_mod(x, n).unwrap());
        }

        #[test]
        fn phi_inverts_parity_vector(n in 1u32..=63, x in any::<u64>()) {
            let x = x & low_mask(n);
            prop_assert_eq!(phi_mod(&parity_vector_mod(x, n).unwrap()).unwrap(), x);
        }

        #[test]
        fn derivative_of_complement_is_unchanged(v in proptest::collection::vec(0u8..2, 2..40)) {
            let v = ParityBits::new(v).unwrap();
            prop_assert_eq!(mk_map(&bit_complement(&v), 2).unwrap(), mk_map(&v, 2).unwrap());
        }
    }
}
