use crate::arith::{t_step, Nat};
use crate::error::{Error, Result};

/// The first `count` elements `2^f(n) * (a + d n)`, `n = 0, 1, ...`.
///
/// Each element is checked to reach `a + d n` after exactly `f(n)` steps of
/// `T` before it is returned.
pub fn sparse_sufficient_set(
    a: u64,
    d: u64,
    f: impl Fn(u64) -> u32,
    count: usize,
) -> Result<Vec<Nat>> {
    if a == 0 || d == 0 {
        return Err(Error::Precondition(format!(
            "offset and step must be positive, got a = {a}, d = {d}"
        )));
    }
    let mut out = Vec::with_capacity(count);
    for n in 0..count as u64 {
        let base = Nat::from(a) + Nat::from(d) * n;
        let k = f(n);
        let elem = &base << k as usize;
        let mut cur = elem.clone();
        for _ in 0..k {
            cur = t_step(&cur);
        }
        if cur != base {
            return Err(Error::Precondition(format!(
                "element {elem} did not reach {base} after {k} steps"
            )));
        }
        out.push(elem);
    }
    Ok(out)
}
