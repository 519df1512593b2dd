//! Self color duality of `Gamma_(2^n)` and folding between powers of 2.

mod fold;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::{build_gamma, color_dual, relabel, Color, ColoredDigraph};
use crate::parity::{ResidueMap2n, MAX_TABLE_EXPONENT};

pub use fold::{
    fiber_cycle_structure, fold_residue_set, unfold_sufficient_set, verify_fold, FiberCycles,
    FoldReport, UnfoldConvention,
};

pub const DEFAULT_ISOMORPHISM_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityWitness {
    pub modulus: u64,
    /// `permutation[v]` is the image of node `v`.
    pub permutation: Vec<u64>,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum DualityResult {
    Witness(DualityWitness),
    NoneExists,
    Undetermined,
}

fn power_of_two_exponent(d: u64) -> Option<u32> {
    d.is_power_of_two().then(|| d.trailing_zeros())
}

/// Whether some relabeling of `Gamma_d` swaps the two colors.
///
/// Powers of 2 get `Omega` as the witness. Other moduli go through an
/// exhaustive search that gives up after `budget` partial assignments.
pub fn check_self_color_dual(d: u64, budget: u64) -> Result<DualityResult> {
    if d < 2 {
        return Err(Error::Precondition(format!("need d >= 2, got {d}")));
    }
    let g = build_gamma(d)?;
    if let Some(n) = power_of_two_exponent(d) {
        if n <= MAX_TABLE_EXPONENT {
            let permutation = ResidueMap2n::omega(n)?.table().to_vec();
            let verified = relabel(&g, &permutation)? == color_dual(&g);
            return Ok(DualityResult::Witness(DualityWitness { modulus: d, permutation, verified }));
        }
    }
    Ok(match find_color_reversal(&g, budget) {
        Search::Found(permutation) => DualityResult::Witness(DualityWitness {
            modulus: d,
            verified: relabel(&g, &permutation)? == color_dual(&g),
            permutation,
        }),
        Search::Exhausted => DualityResult::NoneExists,
        Search::OutOfBudget => DualityResult::Undetermined,
    })
}

enum Search {
    Found(Vec<u64>),
    Exhausted,
    OutOfBudget,
}

/// Color refinement run on `g` and its color dual side by side, so a label
/// means the same thing on both sides. An isomorphism `g -> dual` must
/// preserve labels.
fn joint_labels(g: &ColoredDigraph, dual: &ColoredDigraph) -> (BTreeMap<u64, usize>, BTreeMap<u64, usize>) {
    type Sig = (usize, Vec<(Color, usize)>, Vec<(Color, usize)>);
    let sides = [g, dual];
    let mut labels: [BTreeMap<u64, usize>; 2] =
        [g.nodes().iter().map(|&v| (v, 0)).collect(), dual.nodes().iter().map(|&v| (v, 0)).collect()];
    let mut classes = 1;
    loop {
        let sigs: Vec<BTreeMap<u64, Sig>> = (0..2)
            .map(|s| {
                let (h, lab) = (sides[s], &labels[s]);
                h.nodes()
                    .iter()
                    .map(|&v| {
                        let mut out: Vec<_> = h.out_edges(v).map(|e| (e.color, lab[&e.to])).collect();
                        let mut inc: Vec<_> = h.in_edges(v).map(|e| (e.color, lab[&e.from])).collect();
                        out.sort();
                        inc.sort();
                        (v, (lab[&v], out, inc))
                    })
                    .collect()
            })
            .collect();
        let ids: BTreeMap<&Sig, usize> = sigs
            .iter()
            .flat_map(|m| m.values())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        let next = [0, 1].map(|s| sigs[s].iter().map(|(&v, sig)| (v, ids[sig])).collect());
        let count = ids.len();
        labels = next;
        if count == classes {
            return (labels[0].clone(), labels[1].clone());
        }
        classes = count;
    }
}

fn find_color_reversal(g: &ColoredDigraph, budget: u64) -> Search {
    let dual = color_dual(g);
    let (left, right) = joint_labels(g, &dual);
    let mut l_hist: Vec<usize> = left.values().copied().collect();
    let mut r_hist: Vec<usize> = right.values().copied().collect();
    l_hist.sort_unstable();
    r_hist.sort_unstable();
    if l_hist != r_hist {
        return Search::Exhausted;
    }

    // breadth-first order over the undirected graph, so most nodes have an
    // assigned neighbour when their turn comes
    let mut order = Vec::new();
    let mut seen = BTreeSet::new();
    for &s in g.nodes() {
        if !seen.insert(s) {
            continue;
        }
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for w in g.out_edges(u).map(|e| e.to).chain(g.in_edges(u).map(|e| e.from)) {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
    }

    struct State<'a> {
        g: &'a ColoredDigraph,
        dual: &'a ColoredDigraph,
        left: BTreeMap<u64, usize>,
        right: BTreeMap<u64, usize>,
        order: Vec<u64>,
        map: BTreeMap<u64, u64>,
        used: BTreeSet<u64>,
        steps: u64,
        budget: u64,
    }

    impl State<'_> {
        fn consistent(&self, v: u64, w: u64) -> bool {
            let image = |u: u64| if u == v { Some(w) } else { self.map.get(&u).copied() };
            self.g.out_edges(v).all(|e| image(e.to).is_none_or(|t| self.dual.contains_edge(w, t, e.color)))
                && self
                    .g
                    .in_edges(v)
                    .all(|e| image(e.from).is_none_or(|f| self.dual.contains_edge(f, w, e.color)))
        }

        fn go(&mut self, i: usize) -> Option<bool> {
            if i == self.order.len() {
                return Some(true);
            }
            let v = self.order[i];
            let candidates: Vec<u64> = self
                .right
                .iter()
                .filter(|&(w, &l)| l == self.left[&v] && !self.used.contains(w))
                .map(|(&w, _)| w)
                .collect();
            for w in candidates {
                self.steps += 1;
                if self.steps > self.budget {
                    return None;
                }
                if !self.consistent(v, w) {
                    continue;
                }
                self.map.insert(v, w);
                self.used.insert(w);
                if self.go(i + 1)? {
                    return Some(true);
                }
                self.map.remove(&v);
                self.used.remove(&w);
            }
            Some(false)
        }
    }

    let mut st = State {
        g,
        dual: &dual,
        left,
        right,
        order,
        map: BTreeMap::new(),
        used: BTreeSet::new(),
        steps: 0,
        budget,
    };
    match st.go(0) {
        None => Search::OutOfBudget,
        Some(false) => Search::Exhausted,
        Some(true) => {
            let mut perm = vec![0; g.modulus() as usize];
            for (&v, &w) in &st.map {
                perm[v as usize] = w;
            }
            Search::Found(perm)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn witness(d: u64) -> DualityWitness {
        match check_self_color_dual(d, DEFAULT_ISOMORPHISM_BUDGET).unwrap() {
            DualityResult::Witness(w) => w,
            other => panic!("d = {d}: {other:?}"),
        }
    }

    #[test]
    fn powers_of_two_are_self_dual() {
        for n in 1..=12 {
            let w = witness(1 << n);
            assert!(w.verified, "n = {n}");
        }
    }

    #[test]
    fn omega_swaps_the_two_loops() {
        for n in 2..=10u32 {
            let d = 1u64 << n;
            let g = build_gamma(d).unwrap();
            let black: Vec<u64> = g.edges().iter().filter(|e| e.from == e.to && e.color == Color::Black).map(|e| e.from).collect();
            let red: Vec<u64> = g.edges().iter().filter(|e| e.from == e.to && e.color == Color::Red).map(|e| e.from).collect();
            assert_eq!((black, red), (vec![0], vec![d - 1]));
            let w = witness(d);
            assert_eq!((w.permutation[0], w.permutation[d as usize - 1]), (d - 1, 0));
        }
    }

    #[test]
    fn other_moduli_are_not() {
        for d in (2..=20u64).filter(|d| !d.is_power_of_two()) {
            assert_eq!(
                check_self_color_dual(d, DEFAULT_ISOMORPHISM_BUDGET).unwrap(),
                DualityResult::NoneExists,
                "d = {d}"
            );
        }
    }

    #[test]
    fn search_agrees_with_omega() {
        // run the generic search on a power of 2 as a check on the search
        for n in 1..=5 {
            let g = build_gamma(1 << n).unwrap();
            match find_color_reversal(&g, DEFAULT_ISOMORPHISM_BUDGET) {
                Search::Found(p) => assert_eq!(relabel(&g, &p).unwrap(), color_dual(&g)),
                _ => panic!("n = {n}"),
            }
        }
    }

    #[test]
    fn tiny_budget_is_undetermined() {
        let r = find_color_reversal(&build_gamma(16).unwrap(), 1);
        assert!(matches!(r, Search::OutOfBudget));
        assert!(check_self_color_dual(1, 10).is_err());
    }
}
