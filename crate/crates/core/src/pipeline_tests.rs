use std::collections::BTreeSet;

use num_bigint::BigUint;
use proptest::prelude::*;

use crate::arith::t_step;
use crate::backtrace::{eval_backtrace, greedy_backtrace, BacktraceOutcome, FeasibleVector};
use crate::duality::{fold_residue_set, unfold_sufficient_set, UnfoldConvention};
use crate::gamma::{
    build_gamma, build_gamma_tilde, delete_nodes, prune_acyclic_edges, to_dot, Color, ColoredDigraph,
};
use crate::sufficiency::{
    check_all, check_strong, sparse_sufficient_set, CheckConfig, Outcome, ResidueSet, SufficiencyVerdict,
};

fn dot_edges(dot: &str) -> BTreeSet<(u64, u64, Color)> {
    dot.lines()
        .filter_map(|l| {
            let (lhs, attrs) = l.trim().split_once(" [")?;
            let (a, b) = lhs.split_once(" -> ")?;
            let color = if attrs.contains("color=red") { Color::Red } else { Color::Black };
            Some((a.parse().ok()?, b.parse().ok()?, color))
        })
        .collect()
}

fn edges(g: &ColoredDigraph) -> BTreeSet<(u64, u64, Color)> {
    g.edges().iter().map(|e| (e.from, e.to, e.color)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dot_lists_every_edge(d in 1u64..200) {
        let g = build_gamma(d).unwrap();
        prop_assert_eq!(dot_edges(&to_dot(&g, |_| None)), edges(&g));
    }

    #[test]
    fn verdicts_survive_json(d in 2u64..28, seed in any::<u64>()) {
        let g = build_gamma_tilde(d).unwrap();
        let nodes: Vec<u64> = g.nodes().iter().copied().collect();
        let r = nodes[(seed % nodes.len() as u64) as usize];
        let set = ResidueSet::new(d, [r]).unwrap();
        let v = check_all(&set, &CheckConfig::default()).unwrap();
        let back: SufficiencyVerdict = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        prop_assert_eq!(&back, &v);
        // the certificate graph can be rebuilt from the set alone
        let rebuilt = prune_acyclic_edges(&delete_nodes(&g, &[r]).unwrap());
        prop_assert_eq!(v.certificate.graph, rebuilt);
    }

    #[test]
    fn greedy_values_walk_forward(x in 1u64..100_000, steps in 1usize..200) {
        let trace = greedy_backtrace(&BigUint::from(x), steps).unwrap();
        prop_assert_eq!(trace.values.len(), steps + 1);
        for w in trace.values.windows(2) {
            prop_assert_eq!(t_step(&w[1]), w[0].clone());
        }
    }
}

#[test]
fn sparse_elements_are_pure_doublings() {
    let elems = sparse_sufficient_set(3, 4, |n| (n % 7) as u32, 50).unwrap();
    for (n, e) in elems.iter().enumerate() {
        let base = BigUint::from(3 + 4 * n as u64);
        let s = FeasibleVector::new(vec![(n % 7) as u32]).unwrap();
        assert_eq!(eval_backtrace(&base, &s).unwrap(), BacktraceOutcome::Admissible { value: e.clone() });
    }
}

#[test]
fn unfolding_strong_pairs_mod_8() {
    let cfg = CheckConfig::default();
    let mut lifted = 0;
    for a in 0..8u64 {
        for b in a + 1..8 {
            let set = ResidueSet::new(8, [a, b]).unwrap();
            if check_strong(&set, &cfg).unwrap().strong != Some(Outcome::Pass) {
                continue;
            }
            for conv in [UnfoldConvention::Literal, UnfoldConvention::OmegaTwisted] {
                let v = unfold_sufficient_set(&set, 2, conv, &cfg).unwrap();
                assert_eq!(v.strong, Some(Outcome::Pass), "{set} {conv:?}");
                assert_eq!(fold_residue_set(&v.set, 2, conv).unwrap(), set);
                lifted += 1;
            }
        }
    }
    assert!(lifted > 0);
}
