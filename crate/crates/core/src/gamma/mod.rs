//! The two-colored digraphs `Gamma_d` on `Z/d` and the graph operations the
//! certification pipeline needs.
//!
//! A black edge records the branch `x -> x/2`, a red edge the branch
//! `x -> (3x+1)/2`, both read modulo `d`.

mod cycles;
mod export;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graphmap::DiGraphMap;
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::arith::mod_inverse;
use crate::error::{Error, Result};

pub use cycles::{simple_cycles, Cycle, CycleReport, DEFAULT_CYCLE_BUDGET};
pub use export::to_dot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Black,
    Red,
}

impl Color {
    pub fn swap(self) -> Self {
        match self {
            Color::Black => Color::Red,
            Color::Red => Color::Black,
        }
    }

    /// Black for an even source, red for an odd one.
    pub fn of_parity(x: u64) -> Self {
        if x % 2 == 0 {
            Color::Black
        } else {
            Color::Red
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::Black => "black",
            Color::Red => "red",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub from: u64,
    pub to: u64,
    pub color: Color,
}

impl Edge {
    pub fn new(from: u64, to: u64, color: Color) -> Self {
        Self { from, to, color }
    }
}

/// A finite digraph on residues mod `modulus` with black and red edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoredDigraph {
    modulus: u64,
    nodes: BTreeSet<u64>,
    edges: BTreeSet<Edge>,
}

impl ColoredDigraph {
    pub fn new(
        modulus: u64,
        nodes: impl IntoIterator<Item = u64>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidModulus(0));
        }
        let nodes: BTreeSet<u64> = nodes.into_iter().collect();
        if let Some(&bad) = nodes.iter().find(|&&r| r >= modulus) {
            return Err(Error::ResidueOutOfRange {
                residue: bad,
                modulus,
            });
        }
        let edges: BTreeSet<Edge> = edges.into_iter().collect();
        for e in &edges {
            for end in [e.from, e.to] {
                if !nodes.contains(&end) {
                    return Err(Error::UnknownNode(end));
                }
            }
        }
        Ok(Self {
            modulus,
            nodes,
            edges,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn nodes(&self) -> &BTreeSet<u64> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn contains_edge(&self, from: u64, to: u64, color: Color) -> bool {
        self.edges.contains(&Edge::new(from, to, color))
    }

    pub fn out_edges(&self, u: u64) -> impl Iterator<Item = &Edge> {
        let lo = Edge::new(u, 0, Color::Black);
        self.edges.range(lo..).take_while(move |e| e.from == u)
    }

    pub fn in_edges(&self, v: u64) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.to == v)
    }

    pub fn out_degree(&self, u: u64) -> usize {
        self.out_edges(u).count()
    }

    /// In-degree of every node, in one pass.
    pub fn in_degrees(&self) -> BTreeMap<u64, usize> {
        let mut deg: BTreeMap<u64, usize> = self.nodes.iter().map(|&v| (v, 0)).collect();
        for e in &self.edges {
            *deg.entry(e.to).or_default() += 1;
        }
        deg
    }

    fn induced(&self, keep: impl Fn(u64) -> bool) -> Self {
        let nodes: BTreeSet<u64> = self.nodes.iter().copied().filter(|&v| keep(v)).collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| nodes.contains(&e.from) && nodes.contains(&e.to))
            .copied()
            .collect();
        Self {
            modulus: self.modulus,
            nodes,
            edges,
        }
    }

    fn with_edges(&self, edges: BTreeSet<Edge>) -> Self {
        Self {
            modulus: self.modulus,
            nodes: self.nodes.clone(),
            edges,
        }
    }

    fn petgraph(&self) -> DiGraphMap<u64, ()> {
        let mut g = DiGraphMap::new();
        for &v in &self.nodes {
            g.add_node(v);
        }
        for e in &self.edges {
            g.add_edge(e.from, e.to, ());
        }
        g
    }

    /// Strongly connected components, each sorted, ordered by least node.
    pub fn strongly_connected_components(&self) -> Vec<Vec<u64>> {
        let mut comps: Vec<Vec<u64>> = tarjan_scc(&self.petgraph())
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        comps.sort();
        comps
    }

    /// Node to index of its strongly connected component.
    pub fn scc_index(&self) -> BTreeMap<u64, usize> {
        self.strongly_connected_components()
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.iter().map(move |&v| (v, i)))
            .collect()
    }
}

/// The full graph `Gamma_d`.
///
/// For odd `d`, `2` is invertible and each node has one edge of each color:
/// `r -> r/2` and `r -> (3r+1)/2`. For even `d`, halving loses the top bit,
/// so an even `r` has black edges to `r/2` and `r/2 + d/2`, and an odd `r`
/// red edges to `(3r+1)/2` and `(3r+1)/2 + d/2`.
pub fn build_gamma(d: u64) -> Result<ColoredDigraph> {
    if d == 0 {
        return Err(Error::InvalidModulus(0));
    }
    let mut edges = BTreeSet::new();
    if d % 2 == 1 {
        let inv2 = mod_inverse(2, d)?;
        let half = |v: u128| ((v * inv2 as u128) % d as u128) as u64;
        for r in 0..d {
            edges.insert(Edge::new(r, half(r as u128), Color::Black));
            edges.insert(Edge::new(r, half(3 * r as u128 + 1), Color::Red));
        }
    } else {
        let h = d / 2;
        for r in 0..d {
            let (base, color) = if r % 2 == 0 {
                (r / 2, Color::Black)
            } else {
                (((3 * r as u128 + 1) / 2 % d as u128) as u64, Color::Red)
            };
            edges.insert(Edge::new(r, base % d, color));
            edges.insert(Edge::new(r, (base + h) % d, color));
        }
    }
    ColoredDigraph::new(d, 0..d, edges)
}

/// `Gamma~_d`: drops nodes divisible by 3 when `3 | d`.
pub fn prune(g: &ColoredDigraph) -> ColoredDigraph {
    if g.modulus % 3 != 0 {
        return g.clone();
    }
    g.induced(|v| v % 3 != 0)
}

/// `prune(build_gamma(d))`.
pub fn build_gamma_tilde(d: u64) -> Result<ColoredDigraph> {
    Ok(prune(&build_gamma(d)?))
}

/// Induced subgraph on the nodes outside `removed`.
pub fn delete_nodes(g: &ColoredDigraph, removed: &[u64]) -> Result<ColoredDigraph> {
    if let Some(&bad) = removed.iter().find(|r| !g.nodes.contains(r)) {
        return Err(Error::UnknownNode(bad));
    }
    let removed: BTreeSet<u64> = removed.iter().copied().collect();
    Ok(g.induced(|v| !removed.contains(&v)))
}

/// Keeps exactly the edges lying on some cycle, i.e. those whose endpoints
/// share a strongly connected component.
pub fn prune_acyclic_edges(g: &ColoredDigraph) -> ColoredDigraph {
    let comp = g.scc_index();
    let edges = g
        .edges
        .iter()
        .filter(|e| comp[&e.from] == comp[&e.to])
        .copied()
        .collect();
    g.with_edges(edges)
}

/// Whether every node has in- and out-degree at most one and every edge is
/// on a cycle, together with the longest cycle length (0 if none).
pub fn is_disjoint_cycle_union(g: &ColoredDigraph) -> (bool, usize) {
    let indeg = g.in_degrees();
    let degrees_ok = g.nodes.iter().all(|&v| g.out_degree(v) <= 1 && indeg[&v] <= 1);
    let comp = g.scc_index();
    let on_cycles = g.edges.iter().all(|e| comp[&e.from] == comp[&e.to]);
    if !(degrees_ok && on_cycles) {
        return (false, 0);
    }
    let mut seen = BTreeSet::new();
    let mut longest = 0;
    for &start in &g.nodes {
        if seen.contains(&start) {
            continue;
        }
        let mut len = 0;
        let mut cur = start;
        while let Some(e) = g.out_edges(cur).next() {
            if !seen.insert(cur) {
                break;
            }
            len += 1;
            cur = e.to;
            if cur == start {
                longest = longest.max(len);
                break;
            }
        }
    }
    (true, longest)
}

/// Swaps the color of every edge.
pub fn color_dual(g: &ColoredDigraph) -> ColoredDigraph {
    g.with_edges(
        g.edges
            .iter()
            .map(|e| Edge::new(e.from, e.to, e.color.swap()))
            .collect(),
    )
}

/// Reverses every edge.
pub fn reverse(g: &ColoredDigraph) -> ColoredDigraph {
    g.with_edges(
        g.edges
            .iter()
            .map(|e| Edge::new(e.to, e.from, e.color))
            .collect(),
    )
}

/// Renames node `v` to `perm[v]`. `perm` must be indexed by residue and
/// must permute the node set.
pub fn relabel(g: &ColoredDigraph, perm: &[u64]) -> Result<ColoredDigraph> {
    let image = |v: u64| perm.get(v as usize).copied().ok_or(Error::NotBijective);
    let mut mapped = BTreeSet::new();
    for &v in &g.nodes {
        mapped.insert(image(v)?);
    }
    if mapped != g.nodes {
        return Err(Error::NotBijective);
    }
    let edges = g
        .edges
        .iter()
        .map(|e| Ok(Edge::new(image(e.from)?, image(e.to)?, e.color)))
        .collect::<Result<BTreeSet<_>>>()?;
    Ok(g.with_edges(edges))
}

/// Components of the underlying undirected graph, ordered by least node.
pub fn weak_components(g: &ColoredDigraph) -> Vec<BTreeSet<u64>> {
    let index: BTreeMap<u64, usize> = g.nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut uf = UnionFind::new(index.len());
    for e in &g.edges {
        uf.union(index[&e.from], index[&e.to]);
    }
    let mut groups: BTreeMap<usize, BTreeSet<u64>> = BTreeMap::new();
    for (&v, &i) in &index {
        groups.entry(uf.find(i)).or_default().insert(v);
    }
    let mut out: Vec<_> = groups.into_values().collect();
    out.sort_by_key(|c| *c.iter().next().expect("components are nonempty"));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{gcd, mult_order, Residue};
    use proptest::prelude::*;

    /// Scans integers and records each residue transition.
    fn gamma_by_scan(d: u64) -> BTreeSet<Edge> {
        (1..=4 * d + 4)
            .map(|x| {
                let y = if x % 2 == 0 { x / 2 } else { (3 * x + 1) / 2 };
                Edge::new(x % d, y % d, Color::of_parity(x))
            })
            .collect()
    }

    fn graph(d: u64, nodes: &[u64], edges: &[(u64, u64, Color)]) -> ColoredDigraph {
        ColoredDigraph::new(
            d,
            nodes.iter().copied(),
            edges.iter().map(|&(a, b, c)| Edge::new(a, b, c)),
        )
        .unwrap()
    }

    use Color::{Black, Red};

    #[test]
    fn gamma_two() {
        let g = build_gamma(2).unwrap();
        let want: BTreeSet<Edge> = [(0, 0, Black), (0, 1, Black), (1, 0, Red), (1, 1, Red)]
            .iter()
            .map(|&(a, b, c)| Edge::new(a, b, c))
            .collect();
        assert_eq!(g.edges(), &want);
    }

    #[test]
    fn closed_form_matches_integer_scan() {
        for d in 1..=200 {
            assert_eq!(build_gamma(d).unwrap().edges(), &gamma_by_scan(d), "d = {d}");
        }
    }

    #[test]
    fn out_degree_pattern() {
        for d in 1..=200u64 {
            let g = build_gamma(d).unwrap();
            for r in 0..d {
                let colors: Vec<Color> = g.out_edges(r).map(|e| e.color).collect();
                if d % 2 == 1 {
                    let reds = colors.iter().filter(|&&c| c == Red).count();
                    assert_eq!((colors.len(), reds), (2, 1), "d = {d}, r = {r}");
                } else {
                    let want = Color::of_parity(r);
                    let distinct_targets: BTreeSet<u64> = g.out_edges(r).map(|e| e.to).collect();
                    assert!(colors.iter().all(|&c| c == want));
                    assert_eq!(distinct_targets.len(), 2, "d = {d}, r = {r}");
                }
            }
        }
    }

    #[test]
    fn in_degree_pattern() {
        for d in 2..=200u64 {
            let g = build_gamma(d).unwrap();
            for s in 0..d {
                let blacks = g.in_edges(s).filter(|e| e.color == Black).count();
                let reds = g.in_edges(s).filter(|e| e.color == Red).count();
                assert_eq!(blacks, 1, "d = {d}, s = {s}");
                if d % 3 == 0 {
                    assert_eq!(reds > 0, s % 3 == 2, "d = {d}, s = {s}");
                } else {
                    assert_eq!(reds, 1, "d = {d}, s = {s}");
                }
            }
        }
    }

    /// Length of the cycle through `r` following only `color`, when each
    /// node has a single such out-edge.
    fn color_cycle_len(g: &ColoredDigraph, r: u64, color: Color) -> usize {
        let step = |v: u64| g.out_edges(v).find(|e| e.color == color).unwrap().to;
        let mut len = 1;
        let mut cur = step(r);
        while cur != r {
            cur = step(cur);
            len += 1;
        }
        len
    }

    #[test]
    fn cycles_for_moduli_prime_to_six() {
        for d in (5..=200u64).filter(|d| gcd(*d, 6) == 1) {
            let g = build_gamma(d).unwrap();
            let o2 = mult_order(Residue::new(2, d).unwrap()).unwrap() as usize;
            let three_halves = 3 * mod_inverse(2, d).unwrap() % d;
            let o32 = mult_order(Residue::new(three_halves, d).unwrap()).unwrap() as usize;
            for r in 0..d {
                assert_eq!(o2 % color_cycle_len(&g, r, Black), 0);
                assert_eq!(o32 % color_cycle_len(&g, r, Red), 0);
            }
            assert!(g.contains_edge(0, 0, Black));
            assert!(g.contains_edge(d - 1, d - 1, Red));
        }
    }

    #[test]
    fn powers_of_three() {
        for m in 1..=5u32 {
            let d = 3u64.pow(m);
            let g = build_gamma(d).unwrap();
            let units: Vec<u64> = (1..d).filter(|r| r % 3 != 0).collect();
            assert_eq!(color_cycle_len(&g, 1, Black), units.len());
            assert!(g.contains_edge(d - 1, d - 1, Red));
            // every leaf of the red tree is exactly m red steps from the root
            let red = |v: u64| g.out_edges(v).find(|e| e.color == Red).unwrap().to;
            for leaf in (0..d).filter(|s| s % 3 != 2) {
                let mut cur = leaf;
                let mut steps = 0;
                while cur != d - 1 {
                    cur = red(cur);
                    steps += 1;
                }
                assert_eq!(steps, m, "d = {d}, leaf = {leaf}");
            }
        }
    }

    #[test]
    fn prune_examples() {
        let g9 = build_gamma_tilde(9).unwrap();
        assert_eq!(g9.nodes().iter().copied().collect::<Vec<_>>(), vec![1, 2, 4, 5, 7, 8]);
        assert_eq!(prune(&build_gamma(7).unwrap()), build_gamma(7).unwrap());
        assert_eq!(build_gamma_tilde(27).unwrap().nodes().len(), 18);
    }

    #[test]
    fn delete_nodes_examples() {
        let g9 = build_gamma_tilde(9).unwrap();
        let g = delete_nodes(&g9, &[2]).unwrap();
        assert_eq!(g.nodes().len(), 5);
        assert!(g.edges().iter().all(|e| e.from != 2 && e.to != 2));
        assert_eq!(delete_nodes(&g9, &[]).unwrap(), g9);
        assert_eq!(delete_nodes(&g9, &[3]), Err(Error::UnknownNode(3)));
        let g27 = delete_nodes(&build_gamma_tilde(27).unwrap(), &[20]).unwrap();
        assert_eq!(g27.nodes().len(), 17);
    }

    #[test]
    fn prune_acyclic_examples() {
        let path = graph(3, &[0, 1, 2], &[(0, 1, Black), (1, 2, Red)]);
        assert!(prune_acyclic_edges(&path).edges().is_empty());
        let looped = graph(3, &[0, 1], &[(0, 0, Red), (0, 1, Black)]);
        assert_eq!(prune_acyclic_edges(&looped).edges().len(), 1);
        let g = prune_acyclic_edges(&delete_nodes(&build_gamma(16).unwrap(), &[1, 3]).unwrap());
        let comps: Vec<_> = weak_components(&g)
            .into_iter()
            .filter(|c| g.edges().iter().any(|e| c.contains(&e.from)))
            .collect();
        assert_eq!(comps.len(), 2);
        assert!(comps[0].contains(&0));
        assert!(comps[1].contains(&15));
    }

    #[test]
    fn pruned_weak_components_are_strong() {
        for d in 2..=30u64 {
            let base = build_gamma_tilde(d).unwrap();
            for &r in base.nodes() {
                let g = prune_acyclic_edges(&delete_nodes(&base, &[r]).unwrap());
                let mut weak: Vec<Vec<u64>> = weak_components(&g)
                    .into_iter()
                    .filter(|c| g.edges().iter().any(|e| c.contains(&e.from)))
                    .map(|c| c.into_iter().collect())
                    .collect();
                let mut strong: Vec<Vec<u64>> = g
                    .strongly_connected_components()
                    .into_iter()
                    .filter(|c| g.edges().iter().any(|e| c.contains(&e.from)))
                    .map(|mut c| {
                        c.sort_unstable();
                        c
                    })
                    .collect();
                weak.sort();
                strong.sort();
                assert_eq!(weak, strong, "d = {d}, removed {r}");
            }
        }
    }

    #[test]
    fn disjoint_cycle_union_examples() {
        let loops = graph(2, &[0, 1], &[(0, 0, Black), (1, 1, Red)]);
        assert_eq!(is_disjoint_cycle_union(&loops), (true, 1));
        let fork = graph(3, &[0, 1, 2], &[(0, 1, Black), (0, 2, Black), (1, 1, Red), (2, 2, Red)]);
        assert!(!is_disjoint_cycle_union(&fork).0);
        let tail = graph(3, &[0, 1], &[(0, 1, Black), (1, 1, Red)]);
        assert!(!is_disjoint_cycle_union(&tail).0);
        let pruned = prune_acyclic_edges(&delete_nodes(&build_gamma_tilde(9).unwrap(), &[2]).unwrap());
        assert!(is_disjoint_cycle_union(&pruned).0);
        let empty = graph(4, &[], &[]);
        assert_eq!(is_disjoint_cycle_union(&empty), (true, 0));
    }

    #[test]
    fn duals_and_reversal_are_involutions() {
        for d in 1..=40 {
            let g = build_gamma(d).unwrap();
            assert_eq!(color_dual(&color_dual(&g)), g);
            assert_eq!(reverse(&reverse(&g)), g);
        }
    }

    #[test]
    fn relabel_rejects_non_bijections() {
        let g = build_gamma(4).unwrap();
        assert_eq!(relabel(&g, &[0, 0, 2, 3]), Err(Error::NotBijective));
        assert_eq!(relabel(&g, &[0, 1]), Err(Error::NotBijective));
        assert_eq!(relabel(&g, &[0, 1, 2, 3]).unwrap(), g);
    }

    #[test]
    fn weak_component_examples() {
        let loops = graph(2, &[0, 1], &[(0, 0, Black), (1, 1, Red)]);
        assert_eq!(weak_components(&loops).len(), 2);
        assert!(weak_components(&graph(5, &[], &[])).is_empty());
    }

    #[test]
    fn json_shape() {
        let g = build_gamma(2).unwrap();
        let v: serde_json::Value = serde_json::to_value(&g).unwrap();
        assert_eq!(v["modulus"], 2);
        assert_eq!(v["nodes"], serde_json::json!([0, 1]));
        assert_eq!(v["edges"][0], serde_json::json!({"from": 0, "to": 0, "color": "black"}));
        let back: ColoredDigraph = serde_json::from_value(v).unwrap();
        assert_eq!(back, g);
    }

    proptest! {
        #[test]
        fn pruning_acyclic_edges_is_idempotent(d in 1u64..120, seed in proptest::collection::vec(any::<u64>(), 0..4)) {
            let g = build_gamma_tilde(d).unwrap();
            let removed: BTreeSet<u64> = seed
                .iter()
                .filter_map(|s| g.nodes().iter().nth((*s % g.nodes().len().max(1) as u64) as usize).copied())
                .collect();
            let removed: Vec<u64> = removed.into_iter().collect();
            let once = prune_acyclic_edges(&delete_nodes(&g, &removed).unwrap());
            prop_assert_eq!(prune_acyclic_edges(&once), once);
        }
    }
}
