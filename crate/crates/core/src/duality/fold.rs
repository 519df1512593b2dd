use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::{build_gamma, Color, ColoredDigraph, Edge};
use crate::parity::ResidueMap2n;
use crate::sufficiency::{check_strong, CheckConfig, Outcome, ResidueSet, SufficiencyVerdict};

/// Pairwise path checks look at every pair of nodes, so they stop here.
const MAX_PAIRWISE_EXPONENT: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldReport {
    pub source_exponent: u32,
    pub target_exponent: u32,
    pub window: u32,
    /// Every fiber of `H_k` has `2^(k-1)` elements.
    pub uniform_fibers: bool,
    /// Pushing every edge forward along `H_k`, colored by the parity of
    /// its image source, gives exactly the target graph.
    pub quotient_matches: bool,
    /// Window 2 only: `H(x) -> H(y)` is black (red) iff some edge `x -> z`
    /// with `z` over `H(y)` is followed by an edge of the same (other) color.
    pub two_path_rule: Option<bool>,
    /// Window 2 only: the same rule with the 2-path required to end at `y`.
    pub two_path_rule_ending_at_y: Option<bool>,
    /// Window 2 only: `H(Omega(x)) = H(x)` for every `x`.
    pub omega_pairs: Option<bool>,
    pub verified: bool,
}

fn map_h(source_exponent: u32, k: u32) -> Result<(u32, ResidueMap2n)> {
    if k < 2 {
        return Err(Error::Precondition(format!("window must be at least 2, got {k}")));
    }
    if source_exponent < k {
        return Err(Error::Precondition(format!(
            "source exponent {source_exponent} leaves nothing to fold onto with window {k}"
        )));
    }
    let target = source_exponent - k + 1;
    Ok((target, ResidueMap2n::h_mk(target, k)?))
}

fn two_path_rules(g: &ColoredDigraph, small: &ColoredDigraph, h: &ResidueMap2n) -> (bool, bool) {
    let d = g.modulus();
    let mut rule = true;
    let mut literal = true;
    for x in 0..d {
        // for each first hop x -> z: the colors of the second hops
        let hops: Vec<(u64, Color, Vec<(u64, Color)>)> = g
            .out_edges(x)
            .map(|e| (e.to, e.color, g.out_edges(e.to).map(|f| (f.to, f.color)).collect()))
            .collect();
        for y in 0..d {
            let (hx, hy) = (h.apply(x), h.apply(y));
            for color in [Color::Black, Color::Red] {
                let want = small.contains_edge(hx, hy, color);
                let same = color == Color::Black;
                let via_fiber = hops.iter().any(|(z, c1, next)| {
                    h.apply(*z) == hy && next.iter().any(|(_, c2)| (c1 == c2) == same)
                });
                let ending_at_y = hops
                    .iter()
                    .any(|(_, c1, next)| next.iter().any(|(w, c2)| *w == y && (c1 == c2) == same));
                rule &= want == via_fiber;
                literal &= want == ending_at_y;
            }
        }
    }
    (rule, literal)
}

/// Checks how `Gamma_(2^source)` folds onto `Gamma_(2^(source - k + 1))`
/// along `H_k`.
pub fn verify_fold(source_exponent: u32, k: u32) -> Result<FoldReport> {
    let (target, h) = map_h(source_exponent, k)?;
    let g = build_gamma(1 << source_exponent)?;
    let small = build_gamma(1 << target)?;

    let uniform_fibers = h.fiber_sizes().iter().all(|&c| c == 1 << (k - 1));
    let pushed: BTreeSet<Edge> = g
        .edges()
        .iter()
        .map(|e| {
            let from = h.apply(e.from);
            Edge::new(from, h.apply(e.to), Color::of_parity(from))
        })
        .collect();
    let quotient_matches = &pushed == small.edges();

    let (two_path_rule, two_path_rule_ending_at_y, omega_pairs) = if k == 2 {
        let omega = ResidueMap2n::omega(source_exponent)?;
        let pairs = (0..1u64 << source_exponent).all(|x| h.apply(omega.apply(x)) == h.apply(x));
        if source_exponent <= MAX_PAIRWISE_EXPONENT {
            let (rule, literal) = two_path_rules(&g, &small, &h);
            (Some(rule), Some(literal), Some(pairs))
        } else {
            (None, None, Some(pairs))
        }
    } else {
        (None, None, None)
    };
    let verified = uniform_fibers
        && quotient_matches
        && two_path_rule.unwrap_or(true)
        && omega_pairs.unwrap_or(true);
    Ok(FoldReport {
        source_exponent,
        target_exponent: target,
        window: k,
        uniform_fibers,
        quotient_matches,
        two_path_rule,
        two_path_rule_ending_at_y,
        omega_pairs,
        verified,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberCycles {
    pub base_length: usize,
    /// The cycles of the preimage, each starting at its least node.
    pub cycles: Vec<Vec<u64>>,
    /// Edges between consecutive fibers pair them off one to one.
    pub fiber_bijections: bool,
}

impl FiberCycles {
    pub fn lengths(&self) -> Vec<usize> {
        self.cycles.iter().map(Vec::len).collect()
    }
}

/// The preimage under `H_k` of a cycle of `Gamma_(2^n)`, as a subgraph of
/// `Gamma_(2^(n+k-1))`. `cycle` lists the nodes in order.
pub fn fiber_cycle_structure(cycle: &[u64], n: u32, k: u32) -> Result<FiberCycles> {
    let source = n + k - 1;
    let (_, h) = map_h(source, k)?;
    let small = build_gamma(1 << n)?;
    let nodes: BTreeSet<u64> = cycle.iter().copied().collect();
    if cycle.is_empty() || nodes.len() != cycle.len() {
        return Err(Error::Precondition("a cycle lists distinct nodes".into()));
    }
    for (i, &u) in cycle.iter().enumerate() {
        let v = cycle[(i + 1) % cycle.len()];
        if !small.nodes().contains(&u) {
            return Err(Error::UnknownNode(u));
        }
        if !small.out_edges(u).any(|e| e.to == v) {
            return Err(Error::Precondition(format!("no edge {u} -> {v}")));
        }
    }
    let internal = small.edges().iter().filter(|e| nodes.contains(&e.from) && nodes.contains(&e.to)).count();
    if internal != cycle.len() {
        return Err(Error::Precondition("the cycle has chords".into()));
    }

    let big = build_gamma(1 << source)?;
    let pre: BTreeSet<u64> = h.preimage(cycle).into_iter().collect();
    let mut succ: BTreeMap<u64, Vec<u64>> = pre.iter().map(|&v| (v, Vec::new())).collect();
    for e in big.edges() {
        if pre.contains(&e.from) && pre.contains(&e.to) {
            succ.get_mut(&e.from).expect("in preimage").push(e.to);
        }
    }
    let mut indeg: BTreeMap<u64, usize> = pre.iter().map(|&v| (v, 0)).collect();
    for ws in succ.values() {
        for w in ws {
            *indeg.get_mut(w).expect("in preimage") += 1;
        }
    }
    let fiber_bijections = succ.values().all(|ws| ws.len() == 1) && indeg.values().all(|&c| c == 1);

    let mut cycles = Vec::new();
    if fiber_bijections {
        let mut seen = BTreeSet::new();
        for &s in &pre {
            if seen.contains(&s) {
                continue;
            }
            let mut c = Vec::new();
            let mut v = s;
            while seen.insert(v) {
                c.push(v);
                v = succ[&v][0];
            }
            cycles.push(c);
        }
    }
    Ok(FiberCycles { base_length: cycle.len(), cycles, fiber_bijections })
}

/// Which preimage of a set mod `2^n` to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnfoldConvention {
    /// `H_k^-1(S)`.
    Literal,
    /// `H_k^-1(Omega(S))`.
    #[default]
    OmegaTwisted,
}

fn exponent_of(set: &ResidueSet) -> Result<u32> {
    let d = set.modulus();
    if d < 2 || !d.is_power_of_two() {
        return Err(Error::Precondition(format!("modulus {d} is not a power of 2")));
    }
    Ok(d.trailing_zeros())
}

fn unfold_set(set: &ResidueSet, k: u32, convention: UnfoldConvention) -> Result<ResidueSet> {
    let n = exponent_of(set)?;
    let h = ResidueMap2n::h_mk(n, k)?;
    let targets: Vec<u64> = match convention {
        UnfoldConvention::Literal => set.residues().to_vec(),
        UnfoldConvention::OmegaTwisted => {
            let omega = ResidueMap2n::omega(n)?;
            set.residues().iter().map(|&r| omega.apply(r)).collect()
        }
    };
    ResidueSet::new(1 << (n + k - 1), h.preimage(&targets))
}

/// The image of a set mod `2^(n+k-1)` mod `2^n`; undoes [`unfold_sufficient_set`].
pub fn fold_residue_set(set: &ResidueSet, k: u32, convention: UnfoldConvention) -> Result<ResidueSet> {
    let (n, h) = map_h(exponent_of(set)?, k)?;
    let image = set.residues().iter().map(|&r| h.apply(r));
    match convention {
        UnfoldConvention::Literal => ResidueSet::new(1 << n, image),
        UnfoldConvention::OmegaTwisted => {
            let omega = ResidueMap2n::omega(n)?;
            ResidueSet::new(1 << n, image.map(|r| omega.apply(r)))
        }
    }
}

/// A strongly sufficient set mod `2^n` gives one mod `2^(n+k-1)`. The
/// result is checked again rather than assumed.
pub fn unfold_sufficient_set(
    set: &ResidueSet,
    k: u32,
    convention: UnfoldConvention,
    config: &CheckConfig,
) -> Result<SufficiencyVerdict> {
    let input = check_strong(set, config)?;
    if input.strong != Some(Outcome::Pass) {
        return Err(Error::Precondition(format!("{set} is not strongly sufficient")));
    }
    let q = input.certificate.max_cycle_length as u64;
    if k as u64 * q >= config.constants.max_cycle_period {
        return Err(Error::Precondition(format!(
            "k q = {} reaches the cycle period bound {}",
            k as u64 * q,
            config.constants.max_cycle_period
        )));
    }
    check_strong(&unfold_set(set, k, convention)?, config)
}
