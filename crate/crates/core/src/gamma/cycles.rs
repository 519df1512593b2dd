use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use petgraph::algo::tarjan_scc;
use petgraph::graphmap::DiGraphMap;
use serde::{Deserialize, Serialize};

use super::{Color, ColoredDigraph};
use crate::arith::RedFraction;
use crate::error::{Error, Result};

pub const DEFAULT_CYCLE_BUDGET: usize = 1_000_000;

/// A simple cycle with a chosen color on every arc. `nodes[0]` is the least
/// node and `colors[i]` is the color of the arc leaving `nodes[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cycle {
    pub nodes: Vec<u64>,
    pub colors: Vec<Color>,
    pub red_fraction: RedFraction,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleReport {
    pub cycles: Vec<Cycle>,
    pub max_length: usize,
}

struct Johnson<'a> {
    succ: &'a BTreeMap<u64, Vec<u64>>,
    arc_colors: &'a BTreeMap<(u64, u64), Vec<Color>>,
    budget: usize,
    out: Vec<Cycle>,
    start: u64,
    comp: BTreeSet<u64>,
    blocked: BTreeSet<u64>,
    blocked_by: BTreeMap<u64, BTreeSet<u64>>,
    stack: Vec<u64>,
}

impl Johnson<'_> {
    fn unblock(&mut self, u: u64) {
        let mut todo = vec![u];
        while let Some(v) = todo.pop() {
            if self.blocked.remove(&v) {
                if let Some(ws) = self.blocked_by.remove(&v) {
                    todo.extend(ws);
                }
            }
        }
    }

    fn emit(&mut self) -> Result<()> {
        let arcs: Vec<&Vec<Color>> = (0..self.stack.len())
            .map(|i| {
                let from = self.stack[i];
                let to = self.stack[(i + 1) % self.stack.len()];
                &self.arc_colors[&(from, to)]
            })
            .collect();
        for colors in arcs.into_iter().map(|c| c.iter().copied()).multi_cartesian_product() {
            if self.out.len() >= self.budget {
                return Err(Error::BudgetExceeded {
                    what: "simple cycle enumeration",
                    budget: self.budget as u64,
                });
            }
            let red = colors.iter().filter(|&&c| c == Color::Red).count() as u64;
            self.out.push(Cycle {
                nodes: self.stack.clone(),
                red_fraction: RedFraction::new(red, colors.len() as u64)?,
                colors,
            });
        }
        Ok(())
    }

    fn circuit(&mut self, v: u64) -> Result<bool> {
        let mut found = false;
        self.stack.push(v);
        self.blocked.insert(v);
        let succ = self.succ;
        let next: Vec<u64> = succ[&v].iter().copied().filter(|w| self.comp.contains(w)).collect();
        for &w in &next {
            if w == self.start {
                self.emit()?;
                found = true;
            } else if !self.blocked.contains(&w) && self.circuit(w)? {
                found = true;
            }
        }
        if found {
            self.unblock(v);
        } else {
            for &w in &next {
                self.blocked_by.entry(w).or_default().insert(v);
            }
        }
        self.stack.pop();
        Ok(found)
    }
}

/// All simple cycles, with parallel arcs of both colors expanded into
/// separate colored cycles. Fails with [`Error::BudgetExceeded`] once more
/// than `budget` colored cycles would be produced.
pub fn simple_cycles(g: &ColoredDigraph, budget: usize) -> Result<CycleReport> {
    let mut succ: BTreeMap<u64, Vec<u64>> = g.nodes().iter().map(|&v| (v, Vec::new())).collect();
    let mut arc_colors: BTreeMap<(u64, u64), Vec<Color>> = BTreeMap::new();
    for e in g.edges() {
        let colors = arc_colors.entry((e.from, e.to)).or_default();
        if colors.is_empty() {
            succ.get_mut(&e.from).expect("edge source is a node").push(e.to);
        }
        colors.push(e.color);
    }

    let mut state = Johnson {
        succ: &succ,
        arc_colors: &arc_colors,
        budget,
        out: Vec::new(),
        start: 0,
        comp: BTreeSet::new(),
        blocked: BTreeSet::new(),
        blocked_by: BTreeMap::new(),
        stack: Vec::new(),
    };

    for &s in g.nodes() {
        // strongly connected component of s among nodes >= s
        let mut sub = DiGraphMap::<u64, ()>::new();
        for (&(a, b), _) in arc_colors.range((s, 0)..) {
            if b >= s {
                sub.add_edge(a, b, ());
            }
        }
        if !sub.contains_node(s) {
            continue;
        }
        let comp: BTreeSet<u64> = tarjan_scc(&sub)
            .into_iter()
            .find(|c| c.contains(&s))
            .expect("s is in some component")
            .into_iter()
            .collect();
        if comp.len() == 1 && !arc_colors.contains_key(&(s, s)) {
            continue;
        }
        state.start = s;
        state.comp = comp;
        state.blocked.clear();
        state.blocked_by.clear();
        state.circuit(s)?;
    }

    let max_length = state.out.iter().map(Cycle::len).max().unwrap_or(0);
    Ok(CycleReport {
        cycles: state.out,
        max_length,
    })
}
