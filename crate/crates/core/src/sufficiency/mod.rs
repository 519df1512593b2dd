//! Graph criteria for sufficient residue sets.
//!
//! For a set `S` of residues mod `d`, build `Gamma~_d`, delete `S`, and keep
//! only edges lying on cycles. Call the result `Gamma''`.
//!
//! * strong: `Gamma''` is a disjoint union of cycles, all shorter than the
//!   known lower bound on the period of a nontrivial cycle;
//! * forward: every simple cycle has red fraction below `ln 2 / ln 3`;
//! * backward: every simple cycle has red fraction above `ln 2 / ln 3`;
//! * cycle: in each component, either every cycle is above `ln 2 / ln 3` or
//!   every cycle is below `ln 2 / ln (3 + 2^-60)`.

mod search;
mod sparse;
pub mod tables;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{cmp_log_ratio, LogBase, RedFraction};
use crate::error::{Error, Result};
use crate::gamma::{
    build_gamma_tilde, delete_nodes, is_disjoint_cycle_union, prune_acyclic_edges, reverse,
    simple_cycles, weak_components, ColoredDigraph, CycleReport, DEFAULT_CYCLE_BUDGET,
};

pub use search::{eligible_residues, search, Criterion};
pub use sparse::sparse_sufficient_set;

/// Empirical inputs to the criteria. Both may be raised as verification
/// records improve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleBoundConstants {
    /// Every nontrivial cycle of `T` is at least this long.
    pub max_cycle_period: u64,
    /// Every positive integer below `2^verified_bound_log2` reaches 1.
    pub verified_bound_log2: u32,
}

impl Default for CycleBoundConstants {
    fn default() -> Self {
        Self {
            max_cycle_period: 630_138_897,
            verified_bound_log2: 60,
        }
    }
}

/// How strongly connected pieces of `Gamma''` carrying a single colored
/// cycle enter the forward and backward tests.
///
/// A path that stays in such a piece forever repeats one cycle, so its
/// parity vector is eventually periodic. Such a path cannot come from a
/// divergent orbit or from an aperiodic back-tracing sequence. `Exclude`
/// skips these pieces; `Include` tests every cycle literally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RigidComponents {
    #[default]
    Exclude,
    Include,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub constants: CycleBoundConstants,
    pub cycle_budget: usize,
    pub rigid: RigidComponents,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            constants: CycleBoundConstants::default(),
            cycle_budget: DEFAULT_CYCLE_BUDGET,
            rigid: RigidComponents::default(),
        }
    }
}

/// A nonempty set of residues mod `modulus`, written `a1,...,ak mod d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ResidueSet {
    modulus: u64,
    residues: Vec<u64>,
}

impl ResidueSet {
    pub fn new(modulus: u64, residues: impl IntoIterator<Item = u64>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidModulus(0));
        }
        let residues: BTreeSet<u64> = residues.into_iter().collect();
        if residues.is_empty() {
            return Err(Error::EmptyResidueSet);
        }
        if let Some(&r) = residues.iter().find(|&&r| r >= modulus) {
            return Err(Error::ResidueOutOfRange { residue: r, modulus });
        }
        Ok(Self {
            modulus,
            residues: residues.into_iter().collect(),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }
}

impl fmt::Display for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list: Vec<String> = self.residues.iter().map(u64::to_string).collect();
        write!(f, "{} mod {}", list.join(","), self.modulus)
    }
}

impl FromStr for ResidueSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (list, modulus) = s
            .split_once("mod")
            .ok_or_else(|| Error::Parse(format!("expected `a1,...,ak mod d`, got {s:?}")))?;
        let modulus: u64 = modulus
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad modulus in {s:?}")))?;
        let residues = list
            .split(',')
            .map(|r| {
                r.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad residue {r:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(modulus, residues)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Undetermined,
}

impl Outcome {
    fn from_bool(b: bool) -> Self {
        if b {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Outcome::Pass
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Undetermined => "undetermined",
        })
    }
}

/// Red-fraction statistics for one connected piece of `Gamma''`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub nodes: Vec<u64>,
    pub cycle_count: usize,
    /// Exactly one colored simple cycle.
    pub rigid: bool,
    pub min_red_fraction: RedFraction,
    pub max_red_fraction: RedFraction,
    pub all_above_threshold: bool,
    pub all_below_tight_threshold: bool,
}

/// Everything needed to re-check a verdict by hand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    /// `Gamma''`.
    pub graph: ColoredDigraph,
    pub disjoint_cycle_union: bool,
    pub max_cycle_length: usize,
    pub cycles: Option<CycleReport>,
    pub components: Vec<ComponentSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SufficiencyVerdict {
    pub set: ResidueSet,
    pub strong: Option<Outcome>,
    pub forward: Option<Outcome>,
    pub backward: Option<Outcome>,
    pub cycle: Option<Outcome>,
    pub certificate: Certificate,
}

impl SufficiencyVerdict {
    pub fn outcome(&self, criterion: Criterion) -> Option<Outcome> {
        match criterion {
            Criterion::Strong => self.strong,
            Criterion::Forward => self.forward,
            Criterion::Backward => self.backward,
            Criterion::Cycle => self.cycle,
        }
    }
}

/// `Gamma''` for `set`.
pub fn reduced_graph(set: &ResidueSet) -> Result<ColoredDigraph> {
    let d = set.modulus();
    if d % 3 == 0 {
        if let Some(&r) = set.residues().iter().find(|&&r| r % 3 == 0) {
            return Err(Error::DivisibleByThree { residue: r, modulus: d });
        }
    }
    let g = build_gamma_tilde(d)?;
    Ok(prune_acyclic_edges(&delete_nodes(&g, set.residues())?))
}

fn bare_verdict(set: &ResidueSet, graph: ColoredDigraph) -> SufficiencyVerdict {
    let (union, longest) = is_disjoint_cycle_union(&graph);
    SufficiencyVerdict {
        set: set.clone(),
        strong: None,
        forward: None,
        backward: None,
        cycle: None,
        certificate: Certificate {
            graph,
            disjoint_cycle_union: union,
            max_cycle_length: longest,
            cycles: None,
            components: Vec::new(),
        },
    }
}

fn strong_outcome(v: &SufficiencyVerdict, config: &CheckConfig) -> Outcome {
    let cert = &v.certificate;
    // the backward half runs the same test with every arrow reversed
    let (rev_union, rev_longest) = is_disjoint_cycle_union(&reverse(&cert.graph));
    let below = |q: usize| (q as u64) < config.constants.max_cycle_period;
    Outcome::from_bool(
        cert.disjoint_cycle_union && rev_union && below(cert.max_cycle_length) && below(rev_longest),
    )
}

/// The strong criterion only.
pub fn check_strong(set: &ResidueSet, config: &CheckConfig) -> Result<SufficiencyVerdict> {
    let mut v = bare_verdict(set, reduced_graph(set)?);
    v.strong = Some(strong_outcome(&v, config));
    Ok(v)
}

/// The forward, backward and cycle criteria.
pub fn check_red_fraction(set: &ResidueSet, config: &CheckConfig) -> Result<SufficiencyVerdict> {
    let mut v = bare_verdict(set, reduced_graph(set)?);
    fill_fractions(&mut v, config)?;
    Ok(v)
}

/// All four criteria.
pub fn check_all(set: &ResidueSet, config: &CheckConfig) -> Result<SufficiencyVerdict> {
    let mut v = bare_verdict(set, reduced_graph(set)?);
    v.strong = Some(strong_outcome(&v, config));
    fill_fractions(&mut v, config)?;
    Ok(v)
}

fn fill_fractions(v: &mut SufficiencyVerdict, config: &CheckConfig) -> Result<()> {
    let report = match simple_cycles(&v.certificate.graph, config.cycle_budget) {
        Ok(r) => r,
        Err(Error::BudgetExceeded { .. }) => {
            v.forward = Some(Outcome::Undetermined);
            v.backward = Some(Outcome::Undetermined);
            v.cycle = Some(Outcome::Undetermined);
            return Ok(());
        }
        Err(e) => return Err(e),
    };

    let rho = LogBase::Three;
    let tight = LogBase::three_plus_inverse_pow2(config.constants.verified_bound_log2);
    let graph = &v.certificate.graph;
    let mut forward = true;
    let mut backward = true;
    let mut cycle = true;
    let mut summaries = Vec::new();

    // Every edge of Gamma'' stays inside one strongly connected component,
    // so its weak components are exactly those components.
    for comp in weak_components(graph) {
        let cycles: Vec<_> = report
            .cycles
            .iter()
            .filter(|c| comp.contains(&c.nodes[0]))
            .collect();
        if cycles.is_empty() {
            continue;
        }
        let fractions: Vec<RedFraction> = cycles.iter().map(|c| c.red_fraction).collect();
        let above = fractions.iter().all(|&f| cmp_log_ratio(f, &rho) == Ordering::Greater);
        let below = fractions.iter().all(|&f| cmp_log_ratio(f, &rho) == Ordering::Less);
        let below_tight = fractions.iter().all(|&f| cmp_log_ratio(f, &tight) == Ordering::Less);
        let rigid = cycles.len() == 1;
        if !(rigid && config.rigid == RigidComponents::Exclude) {
            forward &= below;
            backward &= above;
        }
        cycle &= above || below_tight;
        summaries.push(ComponentSummary {
            nodes: comp.into_iter().collect(),
            cycle_count: cycles.len(),
            rigid,
            min_red_fraction: *fractions.iter().min_by(|a, b| a.cmp_fraction(b)).expect("nonempty"),
            max_red_fraction: *fractions.iter().max_by(|a, b| a.cmp_fraction(b)).expect("nonempty"),
            all_above_threshold: above,
            all_below_tight_threshold: below_tight,
        });
    }

    v.forward = Some(Outcome::from_bool(forward));
    v.backward = Some(Outcome::from_bool(backward));
    v.cycle = Some(Outcome::from_bool(cycle));
    v.certificate.cycles = Some(report);
    v.certificate.components = summaries;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(s: &str) -> ResidueSet {
        s.parse().unwrap()
    }

    fn cfg() -> CheckConfig {
        CheckConfig::default()
    }

    #[test]
    fn residue_set_notation() {
        let s = set("3, 1 mod 16");
        assert_eq!(s.residues(), &[1, 3]);
        assert_eq!(s.to_string(), "1,3 mod 16");
        assert_eq!("mod 4".parse::<ResidueSet>().unwrap_err(), Error::Parse("bad residue \"\" in \"mod 4\"".into()));
        assert_eq!("5 mod 4".parse::<ResidueSet>().unwrap_err(), Error::ResidueOutOfRange { residue: 5, modulus: 4 });
        assert!("1,2".parse::<ResidueSet>().is_err());
        assert_eq!(ResidueSet::new(4, []), Err(Error::EmptyResidueSet));
    }

    #[test]
    fn strong_examples() {
        for s in ["2 mod 9", "0 mod 2", "5,11 mod 21"] {
            assert_eq!(check_strong(&set(s), &cfg()).unwrap().strong, Some(Outcome::Pass), "{s}");
        }
        assert_eq!(check_strong(&set("1 mod 9"), &cfg()).unwrap().strong, Some(Outcome::Fail));
    }

    #[test]
    fn multiples_of_three_are_rejected() {
        assert_eq!(
            check_strong(&set("3 mod 9"), &cfg()).unwrap_err(),
            Error::DivisibleByThree { residue: 3, modulus: 9 }
        );
    }

    #[test]
    fn period_bound_is_configurable() {
        let mut c = cfg();
        let v = check_strong(&set("2 mod 9"), &c).unwrap();
        c.constants.max_cycle_period = v.certificate.max_cycle_length as u64;
        assert_eq!(check_strong(&set("2 mod 9"), &c).unwrap().strong, Some(Outcome::Fail));
    }

    #[test]
    fn fraction_examples() {
        let v = check_red_fraction(&set("20 mod 27"), &cfg()).unwrap();
        assert_eq!((v.forward, v.cycle), (Some(Outcome::Pass), Some(Outcome::Pass)));
        let v = check_red_fraction(&set("3 mod 8"), &cfg()).unwrap();
        assert_eq!(v.forward, Some(Outcome::Pass));
        for s in ["1,3 mod 16", "2,12 mod 16"] {
            assert_eq!(check_red_fraction(&set(s), &cfg()).unwrap().cycle, Some(Outcome::Pass), "{s}");
        }
    }

    #[test]
    fn literal_reading_rejects_rigid_loops() {
        let literal = CheckConfig {
            rigid: RigidComponents::Include,
            ..cfg()
        };
        // the red loop at 26 alone has red fraction 1
        let v = check_red_fraction(&set("20 mod 27"), &literal).unwrap();
        assert_eq!(v.forward, Some(Outcome::Fail));
        assert_eq!(v.cycle, Some(Outcome::Pass));
        let loop26 = v.certificate.components.iter().find(|c| c.nodes == vec![26]).unwrap();
        assert!(loop26.rigid && loop26.all_above_threshold);
    }

    #[test]
    fn exhausted_budget_is_undetermined() {
        let tiny = CheckConfig {
            cycle_budget: 1,
            ..cfg()
        };
        let v = check_red_fraction(&set("20 mod 27"), &tiny).unwrap();
        assert_eq!(v.forward, Some(Outcome::Undetermined));
        assert_eq!(v.backward, Some(Outcome::Undetermined));
        assert_eq!(v.cycle, Some(Outcome::Undetermined));
        assert!(v.certificate.cycles.is_none());
    }

    #[test]
    fn strong_sets_never_contradict_the_fraction_tests() {
        // a disjoint union of short cycles leaves no room for a
        // non-periodic path, so with rigid pieces set aside both
        // directions pass vacuously
        for d in 2..=16u64 {
            for r in eligible_residues(d) {
                let s = ResidueSet::new(d, [r]).unwrap();
                let v = check_all(&s, &cfg()).unwrap();
                if v.strong == Some(Outcome::Pass) {
                    assert_eq!(v.forward, Some(Outcome::Pass), "{s}");
                    assert_eq!(v.backward, Some(Outcome::Pass), "{s}");
                    assert!(v.certificate.components.iter().all(|c| c.rigid), "{s}");
                }
            }
        }
    }

    #[test]
    fn certificate_is_reproducible() {
        let s = set("1,3 mod 16");
        let a = check_all(&s, &cfg()).unwrap();
        let b = check_all(&s, &cfg()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.certificate.graph, reduced_graph(&s).unwrap());
        let json = serde_json::to_string(&a).unwrap();
        let back: SufficiencyVerdict = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
    }
}
