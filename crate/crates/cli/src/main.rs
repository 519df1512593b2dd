mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use collatz_core::arith::Nat;
use collatz_core::backtrace::{
    density_upper_holds, find_backtrace_to_class, greedy_backtrace, length_bound, level_set,
    ones_fraction_holds, DEFAULT_MAX_LENGTH, DEFAULT_STATE_BUDGET,
};
use collatz_core::duality::{
    check_self_color_dual, unfold_sufficient_set, verify_fold, DualityResult, UnfoldConvention,
    DEFAULT_ISOMORPHISM_BUDGET,
};
use collatz_core::gamma::{
    build_gamma, build_gamma_tilde, delete_nodes, prune_acyclic_edges, to_dot, DEFAULT_CYCLE_BUDGET,
};
use collatz_core::group::{
    affine_closure, gb_structure, generator_orders, verify_p_identity, DEFAULT_CLOSURE_LIMIT,
};
use collatz_core::parity::ResidueMap2n;
use collatz_core::sufficiency::tables::{reproduce_table, Table};
use collatz_core::sufficiency::{
    check_all, check_red_fraction, check_strong, search, sparse_sufficient_set, CheckConfig,
    CycleBoundConstants, Outcome, ResidueSet, RigidComponents, SufficiencyVerdict,
};
use collatz_core::{Criterion, Error};

use output::{Format, Rendered, Status};

#[derive(Parser)]
#[command(name = "collatz", version, about = "Modular Collatz digraphs and the tools built on them")]
struct Cli {
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true, env = "COLLATZ_THREADS")]
    threads: Option<usize>,

    /// Most colored simple cycles to enumerate before giving up.
    #[arg(long, global = true, default_value_t = DEFAULT_CYCLE_BUDGET)]
    cycle_budget: usize,

    /// Lower bound on the period of a nontrivial cycle.
    #[arg(long, global = true)]
    max_cycle_period: Option<u64>,

    /// Every integer below 2^this is known to reach 1.
    #[arg(long, global = true)]
    verified_bound_log2: Option<u32>,

    /// Whether pieces carrying a single cycle enter the red-fraction tests.
    #[arg(long, global = true, value_enum, default_value_t = RigidArg::Exclude)]
    rigid: RigidArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum RigidArg {
    Exclude,
    Include,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "lowercase", tag = "command")]
enum Command {
    /// Export Gamma_d.
    Graph(GraphArgs),
    /// Run the sufficiency criteria on one residue set.
    Check(CheckArgs),
    /// List every k-element set mod d passing a criterion.
    Search(SearchArgs),
    /// Structure of the group G_b.
    Group(GroupArgs),
    /// Shortest back tracing from x into a class mod d.
    Backtrace(BacktraceArgs),
    /// Greedy back tracing from x.
    Greedy(GreedyArgs),
    /// Every y with T^k(y) = x.
    Levelset(LevelsetArgs),
    /// Look for a color-reversing relabeling of Gamma_d.
    Duality(DualityArgs),
    /// Fold Gamma_(2^n) along H_k.
    Fold(FoldArgs),
    /// Unfold a strongly sufficient set mod 2^n.
    Unfold(UnfoldArgs),
    /// Rerun the reference tables.
    Tables(TablesArgs),
    /// Omega mod 2^n as a table.
    Omega(OmegaArgs),
    /// H_k from 2^(n+k-1) onto 2^n as a table.
    Hmap(HmapArgs),
    /// Elements 2^n (a + d n) of a sparse sufficient set.
    Sparse(SparseArgs),
}

#[derive(Args, Serialize)]
struct GraphArgs {
    #[arg(long = "mod")]
    modulus: u64,
    /// Drop multiples of 3 when 3 divides d.
    #[arg(long)]
    tilde: bool,
    /// Residues to delete.
    #[arg(long, value_delimiter = ',')]
    delete: Vec<u64>,
    /// Keep only edges on cycles.
    #[arg(long)]
    prune: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum CheckCriterion {
    Strong,
    Forward,
    Backward,
    Cycle,
    Fractions,
    All,
}

#[derive(Args, Serialize)]
struct CheckArgs {
    #[arg(long = "mod")]
    modulus: u64,
    #[arg(long, value_delimiter = ',', required = true)]
    residues: Vec<u64>,
    #[arg(long, value_enum, default_value_t = CheckCriterion::All)]
    criterion: CheckCriterion,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum CriterionArg {
    Strong,
    Forward,
    Backward,
    Cycle,
}

impl From<CriterionArg> for Criterion {
    fn from(c: CriterionArg) -> Self {
        match c {
            CriterionArg::Strong => Criterion::Strong,
            CriterionArg::Forward => Criterion::Forward,
            CriterionArg::Backward => Criterion::Backward,
            CriterionArg::Cycle => Criterion::Cycle,
        }
    }
}

#[derive(Args, Serialize)]
struct SearchArgs {
    #[arg(long = "mod")]
    modulus: u64,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum)]
    criterion: CriterionArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Serialize)]
struct GroupArgs {
    #[arg(long = "mod")]
    modulus: u64,
    /// Also enumerate the group and compare orders.
    #[arg(long)]
    verify: bool,
    #[arg(long, default_value_t = DEFAULT_CLOSURE_LIMIT)]
    closure_limit: u64,
}

#[derive(Args, Serialize)]
struct BacktraceArgs {
    #[arg(long)]
    from: String,
    #[arg(long)]
    to_class: u64,
    #[arg(long = "mod")]
    modulus: u64,
    /// Compare the length with the known bound and fail when it is exceeded.
    #[arg(long)]
    bound_check: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_LENGTH)]
    max_len: usize,
    #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
    state_budget: u64,
}

#[derive(Args, Serialize)]
struct GreedyArgs {
    #[arg(long)]
    start: String,
    #[arg(long)]
    steps: usize,
    /// Include every value of the trace.
    #[arg(long)]
    values: bool,
}

#[derive(Args, Serialize)]
struct LevelsetArgs {
    #[arg(long)]
    x: String,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    prime_to_three: bool,
}

#[derive(Args, Serialize)]
struct DualityArgs {
    #[arg(long = "mod")]
    modulus: u64,
    #[arg(long, default_value_t = DEFAULT_ISOMORPHISM_BUDGET)]
    budget: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Serialize)]
struct FoldArgs {
    /// Exponent of the graph being folded.
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ConventionArg {
    Literal,
    OmegaTwisted,
}

impl From<ConventionArg> for UnfoldConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Literal => UnfoldConvention::Literal,
            ConventionArg::OmegaTwisted => UnfoldConvention::OmegaTwisted,
        }
    }
}

#[derive(Args, Serialize)]
struct UnfoldArgs {
    #[arg(long = "mod")]
    modulus: u64,
    #[arg(long, value_delimiter = ',', required = true)]
    residues: Vec<u64>,
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long, value_enum, default_value_t = ConventionArg::OmegaTwisted)]
    convention: ConventionArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Serialize)]
struct TablesArgs {
    /// Table number 1 to 4; all tables when omitted.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    reproduce: Option<u8>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Serialize)]
struct OmegaArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Serialize)]
struct HmapArgs {
    /// Exponent of the target.
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: u32,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Serialize)]
struct SparseArgs {
    #[arg(long, default_value_t = 1)]
    a: u64,
    #[arg(long = "mod", default_value_t = 1)]
    modulus: u64,
    #[arg(long, default_value_t = 10)]
    count: usize,
}

fn config(cli: &Cli) -> CheckConfig {
    let defaults = CycleBoundConstants::default();
    CheckConfig {
        constants: CycleBoundConstants {
            max_cycle_period: cli.max_cycle_period.unwrap_or(defaults.max_cycle_period),
            verified_bound_log2: cli.verified_bound_log2.unwrap_or(defaults.verified_bound_log2),
        },
        cycle_budget: cli.cycle_budget,
        rigid: match cli.rigid {
            RigidArg::Exclude => RigidComponents::Exclude,
            RigidArg::Include => RigidComponents::Include,
        },
    }
}

fn parse_nat(s: &str) -> Result<Nat, Error> {
    s.parse().map_err(|_| Error::Parse(format!("not a nonnegative integer: {s:?}")))
}

fn status_of(outcomes: impl IntoIterator<Item = Outcome>) -> Status {
    let all: Vec<Outcome> = outcomes.into_iter().collect();
    if all.contains(&Outcome::Fail) {
        Status::Negative
    } else if all.contains(&Outcome::Undetermined) {
        Status::Undetermined
    } else {
        Status::Ok
    }
}

fn verdict_csv(v: &SufficiencyVerdict) -> String {
    let cell = |o: Option<Outcome>| o.map_or(String::new(), |o| o.to_string());
    format!(
        "set,strong,forward,backward,cycle\n{},{},{},{},{}\n",
        output::quote(&v.set.to_string()),
        cell(v.strong),
        cell(v.forward),
        cell(v.backward),
        cell(v.cycle)
    )
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("plain data serializes")
}

fn run(cli: &Cli, cfg: &CheckConfig) -> Result<Rendered, Error> {
    Ok(match &cli.command {
        Command::Graph(a) => {
            let mut g = if a.tilde { build_gamma_tilde(a.modulus)? } else { build_gamma(a.modulus)? };
            if !a.delete.is_empty() {
                g = delete_nodes(&g, &a.delete)?;
            }
            if a.prune {
                g = prune_acyclic_edges(&g);
            }
            match a.format {
                Format::Dot => Rendered::text(a.format, to_dot(&g, |_| None), Status::Ok),
                _ => Rendered::json(a.format, to_value(&g), Status::Ok),
            }
        }
        Command::Check(a) => {
            let set = ResidueSet::new(a.modulus, a.residues.iter().copied())?;
            let (v, status) = match a.criterion {
                CheckCriterion::Strong => {
                    let v = check_strong(&set, cfg)?;
                    let s = status_of(v.strong);
                    (v, s)
                }
                CheckCriterion::Fractions => {
                    let v = check_red_fraction(&set, cfg)?;
                    let s = status_of([v.forward, v.backward, v.cycle].into_iter().flatten());
                    (v, s)
                }
                CheckCriterion::All => {
                    let v = check_all(&set, cfg)?;
                    let s = status_of([v.strong, v.forward, v.backward, v.cycle].into_iter().flatten());
                    (v, s)
                }
                c @ (CheckCriterion::Forward | CheckCriterion::Backward | CheckCriterion::Cycle) => {
                    let crit = match c {
                        CheckCriterion::Forward => Criterion::Forward,
                        CheckCriterion::Backward => Criterion::Backward,
                        _ => Criterion::Cycle,
                    };
                    let v = crit.evaluate(&set, cfg)?;
                    let s = status_of(v.outcome(crit));
                    (v, s)
                }
            };
            match a.format {
                Format::Csv => Rendered::text(a.format, verdict_csv(&v), status),
                _ => Rendered::json(a.format, to_value(&v), status),
            }
        }
        Command::Search(a) => {
            let found = search(a.modulus, a.k, a.criterion.into(), cfg)?;
            let sets: Vec<String> = found.iter().map(|v| v.set.to_string()).collect();
            let status = if sets.is_empty() { Status::Negative } else { Status::Ok };
            match a.format {
                Format::Csv => {
                    let mut out = String::from("set\n");
                    for s in &sets {
                        out.push_str(&output::quote(s));
                        out.push('\n');
                    }
                    Rendered::text(a.format, out, status)
                }
                _ => Rendered::json(a.format, json!({ "count": sets.len(), "sets": sets }), status),
            }
        }
        Command::Group(a) => {
            let structure = gb_structure(a.modulus)?;
            let (ord2, ord_three_halves) = generator_orders(a.modulus)?;
            let p_identity = verify_p_identity(a.modulus)?;
            let mut result = json!({
                "structure": structure,
                "generator_orders": { "t0": ord2, "t1": ord_three_halves },
                "p_identity": p_identity,
            });
            let mut ok = p_identity;
            if a.verify {
                let closure = affine_closure(a.modulus, a.closure_limit)?;
                let formula = closure.order == structure.predicted_order;
                let exact = closure.order == structure.order;
                ok &= formula && exact;
                result["closure"] = json!({
                    "order": closure.order,
                    "matches_product_formula": formula,
                    "matches_structure": exact,
                });
            }
            Rendered::json(Format::Json, result, if ok { Status::Ok } else { Status::Negative })
        }
        Command::Backtrace(a) => {
            let x = parse_nat(&a.from)?;
            let bound = length_bound(a.modulus, a.to_class)?;
            match find_backtrace_to_class(&x, a.to_class, a.modulus, a.max_len, a.state_budget)? {
                None => Rendered::json(
                    Format::Json,
                    json!({ "found": false, "max_len": a.max_len, "bound": bound }),
                    Status::Negative,
                ),
                Some(sol) => {
                    let within = sol.vector.length() as u64 <= bound.value;
                    let status = if a.bound_check && !within { Status::Negative } else { Status::Ok };
                    Rendered::json(
                        Format::Json,
                        json!({
                            "found": true,
                            "vector": sol.vector,
                            "value": sol.value.to_string(),
                            "length": sol.vector.length(),
                            "norm": sol.vector.norm(),
                            "bound": bound,
                            "within_bound": within,
                        }),
                        status,
                    )
                }
            }
        }
        Command::Greedy(a) => {
            let x = parse_nat(&a.start)?;
            let trace = greedy_backtrace(&x, a.steps)?;
            let mut result = json!({
                "bits": trace.bits.to_string(),
                "ones": trace.bits.count_ones(),
                "max_zero_run": trace.bits.max_zero_run(),
                "ones_fraction_at_least_quarter": ones_fraction_holds(&trace.bits),
                "density_upper_bound_holds": density_upper_holds(&trace),
                "last": trace.values.last().map(ToString::to_string),
            });
            if a.values {
                result["values"] = to_value(&trace.values.iter().map(ToString::to_string).collect::<Vec<_>>());
            }
            Rendered::json(Format::Json, result, Status::Ok)
        }
        Command::Levelset(a) => {
            let x = parse_nat(&a.x)?;
            if x == Nat::from(0u32) {
                return Err(Error::Precondition("x must be positive".into()));
            }
            let values: Vec<String> = level_set(&x, a.k, a.prime_to_three).iter().map(ToString::to_string).collect();
            Rendered::json(Format::Json, json!({ "count": values.len(), "values": values }), Status::Ok)
        }
        Command::Duality(a) => {
            let r = check_self_color_dual(a.modulus, a.budget)?;
            let status = match &r {
                DualityResult::Witness(w) if w.verified => Status::Ok,
                DualityResult::Witness(_) | DualityResult::NoneExists => Status::Negative,
                DualityResult::Undetermined => Status::Undetermined,
            };
            match (a.format, &r) {
                (Format::Dot, DualityResult::Witness(w)) => {
                    let g = build_gamma(a.modulus)?;
                    let perm = w.permutation.clone();
                    Rendered::text(a.format, to_dot(&g, |v| Some(format!("omega {}", perm[v as usize]))), status)
                }
                (Format::Dot, _) => Rendered::text(a.format, to_dot(&build_gamma(a.modulus)?, |_| None), status),
                _ => Rendered::json(a.format, to_value(&r), status),
            }
        }
        Command::Fold(a) => {
            let report = verify_fold(a.n, a.k)?;
            let status = if report.verified { Status::Ok } else { Status::Negative };
            match a.format {
                Format::Dot => {
                    let h = ResidueMap2n::h_mk(report.target_exponent, a.k)?;
                    let g = build_gamma(1 << a.n)?;
                    Rendered::text(a.format, to_dot(&g, |v| Some(format!("H {}", h.apply(v)))), status)
                }
                _ => Rendered::json(a.format, to_value(&report), status),
            }
        }
        Command::Unfold(a) => {
            let set = ResidueSet::new(a.modulus, a.residues.iter().copied())?;
            let v = unfold_sufficient_set(&set, a.k, a.convention.into(), cfg)?;
            let status = status_of(v.strong);
            match a.format {
                Format::Dot => {
                    let d = v.set.modulus();
                    let omega = ResidueMap2n::omega(d.trailing_zeros())?;
                    let members = v.set.residues().to_vec();
                    let dot = to_dot(&build_gamma(d)?, |r| {
                        let mark = if members.contains(&r) { " in S" } else { "" };
                        Some(format!("omega {}{mark}", omega.apply(r)))
                    });
                    Rendered::text(a.format, dot, status)
                }
                Format::Csv => Rendered::text(a.format, verdict_csv(&v), status),
                _ => Rendered::json(a.format, json!({ "input": set.to_string(), "verdict": v }), status),
            }
        }
        Command::Tables(a) => {
            let tables: Vec<Table> = match a.reproduce {
                Some(n) => vec![Table::from_number(n)?],
                None => Table::ALL.to_vec(),
            };
            let mut results = Vec::new();
            for t in tables {
                results.push((t, reproduce_table(t, cfg)?));
            }
            let status = status_of(results.iter().flat_map(|(_, rows)| rows.iter().map(|r| r.outcome)));
            match a.format {
                Format::Csv => {
                    let mut out = String::from("table,set,outcome\n");
                    for (t, rows) in &results {
                        for r in rows {
                            out.push_str(&format!("{},{},{}\n", t.number(), output::quote(&r.set.to_string()), r.outcome));
                        }
                    }
                    Rendered::text(a.format, out, status)
                }
                Format::Text => {
                    let mut out = String::new();
                    for (t, rows) in &results {
                        let passed = rows.iter().filter(|r| r.outcome.passed()).count();
                        out.push_str(&format!("table {} ({}): {passed}/{} rows pass\n", t.number(), t.criterion(), rows.len()));
                        for r in rows.iter().filter(|r| !r.outcome.passed()) {
                            out.push_str(&format!("  {} {}\n", r.set, r.outcome));
                        }
                    }
                    Rendered::text(a.format, out, status)
                }
                _ => {
                    let body: Vec<Value> = results
                        .iter()
                        .map(|(t, rows)| {
                            json!({
                                "table": t.number(),
                                "criterion": t.criterion(),
                                "rows": rows.len(),
                                "passed": rows.iter().filter(|r| r.outcome.passed()).count(),
                                "results": rows,
                            })
                        })
                        .collect();
                    Rendered::json(a.format, Value::Array(body), status)
                }
            }
        }
        Command::Omega(a) => {
            let m = ResidueMap2n::omega(a.n)?;
            match a.format {
                Format::Json => Rendered::json(a.format, to_value(&m), Status::Ok),
                _ => Rendered::text(a.format, m.to_csv(), Status::Ok),
            }
        }
        Command::Hmap(a) => {
            let m = ResidueMap2n::h_mk(a.n, a.k)?;
            match a.format {
                Format::Json => Rendered::json(a.format, to_value(&m), Status::Ok),
                _ => Rendered::text(a.format, m.to_csv(), Status::Ok),
            }
        }
        Command::Sparse(a) => {
            let elems = sparse_sufficient_set(a.a, a.modulus, |n| n as u32, a.count)?;
            let values: Vec<String> = elems.iter().map(ToString::to_string).collect();
            Rendered::json(Format::Json, json!({ "f": "n", "values": values }), Status::Ok)
        }
    })
}

/// Formats each command accepts.
fn check_format(command: &Command) -> Result<(), String> {
    use Format::*;
    let (given, allowed): (Format, &[Format]) = match command {
        Command::Graph(a) => (a.format, &[Json, Dot]),
        Command::Check(a) => (a.format, &[Json, Csv]),
        Command::Search(a) => (a.format, &[Json, Csv]),
        Command::Duality(a) => (a.format, &[Json, Dot]),
        Command::Fold(a) => (a.format, &[Json, Dot]),
        Command::Unfold(a) => (a.format, &[Json, Csv, Dot]),
        Command::Tables(a) => (a.format, &[Json, Csv, Text]),
        Command::Omega(a) => (a.format, &[Json, Csv]),
        Command::Hmap(a) => (a.format, &[Json, Csv]),
        _ => return Ok(()),
    };
    if allowed.contains(&given) {
        Ok(())
    } else {
        let names: Vec<&str> = allowed.iter().map(|f| f.name()).collect();
        Err(format!("--format {} is not available here; use one of {}", given.name(), names.join(", ")))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { Status::Usage } else { Status::Ok };
            let _ = e.print();
            return code.into();
        }
    };
    if let Err(msg) = check_format(&cli.command) {
        eprintln!("error: {msg}");
        return Status::Usage.into();
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return Status::Usage.into();
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return Status::Usage.into();
        }
    }
    let cfg = config(&cli);
    match run(&cli, &cfg) {
        Ok(rendered) => {
            print!("{}", rendered.finish(&output::meta(&cli.command, &cfg)));
            rendered.status.into()
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::BudgetExceeded { .. } => Status::Undetermined.into(),
                _ => Status::Usage.into(),
            }
        }
    }
}
