use clap::{Args, ValueEnum};
use settol::mst::{self, kruskal, Graph, SpanningTree};
use settol::oracle::{
    graph_as_explicit, oracle_set_lower, oracle_set_upper, verify_instance, verify_random_csps,
    verify_random_graphs, OracleConfig, VerifyReport,
};
use settol::tolerance::{Engine, LowerMethod, Method, ToleranceReport};
use settol::{ExplicitCsp, ExtendedValue, Subset};

use crate::instance::{Instance, InstanceArgs};
use crate::output::{OutputArgs, Report};
use crate::Failure;

#[derive(Args, Debug)]
pub struct OracleArgs {
    /// Largest ground set the oracle accepts.
    #[arg(long, default_value_t = 12)]
    pub max_elements: usize,

    /// Largest graph whose spanning trees the oracle enumerates.
    #[arg(long, default_value_t = 9)]
    pub max_vertices: usize,
}

impl OracleArgs {
    fn config(&self) -> OracleConfig {
        OracleConfig {
            max_elements: self.max_elements,
            max_vertices: self.max_vertices,
            ..OracleConfig::default()
        }
    }
}

#[derive(Args, Debug)]
pub struct SingleArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Elements to report, comma-separated; all when omitted or empty.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub elements: Vec<String>,
    /// Cross-check tree formulas against constrained solves, or explicit
    /// instances against the oracle.
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub oracle: OracleArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SetMethod {
    Eul,
    Ell,
    Ill,
    Tll,
    /// Closed forms, for sets of at most three elements.
    Closed,
    /// Sum of tree-path single lower tolerances (graphs only).
    MstExact,
    /// Sum of single upper tolerances, a lower bound (graphs only).
    MstBound,
}

#[derive(Args, Debug)]
pub struct SetArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Target set, comma-separated labels.
    #[arg(long, value_delimiter = ',', required = true)]
    pub set: Vec<String>,
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Defaults to eul for upper and tll for lower.
    #[arg(long, value_enum)]
    pub method: Option<SetMethod>,
    /// Recompute the value with the brute-force oracle.
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub oracle: OracleArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AllMethod {
    Tll,
    Ill,
    EllNaive,
}

#[derive(Args, Debug)]
pub struct AllLowerArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, value_enum, default_value = "tll")]
    pub method: AllMethod,
    /// Largest ground set accepted.
    #[arg(long, default_value_t = settol::tolerance::DEFAULT_ALL_SUBSETS_CAP)]
    pub cap: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    pub set: Vec<String>,
    /// One partition part, comma-separated; repeat for each part.
    #[arg(long = "part", value_name = "LABELS")]
    pub parts: Vec<String>,
    /// Subset sizes for the binomial bound; all valid sizes when omitted.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    /// Also compute both set tolerances and check they respect the bounds.
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Csp,
    Graph,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Check a seeded random batch of this many instances instead.
    #[arg(long, value_name = "N", conflicts_with_all = ["csp", "graph"])]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "csp")]
    pub family: Family,
    /// Largest random ground set (csp) or vertex count (graph).
    #[arg(long, default_value_t = 6)]
    pub max_size: usize,
    /// Largest target set checked.
    #[arg(long, default_value_t = 3)]
    pub max_set: usize,
    #[command(flatten)]
    pub oracle: OracleArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn engine<'a>(inst: &'a Instance, out: &OutputArgs) -> Engine<'a> {
    let mut e = Engine::new(inst.as_dyn());
    if out.verbose {
        e.enable_trace();
    }
    e
}

fn flush_trace(e: &mut Engine) {
    if let Some(t) = e.take_trace() {
        eprint!("{t}");
    }
}

fn minimum_tree(g: &Graph) -> Result<SpanningTree, Failure> {
    let (_, t) = kruskal(g, Subset::EMPTY, Subset::EMPTY)?;
    t.ok_or_else(|| Failure::internal("a connected graph has a spanning tree"))
}

/// The instance as an explicit solution list, with the oracle settings to
/// use on it. Graphs are capped by vertex count, not edge count.
fn explicit_for(
    inst: &Instance,
    cfg: &OracleConfig,
) -> Result<(ExplicitCsp, OracleConfig), Failure> {
    Ok(match inst {
        Instance::Csp(c) => (c.clone(), cfg.clone()),
        Instance::Graph(g) => {
            let cfg = OracleConfig {
                max_elements: cfg.max_elements.max(g.edges().len()),
                ..cfg.clone()
            };
            (graph_as_explicit(g, &cfg)?, cfg)
        }
    })
}

pub fn single(args: &SingleArgs) -> Result<String, Failure> {
    let inst = args.instance.load()?;
    let m = inst.as_dyn().size();
    let set = inst.resolve(&args.elements)?;
    let set = if set.is_empty() { Subset::full(m) } else { set };
    let mut report = Report::new(vec!["element", "upper", "lower", "method"]);
    let mut engine = engine(&inst, &args.output);
    let mut mismatches = Vec::new();
    let tree = inst.graph().map(minimum_tree).transpose()?;
    let explicit = match (args.verify, &inst) {
        (true, Instance::Csp(c)) => Some(c.clone()),
        _ => None,
    };
    for e in set.iter() {
        let (up, low, method) = match (inst.graph(), &tree) {
            (Some(g), Some(t)) => (
                mst::mst_single_upper(g, t, e)?,
                mst::mst_single_lower(g, t, e)?,
                "mst",
            ),
            _ => (
                engine.single_upper(e)?.value,
                engine.single_lower(e)?.value,
                "single",
            ),
        };
        if args.verify {
            let want = match &explicit {
                Some(x) => {
                    let cfg = args.oracle.config();
                    let s = Subset::singleton(e);
                    (
                        oracle_set_upper(x, s, &cfg)?.value,
                        oracle_set_lower(x, s, &cfg)?.value,
                    )
                }
                None => (engine.single_upper(e)?.value, engine.single_lower(e)?.value),
            };
            if want != (up.clone(), low.clone()) {
                mismatches.push(format!(
                    "{}: ({up}; {low}) but the check gives ({}; {})",
                    inst.label(e),
                    want.0,
                    want.1
                ));
            }
        }
        report.row(vec![
            inst.label(e).into(),
            up.into(),
            low.into(),
            method.into(),
        ]);
    }
    flush_trace(&mut engine);
    if args.verify {
        check_mismatches(&mismatches)?;
        report.note("verified", "yes");
    }
    if tree.is_none() || args.verify {
        report.note("solves", engine.solves());
    }
    report.render(&args.output)
}

fn check_mismatches(mismatches: &[String]) -> Result<(), Failure> {
    if mismatches.is_empty() {
        Ok(())
    } else {
        Err(Failure::internal(format!(
            "verification failed:\n  {}",
            mismatches.join("\n  ")
        )))
    }
}

fn mst_only(inst: &Instance, name: &str) -> Result<(), Failure> {
    if inst.graph().is_none() {
        return Err(Failure::request(format!(
            "--method {name} needs a --graph instance"
        )));
    }
    Ok(())
}

pub fn set(args: &SetArgs) -> Result<String, Failure> {
    let inst = args.instance.load()?;
    let set = inst.resolve(&args.set)?;
    if set.is_empty() {
        return Err(Failure::request("--set must name at least one element"));
    }
    let method = args.method.unwrap_or(match args.kind {
        Kind::Upper => SetMethod::Eul,
        Kind::Lower => SetMethod::Tll,
    });
    use Kind::*;
    use SetMethod::*;
    match (args.kind, method) {
        (Upper, Eul | Closed | MstBound) | (Lower, Ell | Ill | Tll | Closed | MstExact) => {}
        (kind, m) => {
            return Err(Failure::request(format!(
                "method {} does not compute a {} tolerance",
                m.to_possible_value().unwrap().get_name(),
                if kind == Upper {
                    "set upper"
                } else {
                    "set lower"
                }
            )))
        }
    }
    if method == Closed && set.len() > 3 {
        return Err(Failure::request(format!(
            "closed forms cover sets of at most 3 elements, got {}",
            set.len()
        )));
    }
    let mut engine = engine(&inst, &args.output);
    let mut bound_only = false;
    let report: ToleranceReport = match method {
        Eul => engine.set_upper_eul(set)?,
        Ell => engine.set_lower_ell(set)?,
        Ill => engine.set_lower_ill(set)?,
        Tll => engine.set_lower_tll(set)?,
        Closed => {
            let first = set.iter().next().expect("nonempty");
            match (args.kind, set.len()) {
                (Upper, 1) => engine.single_upper(first)?,
                (Lower, 1) => engine.single_lower(first)?,
                (Upper, 2) => engine.closed_upper_2(set)?,
                (Upper, _) => engine.closed_upper_3(set)?,
                (Lower, 2) => engine.closed_lower_2(set)?,
                (Lower, _) => engine.closed_lower_3(set)?,
            }
        }
        MstExact => {
            mst_only(&inst, "mst-exact")?;
            let g = inst.graph().expect("checked");
            mst::mst_set_lower(g, &minimum_tree(g)?, set)?
        }
        MstBound => {
            mst_only(&inst, "mst-bound")?;
            let g = inst.graph().expect("checked");
            bound_only = true;
            ToleranceReport {
                value: mst::mst_set_upper_lower_bound(g, &minimum_tree(g)?, set)?,
                method: Method::MstFormula,
                witness: None,
                solves_used: 0,
                case: None,
            }
        }
    };
    flush_trace(&mut engine);
    let method_name = if bound_only {
        "mst-bound"
    } else {
        report.method.name()
    };

    let mut out = Report::new(vec!["element", "alpha"]);
    if let Some(w) = &report.witness {
        for (e, a) in set.iter().zip(w) {
            out.row(vec![
                inst.label(e).into(),
                ExtendedValue::Finite(a.clone()).into(),
            ]);
        }
    }
    out.note("set", inst.name(set));
    out.note("kind", if args.kind == Upper { "upper" } else { "lower" });
    out.note("method", method_name);
    if let Some(case) = report.case {
        out.note("case", case);
    }
    out.note(
        if bound_only { "lower bound" } else { "value" },
        report.value.clone(),
    );
    out.note("solves", report.solves_used);
    if args.verify {
        let (explicit, cfg) = explicit_for(&inst, &args.oracle.config())?;
        let oracle = match args.kind {
            Upper => oracle_set_upper(&explicit, set, &cfg)?,
            Lower => oracle_set_lower(&explicit, set, &cfg)?,
        };
        let ok = if bound_only {
            report.value <= oracle.value
        } else {
            report.value == oracle.value
        };
        if !ok {
            return Err(Failure::internal(format!(
                "verification failed: {} gives {} but the oracle gives {}",
                method_name, report.value, oracle.value
            )));
        }
        out.note("oracle", oracle.value);
    }
    out.render(&args.output)
}

pub fn all_lower(args: &AllLowerArgs) -> Result<String, Failure> {
    let inst = args.instance.load()?;
    let method = match args.method {
        AllMethod::Tll => LowerMethod::Tll,
        AllMethod::Ill => LowerMethod::Ill,
        AllMethod::EllNaive => LowerMethod::EllNaive,
    };
    let mut engine = engine(&inst, &args.output);
    let run = engine.all_subsets_lower(method, args.cap)?;
    flush_trace(&mut engine);
    let mut report = Report::new(vec!["set", "cardinality", "value", "method", "solves"]);
    for (set, r) in &run.entries {
        report.row(vec![
            inst.name(*set).into(),
            set.len().into(),
            r.value.clone().into(),
            r.method.name().into(),
            r.solves_used.into(),
        ]);
    }
    report.note("solves", run.solves);
    report.render(&args.output)
}

pub fn bounds(args: &BoundsArgs) -> Result<String, Failure> {
    let inst = args.instance.load()?;
    let set = inst.resolve(&args.set)?;
    if set.is_empty() {
        return Err(Failure::request("--set must name at least one element"));
    }
    let parts = args
        .parts
        .iter()
        .map(|p| inst.resolve(&p.split(',').map(str::to_string).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut engine = engine(&inst, &args.output);
    let partition = (!parts.is_empty()).then_some(parts.as_slice());
    let b = engine.bounds_report(set, partition, &args.sizes)?;
    let mut report = Report::new(vec!["bound", "value", "relation"]);
    let below_lower = "<= lower";
    let above_lower = ">= lower";
    report.row(vec![
        "max-single-lower".into(),
        b.max_single_lower.clone().into(),
        below_lower.into(),
    ]);
    report.row(vec![
        "sum-single-lower".into(),
        b.sum_single_lower.clone().into(),
        above_lower.into(),
    ]);
    report.row(vec![
        "min-cost".into(),
        b.min_cost.clone().into(),
        above_lower.into(),
    ]);
    if let Some((ps, v)) = &b.partition {
        let names: Vec<String> = ps.iter().map(|p| inst.name(*p)).collect();
        report.row(vec![
            format!("partition {}", names.join(" ")).into(),
            v.clone().into(),
            above_lower.into(),
        ]);
    }
    for (s, v) in &b.binomial {
        report.row(vec![
            format!("binomial s={s}").into(),
            v.clone().into(),
            above_lower.into(),
        ]);
    }
    report.row(vec![
        "max-single-upper".into(),
        b.max_single_upper.clone().into(),
        "<= upper".into(),
    ]);
    report.note("set", inst.name(set));
    report.note("best lower cap", b.best_lower_cap());
    if args.verify {
        let lower = engine.set_lower_tll(set)?.value;
        let upper = engine.set_upper_eul(set)?.value;
        let ok = b.max_single_lower <= lower
            && lower <= b.best_lower_cap()
            && b.max_single_upper <= upper;
        if !ok {
            return Err(Failure::internal(format!(
                "verification failed: lower {lower} or upper {upper} violates a bound"
            )));
        }
        report.note("lower", lower);
        report.note("upper", upper);
    }
    report.note("solves", engine.solves());
    flush_trace(&mut engine);
    report.render(&args.output)
}

pub fn verify(args: &VerifyArgs) -> Result<String, Failure> {
    let cfg = OracleConfig {
        seed: args.seed,
        trials: args.random.unwrap_or(0),
        ..args.oracle.config()
    };
    let result: VerifyReport = match args.random {
        Some(_) => match args.family {
            Family::Csp => verify_random_csps(&cfg, args.max_size, args.max_set)?,
            Family::Graph => verify_random_graphs(&cfg, args.max_size, args.max_set)?,
        },
        None => {
            if !args.instance.is_given() {
                return Err(Failure::request("give --csp, --graph or --random N"));
            }
            let inst = args.instance.load()?;
            let (explicit, cfg) = explicit_for(&inst, &cfg)?;
            verify_instance(inst.as_dyn(), &explicit, args.max_set, &cfg)?
        }
    };
    let mut report = Report::new(vec!["mismatch"]);
    for m in &result.mismatches {
        report.row(vec![m.clone().into()]);
    }
    if let Some(seed) = result.seed {
        report.note("seed", seed.to_string());
    }
    report.note("instances", result.instances);
    report.note("checks", result.checks);
    report.note("mismatches", result.mismatches.len());
    report.note("result", if result.passed() { "PASS" } else { "FAIL" });
    let text = report.render(&args.output)?;
    if result.passed() {
        Ok(text)
    } else {
        print!("{text}");
        Err(Failure::internal(format!(
            "{} of {} checks disagree with the oracle",
            result.mismatches.len(),
            result.checks
        )))
    }
}
