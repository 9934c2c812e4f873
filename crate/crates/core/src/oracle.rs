//! Brute-force reference computations.
//!
//! The oracle evaluates tolerance definitions literally over an explicit
//! solution list. It shares only the LP kernel with the engine: constraint
//! rows are derived here from the listed solutions, never from constrained
//! solves, so agreement between the two is meaningful.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::csp::{CspInstance, ExplicitCsp};
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram};
use crate::mst::{enumerate_spanning_trees_capped, Edge, Graph};
use crate::subset::Subset;
use crate::tolerance::Engine;
use crate::value::{int, ratio, ExtendedValue, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    /// Largest explicit ground set the oracle accepts.
    pub max_elements: usize,
    /// Largest graph the oracle converts to an explicit instance.
    pub max_vertices: usize,
    /// Instances drawn per random batch.
    pub trials: usize,
    pub seed: u64,
    /// Inclusive cost range for random explicit instances.
    pub csp_costs: (i64, i64),
    /// Inclusive cost range for random graphs.
    pub graph_costs: (i64, i64),
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_elements: 12,
            max_vertices: 9,
            trials: 100,
            seed: 1,
            csp_costs: (-5, 9),
            graph_costs: (1, 9),
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_elements == 0 || self.max_vertices < 2 {
            return Err(Error::invalid("oracle caps must be positive"));
        }
        if self.csp_costs.0 > self.csp_costs.1 || self.graph_costs.0 > self.graph_costs.1 {
            return Err(Error::invalid("cost ranges must satisfy min <= max"));
        }
        Ok(())
    }

    fn check_size(&self, inst: &ExplicitCsp) -> Result<()> {
        if inst.size() > self.max_elements {
            return Err(Error::CapExceeded {
                what: "ground set size",
                actual: inst.size(),
                cap: self.max_elements,
                required: "the oracle scans every listed solution per query".into(),
            });
        }
        Ok(())
    }
}

/// An oracle value with the LP vertex that attains it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleValue {
    pub value: ExtendedValue,
    pub witness: Option<Vec<Rational>>,
}

fn cost_of(costs: &[Rational], s: Subset) -> Rational {
    s.iter().map(|i| &costs[i]).sum()
}

fn optimum(inst: &ExplicitCsp) -> Rational {
    inst.solutions()
        .iter()
        .map(|&s| cost_of(inst.costs(), s))
        .min()
        .expect("nonempty family")
}

fn check_target(inst: &ExplicitCsp, set: Subset) -> Result<()> {
    if set.is_empty() {
        return Err(Error::invalid("tolerances are undefined for the empty set"));
    }
    if set.bound() > inst.size() {
        return Err(Error::IndexOutOfRange {
            index: set.bound() - 1,
            size: inst.size(),
        });
    }
    Ok(())
}

/// Coefficient vector over the members of `set`, as integers.
type Row = Vec<i64>;

fn solve_rows(set: Subset, rows: BTreeMap<Row, Rational>) -> Result<OracleValue> {
    let mut lp = LinearProgram::maximize_sum(set.len());
    for (row, rhs) in rows {
        lp.add_le(
            row.into_iter().map(int).collect(),
            ExtendedValue::Finite(rhs),
        )?;
    }
    let out = solve_lp(&lp).map_err(|e| Error::internal(format!("oracle LP failed: {e}")))?;
    Ok(OracleValue {
        value: out.value,
        witness: out.witness,
    })
}

fn keep_min(rows: &mut BTreeMap<Row, Rational>, row: Row, rhs: Rational) {
    if row.iter().all(|&a| a == 0) {
        return;
    }
    rows.entry(row)
        .and_modify(|r| {
            if rhs < *r {
                *r = rhs.clone();
            }
        })
        .or_insert(rhs);
}

/// Largest total decrease over `set` that keeps the optimum at `c*`, from
/// one row per listed solution.
pub fn oracle_set_lower(
    inst: &ExplicitCsp,
    set: Subset,
    cfg: &OracleConfig,
) -> Result<OracleValue> {
    cfg.check_size(inst)?;
    check_target(inst, set)?;
    let best = optimum(inst);
    let mut rows = BTreeMap::new();
    for &s in inst.solutions() {
        let row = set.iter().map(|i| s.contains(i) as i64).collect();
        keep_min(&mut rows, row, cost_of(inst.costs(), s) - &best);
    }
    let out = solve_rows(set, rows)?;
    if let Some(w) = &out.witness {
        if !certify_lower(inst, set, w)? {
            return Err(Error::internal("oracle lower witness fails re-evaluation"));
        }
    }
    Ok(out)
}

/// Largest total increase over `set` under which every original optimum
/// stays optimal, from one row per (original optimum, listed solution).
pub fn oracle_set_upper(
    inst: &ExplicitCsp,
    set: Subset,
    cfg: &OracleConfig,
) -> Result<OracleValue> {
    cfg.check_size(inst)?;
    check_target(inst, set)?;
    let best = optimum(inst);
    let optima: Vec<Subset> = inst
        .solutions()
        .iter()
        .copied()
        .filter(|&s| cost_of(inst.costs(), s) == best)
        .collect();
    let mut rows = BTreeMap::new();
    for &star in &optima {
        for &s in inst.solutions() {
            let row = set
                .iter()
                .map(|i| star.contains(i) as i64 - s.contains(i) as i64)
                .collect();
            keep_min(&mut rows, row, cost_of(inst.costs(), s) - &best);
        }
    }
    let out = solve_rows(set, rows)?;
    if let Some(w) = &out.witness {
        if !certify_upper(inst, set, w)? {
            return Err(Error::internal("oracle upper witness fails re-evaluation"));
        }
    }
    Ok(out)
}

fn perturbed(
    inst: &ExplicitCsp,
    set: Subset,
    alpha: &[Rational],
    sign: i64,
) -> Result<Vec<Rational>> {
    if alpha.len() != set.len() {
        return Err(Error::invalid(format!(
            "witness has {} entries for a set of {}",
            alpha.len(),
            set.len()
        )));
    }
    let mut costs = inst.costs().to_vec();
    for (i, a) in set.iter().zip(alpha) {
        costs[i] += a * int(sign);
    }
    Ok(costs)
}

/// True when decreasing the costs on `set` by `alpha` leaves the optimum at
/// exactly `c*`.
pub fn certify_lower(inst: &ExplicitCsp, set: Subset, alpha: &[Rational]) -> Result<bool> {
    if alpha.iter().any(|a| a < &Rational::zero()) {
        return Ok(false);
    }
    let costs = perturbed(inst, set, alpha, -1)?;
    let after = inst
        .solutions()
        .iter()
        .map(|&s| cost_of(&costs, s))
        .min()
        .expect("nonempty family");
    Ok(after == optimum(inst))
}

/// True when every original optimum is still optimal after increasing the
/// costs on `set` by `alpha`.
pub fn certify_upper(inst: &ExplicitCsp, set: Subset, alpha: &[Rational]) -> Result<bool> {
    if alpha.iter().any(|a| a < &Rational::zero()) {
        return Ok(false);
    }
    let best = optimum(inst);
    let costs = perturbed(inst, set, alpha, 1)?;
    let after = inst
        .solutions()
        .iter()
        .map(|&s| cost_of(&costs, s))
        .min()
        .expect("nonempty family");
    Ok(inst
        .solutions()
        .iter()
        .filter(|&&s| cost_of(inst.costs(), s) == best)
        .all(|&s| cost_of(&costs, s) == after))
}

/// The default perturbation for maximality checks.
pub fn maximality_epsilon() -> Rational {
    ratio(1, 1000)
}

/// Coordinates along which `alpha + eps·e_i` still certifies. A maximal
/// witness has none.
pub fn unblocked_directions(
    inst: &ExplicitCsp,
    set: Subset,
    alpha: &[Rational],
    eps: &Rational,
    upper: bool,
) -> Result<Vec<usize>> {
    let mut open = Vec::new();
    for i in 0..alpha.len() {
        let mut bumped = alpha.to_vec();
        bumped[i] += eps;
        let ok = if upper {
            certify_upper(inst, set, &bumped)?
        } else {
            certify_lower(inst, set, &bumped)?
        };
        if ok {
            open.push(i);
        }
    }
    Ok(open)
}

/// Spanning trees of `g` as an explicit instance over the same edge labels.
pub fn graph_as_explicit(g: &Graph, cfg: &OracleConfig) -> Result<ExplicitCsp> {
    let trees = enumerate_spanning_trees_capped(g, cfg.max_vertices)?;
    ExplicitCsp::new(
        (0..g.size()).map(|i| g.label(i).to_string()).collect(),
        g.costs().to_vec(),
        trees.iter().map(|t| t.edges()).collect(),
    )
}

/// Seeded source of random instances.
pub struct RandomInstances {
    rng: ChaCha8Rng,
    cfg: OracleConfig,
}

impl RandomInstances {
    pub fn new(cfg: &OracleConfig) -> Self {
        RandomInstances {
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            cfg: cfg.clone(),
        }
    }

    /// An explicit instance on `m` elements with a nonempty family of
    /// distinct nonempty solutions.
    pub fn csp(&mut self, m: usize) -> ExplicitCsp {
        assert!(
            (1..=16).contains(&m),
            "random instances use 1..=16 elements"
        );
        let (lo, hi) = self.cfg.csp_costs;
        let costs = (0..m).map(|_| int(self.rng.gen_range(lo..=hi))).collect();
        let universe = (1u64 << m) - 1;
        let count = self.rng.gen_range(1..=universe.min(2 * m as u64 + 2));
        let mut family: Vec<Subset> = Vec::new();
        while (family.len() as u64) < count {
            let s = Subset::from_bits(self.rng.gen_range(1..=universe));
            if !family.contains(&s) {
                family.push(s);
            }
        }
        ExplicitCsp::new(
            (0..m).map(|i| format!("e{}", i + 1)).collect(),
            costs,
            family,
        )
        .expect("generated family is valid")
    }

    /// A connected graph on `n` vertices: a random spanning tree plus
    /// `extra` random edges, parallel edges allowed.
    pub fn graph(&mut self, n: usize, extra: usize) -> Graph {
        assert!(n >= 2, "graphs need two vertices");
        let (lo, hi) = self.cfg.graph_costs;
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut self.rng);
        let mut edges = Vec::new();
        for k in 1..n {
            let parent = order[self.rng.gen_range(0..k)];
            edges.push((order[k], parent));
        }
        for _ in 0..extra {
            let u = self.rng.gen_range(0..n);
            let mut v = self.rng.gen_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            edges.push((u, v));
        }
        edges.shuffle(&mut self.rng);
        let edges = edges
            .into_iter()
            .map(|(u, v)| Edge {
                u,
                v,
                cost: int(self.rng.gen_range(lo..=hi)),
            })
            .collect();
        Graph::new(n, edges).expect("contains a spanning tree")
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// Outcome of comparing the engine with the oracle on one instance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub seed: Option<u64>,
    pub instances: usize,
    pub checks: usize,
    pub mismatches: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn absorb(&mut self, other: VerifyReport) {
        self.instances += other.instances;
        self.checks += other.checks;
        self.mismatches.extend(other.mismatches);
    }
}

fn note(report: &mut VerifyReport, ok: bool, what: String) {
    report.checks += 1;
    if !ok {
        report.mismatches.push(what);
    }
}

/// Compares every engine method with the oracle on each nonempty subset of
/// at most `max_set` elements. `engine_inst` and `explicit` must describe the
/// same problem over the same ground set.
pub fn verify_instance(
    engine_inst: &dyn CspInstance,
    explicit: &ExplicitCsp,
    max_set: usize,
    cfg: &OracleConfig,
) -> Result<VerifyReport> {
    if engine_inst.size() != explicit.size() {
        return Err(Error::invalid("engine and oracle instances differ in size"));
    }
    let mut report = VerifyReport {
        instances: 1,
        ..VerifyReport::default()
    };
    let mut engine = Engine::new(engine_inst);
    let eps = maximality_epsilon();
    let name = |set: Subset| -> String {
        let labels: Vec<&str> = set.iter().map(|i| explicit.label(i)).collect();
        format!("{{{}}}", labels.join(","))
    };
    let ground = Subset::full(explicit.size());
    for k in 1..=max_set.min(explicit.size()) {
        for set in ground.subsets_of_size(k) {
            let lower = oracle_set_lower(explicit, set, cfg)?;
            let upper = oracle_set_upper(explicit, set, cfg)?;
            let ell = engine.set_lower_ell(set)?;
            let ill = engine.set_lower_ill(set)?;
            let tll = engine.set_lower_tll(set)?;
            let eul = engine.set_upper_eul(set)?;
            for (tag, r) in [("ell", &ell), ("ill", &ill), ("tll", &tll)] {
                note(
                    &mut report,
                    r.value == lower.value,
                    format!(
                        "lower {} {tag} = {} but oracle = {}",
                        name(set),
                        r.value,
                        lower.value
                    ),
                );
                if let Some(w) = &r.witness {
                    note(
                        &mut report,
                        certify_lower(explicit, set, w)?,
                        format!("lower {} {tag} witness fails re-evaluation", name(set)),
                    );
                    note(
                        &mut report,
                        unblocked_directions(explicit, set, w, &eps, false)?.is_empty(),
                        format!("lower {} {tag} witness is not maximal", name(set)),
                    );
                }
            }
            note(
                &mut report,
                eul.value == upper.value,
                format!(
                    "upper {} eul = {} but oracle = {}",
                    name(set),
                    eul.value,
                    upper.value
                ),
            );
            if let Some(w) = &eul.witness {
                note(
                    &mut report,
                    certify_upper(explicit, set, w)?,
                    format!("upper {} eul witness fails re-evaluation", name(set)),
                );
                note(
                    &mut report,
                    unblocked_directions(explicit, set, w, &eps, true)?.is_empty(),
                    format!("upper {} eul witness is not maximal", name(set)),
                );
            }
            let closed = match k {
                2 => Some((engine.closed_upper_2(set)?, engine.closed_lower_2(set)?)),
                3 => Some((engine.closed_upper_3(set)?, engine.closed_lower_3(set)?)),
                _ => None,
            };
            if let Some((up, low)) = closed {
                note(
                    &mut report,
                    up.value == upper.value,
                    format!(
                        "upper {} closed form {} = {} but oracle = {}",
                        name(set),
                        up.case.unwrap_or("?"),
                        up.value,
                        upper.value
                    ),
                );
                note(
                    &mut report,
                    low.value == lower.value,
                    format!(
                        "lower {} closed form = {} but oracle = {}",
                        name(set),
                        low.value,
                        lower.value
                    ),
                );
            }
        }
    }
    for e in 0..explicit.size() {
        let single = Subset::singleton(e);
        let up = engine.single_upper(e)?.value;
        let oracle_up = oracle_set_upper(explicit, single, cfg)?.value;
        note(
            &mut report,
            up == oracle_up,
            format!(
                "single upper {} = {up} but oracle = {oracle_up}",
                name(single)
            ),
        );
    }
    Ok(report)
}

/// Runs [`verify_instance`] on `cfg.trials` random explicit instances with
/// `1..=max_m` elements.
pub fn verify_random_csps(
    cfg: &OracleConfig,
    max_m: usize,
    max_set: usize,
) -> Result<VerifyReport> {
    cfg.validate()?;
    let mut source = RandomInstances::new(cfg);
    let mut report = VerifyReport {
        seed: Some(cfg.seed),
        ..VerifyReport::default()
    };
    for _ in 0..cfg.trials {
        let m = source.rng().gen_range(1..=max_m);
        let inst = source.csp(m);
        report.absorb(verify_instance(&inst, &inst, max_set, cfg)?);
    }
    Ok(report)
}

/// Runs [`verify_instance`] on `cfg.trials` random connected graphs with
/// `2..=max_n` vertices, comparing the spanning-tree solver with the
/// enumerated solution list.
pub fn verify_random_graphs(
    cfg: &OracleConfig,
    max_n: usize,
    max_set: usize,
) -> Result<VerifyReport> {
    cfg.validate()?;
    let mut source = RandomInstances::new(cfg);
    let mut report = VerifyReport {
        seed: Some(cfg.seed),
        ..VerifyReport::default()
    };
    for _ in 0..cfg.trials {
        let n = source.rng().gen_range(2..=max_n);
        let extra = source.rng().gen_range(0..=n);
        let g = source.graph(n, extra);
        let explicit = graph_as_explicit(&g, cfg)?;
        report.absorb(verify_instance(&g, &explicit, max_set, cfg)?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::tests::triangle;

    fn set(items: &[usize]) -> Subset {
        items.iter().copied().collect()
    }

    fn fin(n: i64) -> ExtendedValue {
        ExtendedValue::from_int(n)
    }

    #[test]
    fn lower_oracle_on_triangle() {
        let t = triangle();
        let cfg = OracleConfig::default();
        let r = oracle_set_lower(&t, set(&[0, 2]), &cfg).unwrap();
        assert_eq!(r.value, fin(2));
        assert!(certify_lower(&t, set(&[0, 2]), &[int(0), int(2)]).unwrap());
        assert!(!certify_lower(&t, set(&[0, 2]), &[int(1), int(2)]).unwrap());
        assert_eq!(
            oracle_set_lower(&t, set(&[0, 1, 2]), &cfg).unwrap().value,
            fin(2)
        );
        assert_eq!(
            oracle_set_lower(&t, set(&[0, 1]), &cfg).unwrap().value,
            fin(0)
        );
    }

    #[test]
    fn upper_oracle_on_triangle() {
        let t = triangle();
        let cfg = OracleConfig::default();
        assert_eq!(
            oracle_set_upper(&t, set(&[0, 1]), &cfg).unwrap().value,
            fin(5)
        );
        assert_eq!(
            oracle_set_upper(&t, set(&[2]), &cfg).unwrap().value,
            ExtendedValue::Infinity
        );
        assert!(certify_upper(&t, set(&[2]), &[int(1000)]).unwrap());
        assert_eq!(oracle_set_upper(&t, set(&[0]), &cfg).unwrap().value, fin(3));
    }

    #[test]
    fn maximality_of_lp_witness() {
        let t = triangle();
        let e = set(&[0, 1]);
        let w = [int(3), int(2)];
        assert!(unblocked_directions(&t, e, &w, &maximality_epsilon(), true)
            .unwrap()
            .is_empty());
        let slack = [int(1), int(1)];
        assert_eq!(
            unblocked_directions(&t, e, &slack, &maximality_epsilon(), true).unwrap(),
            vec![0, 1]
        );
    }

    #[test]
    fn generators_are_reproducible() {
        let cfg = OracleConfig::default();
        let a = RandomInstances::new(&cfg).csp(4);
        let b = RandomInstances::new(&cfg).csp(4);
        assert_eq!(a, b);
        let mut src = RandomInstances::new(&cfg);
        for n in 2..8 {
            let g = src.graph(n, n);
            assert!(g.connects(Subset::full(g.size())));
            assert!(!src.csp(n).solutions().is_empty());
        }
    }

    #[test]
    fn caps_are_enforced() {
        let cfg = OracleConfig {
            max_elements: 2,
            ..OracleConfig::default()
        };
        assert!(matches!(
            oracle_set_lower(&triangle(), set(&[0]), &cfg),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn small_random_batch_agrees() {
        let cfg = OracleConfig {
            trials: 15,
            ..OracleConfig::default()
        };
        let r = verify_random_csps(&cfg, 5, 3).unwrap();
        assert!(r.passed(), "{:?}", r.mismatches);
        let g = verify_random_graphs(&OracleConfig { trials: 5, ..cfg }, 5, 3).unwrap();
        assert!(g.passed(), "{:?}", g.mismatches);
    }
}
