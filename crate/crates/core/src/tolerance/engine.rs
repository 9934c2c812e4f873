use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use super::{LowerMethod, Method, ToleranceReport};
use crate::csp::{check_subset, CountingSolver, CspInstance, Solved};
use crate::error::{Error, Result};
use crate::lp::{solve_lp, solve_lp_traced, LinearProgram, LpOutcome};
use crate::subset::Subset;
use crate::value::{ExtendedValue, Rational};

/// Largest ground set accepted by [`all_subsets_lower`] unless overridden.
pub const DEFAULT_ALL_SUBSETS_CAP: usize = 12;

/// Restricted optima `v_F = f_c(D~(E \ F; F))` for every `F ⊆ E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedValueTable {
    set: Subset,
    optimum: Rational,
    values: BTreeMap<Subset, ExtendedValue>,
}

impl RestrictedValueTable {
    pub fn set(&self) -> Subset {
        self.set
    }

    /// The unrestricted optimum `c*`.
    pub fn optimum(&self) -> &Rational {
        &self.optimum
    }

    /// `v_F`, or `None` when `F` is not a subset of `E`.
    pub fn get(&self, f: Subset) -> Option<&ExtendedValue> {
        self.values.get(&f)
    }

    /// `v_F - c*`.
    pub fn excess(&self, f: Subset) -> Option<ExtendedValue> {
        self.get(f).map(|v| v.minus(&self.optimum))
    }

    /// True when `v_F = c*`.
    pub fn is_optimal(&self, f: Subset) -> bool {
        self.get(f).is_some_and(|v| *v == self.optimum)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Subset, &ExtendedValue)> {
        self.values.iter().map(|(&f, v)| (f, v))
    }
}

/// Output of [`all_subsets_lower`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AllSubsetsLower {
    pub method: LowerMethod,
    /// One entry per nonempty subset, by cardinality and then bitmask.
    pub entries: Vec<(Subset, ToleranceReport)>,
    /// Distinct constrained solves over the whole run.
    pub solves: usize,
}

impl AllSubsetsLower {
    pub fn get(&self, set: Subset) -> Option<&ToleranceReport> {
        self.entries.iter().find(|(s, _)| *s == set).map(|(_, r)| r)
    }
}

/// Caches constrained solves and lower tolerances for one computation.
///
/// [`Engine::solves`] counts distinct `(exclude, include)` queries that
/// reached the instance.
pub struct Engine<'a> {
    solver: CountingSolver<'a>,
    cache: HashMap<(Subset, Subset), Solved>,
    lower_memo: HashMap<Subset, ExtendedValue>,
    trace: Option<String>,
}

impl<'a> Engine<'a> {
    pub fn new(inst: &'a dyn CspInstance) -> Self {
        Engine {
            solver: CountingSolver::new(inst),
            cache: HashMap::new(),
            lower_memo: HashMap::new(),
            trace: None,
        }
    }

    pub fn instance(&self) -> &'a dyn CspInstance {
        self.solver.instance()
    }

    pub fn solves(&self) -> usize {
        self.solver.calls()
    }

    /// Records a tableau dump of every LP solved from now on.
    pub fn enable_trace(&mut self) {
        self.trace.get_or_insert_with(String::new);
    }

    pub fn take_trace(&mut self) -> Option<String> {
        self.trace.take()
    }

    /// `f_c(D~(exclude; include))` with a witness.
    pub fn solved(&mut self, exclude: Subset, include: Subset) -> Result<Solved> {
        if let Some(hit) = self.cache.get(&(exclude, include)) {
            return Ok(hit.clone());
        }
        let fresh = self.solver.solve(exclude, include)?;
        self.cache.insert((exclude, include), fresh.clone());
        Ok(fresh)
    }

    pub fn value(&mut self, exclude: Subset, include: Subset) -> Result<ExtendedValue> {
        Ok(self.solved(exclude, include)?.value)
    }

    /// `c*` and the first optimal solution the instance reports.
    pub fn optimum(&mut self) -> Result<(Rational, Subset)> {
        let s = self.solved(Subset::EMPTY, Subset::EMPTY)?;
        match (s.value, s.witness) {
            (ExtendedValue::Finite(v), Some(w)) => Ok((v, w)),
            _ => Err(Error::InvalidInstance(
                "the instance has no feasible solution".into(),
            )),
        }
    }

    fn check_set(&self, set: Subset) -> Result<()> {
        check_subset(self.instance(), set)?;
        if set.is_empty() {
            return Err(Error::invalid("tolerances are undefined for the empty set"));
        }
        Ok(())
    }

    fn check_element(&self, e: usize) -> Result<Subset> {
        if e >= self.instance().size() {
            return Err(Error::IndexOutOfRange {
                index: e,
                size: self.instance().size(),
            });
        }
        Ok(Subset::singleton(e))
    }

    /// `f_c(D+(F)) - c*`.
    pub(crate) fn include_excess(&mut self, f: Subset) -> Result<ExtendedValue> {
        let (opt, _) = self.optimum()?;
        Ok(self.value(Subset::EMPTY, f)?.minus(&opt))
    }

    /// `f_c(D-(F)) - c*`.
    pub(crate) fn exclude_excess(&mut self, f: Subset) -> Result<ExtendedValue> {
        let (opt, _) = self.optimum()?;
        Ok(self.value(f, Subset::EMPTY)?.minus(&opt))
    }

    pub fn single_upper(&mut self, e: usize) -> Result<ToleranceReport> {
        let start = self.solves();
        let s = self.check_element(e)?;
        let value = self.single_upper_value(s)?;
        Ok(ToleranceReport::new(
            value,
            Method::SingleFormula,
            self.solves() - start,
        ))
    }

    pub(crate) fn single_upper_value(&mut self, s: Subset) -> Result<ExtendedValue> {
        if self.include_excess(s)? == Rational::zero() {
            self.exclude_excess(s)
        } else {
            Ok(ExtendedValue::Infinity)
        }
    }

    pub fn single_lower(&mut self, e: usize) -> Result<ToleranceReport> {
        let start = self.solves();
        let s = self.check_element(e)?;
        let value = self.include_excess(s)?;
        self.lower_memo.insert(s, value.clone());
        Ok(ToleranceReport::new(
            value,
            Method::SingleFormula,
            self.solves() - start,
        ))
    }

    pub fn restricted_values(&mut self, set: Subset) -> Result<RestrictedValueTable> {
        self.check_set(set)?;
        let (optimum, _) = self.optimum()?;
        let mut values = BTreeMap::new();
        for f in set.subsets() {
            values.insert(f, self.value(set.difference(f), f)?);
        }
        Ok(RestrictedValueTable {
            set,
            optimum,
            values,
        })
    }

    fn run_lp(&mut self, lp: &LinearProgram, title: &str) -> Result<LpOutcome> {
        let outcome = match self.trace.as_mut() {
            Some(trace) => {
                trace.push_str(&format!("== {title}\n"));
                solve_lp_traced(lp, trace)
            }
            None => solve_lp(lp),
        };
        outcome.map_err(|err| match err {
            Error::Infeasible => Error::internal(format!(
                "{title} is infeasible although the zero vector satisfies it"
            )),
            other => other,
        })
    }

    fn report(&self, outcome: LpOutcome, method: Method, start: usize) -> ToleranceReport {
        ToleranceReport {
            value: outcome.value,
            method,
            witness: outcome.witness,
            solves_used: self.solves() - start,
            case: None,
        }
    }

    /// Maximizes the total increase over `set` subject to every original
    /// optimum staying optimal.
    pub fn set_upper_eul(&mut self, set: Subset) -> Result<ToleranceReport> {
        let start = self.solves();
        let table = self.restricted_values(set)?;
        let (_, best) = self.optimum()?;
        let in_best = set.intersection(best);
        let mut lp = LinearProgram::maximize_sum(set.len());
        for (f, v) in table.iter() {
            let row = row_of(set, |i| {
                let mut a = 0;
                if in_best.contains(i) {
                    a += 1;
                }
                if f.contains(i) {
                    a -= 1;
                }
                a
            });
            if *v == table.optimum {
                lp.add_eq(row, Rational::zero())?;
            } else {
                lp.add_le(row, v.minus(&table.optimum))?;
            }
        }
        let outcome = self.run_lp(&lp, "upper LP")?;
        Ok(self.report(outcome, Method::Eul, start))
    }

    /// Maximizes the total decrease over `set` with one row per `F ⊆ E`
    /// bounding the decrease on `F` by `v_F - c*`.
    pub fn set_lower_ell(&mut self, set: Subset) -> Result<ToleranceReport> {
        let start = self.solves();
        let table = self.restricted_values(set)?;
        let mut lp = LinearProgram::maximize_sum(set.len());
        for (f, _) in table.iter() {
            if f.is_empty() {
                continue;
            }
            let rhs = table.excess(f).expect("row of the table");
            lp.add_le(indicator(set, f), rhs)?;
        }
        let outcome = self.run_lp(&lp, "exact lower LP")?;
        let report = self.report(outcome, Method::Ell, start);
        self.lower_memo.insert(set, report.value.clone());
        Ok(report)
    }

    /// Lower tolerance from the rows `Σ_F α ≤ f_c(D+(F)) - c*`, `F ⊆ E`
    /// nonempty.
    pub fn set_lower_ill(&mut self, set: Subset) -> Result<ToleranceReport> {
        let start = self.solves();
        self.check_set(set)?;
        let mut lp = LinearProgram::maximize_sum(set.len());
        for f in set.subsets().skip(1) {
            let rhs = self.include_excess(f)?;
            lp.add_le(indicator(set, f), rhs)?;
        }
        let outcome = self.run_lp(&lp, "include lower LP")?;
        let report = self.report(outcome, Method::Ill, start);
        self.lower_memo.insert(set, report.value.clone());
        Ok(report)
    }

    /// Lower tolerance from the cap `Σ α ≤ f_c(D+(E)) - c*` and the lower
    /// tolerances of all proper nonempty subsets, computed on demand.
    pub fn set_lower_tll(&mut self, set: Subset) -> Result<ToleranceReport> {
        let start = self.solves();
        self.check_set(set)?;
        let mut lp = LinearProgram::maximize_sum(set.len());
        let cap = self.include_excess(set)?;
        lp.add_le(indicator(set, set), cap)?;
        for f in set.subsets().skip(1) {
            if f == set {
                continue;
            }
            let rhs = self.lower_value(f)?;
            lp.add_le(indicator(set, f), rhs)?;
        }
        let outcome = self.run_lp(&lp, "tolerance lower LP")?;
        let report = self.report(outcome, Method::Tll, start);
        self.lower_memo.insert(set, report.value.clone());
        Ok(report)
    }

    /// `l'(F)` from the memo, or through the recursive LP.
    pub(crate) fn lower_value(&mut self, f: Subset) -> Result<ExtendedValue> {
        if let Some(v) = self.lower_memo.get(&f) {
            return Ok(v.clone());
        }
        if f.len() == 1 {
            let v = self.include_excess(f)?;
            self.lower_memo.insert(f, v.clone());
            return Ok(v);
        }
        Ok(self.set_lower_tll(f)?.value)
    }

    /// Lower tolerances of every nonempty subset of the ground set, by
    /// increasing cardinality.
    pub fn all_subsets_lower(
        &mut self,
        method: LowerMethod,
        cap: usize,
    ) -> Result<AllSubsetsLower> {
        let m = self.instance().size();
        if m > cap {
            let required = match method {
                LowerMethod::EllNaive => format!("a full run needs 3^{m} constrained solves"),
                _ => format!("a full run needs 2^{m} constrained solves"),
            };
            return Err(Error::CapExceeded {
                what: "ground set size",
                actual: m,
                cap,
                required,
            });
        }
        let start = self.solves();
        let ground = Subset::full(m);
        let mut entries = Vec::with_capacity((1usize << m) - 1);
        for k in 1..=m {
            for set in ground.subsets_of_size(k) {
                let report = match method {
                    LowerMethod::Tll => self.set_lower_tll(set)?,
                    LowerMethod::Ill => self.set_lower_ill(set)?,
                    LowerMethod::EllNaive => self.set_lower_ell(set)?,
                };
                entries.push((set, report));
            }
        }
        Ok(AllSubsetsLower {
            method,
            entries,
            solves: self.solves() - start,
        })
    }
}

/// Coefficients over the members of `set`, in increasing index order.
fn row_of(set: Subset, coeff: impl Fn(usize) -> i64) -> Vec<Rational> {
    set.iter()
        .map(|i| Rational::from_integer(coeff(i).into()))
        .collect()
}

fn indicator(set: Subset, f: Subset) -> Vec<Rational> {
    set.iter()
        .map(|i| {
            if f.contains(i) {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect()
}

pub fn single_upper(inst: &dyn CspInstance, e: usize) -> Result<ToleranceReport> {
    Engine::new(inst).single_upper(e)
}

pub fn single_lower(inst: &dyn CspInstance, e: usize) -> Result<ToleranceReport> {
    Engine::new(inst).single_lower(e)
}

pub fn restricted_values(inst: &dyn CspInstance, set: Subset) -> Result<RestrictedValueTable> {
    Engine::new(inst).restricted_values(set)
}

pub fn set_upper_eul(inst: &dyn CspInstance, set: Subset) -> Result<ToleranceReport> {
    Engine::new(inst).set_upper_eul(set)
}

pub fn set_lower_ell(inst: &dyn CspInstance, set: Subset) -> Result<ToleranceReport> {
    Engine::new(inst).set_lower_ell(set)
}

pub fn set_lower_ill(inst: &dyn CspInstance, set: Subset) -> Result<ToleranceReport> {
    Engine::new(inst).set_lower_ill(set)
}

pub fn set_lower_tll(inst: &dyn CspInstance, set: Subset) -> Result<ToleranceReport> {
    Engine::new(inst).set_lower_tll(set)
}

pub fn all_subsets_lower(
    inst: &dyn CspInstance,
    method: LowerMethod,
    cap: usize,
) -> Result<AllSubsetsLower> {
    Engine::new(inst).all_subsets_lower(method, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::tests::triangle;
    use crate::csp::ExplicitCsp;
    use crate::value::int;

    const A: usize = 0;
    const B: usize = 1;
    const C: usize = 2;

    fn fin(n: i64) -> ExtendedValue {
        ExtendedValue::from_int(n)
    }

    fn set(items: &[usize]) -> Subset {
        items.iter().copied().collect()
    }

    #[test]
    fn single_tolerances_on_triangle() {
        let t = triangle();
        assert_eq!(single_upper(&t, C).unwrap().value, ExtendedValue::Infinity);
        assert_eq!(single_upper(&t, A).unwrap().value, fin(3));
        assert_eq!(single_lower(&t, C).unwrap().value, fin(2));
        assert_eq!(single_lower(&t, A).unwrap().value, fin(0));
        assert!(single_lower(&t, 3).is_err());
    }

    #[test]
    fn element_in_no_solution_has_infinite_lower() {
        let csp = ExplicitCsp::new(
            vec!["a".into(), "b".into(), "d".into()],
            vec![int(1), int(1), int(1)],
            vec![set(&[0]), set(&[1])],
        )
        .unwrap();
        assert_eq!(
            single_lower(&csp, 2).unwrap().value,
            ExtendedValue::Infinity
        );
    }

    #[test]
    fn restricted_table_for_pair() {
        let t = triangle();
        let table = restricted_values(&t, set(&[A, B])).unwrap();
        assert_eq!(table.get(set(&[A, B])), Some(&fin(3)));
        assert_eq!(table.get(set(&[A])), Some(&fin(5)));
        assert_eq!(table.get(set(&[B])), Some(&fin(6)));
        assert_eq!(table.get(Subset::EMPTY), Some(&ExtendedValue::Infinity));
        assert_eq!(table.get(set(&[C])), None);
        assert!(restricted_values(&t, Subset::EMPTY).is_err());
    }

    #[test]
    fn upper_lp_on_triangle_pair() {
        let r = set_upper_eul(&triangle(), set(&[A, B])).unwrap();
        assert_eq!(r.value, fin(5));
        assert_eq!(r.witness, Some(vec![int(3), int(2)]));
        assert_eq!(r.method, Method::Eul);
    }

    #[test]
    fn lower_lps_agree_on_triangle() {
        let t = triangle();
        let e = set(&[A, C]);
        let ell = set_lower_ell(&t, e).unwrap();
        let ill = set_lower_ill(&t, e).unwrap();
        let tll = set_lower_tll(&t, e).unwrap();
        assert_eq!(ell.value, fin(2));
        assert_eq!(ill.value, fin(2));
        assert_eq!(tll.value, fin(2));
        assert_eq!(tll.witness, Some(vec![int(0), int(2)]));
    }

    #[test]
    fn singleton_tll_is_single_lower() {
        let t = triangle();
        for e in 0..3 {
            assert_eq!(
                set_lower_tll(&t, Subset::singleton(e)).unwrap().value,
                single_lower(&t, e).unwrap().value
            );
        }
    }

    #[test]
    fn all_subsets_on_triangle() {
        let t = triangle();
        let tll = all_subsets_lower(&t, LowerMethod::Tll, DEFAULT_ALL_SUBSETS_CAP).unwrap();
        assert_eq!(tll.entries.len(), 7);
        assert!(tll.solves <= 8);
        assert_eq!(tll.get(set(&[A, B, C])).unwrap().value, fin(2));
        assert_eq!(tll.get(set(&[A, B])).unwrap().value, fin(0));
        assert_eq!(tll.get(set(&[A, C])).unwrap().value, fin(2));
        assert_eq!(tll.get(set(&[B, C])).unwrap().value, fin(2));

        let ell = all_subsets_lower(&t, LowerMethod::EllNaive, DEFAULT_ALL_SUBSETS_CAP).unwrap();
        assert_eq!(ell.solves, 27);
        for ((s1, r1), (s2, r2)) in tll.entries.iter().zip(&ell.entries) {
            assert_eq!(s1, s2);
            assert_eq!(r1.value, r2.value);
        }
        let order: Vec<Subset> = tll.entries.iter().map(|(s, _)| *s).collect();
        assert_eq!(
            order,
            vec![
                set(&[A]),
                set(&[B]),
                set(&[C]),
                set(&[A, B]),
                set(&[A, C]),
                set(&[B, C]),
                set(&[A, B, C])
            ]
        );
    }

    #[test]
    fn cap_reports_required_count() {
        let err = all_subsets_lower(&triangle(), LowerMethod::Tll, 2).unwrap_err();
        match err {
            Error::CapExceeded {
                actual,
                cap,
                required,
                ..
            } => {
                assert_eq!((actual, cap), (3, 2));
                assert!(required.contains("2^3"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn memo_prevents_repeat_solves() {
        let t = triangle();
        let mut engine = Engine::new(&t);
        engine.set_lower_tll(set(&[A, B, C])).unwrap();
        let used = engine.solves();
        let again = engine.set_lower_tll(set(&[A, B, C])).unwrap();
        assert_eq!(engine.solves(), used);
        assert_eq!(again.solves_used, 0);
    }

    #[test]
    fn trace_is_collected_on_request() {
        let t = triangle();
        let mut engine = Engine::new(&t);
        engine.enable_trace();
        engine.set_upper_eul(set(&[A, B])).unwrap();
        let trace = engine.take_trace().unwrap();
        assert!(trace.starts_with("== upper LP"));
    }
}
