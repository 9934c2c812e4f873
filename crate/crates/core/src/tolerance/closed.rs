//! Closed forms for sets of two and three elements.
//!
//! Upper-tolerance cases are tested in order (a), (b), ... with exact
//! comparisons of restricted optima against `c*`; each case applies only when
//! all earlier ones fail. Products of a positive factor and an infinite excess
//! evaluate to `+inf`.

use super::{Engine, Method, ToleranceReport};
use crate::csp::CspInstance;
use crate::error::{Error, Result};
use crate::subset::Subset;
use crate::value::{ratio, ExtendedValue};

fn members<const N: usize>(set: Subset) -> Result<[usize; N]> {
    let items: Vec<usize> = set.iter().collect();
    items.try_into().map_err(|items: Vec<usize>| {
        Error::invalid(format!(
            "closed form needs exactly {N} elements, got {}",
            items.len()
        ))
    })
}

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

fn scaled(v: ExtendedValue, num: i64, den: i64) -> ExtendedValue {
    v.scale(&ratio(num, den))
        .expect("closed-form factors are positive")
}

fn min_of(values: impl IntoIterator<Item = ExtendedValue>) -> ExtendedValue {
    values.into_iter().min().unwrap_or(ExtendedValue::Infinity)
}

impl Engine<'_> {
    pub fn closed_upper_2(&mut self, set: Subset) -> Result<ToleranceReport> {
        let start = self.solves();
        let [e1, e2] = members::<2>(set)?;
        let (s1, s2) = (Subset::singleton(e1), Subset::singleton(e2));
        let t = self.restricted_values(set)?;
        let x = |f| t.excess(f).expect("subset of the pair");
        let (case, value) = if t.is_optimal(set) {
            ("(a)", min_of([x(s1) + x(s2), x(Subset::EMPTY)]))
        } else if t.is_optimal(s1) && t.is_optimal(s2) {
            ("(b)", scaled(x(Subset::EMPTY), 2, 1))
        } else {
            ("(c)", ExtendedValue::Infinity)
        };
        let mut report = ToleranceReport::new(value, Method::ClosedForm2, self.solves() - start);
        report.case = Some(case);
        Ok(report)
    }

    pub fn closed_upper_3(&mut self, set: Subset) -> Result<ToleranceReport> {
        let start = self.solves();
        let e = members::<3>(set)?;
        let t = self.restricted_values(set)?;
        let one = |i: usize| Subset::singleton(e[i]);
        let two = |i: usize, j: usize| one(i).union(one(j));
        let x = |f| t.excess(f).expect("subset of the triple");
        let empty = x(Subset::EMPTY);

        let (case, value) = if t.is_optimal(set) {
            let mut terms = vec![empty.clone()];
            let mut pair_sum = ExtendedValue::zero();
            for (i, j, k) in [(0, 1, 2), (1, 0, 2), (2, 0, 1)] {
                let single = self.single_upper_value(one(i))?;
                let pair = self.closed_upper_2(two(j, k))?.value;
                pair_sum = pair_sum + pair.clone();
                terms.push(single + pair);
            }
            terms.push(scaled(pair_sum, 1, 2));
            ("(a)", min_of(terms))
        } else if t.is_optimal(two(0, 1)) && t.is_optimal(two(0, 2)) && t.is_optimal(two(1, 2)) {
            let mut terms: Vec<_> = (0..3).map(|i| scaled(x(one(i)), 3, 1)).collect();
            terms.push(scaled(empty, 3, 2));
            ("(b)", min_of(terms))
        } else if let Some(v) = agree(
            "(c)",
            PERMUTATIONS
                .iter()
                .filter(|[a, b, c]| t.is_optimal(two(*a, *b)) && t.is_optimal(two(*a, *c)))
                .map(|&[a, b, c]| {
                    let lead = x(one(a));
                    min_of([
                        x(two(b, c)) + scaled(lead.clone(), 3, 1),
                        x(one(b)) + scaled(lead.clone(), 2, 1),
                        x(one(c)) + scaled(lead.clone(), 2, 1),
                        lead + empty.clone(),
                        scaled(empty.clone(), 2, 1),
                    ])
                }),
        )? {
            ("(c)", v)
        } else if let Some(v) = agree(
            "(d)",
            PERMUTATIONS
                .iter()
                .filter(|[a, b, c]| t.is_optimal(two(*a, *b)) && t.is_optimal(one(*c)))
                .map(|&[a, b, _]| {
                    min_of([
                        scaled(x(one(a)) + x(one(b)), 2, 1),
                        scaled(empty.clone(), 2, 1),
                    ])
                }),
        )? {
            ("(d)", v)
        } else if (0..3).all(|i| t.is_optimal(one(i))) {
            ("(e)", scaled(empty, 3, 1))
        } else {
            ("(f)", ExtendedValue::Infinity)
        };
        let mut report = ToleranceReport::new(value, Method::ClosedForm3, self.solves() - start);
        report.case = Some(case);
        Ok(report)
    }

    pub fn closed_lower_2(&mut self, set: Subset) -> Result<ToleranceReport> {
        let start = self.solves();
        let [e1, e2] = members::<2>(set)?;
        let l1 = self.lower_value(Subset::singleton(e1))?;
        let l2 = self.lower_value(Subset::singleton(e2))?;
        let cap = self.include_excess(set)?;
        let value = min_of([l1 + l2, cap]);
        Ok(ToleranceReport::new(
            value,
            Method::ClosedForm2,
            self.solves() - start,
        ))
    }

    pub fn closed_lower_3(&mut self, set: Subset) -> Result<ToleranceReport> {
        let start = self.solves();
        let e = members::<3>(set)?;
        let mut terms = vec![self.include_excess(set)?];
        let mut pair_sum = ExtendedValue::zero();
        for (i, j, k) in [(0, 1, 2), (1, 0, 2), (2, 0, 1)] {
            let single = self.lower_value(Subset::singleton(e[i]))?;
            let pair = self
                .closed_lower_2(Subset::singleton(e[j]).with(e[k]))?
                .value;
            pair_sum = pair_sum + pair.clone();
            terms.push(single + pair);
        }
        terms.push(scaled(pair_sum, 1, 2));
        let value = min_of(terms);
        Ok(ToleranceReport::new(
            value,
            Method::ClosedForm3,
            self.solves() - start,
        ))
    }
}

/// The common value of every satisfying permutation, or `None` when no
/// permutation satisfies the guard.
fn agree(case: &str, values: impl Iterator<Item = ExtendedValue>) -> Result<Option<ExtendedValue>> {
    let values: Vec<ExtendedValue> = values.collect();
    match values.split_first() {
        None => Ok(None),
        Some((first, rest)) => {
            if rest.iter().any(|v| v != first) {
                let listed: Vec<String> = values.iter().map(ToString::to_string).collect();
                return Err(Error::internal(format!(
                    "case {case} gives different values for different orderings: {}",
                    listed.join(", ")
                )));
            }
            Ok(Some(first.clone()))
        }
    }
}

pub fn closed_upper_2(inst: &dyn CspInstance, set: Subset) -> Result<ToleranceReport> {
    Engine::new(inst).closed_upper_2(set)
}

pub fn closed_upper_3(inst: &dyn CspInstance, set: Subset) -> Result<ToleranceReport> {
    Engine::new(inst).closed_upper_3(set)
}

pub fn closed_lower_2(inst: &dyn CspInstance, set: Subset) -> Result<ToleranceReport> {
    Engine::new(inst).closed_lower_2(set)
}

pub fn closed_lower_3(inst: &dyn CspInstance, set: Subset) -> Result<ToleranceReport> {
    Engine::new(inst).closed_lower_3(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::tests::triangle;
    use crate::csp::ExplicitCsp;
    use crate::tolerance::{set_lower_ell, set_upper_eul};
    use crate::value::int;

    fn set(items: &[usize]) -> Subset {
        items.iter().copied().collect()
    }

    fn fin(n: i64) -> ExtendedValue {
        ExtendedValue::from_int(n)
    }

    fn csp(m: usize, costs: &[i64], solutions: &[&[usize]]) -> ExplicitCsp {
        ExplicitCsp::new(
            (0..m).map(|i| format!("e{i}")).collect(),
            costs.iter().map(|&c| int(c)).collect(),
            solutions.iter().map(|s| set(s)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn upper_pair_case_a_on_triangle() {
        let r = closed_upper_2(&triangle(), set(&[0, 1])).unwrap();
        assert_eq!(r.value, fin(5));
        assert_eq!(r.case, Some("(a)"));
    }

    #[test]
    fn upper_pair_case_b_with_infinite_excess() {
        let inst = csp(2, &[2, 2], &[&[0], &[1], &[0, 1]]);
        let r = closed_upper_2(&inst, set(&[0, 1])).unwrap();
        assert_eq!(r.case, Some("(b)"));
        assert_eq!(r.value, ExtendedValue::Infinity);
        assert_eq!(set_upper_eul(&inst, set(&[0, 1])).unwrap().value, r.value);
    }

    #[test]
    fn upper_pair_case_c() {
        let r = closed_upper_2(&triangle(), set(&[0, 2])).unwrap();
        assert_eq!(r.case, Some("(c)"));
        assert_eq!(r.value, ExtendedValue::Infinity);
    }

    #[test]
    fn upper_triple_case_f_for_unused_element() {
        let inst = csp(4, &[1, 2, 4, 0], &[&[0, 1], &[0, 2], &[1, 2]]);
        let r = closed_upper_3(&inst, set(&[0, 1, 3])).unwrap();
        assert_eq!(r.case, Some("(f)"));
        assert_eq!(r.value, ExtendedValue::Infinity);
    }

    #[test]
    fn upper_triple_matches_lp_on_crafted_cases() {
        type Case<'a> = (usize, &'a [i64], &'a [&'a [usize]]);
        let cases: [Case; 4] = [
            // every element in every optimum
            (4, &[1, 1, 1, 2], &[&[0, 1, 2], &[0, 3], &[1, 2, 3], &[3]]),
            // three optima each missing one element
            (3, &[1, 1, 1], &[&[0, 1], &[0, 2], &[1, 2], &[0], &[2]]),
            // optima {0,1} and {0,2}
            (4, &[0, 1, 1, 3], &[&[0, 1], &[0, 2], &[1, 2], &[3], &[0]]),
            // optima {0,1} and {2}
            (3, &[1, 1, 2], &[&[0, 1], &[2], &[0], &[1]]),
        ];
        for (m, costs, sols) in cases {
            let inst = csp(m, costs, sols);
            let e = set(&[0, 1, 2]);
            let closed = closed_upper_3(&inst, e).unwrap();
            let lp = set_upper_eul(&inst, e).unwrap();
            assert_eq!(closed.value, lp.value, "case {:?}", closed.case);
        }
    }

    #[test]
    fn lower_closed_forms_on_triangle() {
        let t = triangle();
        assert_eq!(closed_lower_2(&t, set(&[0, 2])).unwrap().value, fin(2));
        assert_eq!(closed_lower_2(&t, set(&[0, 1])).unwrap().value, fin(0));
        assert_eq!(closed_lower_3(&t, set(&[0, 1, 2])).unwrap().value, fin(2));
        assert_eq!(
            closed_lower_3(&t, set(&[0, 1, 2])).unwrap().value,
            set_lower_ell(&t, set(&[0, 1, 2])).unwrap().value
        );
    }

    #[test]
    fn lower_triple_is_zero_when_all_in_an_optimum() {
        let inst = csp(4, &[1, 1, 1, 5], &[&[0, 1, 2], &[3]]);
        assert_eq!(
            closed_lower_3(&inst, set(&[0, 1, 2])).unwrap().value,
            fin(0)
        );
    }

    #[test]
    fn wrong_cardinality_is_rejected() {
        assert!(closed_upper_2(&triangle(), set(&[0])).is_err());
        assert!(closed_lower_3(&triangle(), set(&[0, 1])).is_err());
    }
}
