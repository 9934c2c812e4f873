//! Combinatorial sum problems and the constrained-solve contract.
//!
//! A [`CspInstance`] is a ground set with costs and a feasible family `D`.
//! Everything the tolerance engine needs is the value
//! `f_c(D~(X; I))`: the cheapest feasible solution that avoids every element
//! of `X` and contains every element of `I`. Instances answer that query
//! directly instead of having callers perturb costs to huge magnitudes.

use std::collections::{BTreeMap, HashSet};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subset::{Subset, MAX_ELEMENTS};
use crate::value::{format_rational, parse_rational, ExtendedValue, Rational};

/// A combinatorial sum problem.
///
/// Implementors must be deterministic: the same query returns the same
/// witness.
pub trait CspInstance: Sync {
    /// Ground-set size `m`.
    fn size(&self) -> usize;

    fn label(&self, index: usize) -> &str;

    /// Base costs, one per element.
    fn costs(&self) -> &[Rational];

    /// Cheapest feasible solution under `costs` that is disjoint from
    /// `exclude` and contains `include`, or `None` when no solution qualifies.
    ///
    /// Arguments are validated by callers; implementors may assume
    /// `exclude ∩ include = ∅` and in-range indices.
    fn minimize(
        &self,
        costs: &[Rational],
        exclude: Subset,
        include: Subset,
    ) -> Option<(Rational, Subset)>;

    /// Index of the element with this label.
    fn index_of(&self, label: &str) -> Option<usize> {
        (0..self.size()).find(|&i| self.label(i) == label)
    }
}

/// Result of a constrained solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solved {
    pub value: ExtendedValue,
    pub witness: Option<Subset>,
}

impl Solved {
    fn from_min(found: Option<(Rational, Subset)>) -> Self {
        match found {
            Some((value, witness)) => Solved {
                value: ExtendedValue::Finite(value),
                witness: Some(witness),
            },
            None => Solved {
                value: ExtendedValue::Infinity,
                witness: None,
            },
        }
    }
}

/// Sparse replacement costs keyed by element index.
pub type CostOverrides = BTreeMap<usize, Rational>;

pub(crate) fn check_subset(inst: &dyn CspInstance, s: Subset) -> Result<()> {
    if s.bound() > inst.size() {
        return Err(Error::IndexOutOfRange {
            index: s.bound() - 1,
            size: inst.size(),
        });
    }
    Ok(())
}

fn check_query(inst: &dyn CspInstance, exclude: Subset, include: Subset) -> Result<()> {
    check_subset(inst, exclude)?;
    check_subset(inst, include)?;
    if exclude.intersects(include) {
        return Err(Error::Overlap { exclude, include });
    }
    Ok(())
}

/// `f_c(D~(exclude; include))` with a witness, without counting.
pub fn solve(inst: &dyn CspInstance, exclude: Subset, include: Subset) -> Result<Solved> {
    check_query(inst, exclude, include)?;
    Ok(Solved::from_min(inst.minimize(
        inst.costs(),
        exclude,
        include,
    )))
}

/// Constrained solve under explicit full costs.
pub fn solve_with_costs(
    inst: &dyn CspInstance,
    costs: &[Rational],
    exclude: Subset,
    include: Subset,
) -> Result<Solved> {
    check_query(inst, exclude, include)?;
    if costs.len() != inst.size() {
        return Err(Error::invalid(format!(
            "cost vector has {} entries, ground set has {}",
            costs.len(),
            inst.size()
        )));
    }
    Ok(Solved::from_min(inst.minimize(costs, exclude, include)))
}

/// `f_c(S)`, optionally with some costs replaced.
pub fn objective_of(
    inst: &dyn CspInstance,
    s: Subset,
    overrides: Option<&CostOverrides>,
) -> Result<ExtendedValue> {
    check_subset(inst, s)?;
    if let Some(map) = overrides {
        if let Some(&bad) = map.keys().find(|&&i| i >= inst.size()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                size: inst.size(),
            });
        }
    }
    let total = s
        .iter()
        .map(|i| {
            overrides
                .and_then(|m| m.get(&i))
                .unwrap_or(&inst.costs()[i])
                .clone()
        })
        .sum::<Rational>();
    Ok(ExtendedValue::Finite(total))
}

/// Base costs with `overrides` applied.
pub fn apply_overrides(inst: &dyn CspInstance, overrides: &CostOverrides) -> Vec<Rational> {
    let mut costs = inst.costs().to_vec();
    for (&i, q) in overrides {
        costs[i] = q.clone();
    }
    costs
}

/// Counts constrained solves for one computation.
pub struct CountingSolver<'a> {
    inst: &'a dyn CspInstance,
    calls: AtomicUsize,
}

impl<'a> CountingSolver<'a> {
    pub fn new(inst: &'a dyn CspInstance) -> Self {
        CountingSolver {
            inst,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn instance(&self) -> &'a dyn CspInstance {
        self.inst
    }

    pub fn solve(&self, exclude: Subset, include: Subset) -> Result<Solved> {
        let solved = solve(self.inst, exclude, include)?;
        self.calls.fetch_add(1, Ordering::Relaxed);
        Ok(solved)
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }
}

/// A CSP whose feasible family is listed explicitly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitCsp {
    labels: Vec<String>,
    costs: Vec<Rational>,
    solutions: Vec<Subset>,
}

impl ExplicitCsp {
    pub fn new(labels: Vec<String>, costs: Vec<Rational>, solutions: Vec<Subset>) -> Result<Self> {
        let m = labels.len();
        if m > MAX_ELEMENTS {
            return Err(Error::InvalidInstance(format!(
                "{m} elements exceed the limit of {MAX_ELEMENTS}"
            )));
        }
        if costs.len() != m {
            return Err(Error::InvalidInstance(format!(
                "{} costs for {m} elements",
                costs.len()
            )));
        }
        let mut seen = HashSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        if solutions.is_empty() {
            return Err(Error::InvalidInstance(
                "the feasible family is empty".into(),
            ));
        }
        let mut distinct = HashSet::new();
        for &s in &solutions {
            if s.bound() > m {
                return Err(Error::IndexOutOfRange {
                    index: s.bound() - 1,
                    size: m,
                });
            }
            if s.is_empty() {
                return Err(Error::InvalidInstance(
                    "the empty set is not a feasible solution".into(),
                ));
            }
            if !distinct.insert(s) {
                return Err(Error::InvalidInstance(format!(
                    "solution {s:?} listed twice"
                )));
            }
        }
        Ok(ExplicitCsp {
            labels,
            costs,
            solutions,
        })
    }

    pub fn solutions(&self) -> &[Subset] {
        &self.solutions
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ExplicitCspFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ExplicitCspFile::from(self)).expect("plain data serializes")
    }
}

impl CspInstance for ExplicitCsp {
    fn size(&self) -> usize {
        self.labels.len()
    }

    fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    fn costs(&self) -> &[Rational] {
        &self.costs
    }

    fn minimize(
        &self,
        costs: &[Rational],
        exclude: Subset,
        include: Subset,
    ) -> Option<(Rational, Subset)> {
        let mut best: Option<(Rational, Subset)> = None;
        for &s in &self.solutions {
            if s.intersects(exclude) || !include.is_subset_of(s) {
                continue;
            }
            let value: Rational = s.iter().map(|i| &costs[i]).sum();
            if best.as_ref().is_none_or(|(b, _)| value < *b) {
                best = Some((value, s));
            }
        }
        best
    }
}

/// On-disk JSON layout of an [`ExplicitCsp`].
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitCspFile {
    pub elements: Vec<String>,
    pub costs: BTreeMap<String, String>,
    pub solutions: Vec<Vec<String>>,
}

impl TryFrom<ExplicitCspFile> for ExplicitCsp {
    type Error = Error;

    fn try_from(file: ExplicitCspFile) -> Result<Self> {
        let index: BTreeMap<&str, usize> = file
            .elements
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        if let Some(extra) = file.costs.keys().find(|k| !index.contains_key(k.as_str())) {
            return Err(Error::UnknownLabel(extra.clone()));
        }
        let costs = file
            .elements
            .iter()
            .map(|label| {
                let text = file.costs.get(label).ok_or_else(|| {
                    Error::InvalidInstance(format!("no cost given for `{label}`"))
                })?;
                parse_rational(text)
            })
            .collect::<Result<Vec<_>>>()?;
        let solutions = file
            .solutions
            .iter()
            .map(|members| {
                let mut s = Subset::EMPTY;
                for label in members {
                    let &i = index
                        .get(label.as_str())
                        .ok_or_else(|| Error::UnknownLabel(label.clone()))?;
                    if s.contains(i) {
                        return Err(Error::DuplicateLabel(label.clone()));
                    }
                    s.insert(i);
                }
                Ok(s)
            })
            .collect::<Result<Vec<_>>>()?;
        ExplicitCsp::new(file.elements, costs, solutions)
    }
}

impl From<&ExplicitCsp> for ExplicitCspFile {
    fn from(csp: &ExplicitCsp) -> Self {
        ExplicitCspFile {
            elements: csp.labels.clone(),
            costs: csp
                .labels
                .iter()
                .zip(&csp.costs)
                .map(|(l, c)| (l.clone(), format_rational(c)))
                .collect(),
            solutions: csp
                .solutions
                .iter()
                .map(|s| s.iter().map(|i| csp.labels[i].clone()).collect())
                .collect(),
        }
    }
}

/// Resolves a list of labels to a subset, rejecting unknown and repeated
/// labels.
pub fn resolve_labels<S: AsRef<str>>(inst: &dyn CspInstance, labels: &[S]) -> Result<Subset> {
    let mut s = Subset::EMPTY;
    for label in labels {
        let label = label.as_ref().trim();
        let i = inst
            .index_of(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
        if s.contains(i) {
            return Err(Error::DuplicateLabel(label.to_string()));
        }
        s.insert(i);
    }
    Ok(s)
}
