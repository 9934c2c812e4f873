//! The minimum spanning tree problem as a combinatorial sum problem.
//!
//! A [`Graph`] is a [`CspInstance`](crate::CspInstance) whose elements are
//! edges and whose feasible solutions are spanning trees, so every generic
//! tolerance routine applies to it directly. The functions here compute the
//! same single tolerances from tree paths of one given minimum tree, without
//! any constrained solves.

mod graph;
mod tree;

use crate::error::{Error, Result};
use crate::subset::Subset;
use crate::tolerance::{Method, ToleranceReport};
use crate::value::ExtendedValue;

pub use graph::{Edge, Graph};
pub use tree::{
    enumerate_spanning_trees, enumerate_spanning_trees_capped, is_minimum, kruskal, tree_path,
    SpanningTree, DEFAULT_ENUMERATION_CAP,
};

fn check_inputs(g: &Graph, t: &SpanningTree, edges: Subset) -> Result<()> {
    crate::csp::check_subset(g, edges)?;
    if !is_minimum(g, t) {
        return Err(Error::invalid(
            "the supplied tree is not a minimum spanning tree",
        ));
    }
    Ok(())
}

fn check_edge(g: &Graph, t: &SpanningTree, e: usize) -> Result<()> {
    if e >= g.edges().len() {
        return Err(Error::IndexOutOfRange {
            index: e,
            size: g.edges().len(),
        });
    }
    check_inputs(g, t, Subset::singleton(e))
}

fn single_upper(g: &Graph, t: &SpanningTree, e: usize) -> ExtendedValue {
    let cost = &g.edge(e).cost;
    if t.contains(e) {
        (0..g.edges().len())
            .filter(|&f| !t.contains(f))
            .filter(|&f| tree_path(g, t, f).expect("non-tree edge").contains(&e))
            .map(|f| ExtendedValue::Finite(&g.edge(f).cost - cost))
            .min()
            .unwrap_or(ExtendedValue::Infinity)
    } else if path_max(g, t, e) == *cost {
        ExtendedValue::zero()
    } else {
        ExtendedValue::Infinity
    }
}

fn single_lower(g: &Graph, t: &SpanningTree, e: usize) -> ExtendedValue {
    if t.contains(e) {
        ExtendedValue::zero()
    } else {
        ExtendedValue::Finite(&g.edge(e).cost - path_max(g, t, e))
    }
}

fn path_max(g: &Graph, t: &SpanningTree, e: usize) -> crate::Rational {
    tree_path(g, t, e)
        .expect("non-tree edge")
        .into_iter()
        .map(|p| g.edge(p).cost.clone())
        .max()
        .expect("endpoints differ, so the path is nonempty")
}

/// Largest increase of `c(e)` that keeps every minimum tree minimal.
pub fn mst_single_upper(g: &Graph, t: &SpanningTree, e: usize) -> Result<ExtendedValue> {
    check_edge(g, t, e)?;
    Ok(single_upper(g, t, e))
}

/// Largest decrease of `c(e)` that keeps the minimum weight unchanged.
pub fn mst_single_lower(g: &Graph, t: &SpanningTree, e: usize) -> Result<ExtendedValue> {
    check_edge(g, t, e)?;
    Ok(single_lower(g, t, e))
}

/// Set lower tolerance, which for spanning trees is the sum of the single
/// lower tolerances.
pub fn mst_set_lower(g: &Graph, t: &SpanningTree, set: Subset) -> Result<ToleranceReport> {
    check_inputs(g, t, set)?;
    if set.is_empty() {
        return Err(Error::invalid("tolerances are undefined for the empty set"));
    }
    let singles: Vec<ExtendedValue> = set.iter().map(|e| single_lower(g, t, e)).collect();
    let value: ExtendedValue = singles.iter().cloned().sum();
    let witness = singles
        .into_iter()
        .map(|v| v.finite().cloned())
        .collect::<Option<Vec<_>>>();
    let mut report = ToleranceReport::new(value, Method::MstFormula, 0);
    report.witness = witness;
    Ok(report)
}

/// Sum of the single upper tolerances over `set`, a lower bound on its set
/// upper tolerance.
pub fn mst_set_upper_lower_bound(
    g: &Graph,
    t: &SpanningTree,
    set: Subset,
) -> Result<ExtendedValue> {
    check_inputs(g, t, set)?;
    if set.is_empty() {
        return Err(Error::invalid("tolerances are undefined for the empty set"));
    }
    Ok(set.iter().map(|e| single_upper(g, t, e)).sum())
}
