use std::collections::VecDeque;

use crate::csp::check_subset;
use crate::error::{Error, Result};
use crate::subset::Subset;
use crate::value::{ExtendedValue, Rational};

use super::Graph;

/// Largest vertex count accepted by [`enumerate_spanning_trees`].
pub const DEFAULT_ENUMERATION_CAP: usize = 9;

pub(crate) struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`; false if they were already one.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

/// Cheapest spanning tree under `costs` containing `include` and avoiding
/// `exclude`. Ties are broken by edge index.
pub(crate) fn kruskal_with(
    g: &Graph,
    costs: &[Rational],
    exclude: Subset,
    include: Subset,
) -> Option<(Rational, Subset)> {
    let n = g.vertices();
    let mut dsu = Dsu::new(n);
    let mut tree = Subset::EMPTY;
    let mut total = Rational::from_integer(0.into());
    for i in include.iter() {
        let e = g.edge(i);
        if !dsu.union(e.u, e.v) {
            return None;
        }
        tree.insert(i);
        total += &costs[i];
    }
    let mut order: Vec<usize> = (0..g.edges().len())
        .filter(|&i| !exclude.contains(i) && !include.contains(i))
        .collect();
    order.sort_by(|&a, &b| costs[a].cmp(&costs[b]).then(a.cmp(&b)));
    for i in order {
        if tree.len() == n - 1 {
            break;
        }
        let e = g.edge(i);
        if dsu.union(e.u, e.v) {
            tree.insert(i);
            total += &costs[i];
        }
    }
    (tree.len() == n - 1).then_some((total, tree))
}

/// A spanning tree of a particular graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    edges: Subset,
    /// `adjacency[w]` lists `(neighbour, edge index)`.
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl SpanningTree {
    /// Validates that `edges` spans `g` without cycles.
    pub fn new(g: &Graph, edges: Subset) -> Result<Self> {
        if edges.bound() > g.edges().len() {
            return Err(Error::IndexOutOfRange {
                index: edges.bound() - 1,
                size: g.edges().len(),
            });
        }
        if edges.len() != g.vertices() - 1 || !g.connects(edges) {
            return Err(Error::invalid(format!(
                "edges {edges:?} do not form a spanning tree"
            )));
        }
        let mut adjacency = vec![Vec::new(); g.vertices()];
        for i in edges.iter() {
            let e = g.edge(i);
            adjacency[e.u].push((e.v, i));
            adjacency[e.v].push((e.u, i));
        }
        Ok(SpanningTree { edges, adjacency })
    }

    pub fn edges(&self) -> Subset {
        self.edges
    }

    pub fn contains(&self, edge: usize) -> bool {
        self.edges.contains(edge)
    }

    pub fn cost(&self, g: &Graph) -> Rational {
        self.edges.iter().map(|i| &g.edge(i).cost).sum()
    }

    /// Edges on the tree path from `from` to `to`, in walking order.
    fn path_between(&self, from: usize, to: usize) -> Vec<usize> {
        let mut via: Vec<Option<(usize, usize)>> = vec![None; self.adjacency.len()];
        let mut seen = vec![false; self.adjacency.len()];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(w) = queue.pop_front() {
            if w == to {
                break;
            }
            for &(x, edge) in &self.adjacency[w] {
                if !seen[x] {
                    seen[x] = true;
                    via[x] = Some((w, edge));
                    queue.push_back(x);
                }
            }
        }
        let mut path = Vec::new();
        let mut w = to;
        while let Some((prev, edge)) = via[w] {
            path.push(edge);
            w = prev;
        }
        path.reverse();
        path
    }
}

/// Constrained minimum spanning tree.
pub fn kruskal(
    g: &Graph,
    exclude: Subset,
    include: Subset,
) -> Result<(ExtendedValue, Option<SpanningTree>)> {
    check_subset(g, exclude)?;
    check_subset(g, include)?;
    if exclude.intersects(include) {
        return Err(Error::Overlap { exclude, include });
    }
    match kruskal_with(g, crate::csp::CspInstance::costs(g), exclude, include) {
        Some((value, edges)) => Ok((
            ExtendedValue::Finite(value),
            Some(SpanningTree::new(g, edges)?),
        )),
        None => Ok((ExtendedValue::Infinity, None)),
    }
}

/// The path in `t` joining the endpoints of the non-tree edge `edge`.
pub fn tree_path(g: &Graph, t: &SpanningTree, edge: usize) -> Result<Vec<usize>> {
    if edge >= g.edges().len() {
        return Err(Error::IndexOutOfRange {
            index: edge,
            size: g.edges().len(),
        });
    }
    if t.contains(edge) {
        return Err(Error::invalid(format!("edge {edge} belongs to the tree")));
    }
    let e = g.edge(edge);
    Ok(t.path_between(e.u, e.v))
}

/// Cycle optimality: every non-tree edge costs at least as much as each
/// edge on its tree path.
pub fn is_minimum(g: &Graph, t: &SpanningTree) -> bool {
    (0..g.edges().len()).filter(|&i| !t.contains(i)).all(|i| {
        let cost = &g.edge(i).cost;
        let e = g.edge(i);
        t.path_between(e.u, e.v)
            .iter()
            .all(|&p| g.edge(p).cost <= *cost)
    })
}

/// Every spanning tree of `g`, each exactly once.
pub fn enumerate_spanning_trees(g: &Graph) -> Result<Vec<SpanningTree>> {
    enumerate_spanning_trees_capped(g, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_spanning_trees_capped(
    g: &Graph,
    max_vertices: usize,
) -> Result<Vec<SpanningTree>> {
    if g.vertices() > max_vertices {
        return Err(Error::CapExceeded {
            what: "vertex count",
            actual: g.vertices(),
            cap: max_vertices,
            required: "spanning-tree enumeration is exponential in the vertex count".into(),
        });
    }
    let mut found = Vec::new();
    branch(g, 0, Subset::EMPTY, &mut found);
    found
        .into_iter()
        .map(|edges| SpanningTree::new(g, edges))
        .collect()
}

fn branch(g: &Graph, next: usize, chosen: Subset, found: &mut Vec<Subset>) {
    if chosen.len() == g.vertices() - 1 {
        found.push(chosen);
        return;
    }
    let m = g.edges().len();
    if next == m {
        return;
    }
    let with = chosen.with(next);
    if acyclic(g, with) {
        branch(g, next + 1, with, found);
    }
    let later = Subset::full(m).difference(Subset::full(next + 1));
    if g.connects(chosen.union(later)) {
        branch(g, next + 1, chosen, found);
    }
}

fn acyclic(g: &Graph, set: Subset) -> bool {
    let mut dsu = Dsu::new(g.vertices());
    set.iter().all(|i| dsu.union(g.edge(i).u, g.edge(i).v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::CspInstance;

    fn complete(n: usize) -> Graph {
        let mut text = String::new();
        for a in 1..=n {
            for b in a + 1..=n {
                text.push_str(&format!("{a} {b} {}\n", a + b));
            }
        }
        Graph::from_text(&text).unwrap()
    }

    #[test]
    fn cayley_counts() {
        assert_eq!(enumerate_spanning_trees(&complete(3)).unwrap().len(), 3);
        assert_eq!(enumerate_spanning_trees(&complete(4)).unwrap().len(), 16);
        assert_eq!(enumerate_spanning_trees(&complete(5)).unwrap().len(), 125);
        let path = Graph::from_text("1 2 1\n2 3 1\n3 4 1\n").unwrap();
        assert_eq!(enumerate_spanning_trees(&path).unwrap().len(), 1);
        assert!(enumerate_spanning_trees_capped(&complete(5), 4).is_err());
    }

    #[test]
    fn constrained_kruskal() {
        let g = complete(4);
        let (v, t) = kruskal(&g, Subset::EMPTY, Subset::EMPTY).unwrap();
        let t = t.unwrap();
        assert_eq!(v, ExtendedValue::Finite(t.cost(&g)));
        assert!(is_minimum(&g, &t));

        let cycle: Subset = [
            g.index_of("1-2").unwrap(),
            g.index_of("2-3").unwrap(),
            g.index_of("1-3").unwrap(),
        ]
        .into_iter()
        .collect();
        assert_eq!(
            kruskal(&g, Subset::EMPTY, cycle).unwrap().0,
            ExtendedValue::Infinity
        );

        let at_one: Subset = ["1-2", "1-3", "1-4"]
            .iter()
            .map(|l| g.index_of(l).unwrap())
            .collect();
        assert_eq!(
            kruskal(&g, at_one, Subset::EMPTY).unwrap(),
            (ExtendedValue::Infinity, None)
        );
        assert!(kruskal(&g, at_one, at_one).is_err());
    }

    #[test]
    fn star_paths_use_two_spokes() {
        let g = Graph::from_text("1 2 1\n1 3 1\n1 4 1\n2 3 5\n").unwrap();
        let (_, t) = kruskal(&g, Subset::EMPTY, Subset::EMPTY).unwrap();
        let t = t.unwrap();
        assert_eq!(tree_path(&g, &t, 3).unwrap(), vec![0, 1]);
        assert!(tree_path(&g, &t, 0).is_err());
    }

    #[test]
    fn non_minimal_tree_is_detected() {
        let g = Graph::from_text("1 2 1\n2 3 1\n1 3 5\n").unwrap();
        let bad = SpanningTree::new(&g, [0, 2].into_iter().collect()).unwrap();
        assert!(!is_minimum(&g, &bad));
        assert!(SpanningTree::new(&g, [0].into_iter().collect()).is_err());
    }
}
