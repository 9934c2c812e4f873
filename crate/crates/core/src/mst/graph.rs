use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::csp::CspInstance;
use crate::error::{Error, Result};
use crate::subset::{Subset, MAX_ELEMENTS};
use crate::value::{format_rational, parse_rational, Rational};

use super::tree::{kruskal_with, Dsu};

/// An undirected edge between 0-based vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub cost: Rational,
}

impl Edge {
    pub fn other(&self, w: usize) -> usize {
        if w == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// A connected undirected graph whose edges form the ground set.
///
/// Edge `i` is labelled `vU-vV` with 1-based endpoints, smaller first. The
/// second and later parallel edges between the same endpoints get a `#k`
/// suffix, `k` counting from 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertices: usize,
    edges: Vec<Edge>,
    costs: Vec<Rational>,
    labels: Vec<String>,
    by_label: HashMap<String, usize>,
}

impl Graph {
    pub fn new(vertices: usize, edges: Vec<Edge>) -> Result<Self> {
        if vertices < 2 {
            return Err(Error::InvalidInstance(format!(
                "a graph needs at least 2 vertices, got {vertices}"
            )));
        }
        if edges.len() > MAX_ELEMENTS {
            return Err(Error::InvalidInstance(format!(
                "{} edges exceed the limit of {MAX_ELEMENTS}",
                edges.len()
            )));
        }
        let mut labels = Vec::with_capacity(edges.len());
        let mut by_label = HashMap::new();
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            if e.u >= vertices || e.v >= vertices {
                return Err(Error::InvalidInstance(format!(
                    "edge {} joins vertex {} outside 1..={vertices}",
                    i + 1,
                    e.u.max(e.v) + 1
                )));
            }
            if e.u == e.v {
                return Err(Error::InvalidInstance(format!(
                    "edge {} is a self-loop at v{}",
                    i + 1,
                    e.u + 1
                )));
            }
            let key = (e.u.min(e.v), e.u.max(e.v));
            let count = seen.entry(key).or_insert(0);
            *count += 1;
            let label = edge_label(key.0, key.1, *count);
            by_label.insert(label.clone(), i);
            labels.push(label);
        }
        let costs = edges.iter().map(|e| e.cost.clone()).collect();
        let g = Graph {
            vertices,
            edges,
            costs,
            labels,
            by_label,
        };
        if !g.connects(Subset::full(g.edges.len())) {
            return Err(Error::InvalidInstance("the graph is not connected".into()));
        }
        Ok(g)
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> &Edge {
        &self.edges[index]
    }

    /// True when the edges in `set` connect every vertex.
    pub fn connects(&self, set: Subset) -> bool {
        let mut dsu = Dsu::new(self.vertices);
        let mut components = self.vertices;
        for i in set.iter() {
            if dsu.union(self.edges[i].u, self.edges[i].v) {
                components -= 1;
            }
        }
        components == 1
    }

    /// Parses `u v cost` lines with 1-based vertices. Text after `#` is a
    /// comment; the vertex count is the largest endpoint.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        let mut vertices = 0;
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = |what: &str| Error::Parse(format!("line {}: {what}", n + 1));
            let [u, v, cost] = fields[..] else {
                return Err(bad("expected `u v cost`"));
            };
            let u = parse_vertex(u).ok_or_else(|| bad("vertex must be a positive integer"))?;
            let v = parse_vertex(v).ok_or_else(|| bad("vertex must be a positive integer"))?;
            let cost = parse_rational(cost).map_err(|e| bad(&e.to_string()))?;
            vertices = vertices.max(u + 1).max(v + 1);
            edges.push(Edge { u, v, cost });
        }
        Graph::new(vertices, edges)
    }

    pub fn to_text(&self) -> String {
        self.edges
            .iter()
            .map(|e| format!("{} {} {}\n", e.u + 1, e.v + 1, format_rational(&e.cost)))
            .collect()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut edges = Vec::with_capacity(file.edges.len());
        for (i, e) in file.edges.into_iter().enumerate() {
            if e.u == 0 || e.v == 0 {
                return Err(Error::Parse(format!(
                    "edge {}: vertices are 1-based",
                    i + 1
                )));
            }
            let cost = match e.cost {
                CostField::Text(s) => parse_rational(&s)?,
                CostField::Int(n) => Rational::from_integer(n.into()),
            };
            edges.push(Edge {
                u: e.u - 1,
                v: e.v - 1,
                cost,
            });
        }
        Graph::new(file.vertices, edges)
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            vertices: self.vertices,
            edges: self
                .edges
                .iter()
                .map(|e| EdgeRecord {
                    u: e.u + 1,
                    v: e.v + 1,
                    cost: CostField::Text(format_rational(&e.cost)),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("plain data serializes")
    }
}

fn parse_vertex(text: &str) -> Option<usize> {
    let text = text.strip_prefix('v').unwrap_or(text);
    match text.parse::<usize>() {
        Ok(0) | Err(_) => None,
        Ok(n) => Some(n - 1),
    }
}

fn edge_label(a: usize, b: usize, copy: usize) -> String {
    if copy == 1 {
        format!("v{}-v{}", a + 1, b + 1)
    } else {
        format!("v{}-v{}#{copy}", a + 1, b + 1)
    }
}

/// Canonical form of a user-supplied edge label: endpoints in either order,
/// with or without the `v` prefix.
fn canonical_label(label: &str) -> Option<String> {
    let (ends, copy) = match label.split_once('#') {
        Some((ends, k)) => (ends, k.trim().parse::<usize>().ok().filter(|&k| k >= 1)?),
        None => (label, 1),
    };
    let (a, b) = ends.split_once('-')?;
    let a = parse_vertex(a.trim())?;
    let b = parse_vertex(b.trim())?;
    Some(edge_label(a.min(b), a.max(b), copy))
}

impl CspInstance for Graph {
    fn size(&self) -> usize {
        self.edges.len()
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
        kruskal_with(self, costs, exclude, include)
    }

    fn index_of(&self, label: &str) -> Option<usize> {
        canonical_label(label.trim()).and_then(|l| self.by_label.get(&l).copied())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    vertices: usize,
    edges: Vec<EdgeRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    u: usize,
    v: usize,
    cost: CostField,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CostField {
    Text(String),
    Int(i64),
}
