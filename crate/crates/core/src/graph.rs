//! Metric multigraphs with δ and Dirichlet vertex conditions.
//!
//! A [`MetricGraph`] is plain data: a list of vertices, each carrying a
//! [`VertexCondition`], and a list of edges with a tail, a head and a positive
//! length. Loops and parallel edges are allowed. Edge `e` is identified with
//! `[0, len(e)]`, parametrized from tail to head; orientation has no other
//! meaning.
//!
//! The value is not validated on construction. [`validate`] reports every
//! violated invariant, and the numerical entry points reject invalid graphs
//! with [`Error::InvalidGraph`].

use std::borrow::Borrow;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

string_id!(
    /// Vertex identifier, unique within a graph.
    VertexId
);
string_id!(
    /// Edge identifier, unique within a graph.
    EdgeId
);

/// Condition imposed at a vertex.
///
/// Serializes as `{"delta": 1.5}` or `"dirichlet"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexCondition {
    /// Continuity plus `sum of inward derivatives + strength * u(v) = 0`.
    /// The strength may be negative or zero.
    Delta(f64),
    /// `u(v) = 0`.
    Dirichlet,
}

impl VertexCondition {
    pub fn strength(&self) -> Option<f64> {
        match *self {
            VertexCondition::Delta(a) => Some(a),
            VertexCondition::Dirichlet => None,
        }
    }

    pub fn is_dirichlet(&self) -> bool {
        matches!(self, VertexCondition::Dirichlet)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: VertexId,
    pub condition: VertexCondition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub tail: VertexId,
    pub head: VertexId,
    pub length: f64,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

/// A violated graph invariant, as reported by [`validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NonPositiveLength { edge: EdgeId, length: f64 },
    NonFiniteStrength { vertex: VertexId, strength: f64 },
    DanglingEndpoint { edge: EdgeId, vertex: VertexId },
    DuplicateVertexId { vertex: VertexId },
    DuplicateEdgeId { edge: EdgeId },
    NoEdges,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveLength { edge, length } => {
                write!(
                    f,
                    "edge `{edge}` has non-positive or non-finite length {length}"
                )
            }
            Violation::NonFiniteStrength { vertex, strength } => {
                write!(f, "vertex `{vertex}` has non-finite strength {strength}")
            }
            Violation::DanglingEndpoint { edge, vertex } => {
                write!(f, "edge `{edge}` references unknown vertex `{vertex}`")
            }
            Violation::DuplicateVertexId { vertex } => write!(f, "duplicate vertex id `{vertex}`"),
            Violation::DuplicateEdgeId { edge } => write!(f, "duplicate edge id `{edge}`"),
            Violation::NoEdges => f.write_str("graph has no edges"),
        }
    }
}

/// Returns every violated invariant; an empty list means `g` is valid.
pub fn validate(g: &MetricGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for v in &g.vertices {
        if !seen.insert(v.id.as_str()) {
            out.push(Violation::DuplicateVertexId {
                vertex: v.id.clone(),
            });
        }
        if let VertexCondition::Delta(a) = v.condition {
            if !a.is_finite() {
                out.push(Violation::NonFiniteStrength {
                    vertex: v.id.clone(),
                    strength: a,
                });
            }
        }
    }
    if g.edges.is_empty() {
        out.push(Violation::NoEdges);
    }
    let mut seen_edges = HashSet::new();
    for e in &g.edges {
        if !seen_edges.insert(e.id.as_str()) {
            out.push(Violation::DuplicateEdgeId { edge: e.id.clone() });
        }
        if !(e.length > 0.0 && e.length.is_finite()) {
            out.push(Violation::NonPositiveLength {
                edge: e.id.clone(),
                length: e.length,
            });
        }
        for end in [&e.tail, &e.head] {
            if !seen.contains(end.as_str()) {
                out.push(Violation::DanglingEndpoint {
                    edge: e.id.clone(),
                    vertex: end.clone(),
                });
            }
        }
    }
    out
}

/// Index-based view of a validated graph.
#[derive(Debug, Clone)]
pub(crate) struct Topology {
    /// `(tail, head)` vertex indices, aligned with `g.edges`.
    pub ends: Vec<(usize, usize)>,
}

impl Topology {
    pub fn new(g: &MetricGraph) -> Result<Self> {
        let violations = validate(g);
        if !violations.is_empty() {
            return Err(Error::InvalidGraph(violations));
        }
        let vertex_index: HashMap<String, usize> = g
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id.0.clone(), i))
            .collect();
        let ends = g
            .edges
            .iter()
            .map(|e| (vertex_index[e.tail.as_str()], vertex_index[e.head.as_str()]))
            .collect();
        Ok(Topology { ends })
    }

    /// Degree with loops counted twice.
    pub fn degrees(&self, n: usize) -> Vec<usize> {
        let mut deg = vec![0; n];
        for &(t, h) in &self.ends {
            deg[t] += 1;
            deg[h] += 1;
        }
        deg
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    fn components(&mut self) -> usize {
        (0..self.parent.len())
            .filter(|&i| self.find(i) == i)
            .count()
    }
}

/// Connectivity of the metric graph.
///
/// With `exclude_dirichlet` set, Dirichlet vertices are removed as metric
/// points: two points are connected only through a path avoiding every
/// Dirichlet vertex, so a Dirichlet vertex of degree two splits a path. Edges
/// that touch a Dirichlet vertex keep their open interiors. An invalid graph
/// is reported as not connected.
pub fn is_connected(g: &MetricGraph, exclude_dirichlet: bool) -> bool {
    let Ok(topo) = Topology::new(g) else {
        return false;
    };
    connected_with(g, &topo, exclude_dirichlet)
}

pub(crate) fn connected_with(g: &MetricGraph, topo: &Topology, exclude_dirichlet: bool) -> bool {
    let n = g.vertices.len();
    let m = g.edges.len();
    let mut deg = vec![0usize; n];
    for &(t, h) in &topo.ends {
        deg[t] += 1;
        deg[h] += 1;
    }
    if !exclude_dirichlet {
        if deg.contains(&0) {
            return false;
        }
        let mut uf = UnionFind::new(n);
        for &(t, h) in &topo.ends {
            uf.union(t, h);
        }
        return uf.components() == 1;
    }
    // Nodes are edges (open intervals) plus isolated surviving vertices;
    // a surviving vertex glues together all edges incident to it.
    if g.vertices
        .iter()
        .zip(&deg)
        .any(|(v, &d)| d == 0 && !v.condition.is_dirichlet())
    {
        return false;
    }
    let mut uf = UnionFind::new(m);
    let mut first_edge: Vec<Option<usize>> = vec![None; n];
    for (k, &(t, h)) in topo.ends.iter().enumerate() {
        for v in [t, h] {
            if g.vertices[v].condition.is_dirichlet() {
                continue;
            }
            match first_edge[v] {
                Some(e) => uf.union(e, k),
                None => first_edge[v] = Some(k),
            }
        }
    }
    uf.components() == 1
}

/// `true` iff every two points are joined by two edge-disjoint paths, i.e.
/// the graph is connected and has no bridge. Loops and parallel edges are
/// never bridges. Vertex conditions are ignored.
pub fn is_doubly_connected(g: &MetricGraph) -> Result<bool> {
    let topo = Topology::new(g)?;
    if !connected_with(g, &topo, false) {
        return Err(Error::NotConnected);
    }
    Ok(bridges(g.vertices.len(), &topo.ends).is_empty())
}

/// Indices of bridge edges (iterative low-link DFS over the multigraph).
pub(crate) fn bridges(n: usize, ends: &[(usize, usize)]) -> Vec<usize> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (k, &(t, h)) in ends.iter().enumerate() {
        if t == h {
            continue;
        }
        adj[t].push((h, k));
        adj[h].push((t, k));
    }
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut timer = 0;
    let mut out = Vec::new();
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // (vertex, edge used to enter it, next adjacency position)
        let mut stack: Vec<(usize, Option<usize>, usize)> = vec![(root, None, 0)];
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        while let Some(frame) = stack.last_mut() {
            let (v, via, pos) = *frame;
            if pos < adj[v].len() {
                frame.2 += 1;
                let (w, k) = adj[v][pos];
                if Some(k) == via {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, Some(k), 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let (Some(&(parent, _, _)), Some(k)) = (stack.last(), via) {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > disc[parent] {
                        out.push(k);
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Aggregate metric data of a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub total_length: f64,
    /// Sum of δ-strengths; Dirichlet vertices do not contribute.
    pub total_strength: f64,
    pub edge_count: usize,
    pub vertex_count: usize,
    /// Sum of incident edge lengths; a loop counts twice.
    pub ell_degree: BTreeMap<VertexId, f64>,
}

pub fn summarize(g: &MetricGraph) -> GraphSummary {
    let mut ell_degree: BTreeMap<VertexId, f64> =
        g.vertices.iter().map(|v| (v.id.clone(), 0.0)).collect();
    for e in &g.edges {
        for end in [&e.tail, &e.head] {
            if let Some(d) = ell_degree.get_mut(end) {
                *d += e.length;
            }
        }
    }
    GraphSummary {
        total_length: g.total_length(),
        total_strength: g
            .vertices
            .iter()
            .filter_map(|v| v.condition.strength())
            .sum(),
        edge_count: g.edges.len(),
        vertex_count: g.vertices.len(),
        ell_degree,
    }
}

impl MetricGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vertex(mut self, id: &str, condition: VertexCondition) -> Self {
        self.add_vertex(id, condition);
        self
    }

    pub fn with_edge(mut self, id: &str, tail: &str, head: &str, length: f64) -> Self {
        self.add_edge(id, tail, head, length);
        self
    }

    pub fn add_vertex(&mut self, id: &str, condition: VertexCondition) {
        self.vertices.push(Vertex {
            id: id.into(),
            condition,
        });
    }

    pub fn add_edge(&mut self, id: &str, tail: &str, head: &str, length: f64) {
        self.edges.push(Edge {
            id: id.into(),
            tail: tail.into(),
            head: head.into(),
            length,
        });
    }

    /// Interval `v0 --e0-- v1` of the given length with δ-strengths at both ends.
    pub fn interval(length: f64, alpha0: f64, alpha1: f64) -> Self {
        Self::new()
            .with_vertex("v0", VertexCondition::Delta(alpha0))
            .with_vertex("v1", VertexCondition::Delta(alpha1))
            .with_edge("e0", "v0", "v1", length)
    }

    /// Path `v0 - v1 - ... - vn`; `conditions.len()` must be `lengths.len() + 1`.
    pub fn path(lengths: &[f64], conditions: &[VertexCondition]) -> Self {
        assert_eq!(
            conditions.len(),
            lengths.len() + 1,
            "path needs one more vertex than edges"
        );
        let mut g = Self::new();
        for (i, c) in conditions.iter().enumerate() {
            g.add_vertex(&format!("v{i}"), *c);
        }
        for (i, &l) in lengths.iter().enumerate() {
            g.add_edge(
                &format!("e{i}"),
                &format!("v{i}"),
                &format!("v{}", i + 1),
                l,
            );
        }
        g
    }

    /// Single vertex `v` of strength `alpha` with one loop per length.
    pub fn flower(lengths: &[f64], alpha: f64) -> Self {
        let mut g = Self::new().with_vertex("v", VertexCondition::Delta(alpha));
        for (i, &l) in lengths.iter().enumerate() {
            g.add_edge(&format!("e{i}"), "v", "v", l);
        }
        g
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn vertex(&self, id: &str) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.id.as_str() == id)
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id.as_str() == id)
    }

    pub fn has_dirichlet(&self) -> bool {
        self.vertices.iter().any(|v| v.condition.is_dirichlet())
    }

    /// Strengths of all δ-vertices (Dirichlet vertices skipped).
    pub fn strengths(&self) -> impl Iterator<Item = f64> + '_ {
        self.vertices.iter().filter_map(|v| v.condition.strength())
    }

    /// Parses the JSON graph format and validates the result.
    pub fn from_json(text: &str) -> Result<Self> {
        let g: MetricGraph = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let violations = validate(&g);
        if violations.is_empty() {
            Ok(g)
        } else {
            Err(Error::InvalidGraph(violations))
        }
    }

    /// Canonical serialization: pretty-printed JSON plus a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("graph serialization cannot fail");
        s.push('\n');
        s
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use VertexCondition::{Delta, Dirichlet};

    #[test]
    fn minimal_graph_is_valid() {
        assert!(validate(&MetricGraph::interval(1.0, 0.0, 0.0)).is_empty());
    }

    #[test]
    fn zero_length_is_reported() {
        let g = MetricGraph::interval(0.0, 0.0, 0.0);
        assert!(matches!(
            validate(&g)[..],
            [Violation::NonPositiveLength { .. }]
        ));
    }

    #[test]
    fn dangling_endpoint_is_reported() {
        let g = MetricGraph::new()
            .with_vertex("a", Delta(0.0))
            .with_edge("e", "a", "b", 1.0);
        assert!(matches!(
            validate(&g)[..],
            [Violation::DanglingEndpoint { .. }]
        ));
    }

    #[test]
    fn duplicates_and_empty_are_reported() {
        let g = MetricGraph::new()
            .with_vertex("a", Delta(0.0))
            .with_vertex("a", Delta(1.0));
        let v = validate(&g);
        assert!(v.contains(&Violation::DuplicateVertexId { vertex: "a".into() }));
        assert!(v.contains(&Violation::NoEdges));
    }

    #[test]
    fn punctured_connectivity() {
        let path = MetricGraph::path(&[1.0, 1.0], &[Delta(0.0), Delta(0.0), Delta(0.0)]);
        assert!(is_connected(&path, false));
        let punctured = MetricGraph::path(&[1.0, 1.0], &[Delta(0.0), Dirichlet, Delta(0.0)]);
        assert!(is_connected(&punctured, false));
        assert!(!is_connected(&punctured, true));

        // Two arcs between a Dirichlet vertex and a δ-vertex stay joined at the latter.
        let circle = MetricGraph::new()
            .with_vertex("d", Dirichlet)
            .with_vertex("w", Delta(0.0))
            .with_edge("e0", "d", "w", 1.0)
            .with_edge("e1", "w", "d", 1.0);
        assert!(is_connected(&circle, true));
        // A loop at a Dirichlet vertex is a single open interval.
        let lone_loop = MetricGraph::new()
            .with_vertex("d", Dirichlet)
            .with_edge("e", "d", "d", 1.0);
        assert!(is_connected(&lone_loop, true));
    }

    #[test]
    fn isolated_vertex_disconnects() {
        let g = MetricGraph::interval(1.0, 0.0, 0.0).with_vertex("lonely", Delta(1.0));
        assert!(!is_connected(&g, false));
        assert!(!is_connected(&g, true));
    }

    #[test]
    fn doubly_connected_examples() {
        let circle = MetricGraph::new()
            .with_vertex("a", Delta(1.0))
            .with_vertex("b", Delta(0.0))
            .with_edge("e0", "a", "b", 1.0)
            .with_edge("e1", "b", "a", 1.0);
        assert!(is_doubly_connected(&circle).unwrap());
        assert!(!is_doubly_connected(&MetricGraph::interval(1.0, 1.0, 0.0)).unwrap());
        assert!(is_doubly_connected(&MetricGraph::flower(&[1.0, 2.0], 1.0)).unwrap());

        let lollipop = MetricGraph::flower(&[1.0], 1.0)
            .with_vertex("w", Delta(0.0))
            .with_edge("stick", "v", "w", 1.0);
        assert!(!is_doubly_connected(&lollipop).unwrap());

        let split = MetricGraph::interval(1.0, 0.0, 0.0).with_vertex("x", Delta(0.0));
        assert!(matches!(
            is_doubly_connected(&split),
            Err(Error::NotConnected)
        ));
    }

    #[test]
    fn figure_eight_by_path_enumeration() {
        // Two loops a, b at one vertex. Between points on the same loop the two
        // arcs of that loop are edge-disjoint; between points on different
        // loops, going either way around each loop gives disjoint pairs.
        // Enumerating the arc choices on the 2-edge instance: every pair of
        // points admits at least two disjoint routes, so no bridge exists.
        let g = MetricGraph::flower(&[1.0, 1.0], 1.0);
        assert!(bridges(1, &Topology::new(&g).unwrap().ends).is_empty());
        assert!(is_doubly_connected(&g).unwrap());
    }

    #[test]
    fn summary_of_flower_counts_loops_twice() {
        let s = summarize(&MetricGraph::flower(&[1.0, 2.0], 2.0));
        assert_eq!(s.total_length, 3.0);
        assert_eq!(s.ell_degree[&VertexId::from("v")], 6.0);
        assert_eq!(s.total_strength, 2.0);
    }

    #[test]
    fn summary_strengths() {
        assert_eq!(
            summarize(&MetricGraph::interval(2.0, 1.5, 0.25)).total_strength,
            1.75
        );
        assert_eq!(
            summarize(&MetricGraph::interval(2.0, 0.0, 0.0)).total_strength,
            0.0
        );
        let mixed = MetricGraph::path(&[1.0, 1.0], &[Delta(2.0), Dirichlet, Delta(3.0)]);
        assert_eq!(summarize(&mixed).total_strength, 5.0);
    }

    #[test]
    fn json_format_matches_documented_shape() {
        let text = r#"{"vertices":[{"id":"v0","condition":{"delta":1.5}} , {"id":"v1","condition":"dirichlet"}],
             "edges":[{"id":"e0","tail":"v0","head":"v1","length":1.0}]}"#;
        let g = MetricGraph::from_json(text).unwrap();
        assert_eq!(g.vertices[0].condition, Delta(1.5));
        assert_eq!(g.vertices[1].condition, Dirichlet);
        let again = MetricGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(again.to_json(), g.to_json());
    }

    #[test]
    fn json_rejects_bad_numbers() {
        let nonpos = r#"{"vertices":[{"id":"a","condition":"dirichlet"}],
            "edges":[{"id":"e","tail":"a","head":"a","length":-1.0}]}"#;
        assert!(matches!(
            MetricGraph::from_json(nonpos),
            Err(Error::InvalidGraph(_))
        ));
        let huge = r#"{"vertices":[{"id":"a","condition":{"delta":1e999}}],
            "edges":[{"id":"e","tail":"a","head":"a","length":1.0}]}"#;
        assert!(MetricGraph::from_json(huge).is_err());
        let nan = r#"{"vertices":[{"id":"a","condition":{"delta":NaN}}],
            "edges":[{"id":"e","tail":"a","head":"a","length":1.0}]}"#;
        assert!(matches!(MetricGraph::from_json(nan), Err(Error::Parse(_))));
    }
}
