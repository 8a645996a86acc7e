//! Trivalent dual graphs of pants decompositions.
//!
//! A genus-g surface cut along 3g-3 circles falls into 2g-2 pairs of pants.
//! The dual graph has one vertex per pair of pants and one edge per circle;
//! loops and parallel edges occur and are first-class here.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::params::Genus;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("genus {0} has no pants decomposition; need g >= 2")]
    GenusTooSmall(u32),
    #[error("graph has no vertices")]
    Empty,
    #[error("edge {edge} references vertex {vertex}, but the graph has {count} vertices")]
    VertexOutOfRange {
        edge: usize,
        vertex: usize,
        count: usize,
    },
    #[error("vertex {vertex} has degree {degree}, expected 3")]
    BadDegree { vertex: usize, degree: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Connected multigraph in which every vertex has degree three.
///
/// Edges are stored as `(a, b)` with `a <= b`; a loop is `(v, v)` and counts
/// twice towards the degree of `v`. Edge indices are stable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TrivalentGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

/// Set of edge indices of a [`TrivalentGraph`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct EdgeSet(pub BTreeSet<usize>);

impl EdgeSet {
    pub fn contains(&self, e: usize) -> bool {
        self.0.contains(&e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }
}

impl TrivalentGraph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        if vertex_count == 0 {
            return Err(GraphError::Empty);
        }
        let mut degree = vec![0usize; vertex_count];
        let mut normalized = Vec::with_capacity(edges.len());
        for (idx, &(a, b)) in edges.iter().enumerate() {
            for v in [a, b] {
                if v >= vertex_count {
                    return Err(GraphError::VertexOutOfRange {
                        edge: idx,
                        vertex: v,
                        count: vertex_count,
                    });
                }
            }
            degree[a] += 1;
            degree[b] += 1;
            normalized.push((a.min(b), a.max(b)));
        }
        if let Some((vertex, &degree)) = degree.iter().enumerate().find(|(_, &d)| d != 3) {
            return Err(GraphError::BadDegree { vertex, degree });
        }
        let graph = TrivalentGraph {
            vertex_count,
            edges: normalized,
        };
        if !graph.is_connected_without(None) {
            return Err(GraphError::Disconnected);
        }
        Ok(graph)
    }

    /// Two vertices joined by three parallel edges.
    pub fn theta() -> Self {
        TrivalentGraph {
            vertex_count: 2,
            edges: vec![(0, 1), (0, 1), (0, 1)],
        }
    }

    /// Two looped vertices joined by a bridge (edge 1).
    pub fn dumbbell() -> Self {
        TrivalentGraph {
            vertex_count: 2,
            edges: vec![(0, 0), (0, 1), (1, 1)],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// First Betti number `|E| - |V| + 1`, equal to the surface genus.
    pub fn genus(&self) -> u32 {
        (self.edges.len() + 1 - self.vertex_count) as u32
    }

    pub fn is_loop(&self, e: usize) -> bool {
        let (a, b) = self.edges[e];
        a == b
    }

    /// The three edge-ends at each vertex, as edge indices. A loop appears twice.
    pub fn vertex_ends(&self) -> Vec<[usize; 3]> {
        let mut ends = vec![Vec::with_capacity(3); self.vertex_count];
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            ends[a].push(e);
            ends[b].push(e);
        }
        ends.into_iter().map(|v| [v[0], v[1], v[2]]).collect()
    }

    /// Renames vertex `v` to `perm[v]`, keeping edge indices.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.vertex_count, "permutation size");
        let edges = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (perm[a], perm[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        TrivalentGraph {
            vertex_count: self.vertex_count,
            edges,
        }
    }

    fn multiplicities(&self) -> Vec<Vec<u8>> {
        let n = self.vertex_count;
        let mut m = vec![vec![0u8; n]; n];
        for &(a, b) in &self.edges {
            if a == b {
                m[a][a] += 1;
            } else {
                m[a][b] += 1;
                m[b][a] += 1;
            }
        }
        m
    }

    fn is_connected_without(&self, removed: Option<usize>) -> bool {
        let n = self.vertex_count;
        let mut adj = vec![Vec::new(); n];
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if Some(e) != removed && a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        reached == n
    }

    /// Canonical code and the vertex order that realizes it.
    pub fn canonical_form(&self) -> CanonicalForm {
        let mult = self.multiplicities();
        let mut search = CanonSearch {
            mult: &mult,
            order: Vec::with_capacity(self.vertex_count),
            used: vec![false; self.vertex_count],
            code: Vec::new(),
            best: None,
        };
        search.run();
        let (code, order) = search.best.expect("non-empty graph");
        CanonicalForm {
            vertex_count: self.vertex_count,
            code,
            order,
        }
    }

    /// The isomorphic copy whose vertex numbering follows the canonical order,
    /// with edges listed in sorted order.
    pub fn canonical(&self) -> Self {
        self.canonical_form().graph()
    }

    /// Serializes into the line format read by [`FromStr`].
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

/// Lexicographically largest row-by-row encoding of the multiplicity matrix.
///
/// Row `i` is `[loops(v_i), mult(v_i, v_0), ..., mult(v_i, v_{i-1})]` for the
/// chosen vertex order `v_0, ..., v_{n-1}`. Two graphs are isomorphic iff
/// their codes agree.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    vertex_count: usize,
    code: Vec<u8>,
    order: Vec<usize>,
}

impl PartialEq for CanonicalForm {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count && self.code == other.code
    }
}

impl Eq for CanonicalForm {}

impl CanonicalForm {
    pub fn code(&self) -> &[u8] {
        &self.code
    }

    /// `order[i]` is the original vertex placed at canonical position `i`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn graph(&self) -> TrivalentGraph {
        let n = self.vertex_count;
        let mut mult = vec![vec![0u8; n]; n];
        let mut code = self.code.iter().copied();
        for i in 0..n {
            mult[i][i] = code.next().unwrap_or(0);
            for j in 0..i {
                mult[j][i] = code.next().unwrap_or(0);
            }
        }
        TrivalentGraph {
            vertex_count: n,
            edges: edges_from_upper(&mult),
        }
    }
}

/// Expands the upper triangle (diagonal = loops) of a multiplicity matrix
/// into a normalized edge list.
fn edges_from_upper(mult: &[Vec<u8>]) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for (i, row) in mult.iter().enumerate() {
        for (j, &count) in row.iter().enumerate().skip(i) {
            edges.extend(std::iter::repeat_n((i, j), usize::from(count)));
        }
    }
    edges
}

struct CanonSearch<'a> {
    mult: &'a [Vec<u8>],
    order: Vec<usize>,
    used: Vec<bool>,
    code: Vec<u8>,
    best: Option<(Vec<u8>, Vec<usize>)>,
}

impl CanonSearch<'_> {
    fn run(&mut self) {
        let n = self.mult.len();
        if self.order.len() == n {
            let better = match &self.best {
                Some((best, _)) => self.code > *best,
                None => true,
            };
            if better {
                self.best = Some((self.code.clone(), self.order.clone()));
            }
            return;
        }
        let start = self.code.len();
        for v in 0..n {
            if self.used[v] {
                continue;
            }
            self.code.push(self.mult[v][v]);
            for &w in &self.order {
                self.code.push(self.mult[v][w]);
            }
            // a prefix below the best code's prefix cannot complete to a larger code
            let behind = self
                .best
                .as_ref()
                .is_some_and(|(best, _)| self.code[..] < best[..self.code.len()]);
            if !behind {
                self.used[v] = true;
                self.order.push(v);
                self.run();
                self.order.pop();
                self.used[v] = false;
            }
            self.code.truncate(start);
        }
    }
}

impl fmt::Display for TrivalentGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "v {}", self.vertex_count)?;
        for &(a, b) in &self.edges {
            writeln!(f, "e {a} {b}")?;
        }
        Ok(())
    }
}

impl FromStr for TrivalentGraph {
    type Err = GraphError;

    /// Reads `v <count>` followed by `e <i> <j>` lines. Blank lines and lines
    /// starting with `#` are skipped.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut count = None;
        let mut edges = Vec::new();
        for (idx, raw) in s.lines().enumerate() {
            let line = idx + 1;
            let text = raw.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let err = |msg: &str| GraphError::Parse {
                line,
                msg: msg.to_string(),
            };
            let mut tokens = text.split_whitespace();
            let num = |tok: Option<&str>| -> Result<usize, GraphError> {
                tok.ok_or_else(|| err("missing field"))?
                    .parse()
                    .map_err(|_| err("expected a non-negative integer"))
            };
            match tokens.next() {
                Some("v") => {
                    if count.is_some() {
                        return Err(err("duplicate vertex count"));
                    }
                    count = Some(num(tokens.next())?);
                }
                Some("e") => {
                    if count.is_none() {
                        return Err(err("edge before vertex count"));
                    }
                    let a = num(tokens.next())?;
                    let b = num(tokens.next())?;
                    edges.push((a, b));
                }
                _ => return Err(err("expected `v` or `e`")),
            }
            if tokens.next().is_some() {
                return Err(err("trailing tokens"));
            }
        }
        let count = count.ok_or(GraphError::Parse {
            line: 0,
            msg: "missing `v` line".into(),
        })?;
        TrivalentGraph::new(count, edges)
    }
}

/// One representative per isomorphism class of connected trivalent multigraphs
/// of genus `g`, in canonical labelling, sorted by canonical code.
pub fn generate_trivalent(g: Genus) -> Result<Vec<TrivalentGraph>, GraphError> {
    if g.get() < 2 {
        return Err(GraphError::GenusTooSmall(g.get()));
    }
    let n = 2 * g.get() as usize - 2;
    let mut classes = BTreeMap::new();
    let mut mult = vec![vec![0u8; n]; n];
    let mut free = vec![3u8; n];
    fill_vertex(0, &mut mult, &mut free, &mut classes);
    Ok(classes
        .into_values()
        .map(|c: CanonicalForm| c.graph())
        .collect())
}

/// Completes the degree of vertex `v` (loops first, then edges to later
/// vertices) and recurses. Looped vertices are forced to precede unlooped
/// ones; every isomorphism class has such a labelling.
fn fill_vertex(
    v: usize,
    mult: &mut [Vec<u8>],
    free: &mut [u8],
    out: &mut BTreeMap<Vec<u8>, CanonicalForm>,
) {
    let n = mult.len();
    if v == n {
        if let Ok(graph) = TrivalentGraph::new(n, edges_from_upper(mult)) {
            let form = graph.canonical_form();
            out.entry(form.code.clone()).or_insert(form);
        }
        return;
    }
    let prev_loop = if v == 0 { 1 } else { mult[v - 1][v - 1] };
    let max_loop = if free[v] >= 2 { prev_loop } else { 0 };
    for loops in (0..=max_loop).rev() {
        mult[v][v] = loops;
        free[v] -= 2 * loops;
        distribute(v, v + 1, mult, free, out);
        free[v] += 2 * loops;
        mult[v][v] = 0;
    }
}

fn distribute(
    v: usize,
    w: usize,
    mult: &mut [Vec<u8>],
    free: &mut [u8],
    out: &mut BTreeMap<Vec<u8>, CanonicalForm>,
) {
    let n = mult.len();
    if free[v] == 0 {
        fill_vertex(v + 1, mult, free, out);
        return;
    }
    if w == n {
        return;
    }
    let cap = free[v].min(free[w]);
    for m in (0..=cap).rev() {
        mult[v][w] = m;
        mult[w][v] = m;
        free[v] -= m;
        free[w] -= m;
        distribute(v, w + 1, mult, free, out);
        free[v] += m;
        free[w] += m;
    }
    mult[v][w] = 0;
    mult[w][v] = 0;
}

pub fn is_isomorphic(a: &TrivalentGraph, b: &TrivalentGraph) -> bool {
    a.vertex_count == b.vertex_count
        && a.edges.len() == b.edges.len()
        && a.canonical_form().code == b.canonical_form().code
}

/// Edges whose removal disconnects the graph. Loops are never bridges.
pub fn bridges(g: &TrivalentGraph) -> EdgeSet {
    EdgeSet(
        (0..g.edge_count())
            .filter(|&e| !g.is_loop(e) && !g.is_connected_without(Some(e)))
            .collect(),
    )
}
