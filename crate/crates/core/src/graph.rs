//! Simple undirected graphs with stable vertex identifiers, degree
//! classification and the contraction of `G - R` components.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};

pub type VertexId = usize;

/// An immutable simple graph. Vertex ids live in `0..capacity()`; deleting
/// vertices keeps the ids of the survivors stable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    present: Vec<bool>,
    adj: Vec<Vec<VertexId>>,
    order: usize,
    size: usize,
}

impl Graph {
    /// `n` isolated vertices `0..n`.
    pub fn empty(n: usize) -> Self {
        Graph {
            present: vec![true; n],
            adj: vec![Vec::new(); n],
            order: n,
            size: 0,
        }
    }

    /// Builds a graph on `0..n`. Duplicate edges are merged; self-loops and
    /// out-of-range endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut adj: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); n];
        for (u, v) in edges {
            if u >= n {
                return Err(Error::UnknownVertex(u));
            }
            if v >= n {
                return Err(Error::UnknownVertex(v));
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adj[u].insert(v);
            adj[v].insert(u);
        }
        let adj: Vec<Vec<VertexId>> = adj.into_iter().map(|s| s.into_iter().collect()).collect();
        let size = adj.iter().map(Vec::len).sum::<usize>() / 2;
        Ok(Graph {
            present: vec![true; n],
            adj,
            order: n,
            size,
        })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::from_edges(n, edges).expect("valid by construction")
    }

    pub fn path(n: usize) -> Self {
        Graph::from_edges(n, (1..n).map(|v| (v - 1, v))).expect("valid by construction")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        Graph::from_edges(n, (0..n).map(|v| (v, (v + 1) % n))).expect("valid by construction")
    }

    /// Star with center 0 and leaves `1..=leaves`.
    pub fn star(leaves: usize) -> Self {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v))).expect("valid by construction")
    }

    /// The `rows x cols` grid; vertex `(i, j)` (0-based) has id `i * cols + j`.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut edges = Vec::new();
        for i in 0..rows {
            for j in 0..cols {
                let v = i * cols + j;
                if j + 1 < cols {
                    edges.push((v, v + 1));
                }
                if i + 1 < rows {
                    edges.push((v, v + cols));
                }
            }
        }
        Graph::from_edges(rows * cols, edges).expect("valid by construction")
    }

    /// Size of the id universe (ids of deleted vertices included).
    pub fn capacity(&self) -> usize {
        self.present.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.order
    }

    pub fn num_edges(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.order == 0
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.present.get(v).copied().unwrap_or(false)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.present
            .iter()
            .enumerate()
            .filter_map(|(v, &p)| p.then_some(v))
    }

    /// Sorted neighbor list. Empty for ids that are not present.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        self.adj.get(v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.neighbors(v).len()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    fn check_vertices(&self, s: &[VertexId]) -> Result<()> {
        match s.iter().find(|&&v| !self.contains(v)) {
            Some(&v) => Err(Error::UnknownVertex(v)),
            None => Ok(()),
        }
    }

    /// `G - S`: the subgraph induced by the vertices outside `s`.
    pub fn delete(&self, s: &[VertexId]) -> Result<Graph> {
        self.check_vertices(s)?;
        let mut present = self.present.clone();
        for &v in s {
            present[v] = false;
        }
        Ok(self.restrict_to(present))
    }

    /// The subgraph induced by `keep`.
    pub fn induced(&self, keep: &[VertexId]) -> Result<Graph> {
        self.check_vertices(keep)?;
        let mut present = vec![false; self.capacity()];
        for &v in keep {
            present[v] = true;
        }
        Ok(self.restrict_to(present))
    }

    fn restrict_to(&self, present: Vec<bool>) -> Graph {
        let mut adj = vec![Vec::new(); present.len()];
        let mut order = 0;
        let mut degree_sum = 0;
        for v in 0..present.len() {
            if !present[v] {
                continue;
            }
            order += 1;
            adj[v] = self.adj[v].iter().copied().filter(|&u| present[u]).collect();
            degree_sum += adj[v].len();
        }
        Graph {
            present,
            adj,
            order,
            size: degree_sum / 2,
        }
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let mut seen = vec![false; self.capacity()];
        let mut out = Vec::new();
        for s in self.vertices() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &w in self.neighbors(u) {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Whether `vs` induces a connected subgraph. Empty sets are not
    /// connected.
    pub fn is_connected_subset(&self, vs: &[VertexId]) -> bool {
        let mut sorted = vs.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let Some(&start) = sorted.first() else {
            return false;
        };
        if !sorted.iter().all(|&v| self.contains(v)) {
            return false;
        }
        let mut seen = vec![false; sorted.len()];
        seen[0] = true;
        let mut stack = vec![start];
        let mut reached = 1;
        while let Some(u) = stack.pop() {
            for &w in self.neighbors(u) {
                if let Ok(i) = sorted.binary_search(&w) {
                    if !seen[i] {
                        seen[i] = true;
                        reached += 1;
                        stack.push(w);
                    }
                }
            }
        }
        reached == sorted.len()
    }

    /// Removes `v` in place. Used by reduction loops that own their graph.
    pub(crate) fn remove_vertex(&mut self, v: VertexId) {
        if !self.contains(v) {
            return;
        }
        let nbrs = std::mem::take(&mut self.adj[v]);
        for &u in &nbrs {
            if let Ok(i) = self.adj[u].binary_search(&v) {
                self.adj[u].remove(i);
            }
        }
        self.present[v] = false;
        self.order -= 1;
        self.size -= nbrs.len();
    }

    /// Renumbers the surviving vertices densely. Returns the new graph and
    /// the map from new ids to old ids.
    pub fn compact(&self) -> (Graph, Vec<VertexId>) {
        let old: Vec<VertexId> = self.vertices().collect();
        let mut new_id = vec![usize::MAX; self.capacity()];
        for (i, &v) in old.iter().enumerate() {
            new_id[v] = i;
        }
        let edges = self.edges().map(|(u, v)| (new_id[u], new_id[v]));
        let g = Graph::from_edges(old.len(), edges).expect("edges of a valid graph");
        (g, old)
    }
}

/// Degree class of a vertex relative to thresholds `d` and `k + d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeClass {
    Blue,
    White,
    Red,
}

impl DegreeClass {
    pub fn of_degree(deg: usize, k: usize, d: usize) -> Self {
        if deg <= d {
            DegreeClass::Blue
        } else if deg <= k + d {
            DegreeClass::White
        } else {
            DegreeClass::Red
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    classes: Vec<Option<DegreeClass>>,
}

impl Classification {
    pub fn get(&self, v: VertexId) -> Option<DegreeClass> {
        self.classes.get(v).copied().flatten()
    }

    pub fn with_class(&self, c: DegreeClass) -> Vec<VertexId> {
        self.classes
            .iter()
            .enumerate()
            .filter_map(|(v, &x)| (x == Some(c)).then_some(v))
            .collect()
    }

    pub fn reds(&self) -> Vec<VertexId> {
        self.with_class(DegreeClass::Red)
    }

    pub fn is_red(&self, v: VertexId) -> bool {
        self.get(v) == Some(DegreeClass::Red)
    }
}

pub fn classify(g: &Graph, k: usize, d: usize) -> Classification {
    let mut classes = vec![None; g.capacity()];
    for v in g.vertices() {
        classes[v] = Some(DegreeClass::of_degree(g.degree(v), k, d));
    }
    Classification { classes }
}

/// One contracted component `C` of `G - R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentNode {
    /// Vertices of `C` in the host graph, sorted.
    pub vertices: Vec<VertexId>,
    /// Red neighbors of `C`, ascending; port `j` (1-based) is `ports[j - 1]`.
    pub ports: Vec<VertexId>,
}

impl ComponentNode {
    /// The component as a standalone graph on `0..vertices.len()` together
    /// with the (1-based) port indices of each local vertex.
    pub fn ported(&self, g: &Graph) -> (Graph, Vec<BTreeSet<usize>>) {
        let mut local = BTreeMap::new();
        for (i, &v) in self.vertices.iter().enumerate() {
            local.insert(v, i);
        }
        let mut edges = Vec::new();
        let mut ports = vec![BTreeSet::new(); self.vertices.len()];
        for (i, &v) in self.vertices.iter().enumerate() {
            for &w in g.neighbors(v) {
                if let Some(&j) = local.get(&w) {
                    if i < j {
                        edges.push((i, j));
                    }
                } else if let Ok(p) = self.ports.binary_search(&w) {
                    ports[i].insert(p + 1);
                }
            }
        }
        let h = Graph::from_edges(self.vertices.len(), edges).expect("subgraph of a valid graph");
        (h, ports)
    }
}

/// Node of the quotient graph `G'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QNode {
    Red(VertexId),
    Component(usize),
}

/// `G'`: the red vertices of `G` plus one node per component of `G - R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientGraph {
    pub k: usize,
    pub d: usize,
    /// Red vertices, ascending.
    pub reds: Vec<VertexId>,
    pub components: Vec<ComponentNode>,
    /// Red-red edges as indices into `reds`, `a < b`.
    pub red_edges: Vec<(usize, usize)>,
}

impl QuotientGraph {
    pub fn num_nodes(&self) -> usize {
        self.reds.len() + self.components.len()
    }

    pub fn red_index(&self, v: VertexId) -> Option<usize> {
        self.reds.binary_search(&v).ok()
    }

    /// Node index: reds first (by position in `reds`), then components.
    pub fn node_index(&self, n: QNode) -> usize {
        match n {
            QNode::Red(v) => self.red_index(v).expect("red vertex of this quotient"),
            QNode::Component(c) => self.reds.len() + c,
        }
    }

    pub fn node(&self, idx: usize) -> QNode {
        if idx < self.reds.len() {
            QNode::Red(self.reds[idx])
        } else {
            QNode::Component(idx - self.reds.len())
        }
    }

    /// `G'` as a plain graph on node indices.
    pub fn as_graph(&self) -> Graph {
        let r = self.reds.len();
        let mut edges = self.red_edges.clone();
        for (c, comp) in self.components.iter().enumerate() {
            for p in &comp.ports {
                edges.push((self.red_index(*p).expect("ports are red"), r + c));
            }
        }
        Graph::from_edges(self.num_nodes(), edges).expect("quotient edges are valid")
    }

    /// Sorted quotient edges between nodes.
    pub fn edges(&self) -> Vec<(QNode, QNode)> {
        let g = self.as_graph();
        g.edges().map(|(a, b)| (self.node(a), self.node(b))).collect()
    }
}

/// Merges every component of `G - R` into a single node.
pub fn contract(g: &Graph, k: usize, d: usize) -> QuotientGraph {
    let cls = classify(g, k, d);
    let reds = cls.reds();
    let rest = g.delete(&reds).expect("reds are vertices of g");
    let mut components: Vec<ComponentNode> = rest
        .components()
        .into_iter()
        .map(|vertices| {
            let ports: BTreeSet<VertexId> = vertices
                .iter()
                .flat_map(|&v| g.neighbors(v).iter().copied())
                .filter(|&w| cls.is_red(w))
                .collect();
            ComponentNode {
                vertices,
                ports: ports.into_iter().collect(),
            }
        })
        .collect();
    components.sort_by(|a, b| a.vertices[0].cmp(&b.vertices[0]));
    let mut red_edges = Vec::new();
    for (a, &u) in reds.iter().enumerate() {
        for &w in g.neighbors(u) {
            if let Ok(b) = reds.binary_search(&w) {
                if a < b {
                    red_edges.push((a, b));
                }
            }
        }
    }
    QuotientGraph {
        k,
        d,
        reds,
        components,
        red_edges,
    }
}
