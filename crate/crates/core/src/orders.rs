//! Tree orders and elimination orders to degree `d`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

/// A partial order given by its covering relation. A vertex normally has at
/// most one parent; several parents are representable so that malformed
/// inputs can be reported instead of silently repaired.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TreeOrder {
    parents: BTreeMap<VertexId, Vec<VertexId>>,
}

impl TreeOrder {
    pub fn new() -> Self {
        TreeOrder::default()
    }

    /// Builds an order from `(vertex, parent)` pairs.
    pub fn from_parents<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (VertexId, Option<VertexId>)>,
    {
        let mut o = TreeOrder::new();
        for (v, p) in pairs {
            o.add(v, p);
        }
        o
    }

    /// Every vertex of `vs` is a root.
    pub fn flat(vs: impl IntoIterator<Item = VertexId>) -> Self {
        TreeOrder::from_parents(vs.into_iter().map(|v| (v, None)))
    }

    /// Adds `v` (if new) and, when given, the covering pair `parent < v`.
    pub fn add(&mut self, v: VertexId, parent: Option<VertexId>) {
        let e = self.parents.entry(v).or_default();
        if let Some(p) = parent {
            if !e.contains(&p) {
                e.push(p);
            }
        }
    }

    pub fn set_parent(&mut self, v: VertexId, parent: Option<VertexId>) {
        self.parents.insert(v, parent.into_iter().collect());
    }

    pub fn remove(&mut self, v: VertexId) {
        self.parents.remove(&v);
    }

    pub fn len(&self) -> usize {
        self.parents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parents.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.parents.contains_key(&v)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.parents.keys().copied()
    }

    /// The unique parent, if the vertex has exactly one.
    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        match self.parents.get(&v).map(Vec::as_slice) {
            Some([p]) => Some(*p),
            _ => None,
        }
    }

    pub fn parents_of(&self, v: VertexId) -> &[VertexId] {
        self.parents.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `(vertex, parent)` pairs in ascending vertex order. Vertices with
    /// several parents contribute one pair per parent.
    pub fn pairs(&self) -> Vec<(VertexId, Option<VertexId>)> {
        let mut out = Vec::new();
        for (&v, ps) in &self.parents {
            if ps.is_empty() {
                out.push((v, None));
            }
            for &p in ps {
                out.push((v, Some(p)));
            }
        }
        out
    }

    fn children(&self) -> BTreeMap<VertexId, Vec<VertexId>> {
        let mut ch: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for (&v, ps) in &self.parents {
            for &p in ps {
                ch.entry(p).or_default().push(v);
            }
        }
        ch
    }

    /// Checks forest shape: one parent at most, parents known, no cycles.
    fn forest_problem(&self) -> Option<String> {
        for (&v, ps) in &self.parents {
            if ps.len() > 1 {
                return Some(format!("vertex {v} has {} parents", ps.len()));
            }
            if let Some(&p) = ps.first() {
                if !self.parents.contains_key(&p) {
                    return Some(format!("parent {p} of {v} is not ordered"));
                }
            }
        }
        for &v in self.parents.keys() {
            let mut cur = v;
            let mut steps = 0;
            while let Some(p) = self.parent(cur) {
                cur = p;
                steps += 1;
                if steps > self.parents.len() {
                    return Some(format!("cycle through {v}"));
                }
            }
        }
        None
    }

    /// Strict ancestors of `v`, nearest first. Assumes forest shape.
    pub fn ancestors(&self, v: VertexId) -> Vec<VertexId> {
        let mut out = Vec::new();
        let mut cur = v;
        while let Some(p) = self.parent(cur) {
            out.push(p);
            cur = p;
            if out.len() > self.parents.len() {
                break;
            }
        }
        out
    }

    /// Number of strict predecessors.
    pub fn depth_of(&self, v: VertexId) -> usize {
        self.ancestors(v).len()
    }

    /// Maximum vertex depth; 0 for the empty order.
    pub fn depth(&self) -> usize {
        self.vertices().map(|v| self.depth_of(v)).max().unwrap_or(0)
    }

    /// `u <= v`.
    pub fn leq(&self, u: VertexId, v: VertexId) -> bool {
        u == v || self.ancestors(v).contains(&u)
    }

    pub fn comparable(&self, u: VertexId, v: VertexId) -> bool {
        self.leq(u, v) || self.leq(v, u)
    }

    pub fn maximal(&self) -> BTreeSet<VertexId> {
        let ch = self.children();
        self.vertices().filter(|v| !ch.contains_key(v)).collect()
    }
}

fn same_vertex_set(g: &Graph, o: &TreeOrder) -> Result<()> {
    if let Some(v) = o.vertices().find(|&v| !g.contains(v)) {
        return Err(Error::InvalidOrder(format!("vertex {v} is not in the graph")));
    }
    if let Some(v) = g.vertices().find(|&v| !o.contains(v)) {
        return Err(Error::InvalidOrder(format!("vertex {v} is not ordered")));
    }
    Ok(())
}

/// Whether `o` is a tree order on `V(g)`. Errors if `o` is defined on a
/// different vertex set.
pub fn check_tree_order(g: &Graph, o: &TreeOrder) -> Result<bool> {
    same_vertex_set(g, o)?;
    Ok(o.forest_problem().is_none())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EliminationOrderReport {
    pub valid: bool,
    pub depth: usize,
    pub violations: Vec<(VertexId, String)>,
    /// `S_v` for every maximal vertex.
    pub maximal_sets: BTreeMap<VertexId, Vec<VertexId>>,
}

/// Precomputed ancestor chains for repeated order queries.
pub(crate) struct Chains {
    /// Root-first chain of strict ancestors, indexed by vertex id.
    pub(crate) up: Vec<Vec<VertexId>>,
    pub(crate) maximal: Vec<bool>,
}

impl Chains {
    pub(crate) fn new(o: &TreeOrder, capacity: usize) -> Self {
        let mut up = vec![Vec::new(); capacity];
        let mut maximal = vec![false; capacity];
        let max = o.maximal();
        for v in o.vertices() {
            let mut a = o.ancestors(v);
            a.reverse();
            up[v] = a;
            maximal[v] = max.contains(&v);
        }
        Chains { up, maximal }
    }

    pub(crate) fn depth(&self, v: VertexId) -> usize {
        self.up[v].len()
    }

    /// `u <= v`.
    pub(crate) fn leq(&self, u: VertexId, v: VertexId) -> bool {
        u == v || self.up[v].get(self.depth(u)) == Some(&u)
    }

    pub(crate) fn comparable(&self, u: VertexId, v: VertexId) -> bool {
        self.leq(u, v) || self.leq(v, u)
    }
}

/// Checks the elimination-order-to-degree-`d` condition at every vertex.
pub fn check_elimination_to_degree(
    g: &Graph,
    o: &TreeOrder,
    d: usize,
) -> Result<EliminationOrderReport> {
    same_vertex_set(g, o)?;
    if let Some(problem) = o.forest_problem() {
        return Err(Error::InvalidOrder(problem));
    }
    let ch = Chains::new(o, g.capacity());
    let mut violations = Vec::new();
    let mut maximal_sets = BTreeMap::new();
    for v in g.vertices() {
        let s_v: Vec<VertexId> = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| !ch.comparable(u, v))
            .collect();
        if ch.maximal[v] {
            maximal_sets.insert(v, s_v.clone());
        }
        if s_v.is_empty() {
            continue;
        }
        if !ch.maximal[v] {
            violations.push((v, format!("not maximal but has incomparable neighbors {s_v:?}")));
            continue;
        }
        if s_v.len() > d {
            violations.push((v, format!("{} incomparable neighbors, more than {d}", s_v.len())));
        }
        for &u in &s_v {
            if ch.up[u] != ch.up[v] {
                violations.push((v, format!("neighbor {u} has different predecessors")));
            }
        }
    }
    Ok(EliminationOrderReport {
        valid: violations.is_empty(),
        depth: o.depth(),
        violations,
        maximal_sets,
    })
}

/// Whether vertices of distinct components of `g - V_{<=v}` (and of `g`)
/// are pairwise incomparable.
pub fn is_component_incomparable(g: &Graph, o: &TreeOrder) -> Result<bool> {
    same_vertex_set(g, o)?;
    if let Some(problem) = o.forest_problem() {
        return Err(Error::InvalidOrder(problem));
    }
    let ch = Chains::new(o, g.capacity());
    let check = |h: &Graph| {
        let comps = h.components();
        for (a, ca) in comps.iter().enumerate() {
            for cb in &comps[a + 1..] {
                for &x in ca {
                    if cb.iter().any(|&y| ch.comparable(x, y)) {
                        return false;
                    }
                }
            }
        }
        true
    };
    if !check(g) {
        return Ok(false);
    }
    for v in g.vertices() {
        let mut down = ch.up[v].clone();
        down.push(v);
        if !check(&g.delete(&down)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rebuilds a valid elimination order so that distinct components are
/// incomparable, without increasing depth.
///
/// Each component of the remaining graph is either already of maximum
/// degree at most `d` (all its vertices become maximal) or has a unique
/// minimal vertex in `o`, which becomes the root of that component.
pub fn canonicalize(g: &Graph, o: &TreeOrder, d: usize) -> Result<TreeOrder> {
    let report = check_elimination_to_degree(g, o, d)?;
    if !report.valid {
        return Err(Error::InvalidOrder(format!(
            "not an elimination order to degree {d}: {:?}",
            report.violations
        )));
    }
    let ch = Chains::new(o, g.capacity());
    let mut out = TreeOrder::new();
    let mut stack: Vec<(Graph, Option<VertexId>)> = g
        .components()
        .into_iter()
        .map(|c| (g.induced(&c).expect("component of g"), None))
        .collect();
    while let Some((h, parent)) = stack.pop() {
        if h.max_degree() <= d {
            for v in h.vertices() {
                out.set_parent(v, parent);
            }
            continue;
        }
        let minimal: Vec<VertexId> = h
            .vertices()
            .filter(|&v| !ch.up[v].iter().any(|&a| h.contains(a)))
            .collect();
        let root = match minimal.as_slice() {
            [r] => *r,
            _ => {
                return Err(Error::Internal(format!(
                    "component with {} minimal vertices is not of degree {d}",
                    minimal.len()
                )))
            }
        };
        out.set_parent(root, parent);
        let rest = h.delete(&[root])?;
        for c in rest.components() {
            stack.push((rest.induced(&c)?, Some(root)));
        }
    }
    Ok(out)
}
