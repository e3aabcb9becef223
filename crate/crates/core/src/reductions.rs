//! Sound rejections on the quotient graph, each with a checkable
//! certificate in the original graph.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::graph::{classify, Graph, QNode, QuotientGraph, VertexId};
use crate::orders::TreeOrder;
use crate::sat_pow;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    /// A component of `G - R` has more than `(k+d)^k` red neighbors.
    RedNeighborBound,
    /// A path of `G` contains at least `2^k` red vertices.
    RedPathBound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub reason: RejectReason,
    pub k: usize,
    pub d: usize,
    /// The component for [`RejectReason::RedNeighborBound`], the path for
    /// [`RejectReason::RedPathBound`].
    pub vertices: Vec<VertexId>,
    /// Red neighbors of the component, or the red vertices on the path.
    pub reds: Vec<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PruneOutcome {
    Continue,
    Reject(Certificate),
}

/// `(k+d)^k`.
pub fn red_neighbor_bound(k: usize, d: usize) -> u64 {
    sat_pow(k + d, k)
}

/// Largest depth a DFS tree of the quotient may have before the red path
/// bound is violated: `2^(k+1) - 1`.
pub fn quotient_depth_bound(k: usize) -> u64 {
    if k + 1 >= 64 {
        u64::MAX
    } else {
        (1u64 << (k + 1)) - 1
    }
}

pub fn reject_by_red_neighbors(q: &QuotientGraph) -> PruneOutcome {
    let bound = red_neighbor_bound(q.k, q.d);
    for c in &q.components {
        if c.ports.len() as u64 > bound {
            return PruneOutcome::Reject(Certificate {
                reason: RejectReason::RedNeighborBound,
                k: q.k,
                d: q.d,
                vertices: c.vertices.clone(),
                reds: c.ports.clone(),
            });
        }
    }
    PruneOutcome::Continue
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuotientDfs {
    /// A DFS forest of the quotient (on node indices) within the bound.
    Order { order: TreeOrder, depth: usize },
    Reject(Certificate),
}

fn host_key(q: &QuotientGraph, idx: usize) -> VertexId {
    match q.node(idx) {
        QNode::Red(v) => v,
        QNode::Component(c) => q.components[c].vertices[0],
    }
}

/// Depth-first forest of the quotient, visiting nodes by ascending host id.
/// A root-to-node path longer than the bound is lifted to a path of `g`
/// that carries at least `2^k` red vertices.
pub fn quotient_dfs_order(g: &Graph, q: &QuotientGraph) -> QuotientDfs {
    let qg = q.as_graph();
    let n = q.num_nodes();
    let mut by_key: Vec<usize> = (0..n).collect();
    by_key.sort_by_key(|&i| host_key(q, i));
    let nbrs: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut ns = qg.neighbors(i).to_vec();
            ns.sort_by_key(|&j| host_key(q, j));
            ns
        })
        .collect();
    let bound = quotient_depth_bound(q.k);
    let mut order = TreeOrder::new();
    let mut visited = vec![false; n];
    let mut max_depth = 0;
    for &root in &by_key {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        order.add(root, None);
        // Stack of (node, next neighbor position); the stack is the path.
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&mut (v, ref mut pos)) = stack.last_mut() {
            if *pos == nbrs[v].len() {
                stack.pop();
                continue;
            }
            let w = nbrs[v][*pos];
            *pos += 1;
            if visited[w] {
                continue;
            }
            visited[w] = true;
            order.add(w, Some(v));
            stack.push((w, 0));
            let depth = stack.len() - 1;
            max_depth = max_depth.max(depth);
            if depth as u64 > bound {
                let path: Vec<usize> = stack.iter().map(|&(x, _)| x).collect();
                return QuotientDfs::Reject(lift_path(g, q, &path));
            }
        }
    }
    QuotientDfs::Order {
        order,
        depth: max_depth,
    }
}

/// Lifts a quotient path to `g`: end components are dropped and each inner
/// component is crossed by a shortest path between its two red neighbors.
fn lift_path(g: &Graph, q: &QuotientGraph, path: &[usize]) -> Certificate {
    let nodes: Vec<QNode> = path.iter().map(|&i| q.node(i)).collect();
    let first = nodes.iter().position(|n| matches!(n, QNode::Red(_))).expect("paths alternate");
    let last = nodes.iter().rposition(|n| matches!(n, QNode::Red(_))).expect("paths alternate");
    let mut out = Vec::new();
    for i in first..=last {
        match nodes[i] {
            QNode::Red(v) => out.push(v),
            QNode::Component(c) => {
                let (QNode::Red(a), QNode::Red(b)) = (nodes[i - 1], nodes[i + 1]) else {
                    unreachable!("inner components sit between reds");
                };
                out.extend(cross(g, &q.components[c].vertices, a, b));
            }
        }
    }
    let reds: Vec<VertexId> = out.iter().copied().filter(|v| q.red_index(*v).is_some()).collect();
    Certificate {
        reason: RejectReason::RedPathBound,
        k: q.k,
        d: q.d,
        vertices: out,
        reds,
    }
}

/// Shortest path inside `comp` from a neighbor of `a` to a neighbor of `b`.
fn cross(g: &Graph, comp: &[VertexId], a: VertexId, b: VertexId) -> Vec<VertexId> {
    let inside = |v: VertexId| comp.binary_search(&v).is_ok();
    let mut prev = std::collections::BTreeMap::new();
    let mut queue = VecDeque::new();
    for &s in g.neighbors(a).iter().filter(|&&s| inside(s)) {
        prev.insert(s, s);
        queue.push_back(s);
    }
    while let Some(v) = queue.pop_front() {
        if g.has_edge(v, b) {
            let mut p = vec![v];
            let mut cur = v;
            while prev[&cur] != cur {
                cur = prev[&cur];
                p.push(cur);
            }
            p.reverse();
            return p;
        }
        for &w in g.neighbors(v) {
            if inside(w) && !prev.contains_key(&w) {
                prev.insert(w, v);
                queue.push_back(w);
            }
        }
    }
    unreachable!("a and b are both ports of a connected component")
}

/// Checks a certificate against `g` from scratch.
pub fn validate_certificate(g: &Graph, c: &Certificate) -> Result<(), String> {
    let cls = classify(g, c.k, c.d);
    for &v in c.vertices.iter().chain(&c.reds) {
        if !g.contains(v) {
            return Err(format!("vertex {v} is not in the graph"));
        }
    }
    match c.reason {
        RejectReason::RedNeighborBound => {
            if c.vertices.is_empty() || !g.is_connected_subset(&c.vertices) {
                return Err("component is empty or disconnected".into());
            }
            let set: BTreeSet<VertexId> = c.vertices.iter().copied().collect();
            if set.iter().any(|&v| cls.is_red(v)) {
                return Err("component contains a red vertex".into());
            }
            let mut reds = BTreeSet::new();
            for &v in &set {
                for &w in g.neighbors(v) {
                    if set.contains(&w) {
                        continue;
                    }
                    if !cls.is_red(w) {
                        return Err(format!("component is not maximal: {w} is not red"));
                    }
                    reds.insert(w);
                }
            }
            if reds.into_iter().collect::<Vec<_>>() != c.reds {
                return Err("listed reds differ from the red neighbors".into());
            }
            if c.reds.len() as u64 <= red_neighbor_bound(c.k, c.d) {
                return Err("red neighbor count within the bound".into());
            }
        }
        RejectReason::RedPathBound => {
            let set: BTreeSet<VertexId> = c.vertices.iter().copied().collect();
            if set.len() != c.vertices.len() {
                return Err("path repeats a vertex".into());
            }
            if c.vertices.windows(2).any(|w| !g.has_edge(w[0], w[1])) {
                return Err("consecutive path vertices are not adjacent".into());
            }
            let reds = c.vertices.iter().filter(|&&v| cls.is_red(v)).count();
            let need = if c.k >= 64 { u64::MAX } else { 1u64 << c.k };
            if (reds as u64) < need {
                return Err(format!("path has {reds} red vertices, need {need}"));
            }
        }
    }
    Ok(())
}
