use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::oracle::Budget;
use crate::orders::{check_elimination_to_degree, Chains, TreeOrder};

use super::{extended_components, validate_sequence, KdSequence, PortMap};

/// Violated conditions of `o` as a witness that `h` satisfies `s` with
/// elimination to degree `d`. Empty means `o` is a witness.
///
/// For an incomparable pair `b, b'` that is not a pair of maximal vertices
/// with equal predecessors, the binding separator is the shallowest `v` on
/// `b`'s chain with `v ≰ b'`; at depth `t` it is checked against level
/// `t + 1`, which is the weakest level it can be paired with because `D`
/// only grows and `L` only refines.
pub fn verify_witness(
    h: &Graph,
    ports: &PortMap,
    s: &KdSequence,
    d: usize,
    o: &TreeOrder,
) -> Result<Vec<String>> {
    let report = check_elimination_to_degree(h, o, d)?;
    let mut out: Vec<String> = report
        .violations
        .iter()
        .map(|(v, why)| format!("vertex {v}: {why}"))
        .collect();
    let ell = s.len();
    if report.depth > ell {
        out.push(format!("depth {} exceeds {ell}", report.depth));
    }
    if !out.is_empty() {
        return Ok(out);
    }
    let ch = Chains::new(o, h.capacity());
    let ported: Vec<(VertexId, &BTreeSet<usize>)> =
        ports.iter().filter(|(_, js)| !js.is_empty()).map(|(&v, js)| (v, js)).collect();
    for &(b, jb) in &ported {
        for &(b2, jb2) in &ported {
            if b == b2 || ch.comparable(b, b2) {
                continue;
            }
            if ch.maximal[b] && ch.maximal[b2] && ch.up[b] == ch.up[b2] {
                continue;
            }
            let mut chain = ch.up[b].clone();
            chain.push(b);
            let t = chain
                .iter()
                .position(|&v| !ch.leq(v, b2))
                .expect("b is not below b'");
            let Some(level) = s.level(t + 1) else { continue };
            for &j in jb.intersection(jb2) {
                if !level.d.contains(&j) {
                    out.push(format!(
                        "{b} and {b2} share live port {j} but {} at depth {t} separates them",
                        chain[t]
                    ));
                }
            }
            for &j1 in jb {
                for &j2 in jb2 {
                    if j1 != j2 && level.l.grouped(j1, j2) {
                        out.push(format!(
                            "ports {j1},{j2} grouped in L_{} but {} at depth {t} separates {b} and {b2}",
                            t + 1,
                            chain[t]
                        ));
                    }
                }
            }
        }
    }
    for (idx, level) in s.levels.iter().enumerate() {
        let i = idx + 1;
        let allowed: Vec<VertexId> = h
            .vertices()
            .filter(|&v| ch.depth(v) >= i || ch.maximal[v])
            .collect();
        let sub = h.induced(&allowed)?;
        for comp in sub.components() {
            let js: BTreeSet<usize> = comp
                .iter()
                .filter_map(|v| ports.get(v))
                .flat_map(|s| s.iter().copied())
                .collect();
            if let Some(&first) = js.iter().next() {
                if let Some(&other) = js.iter().find(|&&j| !level.p.grouped(first, j)) {
                    out.push(format!("ports {first},{other} connected at depth >= {i} but split in P_{i}"));
                }
            }
        }
    }
    Ok(out)
}

struct Task {
    comp: Vec<VertexId>,
    parent: Option<VertexId>,
    depth: usize,
}

struct Search<'a> {
    h: &'a Graph,
    ports: &'a PortMap,
    s: &'a KdSequence,
    d: usize,
    member: Vec<bool>,
    budget: Budget,
}

impl Search<'_> {
    fn max_degree_within(&mut self, comp: &[VertexId]) -> usize {
        for &v in comp {
            self.member[v] = true;
        }
        let deg = comp
            .iter()
            .map(|&v| self.h.neighbors(v).iter().filter(|&&u| self.member[u]).count())
            .max()
            .unwrap_or(0);
        for &v in comp {
            self.member[v] = false;
        }
        deg
    }

    /// Roots worth trying in `comp`. When the rest must stop right away
    /// the root has to touch every vertex of degree above `d`.
    fn roots(&mut self, comp: &[VertexId], last: bool) -> Vec<VertexId> {
        if !last {
            return comp.to_vec();
        }
        for &v in comp {
            self.member[v] = true;
        }
        let mut cand: Option<BTreeSet<VertexId>> = None;
        for &v in comp {
            let nb: Vec<VertexId> =
                self.h.neighbors(v).iter().copied().filter(|&u| self.member[u]).collect();
            if nb.len() > self.d {
                let mut closed: BTreeSet<VertexId> = nb.into_iter().collect();
                closed.insert(v);
                cand = Some(match cand {
                    None => closed,
                    Some(c) => c.intersection(&closed).copied().collect(),
                });
            }
        }
        for &v in comp {
            self.member[v] = false;
        }
        match cand {
            None => comp.to_vec(),
            Some(c) => c.into_iter().collect(),
        }
    }

    fn split(&self, rest: &[VertexId], depth: usize) -> Vec<Vec<VertexId>> {
        // Choices at `depth` are made per extended component of level depth+1.
        let level = if depth < self.s.len() { self.s.level(depth + 1) } else { None };
        extended_components(self.h, self.ports, level, rest)
    }

    fn explore(&mut self, tasks: &mut Vec<Task>, order: &mut TreeOrder) -> Result<bool> {
        self.budget.tick()?;
        let Some(task) = tasks.pop() else {
            return Ok(verify_witness(self.h, self.ports, self.s, self.d, order)?.is_empty());
        };
        if self.max_degree_within(&task.comp) <= self.d {
            for &v in &task.comp {
                order.set_parent(v, task.parent);
            }
            if self.explore(tasks, order)? {
                return Ok(true);
            }
            for &v in &task.comp {
                order.remove(v);
            }
        }
        let ell = self.s.len();
        if task.depth < ell {
            let last = task.depth + 1 == ell;
            for y in self.roots(&task.comp, last) {
                order.set_parent(y, task.parent);
                let rest: Vec<VertexId> = task.comp.iter().copied().filter(|&v| v != y).collect();
                let parts = self.split(&rest, task.depth + 1);
                let pushed = parts.len();
                for comp in parts {
                    tasks.push(Task {
                        comp,
                        parent: Some(y),
                        depth: task.depth + 1,
                    });
                }
                let found = self.explore(tasks, order)?;
                for _ in 0..pushed {
                    tasks.pop();
                }
                if found {
                    return Ok(true);
                }
                order.remove(y);
            }
        }
        tasks.push(task);
        Ok(false)
    }
}

/// Searches canonical elimination orders of depth at most `ℓ` for a witness
/// that `h` satisfies `s`. At every depth each extended component either
/// stops (its vertices become maximal) or picks one root.
pub fn search_witness(
    h: &Graph,
    ports: &PortMap,
    s: &KdSequence,
    d: usize,
    work_limit: u64,
) -> Result<Option<TreeOrder>> {
    let report = validate_sequence(s, s.len());
    if !report.valid {
        return Err(Error::InvalidSequence(report.violations.join("; ")));
    }
    if let Some(j) = ports.values().flat_map(|js| js.iter()).find(|&&j| j == 0 || j > s.p) {
        return Err(Error::InvalidSequence(format!("port index {j} outside 1..={}", s.p)));
    }
    let mut search = Search {
        h,
        ports,
        s,
        d,
        member: vec![false; h.capacity()],
        budget: Budget::new("sequence search", work_limit),
    };
    let all: Vec<VertexId> = h.vertices().collect();
    let mut tasks: Vec<Task> = search
        .split(&all, 0)
        .into_iter()
        .map(|comp| Task {
            comp,
            parent: None,
            depth: 0,
        })
        .collect();
    let mut order = TreeOrder::new();
    if search.explore(&mut tasks, &mut order)? {
        Ok(Some(order))
    } else {
        Ok(None)
    }
}
