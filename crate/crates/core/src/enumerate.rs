//! Small graphs: exhaustive enumeration up to isomorphism and seeded random
//! samples.

use std::collections::BTreeSet;

use rand::Rng;

use crate::graph::Graph;

/// Largest order [`connected_graphs`] accepts.
pub const MAX_ENUM_ORDER: usize = 8;

/// Adjacency rows as bitmasks.
fn rows(g: &Graph) -> Vec<u32> {
    let n = g.capacity();
    (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | (1 << u)))
        .collect()
}

/// Upper-triangle bit string of `rows` relabelled by `perm` (new -> old).
fn code(rows: &[u32], perm: &[usize]) -> u64 {
    let n = perm.len();
    let mut out = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            out <<= 1;
            if rows[perm[i]] >> perm[j] & 1 == 1 {
                out |= 1;
            }
        }
    }
    out
}

/// A canonical code: the largest code over labellings that list vertices by
/// a refined degree invariant, permuting freely only within ties.
fn canonical(rows: &[u32]) -> u64 {
    let n = rows.len();
    let deg: Vec<u32> = rows.iter().map(|r| r.count_ones()).collect();
    let inv: Vec<(u32, Vec<u32>)> = (0..n)
        .map(|v| {
            let mut ns: Vec<u32> = (0..n).filter(|&u| rows[v] >> u & 1 == 1).map(|u| deg[u]).collect();
            ns.sort_unstable();
            (deg[v], ns)
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| inv[a].cmp(&inv[b]));
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match classes.last_mut() {
            Some(c) if inv[c[0]] == inv[v] => c.push(v),
            _ => classes.push(vec![v]),
        }
    }
    let mut best = 0u64;
    let mut perm = Vec::with_capacity(n);
    walk(rows, &classes, 0, &mut perm, &mut best);
    best
}

fn walk(rows: &[u32], classes: &[Vec<usize>], ci: usize, perm: &mut Vec<usize>, best: &mut u64) {
    if ci == classes.len() {
        *best = (*best).max(code(rows, perm));
        return;
    }
    let mut items = classes[ci].clone();
    permute(&mut items, 0, &mut |p| {
        let len = perm.len();
        perm.extend_from_slice(p);
        walk(rows, classes, ci + 1, perm, best);
        perm.truncate(len);
    });
}

fn permute(items: &mut [usize], at: usize, f: &mut dyn FnMut(&[usize])) {
    if at == items.len() {
        f(items);
        return;
    }
    for i in at..items.len() {
        items.swap(at, i);
        permute(items, at + 1, f);
        items.swap(at, i);
    }
}

/// All connected graphs on exactly `n` vertices, one per isomorphism class.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    assert!(n <= MAX_ENUM_ORDER, "enumeration is limited to {MAX_ENUM_ORDER} vertices");
    all_graphs(n)
        .into_iter()
        .filter(Graph::is_connected)
        .collect()
}

/// All graphs on exactly `n` vertices up to isomorphism, by extending each
/// class on `n - 1` vertices with a new vertex in every possible way.
fn all_graphs(n: usize) -> Vec<Graph> {
    if n == 0 {
        return vec![Graph::empty(0)];
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for g in all_graphs(n - 1) {
        let base: Vec<(usize, usize)> = g.edges().collect();
        for mask in 0u32..(1 << (n - 1)) {
            let mut edges = base.clone();
            edges.extend((0..n - 1).filter(|&u| mask >> u & 1 == 1).map(|u| (u, n - 1)));
            let h = Graph::from_edges(n, edges).expect("valid edges");
            if seen.insert(canonical(&rows(&h))) {
                out.push(h);
            }
        }
    }
    out
}

/// Connected graphs with `1..=max_n` vertices up to isomorphism.
pub fn connected_graphs_up_to(max_n: usize) -> Vec<Graph> {
    (1..=max_n).flat_map(connected_graphs).collect()
}

/// Erdős–Rényi graph `G(n, p)`.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).expect("valid edges")
}
