#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use elimdist::graph::{Graph, VertexId};
use elimdist::orders::TreeOrder;
use elimdist::sequences::{KdSequence, Partition, PortMap, PortedComponent};

// The worked component with three ports.
//   t2 t3 t4 = 0 1 2 (path, port 1)
//   a = 3, l1 l2 l3 = 4 5 6, c = 7 (a and the l's carry port 2, c sees all four)
//   b = 8, r1 r2 r3 = 9 10 11, d = 12 (b and the r's carry port 3, d sees all four)
//   a - t2 and b - t4 join the sides to the path.
pub const A: VertexId = 3;
pub const B: VertexId = 8;
pub const C: VertexId = 7;
pub const D: VertexId = 12;

pub fn fig_component() -> PortedComponent {
    let mut edges = vec![(0, 1), (1, 2), (A, 0), (B, 2)];
    for v in [A, 4, 5, 6] {
        edges.push((v, C));
    }
    for v in [B, 9, 10, 11] {
        edges.push((v, D));
    }
    let g = Graph::from_edges(13, edges).unwrap();
    let mut ports: PortMap = BTreeMap::new();
    for (j, vs) in [(1, vec![0, 1, 2]), (2, vec![A, 4, 5, 6]), (3, vec![B, 9, 10, 11])] {
        for v in vs {
            ports.insert(v, BTreeSet::from([j]));
        }
    }
    PortedComponent::new(g, ports).unwrap()
}

/// Chain a < b < c < d with every other vertex directly above d.
pub fn order_one() -> TreeOrder {
    let mut o = TreeOrder::from_parents([(A, None), (B, Some(A)), (C, Some(B)), (D, Some(C))]);
    for v in [0, 1, 2, 4, 5, 6, 9, 10, 11] {
        o.add(v, Some(D));
    }
    o
}

/// a < b, then c and d side by side; the path and the l's above c.
pub fn order_two() -> TreeOrder {
    let mut o = TreeOrder::from_parents([(A, None), (B, Some(A)), (C, Some(B)), (D, Some(B))]);
    for v in [0, 1, 2, 4, 5, 6] {
        o.add(v, Some(C));
    }
    for v in [9, 10, 11] {
        o.add(v, Some(D));
    }
    o
}

const TOP: &str = "P=1,2,3 L=1,2,3 D=\n";
const SPLIT: &str = "P=1|2|3 L=1,2,3 D=\n";

pub fn s1() -> KdSequence {
    KdSequence::parse(&format!("{TOP}{SPLIT}{SPLIT}{SPLIT}")).unwrap()
}

pub fn s2() -> KdSequence {
    KdSequence::parse(&format!("{TOP}{SPLIT}{SPLIT}")).unwrap()
}

pub fn s3() -> KdSequence {
    KdSequence::parse(&format!("{TOP}{SPLIT}P=1|2|3 L=1,2|3 D=3\n")).unwrap()
}

/// The component inside a full graph: three red vertices (the ports), each
/// given `stubs` pendant leaves so that its degree exceeds `k + d`.
/// Returns the graph and the red vertex ids in port order.
pub fn fig_full_graph(stubs: usize) -> (Graph, Vec<VertexId>) {
    let pc = fig_component();
    let mut edges: Vec<(VertexId, VertexId)> = pc.graph.edges().collect();
    let reds = vec![13, 14, 15];
    for (&v, js) in &pc.ports {
        for &j in js {
            edges.push((v, reds[j - 1]));
        }
    }
    let mut next = 16;
    for &r in &reds {
        for _ in 0..stubs {
            edges.push((r, next));
            next += 1;
        }
    }
    (Graph::from_edges(next, edges).unwrap(), reds)
}

/// Every well-formed sequence over `p` ports with `1..=max_len` levels.
pub fn all_sequences(p: usize, max_len: usize) -> Vec<KdSequence> {
    let parts = Partition::all(p);
    let subsets: Vec<BTreeSet<usize>> = (0u32..1 << p)
        .map(|m| (1..=p).filter(|j| m >> (j - 1) & 1 == 1).collect())
        .collect();
    let mut levels = Vec::new();
    for pp in &parts {
        for ll in &parts {
            for dd in &subsets {
                levels.push(elimdist::sequences::Level::new(pp.clone(), ll.clone(), dd.iter().copied()));
            }
        }
    }
    let mut frontier = vec![KdSequence::empty(p)];
    let mut out = Vec::new();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            for lvl in &levels {
                let t = s.extended(lvl.clone());
                if elimdist::sequences::validate_sequence(&t, max_len).valid {
                    next.push(t);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Treedepth in the convention where edgeless graphs have depth 0, by the
/// textbook recursion over vertex subsets (bitmask memo, up to 16 vertices).
pub fn treedepth_reference(g: &Graph) -> usize {
    let (h, _) = g.compact();
    let n = h.num_vertices();
    assert!(n <= 16);
    let adj: Vec<u32> = (0..n).map(|v| h.neighbors(v).iter().fold(0, |m, &u| m | 1 << u)).collect();
    let mut memo = std::collections::HashMap::new();
    fn comps(adj: &[u32], set: u32) -> Vec<u32> {
        let mut rest = set;
        let mut out = vec![];
        while rest != 0 {
            let mut c = rest & rest.wrapping_neg();
            loop {
                let mut grow = c;
                for v in 0..adj.len() {
                    if c >> v & 1 == 1 {
                        grow |= adj[v] & set;
                    }
                }
                if grow == c {
                    break;
                }
                c = grow;
            }
            rest &= !c;
            out.push(c);
        }
        out
    }
    // Height of an optimal elimination forest, counted in vertices.
    fn height(adj: &[u32], set: u32, memo: &mut std::collections::HashMap<u32, usize>) -> usize {
        if set == 0 {
            return 0;
        }
        if let Some(&h) = memo.get(&set) {
            return h;
        }
        let cs = comps(adj, set);
        let h = if cs.len() > 1 {
            cs.iter().map(|&c| height(adj, c, memo)).max().unwrap()
        } else {
            (0..adj.len())
                .filter(|v| set >> v & 1 == 1)
                .map(|v| 1 + height(adj, set & !(1 << v), memo))
                .min()
                .unwrap()
        };
        memo.insert(set, h);
        h
    }
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    height(&adj, full, &mut memo).saturating_sub(1)
}
