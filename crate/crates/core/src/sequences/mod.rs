//! `(k, d)`-sequences: connectivity patterns of a contracted component
//! across elimination rounds, the extended adjacency they induce, and
//! satisfaction checking.

mod label;
mod partition;
pub mod pattern;
mod search;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::dsu::Dsu;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

pub use label::{case_split, satisfies, CaseSplit, Labeler, SatisfyOutcome};
pub use partition::Partition;
pub use search::{search_witness, verify_witness};

/// Port indices (1-based) of each ported vertex.
pub type PortMap = BTreeMap<VertexId, BTreeSet<usize>>;

/// One triple `(P_i, L_i, D_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Level {
    /// Internal grouping of ports.
    pub p: Partition,
    /// Grouping of ports through the rest of the graph.
    pub l: Partition,
    /// Ports whose red vertex is already deleted.
    pub d: BTreeSet<usize>,
}

impl Level {
    pub fn new(p: Partition, l: Partition, d: impl IntoIterator<Item = usize>) -> Self {
        Level {
            p,
            l,
            d: d.into_iter().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct KdSequence {
    pub p: usize,
    pub levels: Vec<Level>,
}

impl KdSequence {
    pub fn new(p: usize, levels: Vec<Level>) -> Self {
        KdSequence { p, levels }
    }

    pub fn empty(p: usize) -> Self {
        KdSequence { p, levels: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Level `i`, 1-based.
    pub fn level(&self, i: usize) -> Option<&Level> {
        i.checked_sub(1).and_then(|i| self.levels.get(i))
    }

    /// Parses one level per line: `P=1,2|3 L=1,2,3 D=3`. Blank lines and
    /// `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut levels = Vec::new();
        let mut p = None;
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: no + 1, msg };
            let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
            for tok in line.split_whitespace() {
                let (key, val) = tok
                    .split_once('=')
                    .ok_or_else(|| err(format!("expected KEY=VALUE, got {tok:?}")))?;
                if fields.insert(key, val).is_some() {
                    return Err(err(format!("duplicate field {key}")));
                }
            }
            let get = |key: &str| fields.get(key).copied().unwrap_or("");
            if let Some(key) = fields.keys().find(|k| !matches!(**k, "P" | "L" | "D")) {
                return Err(err(format!("unknown field {key}")));
            }
            let pp = Partition::parse(get("P")).map_err(|e| err(e.to_string()))?;
            let ll = Partition::parse(get("L")).map_err(|e| err(e.to_string()))?;
            if pp.ground() != ll.ground() {
                return Err(err("P and L cover different index sets".into()));
            }
            let mut dd = BTreeSet::new();
            for item in get("D").split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let j: usize = item.parse().map_err(|_| err(format!("bad index {item:?}")))?;
                if j == 0 || j > pp.ground() {
                    return Err(err(format!("deleted index {j} out of range")));
                }
                dd.insert(j);
            }
            match p {
                None => p = Some(pp.ground()),
                Some(q) if q != pp.ground() => {
                    return Err(err(format!("level covers {} indices, expected {q}", pp.ground())))
                }
                _ => {}
            }
            levels.push(Level { p: pp, l: ll, d: dd });
        }
        Ok(KdSequence {
            p: p.unwrap_or(0),
            levels,
        })
    }

    /// Appends a level, returning the longer sequence.
    pub fn extended(&self, level: Level) -> Self {
        let mut s = self.clone();
        s.levels.push(level);
        s
    }
}

impl fmt::Display for KdSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for lvl in &self.levels {
            let d: Vec<String> = lvl.d.iter().map(usize::to_string).collect();
            writeln!(f, "P={} L={} D={}", lvl.p, lvl.l, d.join(","))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SequenceReport {
    pub valid: bool,
    pub violations: Vec<String>,
}

/// Well-formedness: length at most `k`, refinement chains for `P` and `L`,
/// monotone `D`, and deleted indices isolated in `L`.
pub fn validate_sequence(s: &KdSequence, k: usize) -> SequenceReport {
    let mut violations = Vec::new();
    if s.len() > k {
        violations.push(format!("{} levels, at most {k} allowed", s.len()));
    }
    for (idx, lvl) in s.levels.iter().enumerate() {
        let i = idx + 1;
        if lvl.p.ground() != s.p || lvl.l.ground() != s.p {
            violations.push(format!("level {i}: partitions do not cover 1..={}", s.p));
            continue;
        }
        if let Some(j) = lvl.d.iter().find(|&&j| j == 0 || j > s.p) {
            violations.push(format!("level {i}: deleted index {j} out of range"));
        }
        for &j in &lvl.d {
            if !lvl.l.isolated(j) {
                violations.push(format!("level {i}: deleted index {j} is grouped in L"));
            }
        }
        if idx > 0 {
            let prev = &s.levels[idx - 1];
            if prev.p.ground() == s.p && prev.l.ground() == s.p {
                if !lvl.p.refines(&prev.p).unwrap_or(false) {
                    violations.push(format!("level {i}: P does not refine the previous P"));
                }
                if !lvl.l.refines(&prev.l).unwrap_or(false) {
                    violations.push(format!("level {i}: L does not refine the previous L"));
                }
            }
            if !prev.d.is_subset(&lvl.d) {
                violations.push(format!("level {i}: D does not contain the previous D"));
            }
        }
    }
    SequenceReport {
        valid: violations.is_empty(),
        violations,
    }
}

/// A component of `G - R` with its port markers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortedComponent {
    pub graph: Graph,
    pub ports: PortMap,
}

impl PortedComponent {
    pub fn new(graph: Graph, ports: PortMap) -> Result<Self> {
        for &v in ports.keys() {
            if !graph.contains(v) {
                return Err(Error::UnknownVertex(v));
            }
        }
        Ok(PortedComponent { graph, ports })
    }

    /// Largest port index in use.
    pub fn max_port(&self) -> usize {
        self.ports.values().flat_map(|s| s.iter().copied()).max().unwrap_or(0)
    }

    pub fn check_ports(&self, p: usize) -> Result<()> {
        match self.max_port() {
            m if m > p => Err(Error::InvalidSequence(format!(
                "port index {m} exceeds the sequence's {p} indices"
            ))),
            _ => Ok(()),
        }
    }
}

/// Components of `within` under the extended adjacency of `level`: graph
/// edges, a shared port `j` with `j ∉ D`, or ports grouped in `L`. With no
/// level only graph edges count.
pub fn extended_components(
    g: &Graph,
    ports: &PortMap,
    level: Option<&Level>,
    within: &[VertexId],
) -> Vec<Vec<VertexId>> {
    let mut dsu = Dsu::new(within.len());
    let pos: BTreeMap<VertexId, usize> = within.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    for (i, &v) in within.iter().enumerate() {
        for w in g.neighbors(v) {
            if let Some(&j) = pos.get(w) {
                dsu.union(i, j);
            }
        }
    }
    if let Some(lvl) = level {
        // Representative member for every live port and every L-block.
        let mut by_port: BTreeMap<usize, usize> = BTreeMap::new();
        let mut by_block: BTreeMap<usize, usize> = BTreeMap::new();
        for (i, &v) in within.iter().enumerate() {
            let Some(js) = ports.get(&v) else { continue };
            for &j in js {
                if !lvl.d.contains(&j) {
                    match by_port.get(&j) {
                        Some(&r) => {
                            dsu.union(r, i);
                        }
                        None => {
                            by_port.insert(j, i);
                        }
                    }
                }
                if let Some(b) = lvl.l.block_of(j) {
                    if lvl.l.blocks()[b].len() > 1 {
                        match by_block.get(&b) {
                            Some(&r) => {
                                dsu.union(r, i);
                            }
                            None => {
                                by_block.insert(b, i);
                            }
                        }
                    }
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
    for (i, &v) in within.iter().enumerate() {
        groups.entry(dsu.find(i)).or_default().push(v);
    }
    let mut out: Vec<Vec<VertexId>> = groups.into_values().collect();
    out.sort();
    out
}

/// Whether `y` is reachable from `x` in `graph - deleted` under the
/// extended adjacency of level `i` (1-based; `i = 0` means graph edges
/// only).
pub fn conn_extended(
    pc: &PortedComponent,
    s: &KdSequence,
    i: usize,
    x: VertexId,
    y: VertexId,
    deleted: &BTreeSet<VertexId>,
) -> Result<bool> {
    if i > s.len() {
        return Err(Error::Precondition(format!("level {i} out of range 0..={}", s.len())));
    }
    for v in [x, y] {
        if !pc.graph.contains(v) {
            return Err(Error::UnknownVertex(v));
        }
        if deleted.contains(&v) {
            return Err(Error::Precondition(format!("vertex {v} is deleted")));
        }
    }
    let within: Vec<VertexId> = pc.graph.vertices().filter(|v| !deleted.contains(v)).collect();
    let comps = extended_components(&pc.graph, &pc.ports, s.level(i), &within);
    Ok(comps.iter().any(|c| c.contains(&x) && c.contains(&y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lvl(p: &str, l: &str, d: &[usize]) -> Level {
        Level::new(
            Partition::parse(p).unwrap(),
            Partition::parse(l).unwrap(),
            d.iter().copied(),
        )
    }

    #[test]
    fn validation_examples() {
        let ok = KdSequence::new(3, vec![lvl("1,2,3", "1,2,3", &[]), lvl("1|2|3", "1,2|3", &[3])]);
        assert!(validate_sequence(&ok, 2).valid);
        assert!(!validate_sequence(&ok, 1).valid);
        let grouped_deleted = KdSequence::new(3, vec![lvl("1,2,3", "1,2,3", &[3])]);
        assert!(!validate_sequence(&grouped_deleted, 3).valid);
        let coarsening = KdSequence::new(2, vec![lvl("1|2", "1|2", &[]), lvl("1,2", "1|2", &[])]);
        assert!(!validate_sequence(&coarsening, 3).valid);
        let shrinking_d = KdSequence::new(2, vec![lvl("1|2", "1|2", &[2]), lvl("1|2", "1|2", &[])]);
        assert!(!validate_sequence(&shrinking_d, 3).valid);
    }

    #[test]
    fn parse_and_display() {
        let s = KdSequence::parse("# two levels\nP=1,2,3 L=1,2,3 D=\nP=1|2|3 L=1,2|3 D=3\n").unwrap();
        assert_eq!(s.p, 3);
        assert_eq!(s.len(), 2);
        assert_eq!(KdSequence::parse(&s.to_string()).unwrap(), s);
        assert!(KdSequence::parse("P=1,2 L=1 D=").is_err());
        assert!(KdSequence::parse("P=1,2 L=1,2 D=5").is_err());
        assert!(KdSequence::parse("Q=1").is_err());
    }

    #[test]
    fn extended_connectivity_examples() {
        let g = Graph::empty(2);
        let ports: PortMap = [(0, BTreeSet::from([1])), (1, BTreeSet::from([1]))].into();
        let pc = PortedComponent::new(g, ports).unwrap();
        let live = KdSequence::new(1, vec![lvl("1", "1", &[])]);
        assert!(conn_extended(&pc, &live, 1, 0, 1, &BTreeSet::new()).unwrap());
        let dead = KdSequence::new(1, vec![lvl("1", "1", &[1])]);
        assert!(!conn_extended(&pc, &dead, 1, 0, 1, &BTreeSet::new()).unwrap());
        assert!(!conn_extended(&pc, &live, 0, 0, 1, &BTreeSet::new()).unwrap());
        assert!(conn_extended(&pc, &live, 2, 0, 1, &BTreeSet::new()).is_err());
    }

    #[test]
    fn grouping_in_l_connects_distinct_ports() {
        let g = Graph::empty(2);
        let ports: PortMap = [(0, BTreeSet::from([1])), (1, BTreeSet::from([2]))].into();
        let pc = PortedComponent::new(g, ports).unwrap();
        let split = KdSequence::new(2, vec![lvl("1|2", "1|2", &[1, 2])]);
        assert!(!conn_extended(&pc, &split, 1, 0, 1, &BTreeSet::new()).unwrap());
        let grouped = KdSequence::new(2, vec![lvl("1|2", "1,2", &[])]);
        assert!(conn_extended(&pc, &grouped, 1, 0, 1, &BTreeSet::new()).unwrap());
    }

    fn arb_component() -> impl Strategy<Value = (Graph, PortMap)> {
        (2usize..7).prop_flat_map(|n| {
            (
                proptest::collection::vec(any::<bool>(), n * (n - 1) / 2),
                proptest::collection::vec(proptest::collection::btree_set(1usize..4, 0..2), n),
            )
                .prop_map(move |(bits, ps)| {
                    let mut edges = Vec::new();
                    let mut it = bits.into_iter();
                    for u in 0..n {
                        for v in u + 1..n {
                            if it.next().unwrap() {
                                edges.push((u, v));
                            }
                        }
                    }
                    let ports = ps
                        .into_iter()
                        .enumerate()
                        .filter(|(_, s)| !s.is_empty())
                        .collect();
                    (Graph::from_edges(n, edges).unwrap(), ports)
                })
        })
    }

    proptest! {
        #[test]
        fn degenerates_to_plain_connectivity((g, _ports) in arb_component()) {
            let within: Vec<VertexId> = g.vertices().collect();
            let level = Level::new(Partition::discrete(3), Partition::discrete(3), []);
            let ext = extended_components(&g, &PortMap::new(), Some(&level), &within);
            prop_assert_eq!(ext, g.components());
        }

        #[test]
        fn coarsening_l_never_disconnects(
            (g, ports) in arb_component(),
            fine in any::<prop::sample::Index>(),
            coarse in any::<prop::sample::Index>(),
        ) {
            let all = Partition::all(3);
            let a = fine.get(&all).clone();
            let b = coarse.get(&all).clone();
            prop_assume!(a.refines(&b).unwrap());
            let pc = PortedComponent::new(g.clone(), ports).unwrap();
            let sa = KdSequence::new(3, vec![Level::new(Partition::discrete(3), a, [])]);
            let sb = KdSequence::new(3, vec![Level::new(Partition::discrete(3), b, [])]);
            let none = BTreeSet::new();
            for x in g.vertices() {
                for y in g.vertices() {
                    if conn_extended(&pc, &sa, 1, x, y, &none).unwrap() {
                        prop_assert!(conn_extended(&pc, &sb, 1, x, y, &none).unwrap());
                    }
                }
            }
        }
    }
}
