//! Exact exponential-time procedures used as ground truth.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::orders::TreeOrder;
use crate::sequences::{self, KdSequence, PortMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    /// Instances with more vertices are refused.
    pub max_vertices: usize,
    pub memoize: bool,
    /// Upper bound on search nodes before giving up.
    pub work_limit: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_vertices: 16,
            memoize: true,
            work_limit: 50_000_000,
        }
    }
}

impl OracleConfig {
    pub fn with_max_vertices(max_vertices: usize) -> Self {
        OracleConfig {
            max_vertices: max_vertices.max(1),
            ..OracleConfig::default()
        }
    }

    fn guard(&self, stage: &'static str, n: usize) -> Result<()> {
        if n > self.max_vertices {
            return Err(Error::resource(
                stage,
                format!("{n} vertices, guard is {}", self.max_vertices),
            ));
        }
        Ok(())
    }
}

/// Counts search nodes against a limit.
#[derive(Debug)]
pub struct Budget {
    stage: &'static str,
    used: u64,
    limit: u64,
}

impl Budget {
    pub fn new(stage: &'static str, limit: u64) -> Self {
        Budget { stage, used: 0, limit }
    }

    pub fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            return Err(Error::resource(self.stage, format!("more than {} search nodes", self.limit)));
        }
        Ok(())
    }

    pub fn used(&self) -> u64 {
        self.used
    }
}

/// Dense bitset view of a graph with at most 128 vertices.
struct Bits {
    adj: Vec<u128>,
}

impl Bits {
    fn new(g: &Graph) -> (Self, Vec<VertexId>) {
        let (h, ids) = g.compact();
        let adj = (0..h.num_vertices())
            .map(|v| h.neighbors(v).iter().fold(0u128, |m, &u| m | (1 << u)))
            .collect();
        (Bits { adj }, ids)
    }

    fn max_degree(&self, set: u128) -> usize {
        iter_bits(set)
            .map(|v| (self.adj[v] & set).count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    fn components(&self, set: u128) -> Vec<u128> {
        let mut rest = set;
        let mut out = Vec::new();
        while rest != 0 {
            let start = rest & rest.wrapping_neg();
            let mut comp = start;
            let mut frontier = start;
            while frontier != 0 {
                let mut next = 0;
                for v in iter_bits(frontier) {
                    next |= self.adj[v];
                }
                next &= set & !comp;
                comp |= next;
                frontier = next;
            }
            rest &= !comp;
            out.push(comp);
        }
        out
    }
}

fn iter_bits(mut set: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if set == 0 {
            None
        } else {
            let v = set.trailing_zeros() as usize;
            set &= set - 1;
            Some(v)
        }
    })
}

fn full_mask(n: usize) -> u128 {
    if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

/// `ed_d(g)` by the recursive definition, memoized on surviving vertex sets.
pub fn elim_distance_exact(g: &Graph, d: usize, cfg: &OracleConfig) -> Result<usize> {
    cfg.guard("elim_distance_exact", g.num_vertices())?;
    if g.num_vertices() > 128 {
        return Err(Error::resource("elim_distance_exact", "bitset keys hold at most 128 vertices"));
    }
    let (bits, _) = Bits::new(g);
    let mut memo = HashMap::new();
    let mut budget = Budget::new("elim_distance_exact", cfg.work_limit);
    ed_rec(&bits, full_mask(g.num_vertices()), d, cfg.memoize, &mut memo, &mut budget)
}

fn ed_rec(
    bits: &Bits,
    set: u128,
    d: usize,
    memoize: bool,
    memo: &mut HashMap<u128, usize>,
    budget: &mut Budget,
) -> Result<usize> {
    if bits.max_degree(set) <= d {
        return Ok(0);
    }
    if let Some(&v) = memo.get(&set) {
        return Ok(v);
    }
    budget.tick()?;
    let comps = bits.components(set);
    let value = if comps.len() > 1 {
        let mut best = 0;
        for c in comps {
            best = best.max(ed_rec(bits, c, d, memoize, memo, budget)?);
        }
        best
    } else {
        let mut best = usize::MAX;
        for v in iter_bits(set) {
            let sub = ed_rec(bits, set & !(1 << v), d, memoize, memo, budget)?;
            best = best.min(sub + 1);
            if best == 1 {
                break;
            }
        }
        best
    };
    if memoize {
        memo.insert(set, value);
    }
    Ok(value)
}

/// Treedepth counting deletions (edgeless graphs have treedepth 0), computed
/// as one less than the minimum height of a rooted forest whose closure
/// contains `g`.
pub fn treedepth(g: &Graph, cfg: &OracleConfig) -> Result<usize> {
    cfg.guard("treedepth", g.num_vertices())?;
    if g.num_vertices() > 128 {
        return Err(Error::resource("treedepth", "bitset keys hold at most 128 vertices"));
    }
    let (bits, _) = Bits::new(g);
    let mut memo = HashMap::new();
    let mut budget = Budget::new("treedepth", cfg.work_limit);
    let set = full_mask(g.num_vertices());
    let mut height = 0;
    for c in bits.components(set) {
        height = height.max(forest_height(&bits, c, &mut memo, &mut budget)?);
    }
    Ok(height.saturating_sub(1))
}

/// Minimum height (vertex count of the longest root-leaf path) of an
/// elimination tree for the connected set `set`.
fn forest_height(
    bits: &Bits,
    set: u128,
    memo: &mut HashMap<u128, usize>,
    budget: &mut Budget,
) -> Result<usize> {
    if set.count_ones() == 1 {
        return Ok(1);
    }
    if let Some(&h) = memo.get(&set) {
        return Ok(h);
    }
    budget.tick()?;
    let mut best = usize::MAX;
    for root in iter_bits(set) {
        let mut tallest = 0;
        for c in bits.components(set & !(1 << root)) {
            tallest = tallest.max(forest_height(bits, c, memo, budget)?);
            if tallest + 1 >= best {
                break;
            }
        }
        best = best.min(tallest + 1);
    }
    memo.insert(set, best);
    Ok(best)
}

/// `ed_d(g) <= k`, by a depth-bounded search over deletions.
pub fn member_exact(g: &Graph, k: usize, d: usize, cfg: &OracleConfig) -> Result<bool> {
    cfg.guard("member_exact", g.num_vertices())?;
    let mut budget = Budget::new("member_exact", cfg.work_limit);
    bounded_member(g, k, d, &mut budget)
}

/// Depth-bounded exact search without a vertex-count guard; the budget is
/// the only limit. Components are handled independently.
pub(crate) fn bounded_member(g: &Graph, k: usize, d: usize, budget: &mut Budget) -> Result<bool> {
    let mut memo = HashMap::new();
    for c in g.components() {
        let h = g.induced(&c)?;
        if !connected_member(&h, k, d, &mut memo, budget)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Candidate deletions for a connected graph that is not of degree `d`.
/// With one round left the deleted vertex must be in the closed
/// neighborhood of every vertex of degree above `d`.
fn candidates(h: &Graph, k: usize, d: usize) -> Vec<VertexId> {
    if k != 1 {
        return h.vertices().collect();
    }
    let mut cand: Option<BTreeSet<VertexId>> = None;
    for v in h.vertices().filter(|&v| h.degree(v) > d) {
        let mut closed: BTreeSet<VertexId> = h.neighbors(v).iter().copied().collect();
        closed.insert(v);
        cand = Some(match cand {
            None => closed,
            Some(c) => c.intersection(&closed).copied().collect(),
        });
        if cand.as_ref().is_some_and(BTreeSet::is_empty) {
            break;
        }
    }
    cand.unwrap_or_default().into_iter().collect()
}

fn connected_member(
    h: &Graph,
    k: usize,
    d: usize,
    memo: &mut HashMap<(Vec<VertexId>, usize), bool>,
    budget: &mut Budget,
) -> Result<bool> {
    if h.max_degree() <= d {
        return Ok(true);
    }
    if k == 0 {
        return Ok(false);
    }
    let key = (h.vertices().collect::<Vec<_>>(), k);
    if let Some(&r) = memo.get(&key) {
        return Ok(r);
    }
    budget.tick()?;
    let mut found = false;
    'outer: for v in candidates(h, k, d) {
        let rest = h.delete(&[v])?;
        for c in rest.components() {
            let sub = rest.induced(&c)?;
            if !connected_member(&sub, k - 1, d, memo, budget)? {
                continue 'outer;
            }
        }
        found = true;
        break;
    }
    memo.insert(key, found);
    Ok(found)
}

/// An elimination order to degree `d` of depth at most `k`, or `None` if
/// the graph is not in the class. Deletions are tried in ascending id.
pub fn synthesize_order(
    g: &Graph,
    k: usize,
    d: usize,
    cfg: &OracleConfig,
) -> Result<Option<TreeOrder>> {
    cfg.guard("synthesize_order", g.num_vertices())?;
    let mut budget = Budget::new("synthesize_order", cfg.work_limit);
    let mut memo = HashMap::new();
    let mut order = TreeOrder::new();
    for c in g.components() {
        let h = g.induced(&c)?;
        if !place(&h, k, d, None, &mut order, &mut memo, &mut budget)? {
            return Ok(None);
        }
    }
    Ok(Some(order))
}

fn place(
    h: &Graph,
    k: usize,
    d: usize,
    parent: Option<VertexId>,
    order: &mut TreeOrder,
    memo: &mut HashMap<(Vec<VertexId>, usize), bool>,
    budget: &mut Budget,
) -> Result<bool> {
    if h.max_degree() <= d {
        for v in h.vertices() {
            order.set_parent(v, parent);
        }
        return Ok(true);
    }
    if !connected_member(h, k, d, memo, budget)? {
        return Ok(false);
    }
    for v in candidates(h, k, d) {
        let rest = h.delete(&[v])?;
        let comps: Vec<Graph> = rest
            .components()
            .iter()
            .map(|c| rest.induced(c))
            .collect::<Result<_>>()?;
        let mut ok = true;
        for c in &comps {
            if !connected_member(c, k - 1, d, memo, budget)? {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        order.set_parent(v, parent);
        for c in &comps {
            let placed = place(c, k - 1, d, Some(v), order, memo, budget)?;
            debug_assert!(placed);
        }
        return Ok(true);
    }
    Ok(false)
}

/// Whether `h` with the given ports satisfies `s` with elimination to
/// degree `d`, by exhaustive search over
/// canonical elimination orders followed by a literal check of every
/// condition on each candidate.
pub fn sequence_satisfies_exact(
    h: &Graph,
    ports: &PortMap,
    s: &KdSequence,
    d: usize,
    cfg: &OracleConfig,
) -> Result<bool> {
    cfg.guard("sequence_satisfies_exact", h.num_vertices())?;
    Ok(sequences::search_witness(h, ports, s, d, cfg.work_limit)?.is_some())
}

/// Ports of the vertices of `h`, for callers that only have a red set.
pub fn ports_from_reds(g: &Graph, h: &[VertexId], reds: &[VertexId]) -> PortMap {
    let mut out: PortMap = BTreeMap::new();
    for &v in h {
        for &w in g.neighbors(v) {
            if let Ok(i) = reds.binary_search(&w) {
                out.entry(v).or_default().insert(i + 1);
            }
        }
    }
    out
}
