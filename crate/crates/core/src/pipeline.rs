//! The structural decision procedure.
//!
//! * Maximum degree at most `d`: trivially in the class.
//! * Maximum degree at most `k + d`: Case 1 count, irrelevant-vertex loop on
//!   a grid minor model (when a provider has one), exact search on the rest.
//! * Otherwise: contract `G - R`, prune by the red-neighbor and red-path
//!   bounds, then run a round-synchronous search over the quotient.
//!
//! The quotient search deletes one vertex per component of the current graph
//! per round. Red vertices are tracked explicitly; every contracted
//! component `H` is tracked through its interface patterns
//! ([`crate::sequences::pattern`]), so the search never looks inside `H`
//! beyond the belief sets of its tracker.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::dsu::Dsu;
use crate::error::{Error, Result};
use crate::graph::{contract, Graph, QuotientGraph, VertexId};
use crate::grid_minor::{
    high_degree_count, reduce_small_degree, IrrelevantDeletion, ModelProvider, NoModel,
    ReductionStop,
};
use crate::high_degree_threshold;
use crate::oracle::{bounded_member, synthesize_order, Budget, OracleConfig};
use crate::orders::TreeOrder;
use crate::reductions::{
    quotient_depth_bound, quotient_dfs_order, reject_by_red_neighbors, Certificate, PruneOutcome,
    QuotientDfs,
};
use crate::sequences::pattern::{Belief, Outcome, RoundInput, Tracker};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    /// Maximum degree already at most `d`.
    Trivial,
    SmallDegree,
    RedNeighborBound,
    RedPathBound,
    QuotientSearch,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum TraceStep {
    Classified { max_degree: usize, reds: usize },
    Case1 { high_degree: usize, threshold: u64 },
    Irrelevant(IrrelevantDeletion),
    ReductionStopped { stop: ReductionStop, remaining_vertices: usize },
    ResidualExact { vertices: usize, member: bool },
    Contracted { reds: usize, components: usize },
    Rejected(Certificate),
    QuotientDfs { depth: usize, bound: u64 },
    QuotientSearch { states: u64, member: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub member: bool,
    pub k: usize,
    pub d: usize,
    pub stage: Stage,
    pub trace: Vec<TraceStep>,
    /// An elimination order to degree `d` of depth at most `k`, produced for
    /// small members.
    pub witness: Option<TreeOrder>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    /// Search nodes allowed per exact sub-search.
    pub work_limit: u64,
    /// Members with at most this many vertices get a witness order.
    pub witness_max_vertices: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            work_limit: 20_000_000,
            witness_max_vertices: 14,
        }
    }
}

/// Decides `ed_d(g) <= k` with default settings and no minor models.
pub fn solve(g: &Graph, k: usize, d: usize) -> Result<Decision> {
    solve_with(g, k, d, &mut NoModel, &SolverConfig::default())
}

pub fn solve_with(
    g: &Graph,
    k: usize,
    d: usize,
    provider: &mut dyn ModelProvider,
    cfg: &SolverConfig,
) -> Result<Decision> {
    let max_degree = g.max_degree();
    let mut decision = if max_degree <= d {
        Decision {
            member: true,
            k,
            d,
            stage: Stage::Trivial,
            trace: vec![TraceStep::Classified { max_degree, reds: 0 }],
            witness: None,
        }
    } else if max_degree <= k + d {
        solve_small_degree(g, k, d, provider, cfg)?
    } else {
        solve_quotient(g, k, d, cfg)?
    };
    if decision.member && g.num_vertices() <= cfg.witness_max_vertices {
        let ocfg = OracleConfig {
            max_vertices: cfg.witness_max_vertices,
            memoize: true,
            work_limit: cfg.work_limit,
        };
        match synthesize_order(g, k, d, &ocfg)? {
            Some(o) => decision.witness = Some(o),
            None => {
                return Err(Error::Internal(format!(
                    "pipeline accepted but no order of depth {k} to degree {d} exists"
                )))
            }
        }
    }
    Ok(decision)
}

/// The route for graphs of maximum degree at most `k + d`.
pub fn solve_small_degree(
    g: &Graph,
    k: usize,
    d: usize,
    provider: &mut dyn ModelProvider,
    cfg: &SolverConfig,
) -> Result<Decision> {
    let max_degree = g.max_degree();
    if max_degree > k + d {
        return Err(Error::Precondition(format!(
            "maximum degree {max_degree} exceeds k + d = {}",
            k + d
        )));
    }
    let mut trace = vec![TraceStep::Classified { max_degree, reds: 0 }];
    let threshold = high_degree_threshold(k, d);
    let high = high_degree_count(g, d);
    trace.push(TraceStep::Case1 {
        high_degree: high,
        threshold,
    });
    let reject = |trace| Decision {
        member: false,
        k,
        d,
        stage: Stage::SmallDegree,
        trace,
        witness: None,
    };
    if high as u64 > threshold {
        return Ok(reject(trace));
    }
    let red = reduce_small_degree(g, k, d, provider)?;
    trace.extend(red.deleted.iter().cloned().map(TraceStep::Irrelevant));
    trace.push(TraceStep::ReductionStopped {
        stop: red.stop,
        remaining_vertices: red.graph.num_vertices(),
    });
    if red.stop == ReductionStop::TooManyHighDegree {
        return Ok(reject(trace));
    }
    let mut budget = Budget::new("residual", cfg.work_limit);
    let member = bounded_member(&red.graph, k, d, &mut budget)?;
    trace.push(TraceStep::ResidualExact {
        vertices: red.graph.num_vertices(),
        member,
    });
    Ok(Decision {
        member,
        k,
        d,
        stage: Stage::SmallDegree,
        trace,
        witness: None,
    })
}

fn solve_quotient(g: &Graph, k: usize, d: usize, cfg: &SolverConfig) -> Result<Decision> {
    let q = contract(g, k, d);
    let mut trace = vec![
        TraceStep::Classified {
            max_degree: g.max_degree(),
            reds: q.reds.len(),
        },
        TraceStep::Contracted {
            reds: q.reds.len(),
            components: q.components.len(),
        },
    ];
    let rejected = |trace: Vec<TraceStep>, stage| Decision {
        member: false,
        k,
        d,
        stage,
        trace,
        witness: None,
    };
    if let PruneOutcome::Reject(c) = reject_by_red_neighbors(&q) {
        trace.push(TraceStep::Rejected(c));
        return Ok(rejected(trace, Stage::RedNeighborBound));
    }
    match quotient_dfs_order(g, &q) {
        QuotientDfs::Reject(c) => {
            trace.push(TraceStep::Rejected(c));
            return Ok(rejected(trace, Stage::RedPathBound));
        }
        QuotientDfs::Order { depth, .. } => trace.push(TraceStep::QuotientDfs {
            depth,
            bound: quotient_depth_bound(k),
        }),
    }
    let (member, states) = decide_quotient(g, &q, cfg.work_limit)?;
    trace.push(TraceStep::QuotientSearch { states, member });
    Ok(Decision {
        member,
        k,
        d,
        stage: Stage::QuotientSearch,
        trace,
        witness: None,
    })
}

/// Tracked part of one contracted component.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Part {
    h: usize,
    outcome: Outcome,
    belief: Belief,
}

/// Alive reds and tracked components before round `round` (1-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct SearchState {
    round: usize,
    alive: Vec<VertexId>,
    parts: Vec<Part>,
}

/// One component of the current graph: alive reds plus, for each tracked
/// part touching it, the ports of that part inside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GComponent {
    pub reds: Vec<VertexId>,
    /// Part position -> alive ports of that part in this component.
    pub parts: BTreeMap<usize, BTreeSet<usize>>,
}

struct Search<'a> {
    g: &'a Graph,
    q: &'a QuotientGraph,
    trackers: Vec<Tracker>,
    memo: HashMap<SearchState, bool>,
    budget: Budget,
}

/// Decides membership from the contracted graph. Returns the answer and the
/// number of search nodes used.
pub fn decide_quotient(g: &Graph, q: &QuotientGraph, work_limit: u64) -> Result<(bool, u64)> {
    let k = q.k;
    let mut s = Search {
        g,
        q,
        trackers: q.components.iter().map(|c| Tracker::new(g, c, q.d)).collect(),
        memo: HashMap::new(),
        budget: Budget::new("quotient_search", work_limit),
    };
    let mut parts = Vec::new();
    for (h, c) in q.components.iter().enumerate() {
        let all: BTreeSet<usize> = (1..=c.ports.len()).collect();
        match s.trackers[h].initial(&all, k, &mut s.budget)? {
            None => return Ok((false, s.budget.used())),
            Some((outcome, belief)) if !outcome.is_empty() => parts.push(Part { h, outcome, belief }),
            Some(_) => {}
        }
    }
    let start = SearchState {
        round: 1,
        alive: q.reds.clone(),
        parts,
    };
    let member = s.rec(start)?;
    Ok((member, s.budget.used()))
}

impl<'a> Search<'a> {
    fn port_red(&self, h: usize, j: usize) -> VertexId {
        self.q.components[h].ports[j - 1]
    }

    /// Components of the current graph described by `st`.
    fn next_components(&self, st: &SearchState) -> Vec<GComponent> {
        let r = st.alive.len();
        // Nodes: alive reds, then one node per (part, piece).
        let mut pieces = Vec::new();
        for (pi, p) in st.parts.iter().enumerate() {
            for e in &p.outcome {
                pieces.push((pi, e));
            }
        }
        let mut dsu = Dsu::new(r + pieces.len());
        for a in 0..r {
            for b in a + 1..r {
                if self.g.has_edge(st.alive[a], st.alive[b]) {
                    dsu.union(a, b);
                }
            }
        }
        for (x, &(pi, e)) in pieces.iter().enumerate() {
            for &j in e {
                let red = self.port_red(st.parts[pi].h, j);
                let a = st.alive.binary_search(&red).expect("hyperedge ports are alive");
                dsu.union(a, r + x);
            }
        }
        let mut comps: BTreeMap<usize, GComponent> = BTreeMap::new();
        for (a, &v) in st.alive.iter().enumerate() {
            let root = dsu.find(a);
            comps
                .entry(root)
                .or_insert_with(|| GComponent {
                    reds: vec![],
                    parts: BTreeMap::new(),
                })
                .reds
                .push(v);
        }
        for (x, &(pi, e)) in pieces.iter().enumerate() {
            let root = dsu.find(r + x);
            let c = comps.get_mut(&root).expect("pieces carry alive ports");
            c.parts.entry(pi).or_default().extend(e.iter().copied());
        }
        comps.into_values().collect()
    }

    /// Splits `st` into independent sub-states: components of the current
    /// graph linked through a shared contracted component stay together.
    fn clusters(&self, st: &SearchState, comps: &[GComponent]) -> Vec<SearchState> {
        let mut dsu = Dsu::new(comps.len());
        let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
        for (ci, c) in comps.iter().enumerate() {
            for &pi in c.parts.keys() {
                if let Some(&o) = owner.get(&pi) {
                    dsu.union(o, ci);
                } else {
                    owner.insert(pi, ci);
                }
            }
        }
        let mut groups: BTreeMap<usize, SearchState> = BTreeMap::new();
        for (ci, c) in comps.iter().enumerate() {
            let root = dsu.find(ci);
            let sub = groups.entry(root).or_insert_with(|| SearchState {
                round: st.round,
                alive: vec![],
                parts: vec![],
            });
            sub.alive.extend(c.reds.iter().copied());
        }
        for (pi, p) in st.parts.iter().enumerate() {
            let root = dsu.find(owner[&pi]);
            groups.get_mut(&root).expect("cluster exists").parts.push(p.clone());
        }
        groups
            .into_values()
            .map(|mut s| {
                s.alive.sort_unstable();
                s
            })
            .collect()
    }

    fn rec(&mut self, st: SearchState) -> Result<bool> {
        self.budget.tick()?;
        if st.alive.is_empty() {
            return Ok(true);
        }
        if st.round > self.q.k {
            return Ok(false);
        }
        if let Some(&r) = self.memo.get(&st) {
            return Ok(r);
        }
        let comps = self.next_components(&st);
        let clusters = self.clusters(&st, &comps);
        let result = if clusters.len() > 1 {
            let mut all = true;
            for c in clusters {
                if !self.rec(c)? {
                    all = false;
                    break;
                }
            }
            all
        } else {
            self.play_round(&st, &comps)?
        };
        self.memo.insert(st, result);
        Ok(result)
    }

    /// Tries every choice of deletion per component for one round.
    fn play_round(&mut self, st: &SearchState, comps: &[GComponent]) -> Result<bool> {
        // Options: Ok(red) deletes a red, Err(part) deletes inside a part.
        let options: Vec<Vec<std::result::Result<VertexId, usize>>> = comps
            .iter()
            .map(|c| {
                c.reds
                    .iter()
                    .map(|&v| Ok(v))
                    .chain(c.parts.keys().map(|&pi| Err(pi)))
                    .collect()
            })
            .collect();
        let mut pick = vec![0usize; comps.len()];
        loop {
            if self.try_assignment(st, comps, &options, &pick)? {
                return Ok(true);
            }
            let mut pos = 0;
            while pos < pick.len() {
                pick[pos] += 1;
                if pick[pos] < options[pos].len() {
                    break;
                }
                pick[pos] = 0;
                pos += 1;
            }
            if pos == pick.len() {
                return Ok(false);
            }
        }
    }

    fn try_assignment(
        &mut self,
        st: &SearchState,
        comps: &[GComponent],
        options: &[Vec<std::result::Result<VertexId, usize>>],
        pick: &[usize],
    ) -> Result<bool> {
        self.budget.tick()?;
        let mut deleted = BTreeSet::new();
        let mut deleting_parts = vec![BTreeSet::new(); comps.len()];
        for (ci, opts) in options.iter().enumerate() {
            match opts[pick[ci]] {
                Ok(v) => {
                    deleted.insert(v);
                }
                Err(pi) => {
                    deleting_parts[ci].insert(pi);
                }
            }
        }
        let alive_after: Vec<VertexId> =
            st.alive.iter().copied().filter(|v| !deleted.contains(v)).collect();
        let remaining_after = self.q.k - st.round;
        let mut successors: Vec<Vec<(Outcome, Belief)>> = Vec::new();
        for (pi, part) in st.parts.iter().enumerate() {
            let mut groups = Vec::new();
            let mut active = BTreeSet::new();
            for (ci, c) in comps.iter().enumerate() {
                if let Some(js) = c.parts.get(&pi) {
                    groups.push(js.clone());
                    if deleting_parts[ci].contains(&pi) {
                        active.extend(js.iter().copied());
                    }
                }
            }
            let alive_ports: BTreeSet<usize> = (1..=self.q.components[part.h].ports.len())
                .filter(|&j| alive_after.binary_search(&self.port_red(part.h, j)).is_ok())
                .collect();
            let input = RoundInput {
                groups,
                active,
                alive_after: alive_ports,
                remaining_after,
            };
            let next = self.trackers[part.h].advance(&part.belief, &input, &mut self.budget)?;
            if next.is_empty() {
                return Ok(false);
            }
            successors.push(next.into_iter().collect());
        }
        let mut pick = vec![0usize; successors.len()];
        loop {
            let parts: Vec<Part> = pick
                .iter()
                .enumerate()
                .filter(|(pi, &x)| !successors[*pi][x].0.is_empty())
                .map(|(pi, &x)| Part {
                    h: st.parts[pi].h,
                    outcome: successors[pi][x].0.clone(),
                    belief: successors[pi][x].1.clone(),
                })
                .collect();
            let next = SearchState {
                round: st.round + 1,
                alive: alive_after.clone(),
                parts,
            };
            if self.rec(next)? {
                return Ok(true);
            }
            let mut pos = 0;
            while pos < pick.len() {
                pick[pos] += 1;
                if pick[pos] < successors[pos].len() {
                    break;
                }
                pick[pos] = 0;
                pos += 1;
            }
            if pos == pick.len() {
                return Ok(false);
            }
        }
    }
}
