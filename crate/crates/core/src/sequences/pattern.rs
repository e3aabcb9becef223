//! Round-aligned interface patterns of a contracted component.
//!
//! The pipeline plays elimination rounds on the whole graph at once. For a
//! component `H` of `G - R` every round has an interface:
//!
//! * which ports are still alive (their red vertex is not deleted),
//! * how the alive ports are grouped by the components of `G` they lie in,
//! * which of those groups spend this round's deletion inside `H`.
//!
//! The tracker keeps the set of internal states of `H` consistent with the
//! interfaces so far (the *belief*). A state is the set of vertices of `H`
//! that are still undeleted and still attached to an alive port; pieces that
//! lose all alive ports are independent of the rest of the graph and are
//! settled on the spot by an exact bounded search with the rounds that
//! remain. Advancing a belief groups the successor states by the visible
//! outcome: the port sets of the pieces that remain.

use std::collections::{BTreeMap, BTreeSet};

use crate::dsu::Dsu;
use crate::error::Result;
use crate::graph::{ComponentNode, Graph, VertexId};
use crate::oracle::{bounded_member, Budget};

/// Undeleted, still-attached vertices of `H` (local ids, sorted).
pub type State = Vec<VertexId>;
pub type Belief = BTreeSet<State>;
/// Alive port sets of the pieces of a state, sorted.
pub type Outcome = Vec<BTreeSet<usize>>;

/// Interface of one round.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RoundInput {
    /// Alive ports grouped by the component of `G` they lie in.
    pub groups: Vec<BTreeSet<usize>>,
    /// Ports whose component deletes inside `H` this round.
    pub active: BTreeSet<usize>,
    /// Ports still alive after the round.
    pub alive_after: BTreeSet<usize>,
    /// Rounds left after this one.
    pub remaining_after: usize,
}

/// The interface tracker of one component.
#[derive(Clone, Debug)]
pub struct Tracker {
    h: Graph,
    ports: Vec<BTreeSet<usize>>,
    d: usize,
}

impl Tracker {
    pub fn new(host: &Graph, comp: &ComponentNode, d: usize) -> Self {
        let (h, ports) = comp.ported(host);
        Tracker { h, ports, d }
    }

    /// A tracker for a standalone ported graph on local ids.
    pub fn from_parts(h: Graph, ports: Vec<BTreeSet<usize>>, d: usize) -> Self {
        assert_eq!(h.capacity(), ports.len());
        Tracker { h, ports, d }
    }

    pub fn num_vertices(&self) -> usize {
        self.h.num_vertices()
    }

    /// Pieces (edge components) of `state`.
    fn pieces(&self, state: &[VertexId]) -> Vec<Vec<VertexId>> {
        let mut dsu = Dsu::new(state.len());
        for (i, &v) in state.iter().enumerate() {
            for w in self.h.neighbors(v) {
                if let Ok(j) = state.binary_search(w) {
                    dsu.union(i, j);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
        for (i, &v) in state.iter().enumerate() {
            groups.entry(dsu.find(i)).or_default().push(v);
        }
        groups.into_values().collect()
    }

    fn piece_ports(&self, piece: &[VertexId], alive: &BTreeSet<usize>) -> BTreeSet<usize> {
        piece
            .iter()
            .flat_map(|&v| self.ports[v].iter().copied())
            .filter(|j| alive.contains(j))
            .collect()
    }

    /// Settles pieces without alive ports. `None` if one of them cannot
    /// reach degree `d` within `remaining` rounds.
    fn normalize(
        &self,
        state: &[VertexId],
        alive: &BTreeSet<usize>,
        remaining: usize,
        budget: &mut Budget,
    ) -> Result<Option<(State, Outcome)>> {
        let mut kept = Vec::new();
        let mut outcome = Vec::new();
        for piece in self.pieces(state) {
            let ports = self.piece_ports(&piece, alive);
            if ports.is_empty() {
                let sub = self.h.induced(&piece)?;
                if !bounded_member(&sub, remaining, self.d, budget)? {
                    return Ok(None);
                }
            } else {
                kept.extend(piece);
                outcome.push(ports);
            }
        }
        kept.sort_unstable();
        outcome.sort();
        Ok(Some((kept, outcome)))
    }

    /// The belief before the first round, with all of `alive` attached and
    /// `remaining` rounds to go.
    pub fn initial(
        &self,
        alive: &BTreeSet<usize>,
        remaining: usize,
        budget: &mut Budget,
    ) -> Result<Option<(Outcome, Belief)>> {
        let all: State = self.h.vertices().collect();
        Ok(self
            .normalize(&all, alive, remaining, budget)?
            .map(|(s, o)| (o, BTreeSet::from([s]))))
    }

    /// Successor beliefs after one round, keyed by outcome. An empty map
    /// means the interface cannot be realized.
    pub fn advance(
        &self,
        belief: &Belief,
        input: &RoundInput,
        budget: &mut Budget,
    ) -> Result<BTreeMap<Outcome, Belief>> {
        let mut out: BTreeMap<Outcome, Belief> = BTreeMap::new();
        let group_of = |j: usize| input.groups.iter().position(|g| g.contains(&j));
        for state in belief {
            budget.tick()?;
            // Regions: pieces in the same group of `G`.
            let mut regions: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
            for piece in self.pieces(state) {
                let g = piece
                    .iter()
                    .flat_map(|&v| self.ports[v].iter().copied())
                    .find_map(group_of)
                    .expect("normalized pieces carry an alive port");
                regions.entry(g).or_default().extend(piece);
            }
            let deletable: Vec<Vec<VertexId>> = regions
                .into_iter()
                .filter(|(g, _)| input.groups[*g].iter().any(|j| input.active.contains(j)))
                .map(|(_, vs)| vs)
                .collect();
            // Every region of a deleting group removes at most one vertex.
            let mut choice = vec![None::<usize>; deletable.len()];
            loop {
                let removed: BTreeSet<VertexId> = choice
                    .iter()
                    .zip(&deletable)
                    .filter_map(|(c, vs)| c.map(|i| vs[i]))
                    .collect();
                let next: State = state.iter().copied().filter(|v| !removed.contains(v)).collect();
                if let Some((s, o)) =
                    self.normalize(&next, &input.alive_after, input.remaining_after, budget)?
                {
                    out.entry(o).or_default().insert(s);
                }
                // Odometer over (none | vertex index) per region.
                let mut pos = 0;
                loop {
                    if pos == choice.len() {
                        break;
                    }
                    choice[pos] = match choice[pos] {
                        None => Some(0),
                        Some(i) if i + 1 < deletable[pos].len() => Some(i + 1),
                        Some(_) => None,
                    };
                    if choice[pos].is_some() {
                        break;
                    }
                    pos += 1;
                }
                if pos == choice.len() {
                    break;
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget() -> Budget {
        Budget::new("test", 1_000_000)
    }

    /// Path 0-1-2 with port 1 on vertex 0 and port 2 on vertex 2.
    fn path_tracker(d: usize) -> Tracker {
        let h = Graph::path(3);
        let ports = vec![BTreeSet::from([1]), BTreeSet::new(), BTreeSet::from([2])];
        Tracker::from_parts(h, ports, d)
    }

    #[test]
    fn initial_outcome_joins_both_ports() {
        let t = path_tracker(2);
        let alive = BTreeSet::from([1, 2]);
        let (o, b) = t.initial(&alive, 1, &mut budget()).unwrap().unwrap();
        assert_eq!(o, vec![BTreeSet::from([1, 2])]);
        assert_eq!(b.len(), 1);
    }

    #[test]
    fn deleting_the_middle_splits_ports() {
        let t = path_tracker(2);
        let alive = BTreeSet::from([1, 2]);
        let (_, b) = t.initial(&alive, 2, &mut budget()).unwrap().unwrap();
        let input = RoundInput {
            groups: vec![BTreeSet::from([1, 2])],
            active: BTreeSet::from([1, 2]),
            alive_after: alive.clone(),
            remaining_after: 1,
        };
        let out = t.advance(&b, &input, &mut budget()).unwrap();
        assert!(out.contains_key(&vec![BTreeSet::from([1]), BTreeSet::from([2])]));
        assert!(out.contains_key(&vec![BTreeSet::from([1, 2])]));
        // Deleting an end vertex leaves one port attached.
        assert!(out.contains_key(&vec![BTreeSet::from([2])]));
    }

    #[test]
    fn passive_round_keeps_state() {
        let t = path_tracker(2);
        let alive = BTreeSet::from([1, 2]);
        let (o, b) = t.initial(&alive, 2, &mut budget()).unwrap().unwrap();
        let input = RoundInput {
            groups: vec![BTreeSet::from([1, 2])],
            active: BTreeSet::new(),
            alive_after: alive.clone(),
            remaining_after: 1,
        };
        let out = t.advance(&b, &input, &mut budget()).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out.get(&o), Some(&b));
    }

    #[test]
    fn detached_pieces_are_settled_with_remaining_rounds() {
        // Star center 0 with three leaves, one port on leaf 1; d = 0.
        let h = Graph::star(3);
        let ports = vec![BTreeSet::new(), BTreeSet::from([1]), BTreeSet::new(), BTreeSet::new()];
        let t = Tracker::from_parts(h, ports, 0);
        let (_, b) = t.initial(&BTreeSet::from([1]), 1, &mut budget()).unwrap().unwrap();
        let kill = RoundInput {
            groups: vec![BTreeSet::from([1])],
            active: BTreeSet::new(),
            alive_after: BTreeSet::new(),
            remaining_after: 0,
        };
        // Port dies, star still has edges, no rounds left: impossible.
        assert!(t.advance(&b, &kill, &mut budget()).unwrap().is_empty());
        let with_round = RoundInput {
            remaining_after: 1,
            ..kill
        };
        let out = t.advance(&b, &with_round, &mut budget()).unwrap();
        assert_eq!(out.keys().cloned().collect::<Vec<_>>(), vec![Outcome::new()]);
    }
}
