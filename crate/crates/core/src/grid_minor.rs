//! Grid minor models, safe and semi-safe branch sets, and the
//! irrelevant-vertex loop for graphs of small maximum degree.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::sequences::PortMap;
use crate::{high_degree_threshold, sat_pow};

pub type Cell = (usize, usize);

/// Assignment of vertices to the cells of an `m x m` grid (1-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinorModel {
    pub m: usize,
    pub cell: BTreeMap<VertexId, Cell>,
}

impl MinorModel {
    pub fn new(m: usize, cell: BTreeMap<VertexId, Cell>) -> Self {
        MinorModel { m, cell }
    }

    /// The identity model of `Graph::grid(m, m)`.
    pub fn identity(m: usize) -> Self {
        let cell = (0..m * m).map(|v| (v, (v / m + 1, v % m + 1))).collect();
        MinorModel { m, cell }
    }

    pub fn cell_of(&self, v: VertexId) -> Option<Cell> {
        self.cell.get(&v).copied()
    }

    pub fn branch_sets(&self) -> BTreeMap<Cell, Vec<VertexId>> {
        let mut out: BTreeMap<Cell, Vec<VertexId>> = BTreeMap::new();
        for (&v, &c) in &self.cell {
            out.entry(c).or_default().push(v);
        }
        out
    }

    /// Drops assignments of vertices that are not in `g`.
    pub fn restrict(&self, g: &Graph) -> MinorModel {
        MinorModel {
            m: self.m,
            cell: self
                .cell
                .iter()
                .filter(|(v, _)| g.contains(**v))
                .map(|(&v, &c)| (v, c))
                .collect(),
        }
    }

    /// Merges row `r` into `r + 1` and column `c` into `c + 1`, shrinking
    /// the side by one.
    pub fn merge(&self, r: usize, c: usize) -> MinorModel {
        let shift = |x: usize, at: usize| if x > at { x - 1 } else { x };
        MinorModel {
            m: self.m - 1,
            cell: self
                .cell
                .iter()
                .map(|(&v, &(i, j))| (v, (shift(i, r), shift(j, c))))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ModelReport {
    pub valid: bool,
    pub violations: Vec<String>,
}

/// Checks that every vertex is assigned to a cell, every branch set is
/// non-empty and connected, and adjacent cells are joined by an edge.
pub fn validate_model(g: &Graph, mm: &MinorModel) -> ModelReport {
    let mut violations = Vec::new();
    for v in g.vertices() {
        if !mm.cell.contains_key(&v) {
            violations.push(format!("vertex {v} is not assigned"));
        }
    }
    for (&v, &(i, j)) in &mm.cell {
        if !g.contains(v) {
            violations.push(format!("assigned vertex {v} is not in the graph"));
        }
        if i == 0 || j == 0 || i > mm.m || j > mm.m {
            violations.push(format!("vertex {v} assigned outside the grid: ({i},{j})"));
        }
    }
    if violations.is_empty() {
        let sets = mm.branch_sets();
        for i in 1..=mm.m {
            for j in 1..=mm.m {
                match sets.get(&(i, j)) {
                    None => violations.push(format!("cell ({i},{j}) is empty")),
                    Some(vs) => {
                        if !g.is_connected_subset(vs) {
                            violations.push(format!("cell ({i},{j}) is disconnected"));
                        }
                    }
                }
            }
        }
        let touches = |a: Cell, b: Cell| {
            sets.get(&a).is_some_and(|vs| {
                vs.iter()
                    .any(|&v| g.neighbors(v).iter().any(|&u| mm.cell.get(&u) == Some(&b)))
            })
        };
        for i in 1..=mm.m {
            for j in 1..=mm.m {
                if j < mm.m && !touches((i, j), (i, j + 1)) {
                    violations.push(format!("cells ({i},{j}) and ({i},{}) are not adjacent", j + 1));
                }
                if i < mm.m && !touches((i, j), (i + 1, j)) {
                    violations.push(format!("cells ({i},{j}) and ({},{j}) are not adjacent", i + 1));
                }
            }
        }
    }
    ModelReport {
        valid: violations.is_empty(),
        violations,
    }
}

/// Cells whose branch set contains a vertex of degree at least `d + 1`.
fn blocked_by_degree(g: &Graph, mm: &MinorModel, d: usize) -> BTreeSet<Cell> {
    mm.cell
        .iter()
        .filter(|(&v, _)| g.degree(v) > d)
        .map(|(_, &c)| c)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SafetyMode {
    Safe,
    SemiSafeCase31,
    SemiSafeCase33,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SafetyParams {
    pub k: usize,
    pub d: usize,
    pub mode: SafetyMode,
    pub ports: PortMap,
    /// Ports allowed near a Case 3.3 cell.
    pub j: BTreeSet<usize>,
}

impl SafetyParams {
    pub fn safe(k: usize, d: usize) -> Self {
        SafetyParams {
            k,
            d,
            mode: SafetyMode::Safe,
            ports: PortMap::new(),
            j: BTreeSet::new(),
        }
    }

    pub fn case31(k: usize, d: usize, ports: PortMap) -> Self {
        SafetyParams {
            mode: SafetyMode::SemiSafeCase31,
            ports,
            ..SafetyParams::safe(k, d)
        }
    }

    pub fn case33(k: usize, d: usize, ports: PortMap, j: BTreeSet<usize>) -> Self {
        SafetyParams {
            mode: SafetyMode::SemiSafeCase33,
            ports,
            j,
            ..SafetyParams::safe(k, d)
        }
    }

    /// Chebyshev radius of the window that must be clear.
    pub fn radius(&self) -> usize {
        match self.mode {
            SafetyMode::Safe | SafetyMode::SemiSafeCase31 => 2 * self.k + 2,
            SafetyMode::SemiSafeCase33 => 4 * self.k + 2,
        }
    }

    /// Smallest grid side on which the mode can apply.
    pub fn min_side(&self) -> usize {
        2 * self.radius() + 1
    }
}

/// Scans interior cells in row-major order for one whose window of
/// Chebyshev radius `r` holds no blocking vertex. A cell `(i, j)` is
/// interior when the whole window fits in the grid, `r < i, j <= m - r`.
pub fn find_safe_branch_set(g: &Graph, mm: &MinorModel, sp: &SafetyParams) -> Result<Option<Cell>> {
    let r = sp.radius();
    if mm.m < sp.min_side() {
        return Err(Error::Precondition(format!(
            "grid side {} is below {} for {:?}",
            mm.m,
            sp.min_side(),
            sp.mode
        )));
    }
    let mut blocked = blocked_by_degree(g, mm, sp.d);
    for (v, js) in &sp.ports {
        let hit = match sp.mode {
            SafetyMode::Safe => false,
            SafetyMode::SemiSafeCase31 => !js.is_empty(),
            SafetyMode::SemiSafeCase33 => js.iter().any(|j| !sp.j.contains(j)),
        };
        if hit {
            if let Some(c) = mm.cell_of(*v) {
                blocked.insert(c);
            }
        }
    }
    Ok(first_clear_cell(mm.m, r, &blocked))
}

/// Row-major first cell in `r < i, j <= m - r` with no blocked cell within
/// Chebyshev distance `r`.
pub(crate) fn first_clear_cell(m: usize, r: usize, blocked: &BTreeSet<Cell>) -> Option<Cell> {
    // 2D prefix sums over the blocked indicator.
    let w = m + 1;
    let mut pre = vec![0u32; w * w];
    for i in 1..=m {
        for j in 1..=m {
            let b = blocked.contains(&(i, j)) as u32;
            pre[i * w + j] = b + pre[(i - 1) * w + j] + pre[i * w + j - 1] - pre[(i - 1) * w + j - 1];
        }
    }
    let count = |i0: usize, j0: usize, i1: usize, j1: usize| {
        pre[i1 * w + j1] + pre[(i0 - 1) * w + j0 - 1] - pre[(i0 - 1) * w + j1] - pre[i1 * w + j0 - 1]
    };
    if m < 2 * r + 1 {
        return None;
    }
    for i in r + 1..=m - r {
        for j in r + 1..=m - r {
            if count(i - r, j - r, i + r, j + r) == 0 {
                return Some((i, j));
            }
        }
    }
    None
}

/// `(4k+5)^2 (k+d)^(2(k+d)) + 4k+5`, saturating.
pub fn h_small_degree(k: usize, d: usize) -> u64 {
    let side = (4 * k + 5) as u64;
    side.saturating_mul(side)
        .saturating_mul(sat_pow(k + d, 2 * (k + d)))
        .saturating_add(side)
}

/// `((k+d)^(2(k+d)) + p k^2)(8k+5)^2`, saturating.
pub fn h_sequence(k: usize, d: usize, p: usize) -> u64 {
    let side = (8 * k + 5) as u64;
    sat_pow(k + d, 2 * (k + d))
        .saturating_add((p as u64).saturating_mul((k * k) as u64))
        .saturating_mul(side.saturating_mul(side))
}

/// Supplies minor models for the current graph of a reduction loop.
pub trait ModelProvider {
    fn model(&mut self, g: &Graph) -> Option<MinorModel>;
}

/// Never has a model.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoModel;

impl ModelProvider for NoModel {
    fn model(&mut self, _g: &Graph) -> Option<MinorModel> {
        None
    }
}

/// Keeps a model across deletions. When a deletion breaks it, the row and
/// column of the damaged cell are merged into a neighboring row and column
/// (first direction pair that validates), shrinking the side by one.
#[derive(Clone, Debug)]
pub struct RepairingProvider {
    current: Option<MinorModel>,
    pub repairs: usize,
}

impl RepairingProvider {
    pub fn new(model: MinorModel) -> Self {
        RepairingProvider {
            current: Some(model),
            repairs: 0,
        }
    }
}

impl ModelProvider for RepairingProvider {
    fn model(&mut self, g: &Graph) -> Option<MinorModel> {
        let old = self.current.take()?;
        let damaged: BTreeSet<Cell> = old
            .cell
            .iter()
            .filter(|(v, _)| !g.contains(**v))
            .map(|(_, &c)| c)
            .collect();
        let mut cur = old.restrict(g);
        if damaged.is_empty() || damaged.iter().all(|&c| cell_still_fine(g, &cur, c)) {
            if validate_model(g, &cur).valid {
                self.current = Some(cur.clone());
                return Some(cur);
            }
        }
        for &(i, j) in &damaged {
            let mut fixed = None;
            'dirs: for r in [i, i.wrapping_sub(1)] {
                for c in [j, j.wrapping_sub(1)] {
                    if r == 0 || c == 0 || r >= cur.m || c >= cur.m {
                        continue;
                    }
                    let cand = cur.merge(r, c);
                    if validate_model(g, &cand).valid {
                        fixed = Some(cand);
                        break 'dirs;
                    }
                }
            }
            match fixed {
                Some(f) => {
                    cur = f;
                    self.repairs += 1;
                }
                None => return None,
            }
        }
        if validate_model(g, &cur).valid {
            self.current = Some(cur.clone());
            Some(cur)
        } else {
            None
        }
    }
}

/// Local check of one cell after a deletion: still non-empty, connected,
/// and adjacent to its grid neighbors.
fn cell_still_fine(g: &Graph, mm: &MinorModel, c: Cell) -> bool {
    let vs: Vec<VertexId> = mm.cell.iter().filter(|(_, &x)| x == c).map(|(&v, _)| v).collect();
    if vs.is_empty() || !g.is_connected_subset(&vs) {
        return false;
    }
    let (i, j) = c;
    let mut nbrs = Vec::new();
    if i > 1 {
        nbrs.push((i - 1, j));
    }
    if i < mm.m {
        nbrs.push((i + 1, j));
    }
    if j > 1 {
        nbrs.push((i, j - 1));
    }
    if j < mm.m {
        nbrs.push((i, j + 1));
    }
    nbrs.into_iter().all(|b| {
        vs.iter()
            .any(|&v| g.neighbors(v).iter().any(|&u| mm.cell.get(&u) == Some(&b)))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionStop {
    /// More than the threshold number of vertices of degree above `d`.
    TooManyHighDegree,
    /// The provider has no model.
    NoModel,
    /// The model is too small for a safe cell to exist.
    SmallModel,
    /// The model has no safe cell.
    NoSafeCell,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IrrelevantDeletion {
    pub vertex: VertexId,
    pub cell: Cell,
    pub side: usize,
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub graph: Graph,
    pub deleted: Vec<IrrelevantDeletion>,
    pub stop: ReductionStop,
    pub high_degree: usize,
}

/// Number of vertices of degree at least `d + 1` in each component, as the
/// largest such count.
pub fn high_degree_count(g: &Graph, d: usize) -> usize {
    g.components()
        .iter()
        .map(|c| c.iter().filter(|&&v| g.degree(v) > d).count())
        .max()
        .unwrap_or(0)
}

/// Deletes vertices of safe branch sets one at a time, asking the provider
/// for a fresh model after every deletion, until some component has too
/// many high-degree vertices or no safe cell is available.
pub fn reduce_small_degree(
    g: &Graph,
    k: usize,
    d: usize,
    provider: &mut dyn ModelProvider,
) -> Result<Reduction> {
    if g.max_degree() > k + d {
        return Err(Error::Precondition(format!(
            "maximum degree {} exceeds k + d = {}",
            g.max_degree(),
            k + d
        )));
    }
    let threshold = high_degree_threshold(k, d);
    let sp = SafetyParams::safe(k, d);
    let mut cur = g.clone();
    let mut deleted = Vec::new();
    loop {
        let high = high_degree_count(&cur, d);
        let stop = if high as u64 > threshold {
            Some(ReductionStop::TooManyHighDegree)
        } else {
            match provider.model(&cur) {
                None => Some(ReductionStop::NoModel),
                Some(mm) => {
                    let report = validate_model(&cur, &mm);
                    if !report.valid {
                        return Err(Error::InvalidModel(report.violations.join("; ")));
                    }
                    if mm.m < sp.min_side() {
                        Some(ReductionStop::SmallModel)
                    } else {
                        match find_safe_branch_set(&cur, &mm, &sp)? {
                            None => Some(ReductionStop::NoSafeCell),
                            Some(c) => {
                                let v = *mm
                                    .cell
                                    .iter()
                                    .find(|(_, &x)| x == c)
                                    .map(|(v, _)| v)
                                    .expect("valid models have no empty cell");
                                cur.remove_vertex(v);
                                deleted.push(IrrelevantDeletion {
                                    vertex: v,
                                    cell: c,
                                    side: mm.m,
                                });
                                None
                            }
                        }
                    }
                }
            }
        };
        if let Some(stop) = stop {
            return Ok(Reduction {
                graph: cur,
                deleted,
                stop,
                high_degree: high,
            });
        }
    }
}
