use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::grid_minor::{
    find_safe_branch_set, high_degree_count, validate_model, MinorModel, ModelProvider,
    RepairingProvider, SafetyParams,
};
use crate::high_degree_threshold;
use crate::oracle::OracleConfig;

use super::{search_witness, validate_sequence, KdSequence, PortedComponent};

/// Which branch of the large-model analysis applies to a component and a
/// sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CaseSplit {
    /// Too many vertices of degree above `d`: no sequence is satisfiable.
    TooManyHighDegree,
    /// No usable model; decide by exact search.
    SmallEnough,
    /// Every port appears in at most `k^2` branch sets and a semi-safe cell
    /// avoiding all ports exists.
    Case31,
    /// Two ports, each in more than `k^2` branch sets, are split in the last
    /// `P`: the sequence is not satisfiable.
    Case32(usize, usize),
    /// The frequent ports `J` are all grouped in the last `P` and a
    /// semi-safe cell avoiding the other ports exists.
    Case33(BTreeSet<usize>),
}

/// Classifies `(pc, s)`. Cases 3.1 and 3.3 are only reported when the
/// corresponding semi-safe cell actually exists in `mm`.
pub fn case_split(
    pc: &PortedComponent,
    mm: Option<&MinorModel>,
    s: &KdSequence,
    k: usize,
    d: usize,
) -> Result<CaseSplit> {
    if high_degree_count(&pc.graph, d) as u64 > high_degree_threshold(k, d) {
        return Ok(CaseSplit::TooManyHighDegree);
    }
    let Some(mm) = mm else { return Ok(CaseSplit::SmallEnough) };
    let report = validate_model(&pc.graph, mm);
    if !report.valid {
        return Err(Error::InvalidModel(report.violations.join("; ")));
    }
    let Some(last) = s.levels.last() else { return Ok(CaseSplit::SmallEnough) };
    let mut cells_per_port: BTreeMap<usize, BTreeSet<(usize, usize)>> = BTreeMap::new();
    for (v, js) in &pc.ports {
        if let Some(c) = mm.cell_of(*v) {
            for &j in js {
                cells_per_port.entry(j).or_default().insert(c);
            }
        }
    }
    let frequent: BTreeSet<usize> = cells_per_port
        .iter()
        .filter(|(_, cells)| cells.len() > k * k)
        .map(|(&j, _)| j)
        .collect();
    if frequent.is_empty() {
        let sp = SafetyParams::case31(k, d, pc.ports.clone());
        if mm.m >= sp.min_side() && find_safe_branch_set(&pc.graph, mm, &sp)?.is_some() {
            return Ok(CaseSplit::Case31);
        }
        return Ok(CaseSplit::SmallEnough);
    }
    for &a in &frequent {
        for &b in &frequent {
            if a < b && !last.p.grouped(a, b) {
                return Ok(CaseSplit::Case32(a, b));
            }
        }
    }
    let sp = SafetyParams::case33(k, d, pc.ports.clone(), frequent.clone());
    if mm.m >= sp.min_side() && find_safe_branch_set(&pc.graph, mm, &sp)?.is_some() {
        return Ok(CaseSplit::Case33(frequent));
    }
    Ok(CaseSplit::SmallEnough)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SatisfyOutcome {
    pub satisfied: bool,
    /// The case that ended the reduction loop.
    pub decided_by: CaseSplit,
    /// Semi-safe vertices deleted before the final decision.
    pub deleted: Vec<VertexId>,
    pub residual_vertices: usize,
}

/// Whether `pc` satisfies `s`. With a model, semi-safe vertices are deleted
/// first (Cases 3.1 and 3.3), and Case 1 or Case 3.2 can answer directly;
/// the residual is decided by exact search under `cfg`.
pub fn satisfies(
    pc: &PortedComponent,
    mm: Option<&MinorModel>,
    s: &KdSequence,
    k: usize,
    d: usize,
    cfg: &OracleConfig,
) -> Result<SatisfyOutcome> {
    let report = validate_sequence(s, k);
    if !report.valid {
        return Err(Error::InvalidSequence(report.violations.join("; ")));
    }
    pc.check_ports(s.p)?;
    let mut graph: Graph = pc.graph.clone();
    let mut ports = pc.ports.clone();
    let mut provider = mm.cloned().map(RepairingProvider::new);
    let mut model = mm.cloned();
    let mut deleted = Vec::new();
    loop {
        let cur = PortedComponent {
            graph: graph.clone(),
            ports: ports.clone(),
        };
        let case = case_split(&cur, model.as_ref(), s, k, d)?;
        let sp = match &case {
            CaseSplit::TooManyHighDegree | CaseSplit::Case32(..) => {
                return Ok(SatisfyOutcome {
                    satisfied: false,
                    decided_by: case,
                    deleted,
                    residual_vertices: graph.num_vertices(),
                })
            }
            CaseSplit::SmallEnough => {
                if graph.num_vertices() > cfg.max_vertices {
                    return Err(Error::resource(
                        "satisfies",
                        format!(
                            "residual has {} vertices, guard is {}",
                            graph.num_vertices(),
                            cfg.max_vertices
                        ),
                    ));
                }
                let found = search_witness(&graph, &ports, s, d, cfg.work_limit)?.is_some();
                return Ok(SatisfyOutcome {
                    satisfied: found,
                    decided_by: case,
                    deleted,
                    residual_vertices: graph.num_vertices(),
                });
            }
            CaseSplit::Case31 => SafetyParams::case31(k, d, ports.clone()),
            CaseSplit::Case33(j) => SafetyParams::case33(k, d, ports.clone(), j.clone()),
        };
        let mm_now = model.as_ref().expect("cases 3.x need a model");
        let cell = find_safe_branch_set(&graph, mm_now, &sp)?.expect("case_split found a cell");
        let victim = mm_now
            .cell
            .iter()
            .find(|(_, &c)| c == cell)
            .map(|(&v, _)| v)
            .expect("cells of valid models are non-empty");
        graph.remove_vertex(victim);
        ports.remove(&victim);
        deleted.push(victim);
        model = provider.as_mut().and_then(|p| p.model(&graph));
    }
}

/// Memoized satisfaction queries for one solver instance.
#[derive(Debug)]
pub struct Labeler {
    pub k: usize,
    pub d: usize,
    pub cfg: OracleConfig,
    memo: HashMap<(Vec<VertexId>, Vec<(VertexId, Vec<usize>)>, KdSequence), bool>,
    pub queries: usize,
    pub hits: usize,
}

impl Labeler {
    pub fn new(k: usize, d: usize, cfg: OracleConfig) -> Self {
        Labeler {
            k,
            d,
            cfg,
            memo: HashMap::new(),
            queries: 0,
            hits: 0,
        }
    }

    pub fn query(&mut self, pc: &PortedComponent, mm: Option<&MinorModel>, s: &KdSequence) -> Result<bool> {
        self.queries += 1;
        let key = (
            pc.graph.vertices().collect::<Vec<_>>(),
            pc.ports
                .iter()
                .map(|(&v, js)| (v, js.iter().copied().collect()))
                .collect::<Vec<_>>(),
            s.clone(),
        );
        if let Some(&r) = self.memo.get(&key) {
            self.hits += 1;
            return Ok(r);
        }
        let r = satisfies(pc, mm, s, self.k, self.d, &self.cfg)?.satisfied;
        self.memo.insert(key, r);
        Ok(r)
    }
}
