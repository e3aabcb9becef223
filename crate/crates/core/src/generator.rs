//! Planar instances with a grid minor model known by construction.
//!
//! Two bases are available. [`Base::Grid`] is the plain `m x m` grid with
//! one vertex per cell. [`Base::Wall`] is an elementary wall: every cell
//! holds a horizontal edge `u - w`, consecutive cells in a row are joined
//! `w - u`, and the vertical edge between rows `i` and `i + 1` in column `j`
//! joins the two `u` vertices when `i + j` is even and the two `w` vertices
//! otherwise. Walls have maximum degree 3.
//!
//! Decorations keep the graph planar and the model valid: hubs sit inside
//! a face (grid) or on top of a cell edge (wall), subdivision vertices join
//! the cell of one endpoint, and pendant trees join the cell of their
//! attachment vertex.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{classify, DegreeClass, Graph, VertexId};
use crate::grid_minor::{Cell, MinorModel};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Base {
    #[default]
    Grid,
    Wall,
}

impl std::str::FromStr for Base {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid" => Ok(Base::Grid),
            "wall" => Ok(Base::Wall),
            other => Err(Error::InvalidDecoration(format!("unknown base {other:?}"))),
        }
    }
}

/// A planted high-degree vertex. `face` is 0-based: the grid face with top
/// left corner `(i, j)`, or the wall cell `(i, j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Hub {
    pub face: (usize, usize),
    pub degree: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DecorationSpec {
    pub base: Base,
    pub hubs: Vec<Hub>,
    /// Edges subdivided once each, chosen at random.
    pub subdivisions: usize,
    pub pendant_trees: usize,
    /// Vertices per pendant tree.
    pub pendant_tree_size: usize,
}

impl DecorationSpec {
    pub fn plain(base: Base) -> Self {
        DecorationSpec {
            base,
            pendant_tree_size: 1,
            ..DecorationSpec::default()
        }
    }

    /// Vertices a hub is attached to before its pendant leaves.
    fn hub_attachments(&self) -> usize {
        match self.base {
            Base::Grid => 4,
            Base::Wall => 2,
        }
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDecoration(msg));
        if m < 3 {
            return bad(format!("side {m} is below 3"));
        }
        let faces = match self.base {
            Base::Grid => m - 1,
            Base::Wall => m,
        };
        let mut seen = BTreeSet::new();
        for h in &self.hubs {
            let (i, j) = h.face;
            if i >= faces || j >= faces {
                return bad(format!("hub face ({i},{j}) outside 0..{faces}"));
            }
            if !seen.insert(h.face) {
                return bad(format!("two hubs in face ({i},{j})"));
            }
            if h.degree < self.hub_attachments() {
                return bad(format!(
                    "hub degree {} below the {} attachments of a {:?} hub",
                    h.degree,
                    self.hub_attachments(),
                    self.base
                ));
            }
        }
        if self.pendant_trees > 0 && self.pendant_tree_size == 0 {
            return bad("pendant trees need at least one vertex".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpectedProperties {
    pub planar: bool,
    pub vertices: usize,
    pub max_degree: usize,
    pub hubs: Vec<VertexId>,
    /// Red vertices for the `(k, d)` the instance was generated for.
    pub reds: usize,
}

#[derive(Clone, Debug)]
pub struct GeneratedInstance {
    pub graph: Graph,
    pub model: MinorModel,
    pub expected: ExpectedProperties,
}

struct Builder {
    edges: Vec<(VertexId, VertexId)>,
    cell: BTreeMap<VertexId, Cell>,
    n: usize,
}

impl Builder {
    fn vertex(&mut self, c: Cell) -> VertexId {
        let v = self.n;
        self.n += 1;
        self.cell.insert(v, c);
        v
    }
}

pub fn generate_decorated_grid(
    m: usize,
    k: usize,
    d: usize,
    spec: &DecorationSpec,
    seed: u64,
) -> Result<GeneratedInstance> {
    spec.validate(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Builder {
        edges: Vec::new(),
        cell: BTreeMap::new(),
        n: 0,
    };
    // Corner vertices of each cell, used for hub attachment.
    let mut anchor: BTreeMap<(usize, usize), Vec<VertexId>> = BTreeMap::new();
    match spec.base {
        Base::Grid => {
            for i in 0..m {
                for j in 0..m {
                    let v = b.vertex((i + 1, j + 1));
                    anchor.insert((i, j), vec![v]);
                    if j > 0 {
                        b.edges.push((v - 1, v));
                    }
                    if i > 0 {
                        b.edges.push((v - m, v));
                    }
                }
            }
        }
        Base::Wall => {
            let u = |i: usize, j: usize| 2 * (i * m + j);
            for i in 0..m {
                for j in 0..m {
                    let uu = b.vertex((i + 1, j + 1));
                    let ww = b.vertex((i + 1, j + 1));
                    debug_assert_eq!(uu, u(i, j));
                    anchor.insert((i, j), vec![uu, ww]);
                    b.edges.push((uu, ww));
                    if j > 0 {
                        b.edges.push((u(i, j - 1) + 1, uu));
                    }
                    if i > 0 {
                        let shift = usize::from((i - 1 + j) % 2 == 1);
                        b.edges.push((u(i - 1, j) + shift, uu + shift));
                    }
                }
            }
        }
    }
    let mut hubs = Vec::new();
    for h in &spec.hubs {
        let (i, j) = h.face;
        let touch: Vec<VertexId> = match spec.base {
            Base::Grid => vec![i * m + j, i * m + j + 1, (i + 1) * m + j, (i + 1) * m + j + 1],
            Base::Wall => anchor[&(i, j)].clone(),
        };
        let hub = b.vertex((i + 1, j + 1));
        hubs.push(hub);
        for t in touch {
            b.edges.push((t, hub));
        }
        for _ in spec.hub_attachments()..h.degree {
            let leaf = b.vertex((i + 1, j + 1));
            b.edges.push((hub, leaf));
        }
    }
    for _ in 0..spec.subdivisions {
        let at = rng.gen_range(0..b.edges.len());
        let (x, y) = b.edges.swap_remove(at);
        let c = b.cell[&x];
        let s = b.vertex(c);
        b.edges.push((x, s));
        b.edges.push((s, y));
    }
    for _ in 0..spec.pendant_trees {
        let root = rng.gen_range(0..b.n);
        let c = b.cell[&root];
        let mut tree = vec![root];
        for _ in 0..spec.pendant_tree_size {
            let parent = *tree.choose(&mut rng).expect("tree is non-empty");
            let v = b.vertex(c);
            b.edges.push((parent, v));
            tree.push(v);
        }
    }
    let graph = Graph::from_edges(b.n, b.edges)?;
    let reds = classify(&graph, k, d).with_class(DegreeClass::Red).len();
    let expected = ExpectedProperties {
        planar: true,
        vertices: graph.num_vertices(),
        max_degree: graph.max_degree(),
        hubs,
        reds,
    };
    Ok(GeneratedInstance {
        graph,
        model: MinorModel::new(m, b.cell),
        expected,
    })
}
