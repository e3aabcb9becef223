use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use elimdist::generator::{generate_decorated_grid, Base, DecorationSpec, Hub};
use elimdist::graph::{classify, DegreeClass, Graph};
use elimdist::grid_minor::{
    find_safe_branch_set, reduce_small_degree, validate_model, MinorModel, ModelProvider, NoModel,
    RepairingProvider, SafetyParams,
};
use elimdist::oracle::{member_exact, OracleConfig};
use elimdist::sequences::PortMap;

fn cfg() -> OracleConfig {
    OracleConfig::with_max_vertices(1000)
}

#[test]
fn centre_of_minimal_grid_is_safe() {
    for k in 1..=2 {
        let m = 4 * k + 5;
        let g = Graph::grid(m, m);
        let got = find_safe_branch_set(&g, &MinorModel::identity(m), &SafetyParams::safe(k, 4)).unwrap();
        assert_eq!(got, Some((2 * k + 3, 2 * k + 3)));
    }
}

#[test]
fn dense_planting_blocks_every_window() {
    // Pendant leaves raise degree to 5 on a lattice of spacing 3, so every
    // radius-4 window contains one.
    let m = 13;
    let mut edges: Vec<_> = Graph::grid(m, m).edges().collect();
    let mut next = m * m;
    for i in (1..m).step_by(3) {
        for j in (1..m).step_by(3) {
            edges.push((i * m + j, next));
            next += 1;
        }
    }
    let g = Graph::from_edges(next, edges).unwrap();
    let mut mm = MinorModel::identity(m);
    for (leaf, (i, j)) in (m * m..next).zip((1..m).step_by(3).flat_map(|i| (1..m).step_by(3).map(move |j| (i, j)))) {
        mm.cell.insert(leaf, (i + 1, j + 1));
    }
    assert!(validate_model(&g, &mm).valid);
    assert_eq!(find_safe_branch_set(&g, &mm, &SafetyParams::safe(1, 4)).unwrap(), None);
}

#[test]
fn case33_with_all_ports_allowed() {
    let k = 1;
    let m = 8 * k + 5;
    let g = Graph::grid(m, m);
    let ports: PortMap = (0..m * m).map(|v| (v, BTreeSet::from([1, 2]))).collect();
    let sp = SafetyParams::case33(k, 4, ports, BTreeSet::from([1, 2]));
    let got = find_safe_branch_set(&g, &MinorModel::identity(m), &sp).unwrap();
    assert_eq!(got, Some((4 * k + 3, 4 * k + 3)));
}

#[test]
fn too_small_models_are_a_precondition_error() {
    let g = Graph::grid(8, 8);
    assert!(find_safe_branch_set(&g, &MinorModel::identity(8), &SafetyParams::safe(1, 4)).is_err());
}

#[test]
fn corner_hub_is_red() {
    let (k, d) = (1, 3);
    let spec = DecorationSpec {
        hubs: vec![Hub { face: (0, 0), degree: k + d + 1 }],
        ..DecorationSpec::plain(Base::Grid)
    };
    let inst = generate_decorated_grid(9, k, d, &spec, 1).unwrap();
    assert!(validate_model(&inst.graph, &inst.model).valid);
    let hub = inst.expected.hubs[0];
    assert_eq!(classify(&inst.graph, k, d).get(hub), Some(DegreeClass::Red));
}

#[test]
fn ring_separates_inside_from_outside() {
    for (base, m) in [(Base::Grid, 9), (Base::Wall, 9)] {
        let spec = DecorationSpec {
            subdivisions: 15,
            pendant_trees: 3,
            pendant_tree_size: 2,
            ..DecorationSpec::plain(base)
        };
        let inst = generate_decorated_grid(m, 1, 4, &spec, 5).unwrap();
        let (ci, cj) = (5, 5);
        for l in 1..=3 {
            let dist = |(i, j): (usize, usize)| i.abs_diff(ci).max(j.abs_diff(cj));
            let ring: Vec<usize> = inst
                .model
                .cell
                .iter()
                .filter(|(_, &c)| dist(c) == l)
                .map(|(&v, _)| v)
                .collect();
            let rest = inst.graph.delete(&ring).unwrap();
            for comp in rest.components() {
                let dists: BTreeSet<bool> =
                    comp.iter().map(|v| dist(inst.model.cell[v]) < l).collect();
                assert_eq!(dists.len(), 1, "{base:?} ring {l} leaks");
            }
        }
    }
}

#[test]
fn every_vertex_of_a_safe_branch_set_is_irrelevant() {
    let mut checked = 0;
    for seed in 0..30 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = 11;
        let spec = DecorationSpec {
            base: Base::Grid,
            hubs: vec![Hub { face: (0, rng.gen_range(0..m - 1)), degree: 5 }],
            subdivisions: 60,
            pendant_trees: 0,
            pendant_tree_size: 1,
        };
        let inst = generate_decorated_grid(m, 1, 4, &spec, seed).unwrap();
        let Some(cell) = find_safe_branch_set(&inst.graph, &inst.model, &SafetyParams::safe(1, 4)).unwrap() else {
            continue;
        };
        let before = member_exact(&inst.graph, 1, 4, &cfg()).unwrap();
        for &a in &inst.model.branch_sets()[&cell] {
            let after = member_exact(&inst.graph.delete(&[a]).unwrap(), 1, 4, &cfg()).unwrap();
            assert_eq!(before, after, "seed {seed} vertex {a}");
            checked += 1;
        }
    }
    assert!(checked > 30);
}

#[test]
fn reduction_shrinks_and_preserves_membership() {
    for seed in 0..12 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // The hub raises degrees in rows 1 and 2; side 11 is the first with a
        // clear radius-4 window below them.
        let m = rng.gen_range(11..=13);
        let spec = DecorationSpec {
            base: Base::Grid,
            hubs: vec![Hub { face: (0, 1), degree: 4 }],
            subdivisions: rng.gen_range(0..8),
            pendant_trees: 0,
            pendant_tree_size: 1,
        };
        let inst = generate_decorated_grid(m, 1, 4, &spec, seed).unwrap();
        let mut provider = RepairingProvider::new(inst.model.clone());
        let red = reduce_small_degree(&inst.graph, 1, 4, &mut provider).unwrap();
        assert!(!red.deleted.is_empty());
        assert_eq!(red.graph.num_vertices() + red.deleted.len(), inst.graph.num_vertices());
        assert_eq!(
            member_exact(&red.graph, 1, 4, &cfg()).unwrap(),
            member_exact(&inst.graph, 1, 4, &cfg()).unwrap(),
            "seed {seed}"
        );
    }
}

#[test]
fn without_a_model_nothing_is_deleted() {
    let g = Graph::grid(10, 10);
    let red = reduce_small_degree(&g, 1, 4, &mut NoModel).unwrap();
    assert_eq!(red.graph, g);
}

struct Fixed(MinorModel);

impl ModelProvider for Fixed {
    fn model(&mut self, _g: &Graph) -> Option<MinorModel> {
        Some(self.0.clone())
    }
}

#[test]
fn bad_models_are_refused() {
    let g = Graph::grid(10, 10);
    let mut mm = MinorModel::identity(10);
    mm.cell.insert(0, (5, 5));
    let err = reduce_small_degree(&g, 1, 4, &mut Fixed(mm)).unwrap_err();
    assert!(matches!(err, elimdist::Error::InvalidModel(_)));
}
