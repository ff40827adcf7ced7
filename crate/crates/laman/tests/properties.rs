//! Invariant suites for the graph algebra, canonical keys, the engine, the
//! oracle, and the text formats.

use std::collections::{BTreeMap, BTreeSet};

use laman::canon::{canonical_key, canonical_key_mod_swap};
use laman::check::{henneberg_sequence, is_laman};
use laman::count::{lam, lam_graph, MemoTable};
use laman::enumerate::enumerate_laman;
use laman::format;
use laman::graph::{Bigraph, EdgeId, Ends, MultiGraph, VertexId};
use laman::oracle::{build_system, count_solutions, DEFAULT_CLUSTER_TOL, DEFAULT_TOL};

use proptest::prelude::*;

/// Builds a multigraph on vertices `0..n` from arbitrary endpoint pairs
/// (loops included when `a == b`).
fn graph_on(n: u8, pairs: &[(u8, u8)]) -> MultiGraph {
    let mut g = MultiGraph::new();
    for v in 0..n {
        g.add_vertex(VertexId(v as u32));
    }
    for &(a, b) in pairs {
        g.add_edge(VertexId((a % n) as u32), VertexId((b % n) as u32));
    }
    g
}

fn arb_multigraph() -> impl Strategy<Value = MultiGraph> {
    (1u8..=7, proptest::collection::vec((0u8..7, 0u8..7), 0..12))
        .prop_map(|(n, pairs)| graph_on(n, &pairs))
}

fn arb_edge_subset(g: &MultiGraph, selector: &[bool]) -> BTreeSet<EdgeId> {
    g.edge_ids()
        .enumerate()
        .filter(|(i, _)| selector.get(*i).copied().unwrap_or(false))
        .map(|(_, e)| e)
        .collect()
}

/// Independent component counter (breadth-first search, no union-find).
fn bfs_component_count(vertices: &BTreeSet<VertexId>, edges: &[(VertexId, VertexId)]) -> usize {
    let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for &v in vertices {
        adj.entry(v).or_default();
    }
    for &(a, b) in edges {
        adj.get_mut(&a).unwrap().push(b);
        adj.get_mut(&b).unwrap().push(a);
    }
    let mut seen = BTreeSet::new();
    let mut components = 0;
    for &start in vertices {
        if seen.contains(&start) {
            continue;
        }
        components += 1;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            if seen.insert(v) {
                stack.extend(adj[&v].iter().copied());
            }
        }
    }
    components
}

proptest! {
    #[test]
    fn contract_of_nothing_is_identity(g in arb_multigraph()) {
        prop_assert_eq!(g.contract(&BTreeSet::new()).unwrap(), g);
    }

    #[test]
    fn delete_of_nothing_only_drops_isolated_vertices(g in arb_multigraph()) {
        let d = g.delete(&BTreeSet::new()).unwrap();
        prop_assert_eq!(d.edge_count(), g.edge_count());
        for v in d.vertices() {
            prop_assert!(g.degree(v) > 0);
        }
        for v in g.vertices() {
            prop_assert_eq!(d.contains_vertex(v), g.degree(v) > 0);
        }
    }

    #[test]
    fn contraction_bookkeeping(
        g in arb_multigraph(),
        selector in proptest::collection::vec(any::<bool>(), 12),
    ) {
        let s = arb_edge_subset(&g, &selector);
        let q = g.contract(&s).unwrap();
        // Contraction removes exactly the contracted edges.
        prop_assert_eq!(q.edge_count(), g.edge_count() - s.len());
        // Surviving edges keep their identifiers.
        for e in g.edge_ids() {
            prop_assert_eq!(q.ends(e).is_ok(), !s.contains(&e));
        }
        // Component count never increases under contraction.
        prop_assert!(q.component_count() <= g.component_count());
    }

    #[test]
    fn dimension_additivity(
        g in arb_multigraph(),
        selector in proptest::collection::vec(any::<bool>(), 12),
    ) {
        let s = arb_edge_subset(&g, &selector);
        let complement: BTreeSet<EdgeId> = g.edge_ids().filter(|e| !s.contains(e)).collect();
        let sub = g.delete(&complement).unwrap();
        let quot = g.contract(&s).unwrap();
        prop_assert_eq!(g.dimension(), sub.dimension() + quot.dimension());
    }

    #[test]
    fn bridges_match_a_bfs_oracle(g in arb_multigraph()) {
        let vertices: BTreeSet<VertexId> = g.vertices().collect();
        let all: Vec<(EdgeId, Ends)> = g.edges().collect();
        let before = bfs_component_count(
            &vertices,
            &all.iter().map(|(_, e)| e.pair()).collect::<Vec<_>>(),
        );
        for (id, _) in &all {
            let remaining: Vec<(VertexId, VertexId)> = all
                .iter()
                .filter(|(other, _)| other != id)
                .map(|(_, e)| e.pair())
                .collect();
            let after = bfs_component_count(&vertices, &remaining);
            prop_assert_eq!(g.is_bridge(*id).unwrap(), after > before);
        }
    }

    #[test]
    fn quotients_mirror_under_swap(
        g in arb_multigraph(),
        selector in proptest::collection::vec(any::<bool>(), 12),
    ) {
        let b = Bigraph::new(g.clone(), g).unwrap();
        let s = arb_edge_subset(b.g(), &selector);
        let left = b.left_quot(&s).unwrap();
        let right = b.right_quot(&s).unwrap();
        prop_assert_eq!(left.swap(), right);
    }
}

/// Exhaustive bridge check over small multigraphs with loops and
/// parallels: every edge tuple of length up to four over three vertices,
/// and up to four over four vertices.
#[test]
fn bridges_exhaustive_on_tiny_multigraphs() {
    let mut checked = 0usize;
    for n in [3u8, 4] {
        let mut slots: Vec<(u8, u8)> = Vec::new();
        for a in 0..n {
            for b in a..n {
                slots.push((a, b));
            }
        }
        for count in 0..=4u32 {
            for code in 0..slots.len().pow(count) {
                let mut rest = code;
                let pairs: Vec<(u8, u8)> = (0..count)
                    .map(|_| {
                        let pick = slots[rest % slots.len()];
                        rest /= slots.len();
                        pick
                    })
                    .collect();
                let g = graph_on(n, &pairs);
                let vertices: BTreeSet<VertexId> = g.vertices().collect();
                let all: Vec<(EdgeId, Ends)> = g.edges().collect();
                let before = bfs_component_count(
                    &vertices,
                    &all.iter().map(|(_, e)| e.pair()).collect::<Vec<_>>(),
                );
                for (id, _) in &all {
                    let remaining: Vec<(VertexId, VertexId)> = all
                        .iter()
                        .filter(|(other, _)| other != id)
                        .map(|(_, e)| e.pair())
                        .collect();
                    let after = bfs_component_count(&vertices, &remaining);
                    assert_eq!(g.is_bridge(*id).unwrap(), after > before, "{pairs:?}");
                }
                checked += 1;
            }
        }
    }
    assert_eq!(checked, (1 + 6 + 36 + 216 + 1296) + (1 + 10 + 100 + 1000 + 10000));
}

fn shuffled_copy(b: &Bigraph, seed: u64) -> Bigraph {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let relabel = |side: &MultiGraph, rng: &mut rand_chacha::ChaCha8Rng| {
        let verts: Vec<VertexId> = side.vertices().collect();
        let mut images: Vec<u32> = (0..verts.len() as u32).map(|i| 1000 + i).collect();
        images.shuffle(rng);
        side.relabel(|v| {
            let idx = verts.binary_search(&v).unwrap();
            VertexId(images[idx])
        })
    };
    Bigraph::new(relabel(b.g(), &mut rng), relabel(b.h(), &mut rng)).unwrap()
}

#[test]
fn canonical_key_survives_a_hundred_relabelings() {
    let corpus: Vec<Bigraph> = enumerate_laman(5)
        .unwrap()
        .graphs
        .iter()
        .map(|g| Bigraph::duplicate(g).unwrap())
        .chain([Bigraph::new(
            MultiGraph::from_edges(&[(0, 1), (1, 2), (0, 2), (2, 3)]),
            MultiGraph::from_edges(&[(0, 1), (0, 2), (0, 3), (0, 4)]),
        )
        .unwrap()])
        .collect();
    for (i, b) in corpus.iter().enumerate() {
        let key = canonical_key(b);
        let swap_key = canonical_key_mod_swap(b);
        for seed in 0..100u64 {
            let copy = shuffled_copy(b, seed.wrapping_add((i as u64) << 32));
            assert_eq!(canonical_key(&copy), key);
            assert_eq!(canonical_key_mod_swap(&copy), swap_key);
        }
    }
}

/// Brute-force bigraph isomorphism for tiny instances: try every pair of
/// side bijections and compare the multiset of biedge endpoint images.
fn isomorphic_by_brute_force(a: &Bigraph, b: &Bigraph) -> bool {
    fn signature(
        b: &Bigraph,
        perm_g: &BTreeMap<VertexId, usize>,
        perm_h: &BTreeMap<VertexId, usize>,
    ) -> Vec<((usize, usize), (usize, usize))> {
        let mut sig: Vec<_> = b
            .biedges()
            .map(|e| {
                let (gu, gv) = b.g().ends(e).unwrap().pair();
                let (ht, hw) = b.h().ends(e).unwrap().pair();
                let ordered = |x: usize, y: usize| (x.min(y), x.max(y));
                (
                    ordered(perm_g[&gu], perm_g[&gv]),
                    ordered(perm_h[&ht], perm_h[&hw]),
                )
            })
            .collect();
        sig.sort_unstable();
        sig
    }
    fn permutations(k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for rest in permutations(k - 1) {
            for slot in 0..k {
                let mut p = rest.clone();
                p.insert(slot, k - 1);
                out.push(p);
            }
        }
        out
    }
    let (ag, ah): (Vec<_>, Vec<_>) = (a.g().vertices().collect(), a.h().vertices().collect());
    let (bg, bh): (Vec<_>, Vec<_>) = (b.g().vertices().collect(), b.h().vertices().collect());
    if ag.len() != bg.len() || ah.len() != bh.len() || a.biedge_count() != b.biedge_count() {
        return false;
    }
    let identity = |verts: &[VertexId]| -> BTreeMap<VertexId, usize> {
        verts.iter().enumerate().map(|(i, &v)| (v, i)).collect()
    };
    let (id_bg, id_bh) = (identity(&bg), identity(&bh));
    let reference = signature(b, &id_bg, &id_bh);
    for pg in permutations(ag.len()) {
        let map_g: BTreeMap<VertexId, usize> =
            ag.iter().enumerate().map(|(i, &v)| (v, pg[i])).collect();
        for ph in permutations(ah.len()) {
            let map_h: BTreeMap<VertexId, usize> =
                ah.iter().enumerate().map(|(i, &v)| (v, ph[i])).collect();
            if signature(a, &map_g, &map_h) == reference {
                return true;
            }
        }
    }
    false
}

/// Keys must be exact: equal keys exactly when the bigraphs are
/// isomorphic. Checked against brute force on a family of tiny bigraphs.
#[test]
fn canonical_key_is_exact_on_tiny_bigraphs() {
    use rand::Rng;
    use rand::SeedableRng;
    let mut corpus = Vec::new();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    for _ in 0..60 {
        let m = rng.gen_range(1..=4usize);
        let nv = rng.gen_range(2..=4u32);
        let side = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut g = MultiGraph::new();
            for v in 0..nv {
                g.add_vertex(VertexId(v));
            }
            for k in 0..m {
                let a = VertexId(rng.gen_range(0..nv));
                let b = VertexId(rng.gen_range(0..nv));
                g.insert_edge(EdgeId(k as u32), Ends::new(a, b));
            }
            g
        };
        let g = side(&mut rng);
        let h = side(&mut rng);
        corpus.push(Bigraph::new(g, h).unwrap());
    }
    for i in 0..corpus.len() {
        for j in i..corpus.len() {
            let same_key = canonical_key(&corpus[i]) == canonical_key(&corpus[j]);
            let isomorphic = isomorphic_by_brute_force(&corpus[i], &corpus[j]);
            assert_eq!(
                same_key, isomorphic,
                "key equality must coincide with isomorphism (pair {i},{j})"
            );
        }
    }
}

#[test]
fn count_is_invariant_under_side_swap() {
    for g in enumerate_laman(6).unwrap().graphs.iter().take(5) {
        let b = Bigraph::duplicate(g).unwrap();
        let m: BTreeSet<EdgeId> = b.biedges().take(2).collect();
        let q = b.left_quot(&m).unwrap();
        let plain = lam(&q, &MemoTable::new()).unwrap();
        let swapped = lam(&q.swap(), &MemoTable::new()).unwrap();
        assert_eq!(plain, swapped);
    }
}

#[test]
fn laman_iff_henneberg_sequence_exists() {
    // Catalog graphs are Laman and must decompose; random perturbations
    // agree in both directions.
    use rand::Rng;
    use rand::SeedableRng;
    for n in 2..=6u32 {
        for g in enumerate_laman(n).unwrap().graphs {
            assert!(henneberg_sequence(&g).unwrap().is_some());
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4242);
    let mut seen_non_laman = 0;
    for _ in 0..300 {
        let n = rng.gen_range(3..=8u32);
        let target = 2 * n as usize - 3;
        let mut g = MultiGraph::new();
        for v in 0..n {
            g.add_vertex(VertexId(v));
        }
        let mut present: BTreeSet<(u32, u32)> = BTreeSet::new();
        while present.len() < target && present.len() < n as usize * (n as usize - 1) / 2 {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                present.insert((a.min(b), a.max(b)));
            }
        }
        for &(a, b) in &present {
            g.add_edge(VertexId(a), VertexId(b));
        }
        let laman = is_laman(&g).unwrap();
        let sequence = henneberg_sequence(&g).unwrap();
        assert_eq!(laman, sequence.is_some());
        if !laman {
            seen_non_laman += 1;
        }
    }
    assert!(seen_non_laman > 20, "sample should include non-Laman graphs");
}

#[test]
fn round_trips_preserve_isomorphism_in_both_formats() {
    for g in enumerate_laman(6).unwrap().graphs {
        let b = canonical_key(&Bigraph::duplicate(&g).unwrap());
        let text = format::write_edge_list(&g, None);
        let from_text = format::parse_edge_list(&text).unwrap().graph;
        assert_eq!(
            canonical_key(&Bigraph::duplicate(&from_text).unwrap()),
            b
        );
        let g6 = format::write_graph6(&g).unwrap();
        let from_g6 = format::parse_graph6(&g6).unwrap();
        assert_eq!(canonical_key(&Bigraph::duplicate(&from_g6).unwrap()), b);
    }
}

#[test]
fn oracle_agrees_on_asymmetric_bigraphs() {
    use laman::oracle::{verify, VerifyStatus};
    // A bigraph that untangles into two paired triangles (count 4), one
    // with a one-sided parallel biedge (count 2), and a quotient of a
    // duplicated graph: all non-duplicated instances.
    let mut untangling_g =
        MultiGraph::from_edges(&[(0, 1), (1, 2), (0, 2), (10, 11), (11, 12), (10, 12)]);
    untangling_g.insert_edge(EdgeId(6), Ends::new(VertexId(0), VertexId(1)));
    let mut untangling_h =
        MultiGraph::from_edges(&[(0, 1), (1, 2), (0, 2), (10, 11), (11, 12), (10, 12)]);
    untangling_h.insert_edge(EdgeId(6), Ends::new(VertexId(10), VertexId(11)));

    let mut bridged = MultiGraph::from_edges(&[(0, 1), (1, 2), (0, 2)]);
    bridged.add_vertex(VertexId(3));
    bridged.insert_edge(EdgeId(3), Ends::new(VertexId(2), VertexId(3)));
    let mut parallel = MultiGraph::from_edges(&[(0, 1), (1, 2), (0, 2)]);
    parallel.insert_edge(EdgeId(3), Ends::new(VertexId(0), VertexId(1)));

    let six = MultiGraph::from_edges(&[
        (1, 2), (1, 3), (1, 4), (2, 3), (2, 5), (3, 6), (4, 5), (4, 6), (5, 6),
    ]);
    let quotient = Bigraph::duplicate(&six)
        .unwrap()
        .left_quot(&[EdgeId(0)].into())
        .unwrap();

    let corpus = [
        Bigraph::new(untangling_g, untangling_h).unwrap(),
        Bigraph::new(bridged, parallel).unwrap(),
        quotient,
    ];
    for (i, b) in corpus.iter().enumerate() {
        assert!(b.is_pseudo_laman());
        let expected = lam(b, &MemoTable::new()).unwrap();
        let report = verify(b, expected, 30_000).unwrap();
        assert_eq!(
            report.status,
            VerifyStatus::Agree,
            "bigraph {i}: expected {expected}, counted {}",
            report.counted
        );
    }
}

#[test]
fn oracle_counts_are_seed_and_cluster_stable() {
    // Third entry of the five-vertex catalog, checked across three seeds
    // and a halved clustering radius.
    let g = enumerate_laman(5).unwrap().graphs[2].clone();
    let expected = lam_graph(&g).unwrap().get() as usize;
    let b = Bigraph::duplicate(&g).unwrap();
    let pivot = laman::count::choose_pivot(&b).unwrap();
    for seed in [5u64, 6, 7] {
        let sys = build_system(&b, pivot, seed).unwrap();
        let sols = count_solutions(&sys, 4_000, DEFAULT_TOL, DEFAULT_CLUSTER_TOL, seed);
        assert_eq!(sols.count, expected, "seed {seed}");
        let tight = count_solutions(&sys, 4_000, DEFAULT_TOL, DEFAULT_CLUSTER_TOL / 2.0, seed);
        assert_eq!(tight.count, expected, "seed {seed}, tight clustering");
        assert!(sols.residual < DEFAULT_TOL);
    }
}
