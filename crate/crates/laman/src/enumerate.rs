//! Catalogs of all Laman graphs on a given number of vertices.
//!
//! Generation is breadth-first over the vertex count: every graph on `n`
//! vertices arises from one on `n - 1` by a Henneberg move, so expanding
//! every catalog entry by every kind-I pair and every kind-II edge/vertex
//! combination and rejecting isomorphic duplicates yields the next level
//! exactly. Duplicate rejection uses the canonical forms from
//! [`crate::canon`].

use dashmap::DashSet;
use rayon::prelude::*;

use crate::canon;
use crate::count::{Engine, LamValue, MemoTable};
use crate::error::{Error, Result};
use crate::graph::{MultiGraph, VertexId};

/// Vertex counts above this are refused unless the caller raises the cap;
/// the level sizes grow by roughly a factor of twenty per step.
pub const DEFAULT_CAP: u32 = 10;

/// All Laman graphs on `n` vertices, one canonical representative per
/// isomorphism class.
#[derive(Debug, Clone)]
pub struct Catalog {
    pub n: u32,
    pub graphs: Vec<MultiGraph>,
}

impl Catalog {
    pub fn count(&self) -> usize {
        self.graphs.len()
    }
}

/// Compact adjacency-matrix graph used only inside the generator.
#[derive(Debug, Clone, Copy)]
struct Dense {
    n: u8,
    rows: [u32; 16],
}

impl Dense {
    fn single_edge() -> Self {
        let mut g = Dense { n: 2, rows: [0; 16] };
        g.link(0, 1);
        g
    }

    fn link(&mut self, a: usize, b: usize) {
        self.rows[a] |= 1 << b;
        self.rows[b] |= 1 << a;
    }

    fn unlink(&mut self, a: usize, b: usize) {
        self.rows[a] &= !(1 << b);
        self.rows[b] &= !(1 << a);
    }

    fn has(&self, a: usize, b: usize) -> bool {
        self.rows[a] & (1 << b) != 0
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n as usize;
        let mut out = Vec::with_capacity(2 * n);
        for a in 0..n {
            for b in a + 1..n {
                if self.has(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Children under the first Henneberg rule.
    fn expand_kind1(&self, out: &mut Vec<Dense>) {
        let n = self.n as usize;
        for u in 0..n {
            for v in u + 1..n {
                let mut child = *self;
                child.n += 1;
                child.link(u, n);
                child.link(v, n);
                out.push(child);
            }
        }
    }

    /// Children under the second Henneberg rule.
    fn expand_kind2(&self, out: &mut Vec<Dense>) {
        let n = self.n as usize;
        for (u, v) in self.edges() {
            for w in 0..n {
                if w == u || w == v {
                    continue;
                }
                let mut child = *self;
                child.n += 1;
                child.unlink(u, v);
                child.link(u, n);
                child.link(v, n);
                child.link(w, n);
                out.push(child);
            }
        }
    }

    /// Canonical certificate plus the canonically relabeled copy.
    fn canonical(&self) -> (Vec<u8>, Dense) {
        let n = self.n as usize;
        let colors = vec![0u32; n];
        let adj: Vec<Vec<u32>> = (0..n)
            .map(|a| (0..n as u32).filter(|&b| self.has(a, b as usize)).collect())
            .collect();
        let (cert, labeling) = canon::canonical_form(&colors, &adj);
        let mut relabeled = Dense {
            n: self.n,
            rows: [0; 16],
        };
        for (a, b) in self.edges() {
            relabeled.link(labeling[a] as usize, labeling[b] as usize);
        }
        (cert, relabeled)
    }

    fn to_multigraph(self) -> MultiGraph {
        let mut g = MultiGraph::new();
        for v in 0..self.n {
            g.add_vertex(VertexId(v as u32));
        }
        for (a, b) in self.edges() {
            g.add_edge(VertexId(a as u32), VertexId(b as u32));
        }
        g
    }
}

fn check_cap(n: u32, cap: u32) -> Result<()> {
    if n > cap {
        return Err(Error::AboveCap { requested: n, cap });
    }
    if !(2..=16).contains(&n) {
        return Err(Error::Unsupported(format!(
            "enumeration covers 2..=16 vertices (got {n})"
        )));
    }
    Ok(())
}

fn level_up(level: &[Dense]) -> Vec<Dense> {
    let seen: DashSet<Vec<u8>> = DashSet::new();
    let mut next: Vec<(Vec<u8>, Dense)> = level
        .par_iter()
        .flat_map_iter(|parent| {
            let mut children = Vec::new();
            parent.expand_kind1(&mut children);
            parent.expand_kind2(&mut children);
            children
        })
        .filter_map(|child| {
            let (cert, relabeled) = child.canonical();
            seen.insert(cert.clone()).then_some((cert, relabeled))
        })
        .collect();
    next.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    next.into_iter().map(|(_, g)| g).collect()
}

/// Streams every Laman graph on `n` vertices (each isomorphism class once,
/// canonically labeled, in a deterministic order) and returns how many
/// there were.
pub fn for_each_laman(n: u32, cap: u32, mut f: impl FnMut(&MultiGraph)) -> Result<u64> {
    check_cap(n, cap)?;
    let mut level = vec![Dense::single_edge()];
    for _ in 2..n {
        level = level_up(&level);
    }
    let mut count = 0;
    for dense in &level {
        f(&dense.to_multigraph());
        count += 1;
    }
    Ok(count)
}

/// Collects the catalog of Laman graphs on `n` vertices under the default
/// cap of [`DEFAULT_CAP`].
pub fn enumerate_laman(n: u32) -> Result<Catalog> {
    enumerate_laman_capped(n, DEFAULT_CAP)
}

/// Like [`enumerate_laman`] with an explicit cap (a resource guard, not a
/// correctness bound).
pub fn enumerate_laman_capped(n: u32, cap: u32) -> Result<Catalog> {
    let mut graphs = Vec::new();
    for_each_laman(n, cap, |g| graphs.push(g.clone()))?;
    Ok(Catalog { n, graphs })
}

/// The smallest and largest realization count over the catalog for `n`,
/// with a witness graph attaining the maximum.
#[derive(Debug, Clone)]
pub struct Extremal {
    pub n: u32,
    pub min: LamValue,
    pub max: LamValue,
    pub argmax: MultiGraph,
}

/// Computes [`Extremal`] for `n`, sharing `memo` across the whole catalog.
pub fn extremal_laman_with(n: u32, cap: u32, memo: &MemoTable) -> Result<Extremal> {
    let catalog = enumerate_laman_capped(n, cap)?;
    let engine = Engine::new(memo);
    let per_graph: Vec<(LamValue, usize)> = catalog
        .graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| Ok((engine.lam_graph(g)?, i)))
        .collect::<Result<_>>()?;
    let min = per_graph.iter().map(|&(v, _)| v).min().expect("catalog is never empty");
    // Ties broken toward the earliest catalog position, which is canonical.
    let (max, argmax) = per_graph
        .iter()
        .map(|&(v, i)| (v, std::cmp::Reverse(i)))
        .max()
        .map(|(v, std::cmp::Reverse(i))| (v, i))
        .expect("catalog is never empty");
    Ok(Extremal {
        n,
        min,
        max,
        argmax: catalog.graphs[argmax].clone(),
    })
}

/// [`extremal_laman_with`] with a fresh memo table and the default cap.
pub fn extremal_laman(n: u32) -> Result<Extremal> {
    extremal_laman_with(n, DEFAULT_CAP, &MemoTable::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::is_laman;

    #[test]
    fn tiny_catalogs_have_known_sizes() {
        for (n, expected) in [(2u32, 1usize), (3, 1), (4, 1), (5, 3), (6, 13)] {
            let catalog = enumerate_laman(n).unwrap();
            assert_eq!(catalog.count(), expected, "n = {n}");
            for g in &catalog.graphs {
                assert_eq!(g.vertex_count(), n as usize);
                assert!(is_laman(g).unwrap());
            }
        }
    }

    #[test]
    fn no_two_catalog_entries_are_isomorphic() {
        let catalog = enumerate_laman(6).unwrap();
        let mut keys = std::collections::BTreeSet::new();
        for g in &catalog.graphs {
            let key = canon::canonical_key(&crate::graph::Bigraph::duplicate(g).unwrap());
            assert!(keys.insert(key), "duplicate isomorphism class in catalog");
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert_eq!(
            enumerate_laman_capped(11, 10).unwrap_err(),
            Error::AboveCap {
                requested: 11,
                cap: 10
            }
        );
    }

    #[test]
    fn extremal_for_small_n() {
        let e = extremal_laman(5).unwrap();
        assert_eq!(e.min.get(), 8);
        assert_eq!(e.max.get(), 8);
        assert!(is_laman(&e.argmax).unwrap());
        let e6 = extremal_laman(6).unwrap();
        assert_eq!(e6.min.get(), 16);
        assert_eq!(e6.max.get(), 24);
        assert_eq!(
            crate::count::lam_graph(&e6.argmax).unwrap().get(),
            24
        );
    }

    #[test]
    fn enumeration_is_deterministic() {
        let a = enumerate_laman(6).unwrap();
        let b = enumerate_laman(6).unwrap();
        assert_eq!(a.graphs, b.graphs);
    }
}
