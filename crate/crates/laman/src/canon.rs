//! Canonical forms for bigraphs and simple graphs.
//!
//! A bigraph is encoded as a vertex-colored incidence graph: one node per
//! left vertex, one per right vertex, and one per biedge, with each biedge
//! node adjacent to its endpoints on both sides. Color-preserving
//! isomorphisms of that encoding are exactly the bigraph isomorphisms
//! (pairs of graph isomorphisms compatible with the biedge bijection), so a
//! canonical form of the encoding is an exact isomorphism key.
//!
//! Canonicalization is iterative color refinement followed by backtracking
//! over the refinement-stable cells, taking the lexicographically least
//! certificate. Exactness matters here: the keys gate a memo table, so two
//! keys may collide only when the bigraphs really are isomorphic.

use crate::graph::Bigraph;

/// A deterministic, isomorphism-invariant encoding of a bigraph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub(crate) fn from_bytes(bytes: Vec<u8>) -> Self {
        CanonicalKey(bytes)
    }
}

/// Key invariant under relabeling of either side's vertices and of the
/// biedge identifiers. The two sides keep their roles; see
/// [`canonical_key_mod_swap`] for the variant that also forgets which side
/// is which.
pub fn canonical_key(b: &Bigraph) -> CanonicalKey {
    CanonicalKey(bigraph_certificate(b, false))
}

/// Like [`canonical_key`], but additionally invariant under exchanging the
/// two sides of the bigraph.
pub fn canonical_key_mod_swap(b: &Bigraph) -> CanonicalKey {
    let plain = bigraph_certificate(b, false);
    let swapped = bigraph_certificate(b, true);
    CanonicalKey(plain.min(swapped))
}

fn bigraph_certificate(b: &Bigraph, swap: bool) -> Vec<u8> {
    let (first, second) = if swap { (b.h(), b.g()) } else { (b.g(), b.h()) };
    let gv: Vec<_> = first.vertices().collect();
    let hv: Vec<_> = second.vertices().collect();
    let gindex = |v| gv.binary_search(&v).unwrap();
    let hindex = |v| hv.binary_search(&v).unwrap();
    let gn = gv.len();
    let hn = hv.len();
    let m = b.biedge_count();

    let mut colors = vec![0u32; gn];
    colors.extend(std::iter::repeat_n(1, hn));
    colors.extend(std::iter::repeat_n(2, m));
    let mut adj = vec![Vec::new(); gn + hn + m];
    for (slot, e) in first.edge_ids().enumerate() {
        let node = (gn + hn + slot) as u32;
        let ge = first.ends(e).unwrap();
        let he = second.ends(e).unwrap();
        for v in [ge.pair().0, ge.pair().1] {
            link(&mut adj, node, gindex(v) as u32);
        }
        for w in [he.pair().0, he.pair().1] {
            link(&mut adj, node, (gn + hindex(w)) as u32);
        }
    }
    for nbrs in &mut adj {
        nbrs.sort_unstable();
        nbrs.dedup();
    }
    certificate(&colors, &adj)
}

fn link(adj: &mut [Vec<u32>], a: u32, b: u32) {
    if !adj[a as usize].contains(&b) {
        adj[a as usize].push(b);
        adj[b as usize].push(a);
    }
}

/// Canonical certificate of a vertex-colored simple graph given by sorted
/// adjacency lists. Equal certificates exactly characterize color-preserving
/// isomorphism.
pub(crate) fn certificate(colors: &[u32], adj: &[Vec<u32>]) -> Vec<u8> {
    canonical_form(colors, adj).0
}

/// Certificate plus the node positions realizing it: node `v` sits at
/// position `labeling[v]` of the canonical form.
pub(crate) fn canonical_form(colors: &[u32], adj: &[Vec<u32>]) -> (Vec<u8>, Vec<u32>) {
    let n = colors.len();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    // Initial invariant ranking by input color.
    let mut ranks: Vec<u32> = {
        let mut distinct: Vec<u32> = colors.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        colors
            .iter()
            .map(|c| distinct.binary_search(c).unwrap() as u32)
            .collect()
    };
    refine(&mut ranks, adj);
    let mut best: Option<(Vec<u8>, Vec<u32>)> = None;
    search(&ranks, colors, adj, &mut best);
    best.expect("canonical search always yields a certificate")
}

/// Equitable refinement: re-rank nodes by (rank, sorted neighbor ranks)
/// until the partition stabilizes. Ranks stay isomorphism-invariant because
/// the new ranks are assigned by signature order.
fn refine(ranks: &mut Vec<u32>, adj: &[Vec<u32>]) {
    let n = ranks.len();
    loop {
        let mut sigs: Vec<(u32, Vec<u32>)> = Vec::with_capacity(n);
        for v in 0..n {
            let mut nbr: Vec<u32> = adj[v].iter().map(|&u| ranks[u as usize]).collect();
            nbr.sort_unstable();
            sigs.push((ranks[v], nbr));
        }
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_by(|&a, &b| sigs[a as usize].cmp(&sigs[b as usize]));
        let mut next = vec![0u32; n];
        let mut cells = 0u32;
        for i in 0..n {
            if i > 0 && sigs[order[i] as usize] != sigs[order[i - 1] as usize] {
                cells += 1;
            }
            next[order[i] as usize] = cells;
        }
        let old_cells = count_cells(ranks);
        let stable = cells + 1 == old_cells;
        *ranks = next;
        if stable {
            return;
        }
    }
}

fn count_cells(ranks: &[u32]) -> u32 {
    ranks.iter().copied().max().map_or(0, |m| m + 1)
}

fn search(
    ranks: &[u32],
    colors: &[u32],
    adj: &[Vec<u32>],
    best: &mut Option<(Vec<u8>, Vec<u32>)>,
) {
    let n = ranks.len();
    if count_cells(ranks) as usize == n {
        let cert = encode(ranks, colors, adj);
        if best.as_ref().is_none_or(|(b, _)| cert < *b) {
            *best = Some((cert, ranks.to_vec()));
        }
        return;
    }
    // Branch on the smallest non-singleton cell (first such rank).
    let mut count = vec![0u32; count_cells(ranks) as usize];
    for &r in ranks {
        count[r as usize] += 1;
    }
    let target = (0..count.len())
        .filter(|&c| count[c] > 1)
        .min_by_key(|&c| (count[c], c))
        .expect("a non-discrete partition has a non-singleton cell");
    for v in 0..n {
        if ranks[v] as usize != target {
            continue;
        }
        // Individualize v ahead of the rest of its cell, then refine.
        let mut branched: Vec<u32> = ranks
            .iter()
            .enumerate()
            .map(|(u, &r)| 2 * r + u32::from(u != v))
            .collect();
        refine(&mut branched, adj);
        search(&branched, colors, adj, best);
    }
}

/// Serializes the graph under the discrete labeling `ranks`.
fn encode(ranks: &[u32], colors: &[u32], adj: &[Vec<u32>]) -> Vec<u8> {
    let n = ranks.len();
    let mut by_position = vec![0u32; n];
    for (v, &r) in ranks.iter().enumerate() {
        by_position[r as usize] = v as u32;
    }
    let mut out = Vec::with_capacity(8 + 4 * n);
    out.extend_from_slice(&(n as u32).to_le_bytes());
    for &v in &by_position {
        out.extend_from_slice(&colors[v as usize].to_le_bytes());
    }
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for (v, &r) in ranks.iter().enumerate() {
        for &u in &adj[v] {
            let ru = ranks[u as usize];
            if r < ru {
                edges.push((r, ru));
            }
        }
    }
    edges.sort_unstable();
    for (a, bpos) in edges {
        out.extend_from_slice(&a.to_le_bytes());
        out.extend_from_slice(&bpos.to_le_bytes());
    }
    out
}
