//! The exact counting engine.
//!
//! [`lam`] computes the realization count of a bigraph by a recursion on
//! the biedge set: for a pivot biedge `ē`, the count splits into the two
//! single-biedge quotients plus a sum over all ways to cover the biedges by
//! two sets overlapping exactly in `ē`, each summand being the product of
//! the counts of the corresponding one-sided quotients. Every term strictly
//! reduces the number of biedges, and the recursion bottoms out at
//! self-loops (count 0) and the paired single edge (count 1).
//!
//! Subproblems repeat heavily, so results are memoized under exact
//! isomorphism keys from [`crate::canon`]. Three sound shortcuts are applied
//! when enabled: a biedge that is a bridge on both sides forces the count
//! to zero; a biedge that is a bridge on exactly one side can be deleted
//! from both; and a bigraph that untangles through a non-bridge biedge
//! splits into two independent factors. All shortcuts can be switched off
//! to run the bare recursion.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use dashmap::DashMap;
use rayon::prelude::*;

use crate::canon::{self, CanonicalKey};
use crate::check;
use crate::error::{Error, Result};
use crate::graph::{Bigraph, EdgeId, MultiGraph};

/// Largest supported biedge count; the subset sweep enumerates
/// `2^(biedges - 1)` pairs, so this is a resource guard, not a tuning knob.
pub const MAX_BIEDGES: usize = 30;

/// An exact nonnegative realization count. Arithmetic on these values is
/// overflow-checked; the engine reports [`Error::Overflow`] instead of
/// wrapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(transparent)]
pub struct LamValue(u64);

impl LamValue {
    pub const ZERO: LamValue = LamValue(0);
    pub const ONE: LamValue = LamValue(1);

    pub fn new(v: u64) -> Self {
        LamValue(v)
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for LamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn checked_add(a: u64, b: u64) -> Result<u64> {
    a.checked_add(b).ok_or(Error::Overflow)
}

fn checked_mul(a: u64, b: u64) -> Result<u64> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

/// Shared memo table mapping canonical keys to final counts. A key is only
/// ever written with one value; concurrent duplicate inserts of that value
/// are harmless.
#[derive(Debug, Default)]
pub struct MemoTable {
    map: DashMap<CanonicalKey, u64>,
}

impl MemoTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn clear(&self) {
        self.map.clear()
    }

    fn get(&self, key: &CanonicalKey) -> Option<u64> {
        self.map.get(key).map(|v| *v)
    }

    fn put(&self, key: CanonicalKey, value: u64) {
        let prev = self.map.insert(key, value);
        debug_assert!(
            prev.is_none_or(|p| p == value),
            "memo key remapped to a different value"
        );
    }
}

/// Toggles for the sound-but-optional shortcuts of the recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Reductions {
    /// Bridge rules: two-sided bridge means count zero; one-sided bridge is
    /// deleted from both sides.
    pub bridges: bool,
    /// Split through a non-bridge biedge into two independent factors.
    pub untangle: bool,
    /// Skip subset-sweep terms whose contracted side acquires a self-loop.
    pub loop_prune: bool,
}

impl Reductions {
    pub fn all() -> Self {
        Reductions {
            bridges: true,
            untangle: true,
            loop_prune: true,
        }
    }

    /// The bare recursion, with no shortcuts beyond its own statement.
    pub fn none() -> Self {
        Reductions {
            bridges: false,
            untangle: false,
            loop_prune: false,
        }
    }
}

impl Default for Reductions {
    fn default() -> Self {
        Reductions::all()
    }
}

/// Engine configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    pub reductions: Reductions,
    /// Canonicalize memo keys over the side swap as well. Sound because the
    /// count is invariant under exchanging the two sides, and profitable
    /// because on duplicated graphs the left and right quotients of one
    /// subset are side swaps of each other.
    pub swap_memo: bool,
    /// Evaluate wide subset sweeps on the rayon pool.
    pub parallel: bool,
    /// Force this biedge as the pivot of the top-level recursion step.
    pub pivot: Option<EdgeId>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            reductions: Reductions::all(),
            swap_memo: true,
            parallel: false,
            pivot: None,
        }
    }
}

/// Counting statistics for one engine run.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct LamReport {
    pub value: LamValue,
    /// Recursion nodes entered (memo hits included).
    pub nodes: u64,
    pub memo_hits: u64,
    #[serde(serialize_with = "serialize_wall_ms")]
    pub wall: Duration,
}

fn serialize_wall_ms<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

/// The recursion driver. Borrow one [`MemoTable`] for as many calls as
/// should share work.
pub struct Engine<'m> {
    memo: &'m MemoTable,
    opts: Options,
    nodes: AtomicU64,
    hits: AtomicU64,
}

impl<'m> Engine<'m> {
    pub fn new(memo: &'m MemoTable) -> Self {
        Engine::with_options(memo, Options::default())
    }

    pub fn with_options(memo: &'m MemoTable, opts: Options) -> Self {
        Engine {
            memo,
            opts,
            nodes: AtomicU64::new(0),
            hits: AtomicU64::new(0),
        }
    }

    /// Realization count of an arbitrary bigraph.
    pub fn lam(&self, b: &Bigraph) -> Result<LamValue> {
        let (node, slots) = compact(b)?;
        let forced = match self.opts.pivot {
            Some(e) => Some(
                slots
                    .iter()
                    .position(|&s| s == e)
                    .ok_or(Error::UnknownEdge(e))?,
            ),
            None => None,
        };
        self.lam_node(&node, forced).map(LamValue)
    }

    /// Realization count of a Laman graph, as the count of its duplicated
    /// bigraph. Rejects non-Laman inputs with the violated condition.
    pub fn lam_graph(&self, g: &MultiGraph) -> Result<LamValue> {
        if let Some(violation) = check::laman_violation(g)? {
            return Err(Error::NotLaman(violation.to_string()));
        }
        self.lam(&Bigraph::duplicate(g)?)
    }

    /// Like [`Engine::lam`], with node and memo statistics.
    pub fn lam_report(&self, b: &Bigraph) -> Result<LamReport> {
        let start = Instant::now();
        let before_nodes = self.nodes.load(Ordering::Relaxed);
        let before_hits = self.hits.load(Ordering::Relaxed);
        let value = self.lam(b)?;
        Ok(LamReport {
            value,
            nodes: self.nodes.load(Ordering::Relaxed) - before_nodes,
            memo_hits: self.hits.load(Ordering::Relaxed) - before_hits,
            wall: start.elapsed(),
        })
    }

    pub fn nodes_visited(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }

    pub fn memo_hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    fn key(&self, node: &Node) -> CanonicalKey {
        if self.opts.swap_memo {
            node.certificate(false).min(node.certificate(true))
        } else {
            node.certificate(false)
        }
    }

    fn lam_node(&self, node: &Node, forced_pivot: Option<usize>) -> Result<u64> {
        self.nodes.fetch_add(1, Ordering::Relaxed);
        let m = node.biedges();
        if node.g.has_loop() || node.h.has_loop() {
            return Ok(0);
        }
        let dim_g = node.g.dimension();
        let dim_h = node.h.dimension();
        if dim_g + dim_h != m + 1 {
            return Ok(0);
        }
        if m == 1 {
            // Loop-free, pseudo-Laman, no isolated vertices: a paired
            // single edge.
            return Ok(1);
        }
        let key = self.key(node);
        if let Some(v) = self.memo.get(&key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(v);
        }

        let full = mask_full(m);
        let bridges_g = node.g.bridge_mask();
        let bridges_h = node.h.bridge_mask();
        if self.opts.reductions.bridges {
            if bridges_g & bridges_h != 0 {
                self.memo.put(key, 0);
                return Ok(0);
            }
            let one_sided = bridges_g | bridges_h;
            if one_sided != 0 {
                let slot = one_sided.trailing_zeros();
                let reduced = node.sub(full & !(1 << slot));
                let v = self.lam_node(&reduced, None)?;
                self.memo.put(key, v);
                return Ok(v);
            }
        }
        if self.opts.reductions.untangle {
            let cc_g = node.g.nv as usize - dim_g;
            let cc_h = node.h.nv as usize - dim_h;
            if cc_g > 1 || cc_h > 1 {
                if let Some((mask1, mask2)) = node.untangle(bridges_g | bridges_h) {
                    let v1 = self.lam_node(&node.sub(mask1), None)?;
                    let v2 = self.lam_node(&node.sub(mask2), None)?;
                    let v = checked_mul(v1, v2)?;
                    self.memo.put(key, v);
                    return Ok(v);
                }
            }
        }

        let pivot = forced_pivot.unwrap_or_else(|| node.choose_pivot(bridges_g, bridges_h));
        let pivot_bit = 1u32 << pivot;
        let mut total = self.lam_node(&node.left_quot(pivot_bit), None)?;
        total = checked_add(total, self.lam_node(&node.right_quot(pivot_bit), None)?)?;

        let others: Vec<u32> = (0..m as u32).filter(|&i| i != pivot as u32).collect();
        let sweep = |k: u64| -> Result<u64> {
            let mut m_mask = pivot_bit;
            for (bit, &slot) in others.iter().enumerate() {
                if k & (1u64 << bit) != 0 {
                    m_mask |= 1 << slot;
                }
            }
            let n_mask = (full & !m_mask) | pivot_bit;
            match self.pair_term(node, m, m_mask, n_mask, dim_g, dim_h)? {
                Some(term) => Ok(term),
                None => Ok(0),
            }
        };
        let top = (1u64 << (m - 1)) - 1; // k ranges over 1..top
        let sum = if self.opts.parallel && m >= 14 {
            (1..top)
                .into_par_iter()
                .try_fold(|| 0u64, |acc, k| checked_add(acc, sweep(k)?))
                .try_reduce(|| 0u64, checked_add)?
        } else {
            let mut acc = 0u64;
            for k in 1..top {
                acc = checked_add(acc, sweep(k)?)?;
            }
            acc
        };
        total = checked_add(total, sum)?;
        self.memo.put(key, total);
        Ok(total)
    }

    /// One summand of the subset sweep, or `None` when it is skipped.
    fn pair_term(
        &self,
        node: &Node,
        m: usize,
        m_mask: u32,
        n_mask: u32,
        dim_g: usize,
        dim_h: usize,
    ) -> Result<Option<u64>> {
        let full = mask_full(m);
        // (G/M, H\M) must be pseudo-Laman on its |E| - |M| biedges.
        let left_biedges = (full & !m_mask).count_ones() as usize;
        let (unions_gm, loop_left) = node.g.contract_info(m_mask);
        let dim_g_quot = dim_g - unions_gm as usize;
        let dim_h_del = node.h.unions_over(full & !m_mask) as usize;
        if dim_g_quot + dim_h_del != left_biedges + 1 {
            return Ok(None);
        }
        // (G\N, H/N) must be pseudo-Laman on its |E| - |N| biedges.
        let right_biedges = (full & !n_mask).count_ones() as usize;
        let (unions_hn, loop_right) = node.h.contract_info(n_mask);
        let dim_h_quot = dim_h - unions_hn as usize;
        let dim_g_del = node.g.unions_over(full & !n_mask) as usize;
        if dim_h_quot + dim_g_del != right_biedges + 1 {
            return Ok(None);
        }
        // A freshly created self-loop forces the factor to zero.
        if self.opts.reductions.loop_prune && (loop_left || loop_right) {
            return Ok(None);
        }
        let left = self.lam_node(&node.left_quot(m_mask), None)?;
        if left == 0 {
            return Ok(Some(0));
        }
        let right = self.lam_node(&node.right_quot(n_mask), None)?;
        Ok(Some(checked_mul(left, right)?))
    }
}

/// Computes the count of a bigraph with default options, sharing `memo`.
pub fn lam(b: &Bigraph, memo: &MemoTable) -> Result<LamValue> {
    Engine::new(memo).lam(b)
}

/// Realization count of a Laman graph with a fresh memo table.
pub fn lam_graph(g: &MultiGraph) -> Result<LamValue> {
    let memo = MemoTable::new();
    Engine::new(&memo).lam_graph(g)
}

/// Like [`lam_graph`], returning statistics alongside the count.
pub fn lam_graph_report(g: &MultiGraph) -> Result<LamReport> {
    if let Some(violation) = check::laman_violation(g)? {
        return Err(Error::NotLaman(violation.to_string()));
    }
    let memo = MemoTable::new();
    Engine::new(&memo).lam_report(&Bigraph::duplicate(g)?)
}

/// Pivot selection policy: a biedge that is a bridge on exactly one side if
/// any exists, otherwise a biedge that is a bridge on neither side with
/// maximal endpoint degrees. Deterministic; `None` only without biedges.
pub fn choose_pivot(b: &Bigraph) -> Option<EdgeId> {
    let ids: Vec<EdgeId> = b.biedges().collect();
    if ids.is_empty() {
        return None;
    }
    let bridge = |side: &MultiGraph, e| side.is_bridge(e).expect("biedge exists");
    if let Some(&e) = ids
        .iter()
        .find(|&&e| bridge(b.g(), e) != bridge(b.h(), e))
    {
        return Some(e);
    }
    let score = |e: EdgeId| {
        let ge = b.g().ends(e).unwrap();
        let he = b.h().ends(e).unwrap();
        b.g().degree(ge.pair().0)
            + b.g().degree(ge.pair().1)
            + b.h().degree(he.pair().0)
            + b.h().degree(he.pair().1)
    };
    let free: Vec<EdgeId> = ids
        .iter()
        .copied()
        .filter(|&e| !bridge(b.g(), e) && !bridge(b.h(), e))
        .collect();
    let pool = if free.is_empty() { &ids } else { &free };
    pool.iter().copied().max_by_key(|&e| (score(e), std::cmp::Reverse(e)))
}

/// One term of the subset sweep: two biedge sets covering everything and
/// overlapping exactly in the pivot, both with at least two elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetPair {
    pub m: BTreeSet<EdgeId>,
    pub n: BTreeSet<EdgeId>,
    pub pivot: EdgeId,
}

/// Streams every admissible `(M, N)` pair for `pivot`. Empty for fewer than
/// three biedges; the full stream has `2^(|E|-1) - 2` pairs before any
/// pseudo-Laman filtering.
pub fn subset_pairs(
    b: &Bigraph,
    pivot: EdgeId,
) -> Result<impl Iterator<Item = SubsetPair> + use<>> {
    if !b.contains_biedge(pivot) {
        return Err(Error::UnknownEdge(pivot));
    }
    let others: Vec<EdgeId> = b.biedges().filter(|&e| e != pivot).collect();
    let top = if b.biedge_count() >= 3 {
        (1u64 << others.len()) - 1
    } else {
        1 // empty range below
    };
    Ok((1..top).map(move |k| {
        let mut m: BTreeSet<EdgeId> = [pivot].into();
        let mut n: BTreeSet<EdgeId> = [pivot].into();
        for (bit, &e) in others.iter().enumerate() {
            if k & (1u64 << bit) != 0 {
                m.insert(e);
            } else {
                n.insert(e);
            }
        }
        SubsetPair { m, n, pivot }
    }))
}

fn mask_full(m: usize) -> u32 {
    if m >= 32 {
        u32::MAX
    } else {
        (1u32 << m) - 1
    }
}

/// One side of a compact bigraph: vertices `0..nv`, one endpoint pair per
/// biedge slot. Slot `i` on both sides is the same biedge.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Side {
    nv: u16,
    ends: Vec<(u16, u16)>,
}

/// Dense, isolated-vertex-free working form of a bigraph. Adding or
/// removing isolated vertices changes neither the dimension balance nor the
/// count, so normalizing them away is sound and improves memo hits.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    g: Side,
    h: Side,
}

/// Union-find over at most 64 vertex slots, kept on the stack.
struct SmallUf {
    parent: [u16; 64],
}

impl SmallUf {
    fn new(n: u16) -> Self {
        let mut parent = [0u16; 64];
        for (i, p) in parent.iter_mut().enumerate().take(n as usize) {
            *p = i as u16;
        }
        SmallUf { parent }
    }

    fn find(&mut self, mut i: u16) -> u16 {
        while self.parent[i as usize] != i {
            let up = self.parent[self.parent[i as usize] as usize];
            self.parent[i as usize] = up;
            i = up;
        }
        i
    }

    fn union(&mut self, a: u16, b: u16) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            false
        } else {
            self.parent[rb.max(ra) as usize] = rb.min(ra);
            true
        }
    }
}

impl Side {
    fn has_loop(&self) -> bool {
        self.ends.iter().any(|&(a, b)| a == b)
    }

    /// Number of successful unions when sweeping the slots in `mask`; this
    /// equals the dimension of the subgraph those slots determine.
    fn unions_over(&self, mask: u32) -> u16 {
        let mut uf = SmallUf::new(self.nv);
        let mut unions = 0;
        for (i, &(a, b)) in self.ends.iter().enumerate() {
            if mask & (1 << i) != 0 && uf.union(a, b) {
                unions += 1;
            }
        }
        unions
    }

    fn dimension(&self) -> usize {
        self.unions_over(u32::MAX) as usize
    }

    /// Unions over `mask` plus whether contracting `mask` turns some
    /// surviving slot into a self-loop.
    fn contract_info(&self, mask: u32) -> (u16, bool) {
        let mut uf = SmallUf::new(self.nv);
        let mut unions = 0;
        for (i, &(a, b)) in self.ends.iter().enumerate() {
            if mask & (1 << i) != 0 && uf.union(a, b) {
                unions += 1;
            }
        }
        let makes_loop = self
            .ends
            .iter()
            .enumerate()
            .any(|(i, &(a, b))| mask & (1 << i) == 0 && uf.find(a) == uf.find(b));
        (unions, makes_loop)
    }

    /// Slots whose removal (edges only) splits a component. Loops and
    /// parallel copies are never bridges.
    fn bridge_mask(&self) -> u32 {
        let full = mask_full(self.ends.len());
        let base = self.unions_over(full);
        let mut mask = 0;
        for i in 0..self.ends.len() {
            let (a, b) = self.ends[i];
            if a == b {
                continue;
            }
            if self.unions_over(full & !(1 << i)) < base {
                mask |= 1 << i;
            }
        }
        mask
    }

    fn degrees(&self) -> Vec<u16> {
        let mut deg = vec![0u16; self.nv as usize];
        for &(a, b) in &self.ends {
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        deg
    }
}

/// Renames vertices densely by first appearance over a slot list.
struct Renamer {
    names: [u16; 64],
    next: u16,
}

impl Renamer {
    fn new() -> Self {
        Renamer {
            names: [u16::MAX; 64],
            next: 0,
        }
    }

    fn name(&mut self, v: u16) -> u16 {
        let slot = &mut self.names[v as usize];
        if *slot == u16::MAX {
            *slot = self.next;
            self.next += 1;
        }
        *slot
    }
}

impl Node {
    fn biedges(&self) -> usize {
        self.g.ends.len()
    }

    /// Keeps exactly the slots in `mask` on both sides, dropping isolated
    /// vertices (plain deletion on both sides).
    fn sub(&self, mask: u32) -> Node {
        Node {
            g: keep_side(&self.g, mask, None),
            h: keep_side(&self.h, mask, None),
        }
    }

    /// `(G/M, H\M)` with biedges outside `mask`.
    fn left_quot(&self, mask: u32) -> Node {
        let keep = mask_full(self.biedges()) & !mask;
        let mut uf = SmallUf::new(self.g.nv);
        for (i, &(a, b)) in self.g.ends.iter().enumerate() {
            if mask & (1 << i) != 0 {
                uf.union(a, b);
            }
        }
        Node {
            g: keep_side(&self.g, keep, Some(&mut uf)),
            h: keep_side(&self.h, keep, None),
        }
    }

    /// `(G\M, H/M)` with biedges outside `mask`.
    fn right_quot(&self, mask: u32) -> Node {
        let keep = mask_full(self.biedges()) & !mask;
        let mut uf = SmallUf::new(self.h.nv);
        for (i, &(a, b)) in self.h.ends.iter().enumerate() {
            if mask & (1 << i) != 0 {
                uf.union(a, b);
            }
        }
        Node {
            g: keep_side(&self.g, keep, None),
            h: keep_side(&self.h, keep, Some(&mut uf)),
        }
    }

    /// Pivot policy on compact nodes; mirrors [`choose_pivot`].
    fn choose_pivot(&self, bridges_g: u32, bridges_h: u32) -> usize {
        let one_sided = bridges_g ^ bridges_h;
        if one_sided != 0 {
            return one_sided.trailing_zeros() as usize;
        }
        let deg_g = self.g.degrees();
        let deg_h = self.h.degrees();
        let both = bridges_g | bridges_h;
        let mut best = 0;
        let mut best_score = -1i64;
        for i in 0..self.biedges() {
            if both & (1 << i) != 0 && both != mask_full(self.biedges()) {
                continue;
            }
            let (a, b) = self.g.ends[i];
            let (c, d) = self.h.ends[i];
            let score = i64::from(deg_g[a as usize])
                + i64::from(deg_g[b as usize])
                + i64::from(deg_h[c as usize])
                + i64::from(deg_h[d as usize]);
            if score > best_score {
                best_score = score;
                best = i;
            }
        }
        best
    }

    /// Searches for a partition `E = E1 ∪ E2 ∪ {pivot}` splitting both
    /// sides into vertex-disjoint halves: on the left the pivot lives with
    /// `E1`, on the right with `E2`. Only biedges that are bridges on
    /// neither side qualify as the pivot. Returns the two biedge masks.
    fn untangle(&self, bridge_mask: u32) -> Option<(u32, u32)> {
        let m = self.biedges();
        let comp_g = self.component_of_slots(&self.g);
        let comp_h = self.component_of_slots(&self.h);
        for pivot in 0..m {
            if bridge_mask & (1 << pivot) != 0 {
                continue;
            }
            // Elements 0..m are slots; m and m+1 anchor E1 and E2.
            let anchor1 = m as u16;
            let anchor2 = m as u16 + 1;
            let mut uf = SmallUf::new(m as u16 + 2);
            let mut first_of_gcomp = [u16::MAX; 64];
            let mut first_of_hcomp = [u16::MAX; 64];
            for s in 0..m {
                if s == pivot {
                    continue;
                }
                let gcomp = comp_g[s] as usize;
                if gcomp == comp_g[pivot] as usize {
                    uf.union(s as u16, anchor1);
                } else if first_of_gcomp[gcomp] == u16::MAX {
                    first_of_gcomp[gcomp] = s as u16;
                } else {
                    uf.union(s as u16, first_of_gcomp[gcomp]);
                }
                let hcomp = comp_h[s] as usize;
                if hcomp == comp_h[pivot] as usize {
                    uf.union(s as u16, anchor2);
                } else if first_of_hcomp[hcomp] == u16::MAX {
                    first_of_hcomp[hcomp] = s as u16;
                } else {
                    uf.union(s as u16, first_of_hcomp[hcomp]);
                }
            }
            if uf.find(anchor1) == uf.find(anchor2) {
                continue;
            }
            let r1 = uf.find(anchor1);
            let r2 = uf.find(anchor2);
            let mut mask1 = 0u32;
            let mut mask2 = 0u32;
            let mut spare: Vec<u32> = Vec::new(); // free class masks
            let mut spare_root: Vec<u16> = Vec::new();
            for s in 0..m {
                if s == pivot {
                    continue;
                }
                let r = uf.find(s as u16);
                if r == r1 {
                    mask1 |= 1 << s;
                } else if r == r2 {
                    mask2 |= 1 << s;
                } else if let Some(pos) = spare_root.iter().position(|&x| x == r) {
                    spare[pos] |= 1 << s;
                } else {
                    spare_root.push(r);
                    spare.push(1 << s);
                }
            }
            if mask1 == 0 {
                match spare.pop() {
                    Some(extra) => mask1 = extra,
                    None => continue,
                }
            }
            if mask2 == 0 {
                match spare.pop() {
                    Some(extra) => mask2 = extra,
                    None => continue,
                }
            }
            for extra in spare {
                mask2 |= extra;
            }
            return Some((mask1, mask2));
        }
        None
    }

    /// Component id of each slot within one side.
    fn component_of_slots(&self, side: &Side) -> Vec<u16> {
        let mut uf = SmallUf::new(side.nv);
        for &(a, b) in &side.ends {
            uf.union(a, b);
        }
        side.ends.iter().map(|&(a, _)| uf.find(a)).collect()
    }

    /// Certificate of the colored incidence encoding; `swap` exchanges the
    /// side colors.
    fn certificate(&self, swap: bool) -> CanonicalKey {
        let (first, second) = if swap { (&self.h, &self.g) } else { (&self.g, &self.h) };
        let gn = first.nv as usize;
        let hn = second.nv as usize;
        let m = self.biedges();
        let mut colors = vec![0u32; gn];
        colors.extend(std::iter::repeat_n(1, hn));
        colors.extend(std::iter::repeat_n(2, m));
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); gn + hn + m];
        for i in 0..m {
            let enode = (gn + hn + i) as u32;
            let (a, b) = first.ends[i];
            let (c, d) = second.ends[i];
            for v in if a == b { vec![a] } else { vec![a, b] } {
                adj[enode as usize].push(v as u32);
                adj[v as usize].push(enode);
            }
            for w in if c == d { vec![c] } else { vec![c, d] } {
                adj[enode as usize].push((gn + w as usize) as u32);
                adj[gn + w as usize].push(enode);
            }
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
        }
        CanonicalKey::from_bytes(canon::certificate(&colors, &adj))
    }
}

fn keep_side(side: &Side, keep: u32, contract: Option<&mut SmallUf>) -> Side {
    let mut renamer = Renamer::new();
    let mut ends = Vec::with_capacity(keep.count_ones() as usize);
    match contract {
        Some(uf) => {
            for (i, &(a, b)) in side.ends.iter().enumerate() {
                if keep & (1 << i) != 0 {
                    ends.push((renamer.name(uf.find(a)), renamer.name(uf.find(b))));
                }
            }
        }
        None => {
            for (i, &(a, b)) in side.ends.iter().enumerate() {
                if keep & (1 << i) != 0 {
                    ends.push((renamer.name(a), renamer.name(b)));
                }
            }
        }
    }
    Side {
        nv: renamer.next,
        ends,
    }
}

/// Converts a bigraph into the dense working form, returning the biedge id
/// of every slot.
fn compact(b: &Bigraph) -> Result<(Node, Vec<EdgeId>)> {
    let m = b.biedge_count();
    if m > MAX_BIEDGES {
        return Err(Error::Unsupported(format!(
            "bigraphs with more than {MAX_BIEDGES} biedges are not supported (got {m})"
        )));
    }
    let slots: Vec<EdgeId> = b.biedges().collect();
    let side = |graph: &MultiGraph| -> Side {
        let mut map = std::collections::BTreeMap::new();
        let mut ends = Vec::with_capacity(m);
        for &e in &slots {
            let (a, b2) = graph.ends(e).expect("slot is a biedge").pair();
            let mut name = |v| {
                let next = map.len() as u16;
                *map.entry(v).or_insert(next)
            };
            ends.push((name(a), name(b2)));
        }
        Side {
            nv: map.len() as u16,
            ends,
        }
    };
    let node = Node {
        g: side(b.g()),
        h: side(b.h()),
    };
    Ok((node, slots))
}
