use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, MultiGraph};

/// A pair of multigraphs whose edges are identified through one shared set
/// of edge identifiers, the biedges. The vertex sets of the two sides are
/// unrelated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bigraph {
    g: MultiGraph,
    h: MultiGraph,
}

impl Bigraph {
    /// Pairs two graphs. Fails unless they carry exactly the same edge
    /// identifiers.
    pub fn new(g: MultiGraph, h: MultiGraph) -> Result<Self> {
        let gids: BTreeSet<_> = g.edge_ids().collect();
        let hids: BTreeSet<_> = h.edge_ids().collect();
        if gids != hids {
            let only_g: Vec<_> = gids.difference(&hids).map(|e| e.to_string()).collect();
            let only_h: Vec<_> = hids.difference(&gids).map(|e| e.to_string()).collect();
            return Err(Error::BiedgeMismatch(format!(
                "left-only edges [{}], right-only edges [{}]",
                only_g.join(", "),
                only_h.join(", ")
            )));
        }
        Ok(Bigraph { g, h })
    }

    /// The bigraph `(G, G)` with the identity pairing. `g` must have no
    /// self-loops.
    pub fn duplicate(g: &MultiGraph) -> Result<Self> {
        if let Some((id, _)) = g.edges().find(|(_, e)| e.is_loop()) {
            return Err(Error::SelfLoop(id));
        }
        Ok(Bigraph {
            g: g.clone(),
            h: g.clone(),
        })
    }

    pub fn g(&self) -> &MultiGraph {
        &self.g
    }

    pub fn h(&self) -> &MultiGraph {
        &self.h
    }

    pub fn biedges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.g.edge_ids()
    }

    pub fn biedge_count(&self) -> usize {
        self.g.edge_count()
    }

    pub fn contains_biedge(&self, e: EdgeId) -> bool {
        self.g.ends(e).is_ok()
    }

    /// Exchanges the two sides.
    pub fn swap(&self) -> Bigraph {
        Bigraph {
            g: self.h.clone(),
            h: self.g.clone(),
        }
    }

    pub fn has_self_loop(&self) -> bool {
        self.g.has_self_loop() || self.h.has_self_loop()
    }

    /// The dimension balance making the counting problem zero-dimensional:
    /// `dim(G) + dim(H) = |biedges| + 1`.
    pub fn is_pseudo_laman(&self) -> bool {
        self.g.dimension() + self.h.dimension() == self.biedge_count() + 1
    }

    /// Contracts `m` on the left side and deletes it on the right:
    /// `(G/m, H\m)`. The surviving biedges are the identifiers outside `m`.
    pub fn left_quot(&self, m: &BTreeSet<EdgeId>) -> Result<Bigraph> {
        Ok(Bigraph {
            g: self.g.contract(m)?,
            h: self.h.delete(m)?,
        })
    }

    /// Mirror of [`Bigraph::left_quot`]: `(G\m, H/m)`.
    pub fn right_quot(&self, m: &BTreeSet<EdgeId>) -> Result<Bigraph> {
        Ok(Bigraph {
            g: self.g.delete(m)?,
            h: self.h.contract(m)?,
        })
    }
}
